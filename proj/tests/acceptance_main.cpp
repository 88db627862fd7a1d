// Acceptance gate: one PASS/FAIL line per criterion.
//   summ_acceptance [fast|full] [mnist-dir]

#include <iostream>

#include "summ/app/acceptance.hpp"

int main(int argc, char** argv) {
  const auto scope = summ::app::parse_scope(argc > 1 ? argv[1] : "fast");
  const std::string data_dir = argc > 2 ? argv[2] : "";
  const auto results = summ::app::run_acceptance(scope, data_dir);
  summ::app::print_results(std::cout, results);
  return summ::app::all_passed(results) ? 0 : 1;
}
