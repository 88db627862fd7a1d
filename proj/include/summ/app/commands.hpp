#pragma once

// Subcommand implementations. Each returns a process exit status and writes
// human-readable progress to `log` and errors to `err`.
//
// Exit status: 0 success, 1 I/O or unexpected failure, 2 configuration or
// domain error, 3 divergence, 4 missing data, 5 verification failure.

#include <atomic>
#include <condition_variable>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "summ/app/acceptance.hpp"
#include "summ/app/experiment.hpp"
#include "summ/io/metrics.hpp"

namespace summ::app {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDiverged = 3,
  kDataMissing = 4,
  kVerifyFailed = 5,
};

using Json = nlohmann::ordered_json;

namespace detail {

inline Json convergence_json(const ConvergenceReport& c) {
  Json j;
  j["last_sq"] = c.last_sq;
  j["min_sq"] = c.min_sq;
  j["avg_sq"] = c.avg_sq;
  j["argmin_t"] = c.argmin_t;
  j["terminal_loss"] = c.terminal_loss ? Json(*c.terminal_loss) : Json(nullptr);
  j["min_le_avg"] = c.min_le_avg;
  j["min_le_last"] = c.min_le_last;
  j["seeds"] = c.seeds;
  j["checkpoints"] = c.checkpoints.size();
  return j;
}

inline Json descent_json(const DescentProbeReport& d) {
  Json j;
  j["label"] = d.label;
  j["excursions"] = d.excursions;
  j["excursion_total"] = d.excursion_total;
  j["excursion_first_half"] = d.excursion_first_half;
  j["excursion_second_half"] = d.excursion_second_half;
  j["gap_to_f_star"] = d.gap_to_f_star;
  j["bounded"] = d.bounded;
  j["stabilizing"] = d.stabilizing;
  j["summary"] = d.summary;
  return j;
}

inline Json schedule_json(const ScheduleSpec& s) {
  Json j;
  j["alpha"] = s.alpha;
  j["K"] = s.K;
  j["p"] = s.p;
  j["compliant"] = is_theorem_compliant(s);
  return j;
}

inline ProblemMetadata metadata_of(const Experiment& exp) {
  return exp.problem() ? exp.problem()->metadata() : ProblemMetadata{};
}

inline Json run_json(const Experiment& exp, const RunArtifacts& art) {
  const auto& traj = art.result.trajectory;
  Json j;
  j["run_id"] = art.run_id;
  j["problem"] = exp.config().problem_kind;
  j["formulation"] = std::string(to_string(traj.formulation));
  j["mu"] = traj.mu;
  j["lambda"] = traj.lambda;
  j["seed"] = art.seed;
  j["T"] = exp.horizon();
  j["schedule"] = schedule_json(exp.schedule());
  j["output_mode"] = exp.config().output_mode;
  j["output_index"] = art.result.output_index;
  const auto& out_step = step_at(traj, art.result.output_index);
  j["output_grad_norm"] = out_step.grad_norm ? Json(*out_step.grad_norm) : Json(nullptr);
  j["convergence"] = convergence_json(convergence_report({traj}));
  j["descent_probe"] = descent_json(descent_probe({traj}, metadata_of(exp)));
  j["region_exits"] = art.region_exits;
  if (art.test_accuracy) j["test_accuracy"] = *art.test_accuracy;
  j["evaluation"] = traj.note;
  return j;
}

inline void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MetricsError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw MetricsError("write failed for '" + path.string() + "'");
}

/// Maps the library's exception types onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const DataMissingError& e) {
    err << "error: " << e.what() << '\n';
    return kDataMissing;
  } catch (const DivergenceError& e) {
    err << "error: run diverged: " << e.what() << '\n';
    return kDiverged;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IdxFormatError& e) {
    err << "error: " << e.what() << '\n';
    return kDataMissing;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace detail

inline std::filesystem::path summary_path_for(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".summary.json");
  return p;
}

/// One run with the given seed. Writes the metrics CSV to `out` and a JSON
/// summary next to it.
inline int cmd_run(const std::string& config_path, const std::string& out, std::uint64_t seed,
                   const std::vector<std::string>& overrides = {}, std::ostream& log = std::cout,
                   std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const RunConfig cfg = load_config(config_path, overrides);
    if (cfg.lambdas.size() != 1) {
      throw ConfigError(config_path + ": run takes a single optimizer.lambda (got " +
                        std::to_string(cfg.lambdas.size()) + "); use sweep or --set optimizer.lambda=<value>");
    }
    const Experiment exp(cfg);
    const auto art = exp.run(cfg.lambdas.front(), seed);
    write_metrics(rows_from_trajectory(art.result.trajectory, art.run_id), out);
    const Json summary = detail::run_json(exp, art);
    detail::write_json(summary, summary_path_for(out));

    const auto& conv = summary["convergence"];
    log << art.run_id << ": T=" << exp.horizon() << " last_sq=" << conv["last_sq"].get<double>()
        << " min_sq=" << conv["min_sq"].get<double>() << " avg_sq=" << conv["avg_sq"].get<double>();
    if (art.test_accuracy) log << " test_accuracy=" << *art.test_accuracy;
    log << "\nwrote " << out << " and " << summary_path_for(out).string() << '\n';
    return static_cast<int>(kOk);
  });
}

/// Parses "0,0.5,1" into numbers.
inline std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in lambda list '" + text + "'");
    item = item.substr(first, last - first + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw ConfigError("bad lambda '" + item + "' in list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("lambda list is empty");
  return out;
}

struct SweepRequest {
  std::string config_path;
  std::string out_dir;
  std::optional<std::vector<double>> lambdas;  ///< overrides optimizer.lambda
  std::optional<std::int64_t> seeds;           ///< overrides run.seeds with 0 .. n-1
  std::vector<std::string> overrides;
  unsigned workers = 0;  ///< 0: hardware concurrency
};

/// Cross product lambda x seeds. Runs execute on a worker pool; this thread
/// is the only writer of output files.
inline int cmd_sweep(const SweepRequest& req, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    RunConfig cfg = load_config(req.config_path, req.overrides);
    if (req.lambdas) cfg.lambdas = *req.lambdas;
    if (req.seeds) {
      if (*req.seeds < 1) throw ConfigError("--seeds must be >= 1");
      cfg.seeds.clear();
      for (std::int64_t s = 0; s < *req.seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    // Pre-flight: every lambda must be valid before anything runs.
    for (double l : cfg.lambdas) {
      try {
        (void)cfg.momentum(l);
      } catch (const DomainError& e) {
        throw DomainError("sweep aborted before any run: " + std::string(e.what()));
      }
    }
    const std::filesystem::path dir(req.out_dir);
    std::filesystem::create_directories(dir);
    const Experiment exp(cfg);

    struct Task {
      std::size_t lambda_index;
      double lambda;
      std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < cfg.lambdas.size(); ++i)
      for (auto s : cfg.seeds) tasks.push_back({i, cfg.lambdas[i], s});

    struct Done {
      std::size_t task;
      std::optional<RunArtifacts> art;
      std::exception_ptr error;
    };
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Done> finished;
    std::atomic<std::size_t> next{0};

    const unsigned n_workers = std::max(
        1u, std::min<unsigned>(req.workers ? req.workers : std::thread::hardware_concurrency(),
                               static_cast<unsigned>(tasks.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          Done d{i, std::nullopt, nullptr};
          try {
            d.art = exp.run(tasks[i].lambda, tasks[i].seed);
          } catch (...) {
            d.error = std::current_exception();
          }
          {
            std::lock_guard lock(mu);
            finished.push_back(std::move(d));
          }
          cv.notify_one();
        }
      });
    }

    std::vector<std::optional<RunArtifacts>> results(tasks.size());
    std::exception_ptr first_error;
    for (std::size_t received = 0; received < tasks.size(); ++received) {
      Done d;
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return !finished.empty(); });
        d = std::move(finished.front());
        finished.pop_front();
      }
      const auto& task = tasks[d.task];
      if (d.error) {
        try {
          std::rethrow_exception(d.error);
        } catch (const std::exception& e) {
          err << "run " << make_run_id(task.lambda, task.seed) << " failed: " << e.what() << '\n';
        }
        if (!first_error) first_error = d.error;
        continue;
      }
      const auto& art = *d.art;
      const auto csv = dir / ("run_" + art.run_id + ".csv");
      write_metrics(rows_from_trajectory(art.result.trajectory, art.run_id), csv.string());
      log << "[" << received + 1 << "/" << tasks.size() << "] " << art.run_id << " -> " << csv.string() << '\n';
      results[d.task] = std::move(d.art);
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);

    // Aggregates, in lambda order.
    std::ofstream agg(dir / "aggregate.csv");
    if (!agg) throw MetricsError("cannot open '" + (dir / "aggregate.csv").string() + "' for writing");
    agg << "lambda,metric,t,mean,std,n_seeds\n";
    Json summary;
    summary["config"] = req.config_path;
    summary["problem"] = cfg.problem_kind;
    summary["formulation"] = std::string(to_string(cfg.formulation));
    summary["mu"] = cfg.mu;
    summary["T"] = exp.horizon();
    summary["schedule"] = detail::schedule_json(exp.schedule());
    summary["seeds"] = cfg.seeds;
    summary["evaluation"] = exp.evaluation_note();
    summary["lambdas"] = Json::array();
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
      std::vector<TrajectoryRecord> runs;
      std::vector<double> accs;
      std::size_t exits = 0;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].lambda_index != li) continue;
        runs.push_back(results[i]->result.trajectory);
        if (results[i]->test_accuracy) accs.push_back(*results[i]->test_accuracy);
        exits += results[i]->region_exits;
      }
      for (Metric m : {Metric::loss, Metric::full_loss, Metric::grad_norm}) {
        const auto curve = aggregate_seeds(runs, m);
        for (std::size_t k = 0; k < curve.t.size(); ++k) {
          std::string line;
          summ::detail::append_double(line, cfg.lambdas[li]);
          line += ',';
          line += to_string(m);
          line += ',' + std::to_string(curve.t[k]) + ',';
          summ::detail::append_double(line, curve.mean[k]);
          line += ',';
          summ::detail::append_double(line, curve.stddev[k]);
          line += ',' + std::to_string(curve.seeds) + '\n';
          agg << line;
        }
      }
      Json entry;
      entry["lambda"] = cfg.lambdas[li];
      entry["convergence"] = detail::convergence_json(convergence_report(runs));
      entry["descent_probe"] = detail::descent_json(descent_probe(runs, detail::metadata_of(exp)));
      entry["region_exits"] = exits;
      if (!accs.empty()) {
        double mean = 0.0;
        for (double a : accs) mean += a / static_cast<double>(accs.size());
        entry["test_accuracy_mean"] = mean;
        entry["test_accuracy_min"] = *std::min_element(accs.begin(), accs.end());
      }
      summary["lambdas"].push_back(entry);
    }
    agg.close();
    if (!agg) throw MetricsError("write failed for aggregate.csv");
    detail::write_json(summary, dir / "summary.json");
    log << "wrote " << tasks.size() << " runs, aggregate.csv and summary.json to " << dir.string() << '\n';
    return static_cast<int>(kOk);
  });
}

inline int cmd_verify(Scope scope, const std::string& data_dir = {}, std::ostream& log = std::cout,
                      std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto results = run_acceptance(scope, data_dir);
    print_results(log, results);
    return static_cast<int>(all_passed(results) ? kOk : kVerifyFailed);
  });
}

}  // namespace summ::app
