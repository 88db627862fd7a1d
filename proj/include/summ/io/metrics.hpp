#pragma once

// Per-step metrics CSV. Header (exact):
//   run_id,seed,formulation,mu,lambda,t,eta,train_loss,grad_norm,region_flag,wall_ms
// Doubles are written in shortest round-trip form; an empty grad_norm field
// means no full-gradient evaluation at that step.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "summ/trajectory.hpp"

namespace summ {

inline constexpr std::string_view kMetricsHeader =
    "run_id,seed,formulation,mu,lambda,t,eta,train_loss,grad_norm,region_flag,wall_ms";

struct MetricsRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string formulation;
  double mu = 0.0;
  double lambda = 0.0;
  std::int64_t t = 0;
  double eta = 0.0;
  double train_loss = 0.0;
  std::optional<double> grad_norm;
  int region_flag = 0;
  double wall_ms = 0.0;

  bool operator==(const MetricsRow&) const = default;
};

class MetricsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::vector<MetricsRow> rows_from_trajectory(const TrajectoryRecord& traj, const std::string& run_id) {
  std::vector<MetricsRow> rows;
  rows.reserve(traj.steps.size());
  for (const auto& s : traj.steps) {
    rows.push_back(MetricsRow{run_id, traj.seed, std::string(to_string(traj.formulation)), traj.mu, traj.lambda,
                              s.t, s.eta, s.loss, s.grad_norm, s.outside_region ? 1 : 0, s.wall_ms});
  }
  return rows;
}

namespace detail {

inline void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw MetricsError("cannot format value");
  out.append(buf, ptr);
}

template <class T>
T parse_field(std::string_view field, const std::string& origin, std::size_t line, const char* name) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw MetricsError(origin + ":" + std::to_string(line) + ": bad " + name + " '" + std::string(field) + "'");
  }
  return v;
}

inline bool valid_run_id(std::string_view id) {
  return !id.empty() && id.find_first_of(",\"\n\r") == std::string_view::npos;
}

}  // namespace detail

/// Append-only writer enforcing the row contract: rows of one run are
/// contiguous and t strictly increases within a run.
class MetricsWriter {
public:
  explicit MetricsWriter(const std::string& path) : path_(path), out_(path, std::ios::trunc) {
    if (!out_) throw MetricsError("cannot open '" + path + "' for writing");
    out_ << kMetricsHeader << '\n';
    check_stream();
  }

  MetricsWriter(const MetricsWriter&) = delete;
  MetricsWriter& operator=(const MetricsWriter&) = delete;

  ~MetricsWriter() {
    if (out_.is_open()) out_.close();
  }

  void write(const MetricsRow& r) {
    if (!detail::valid_run_id(r.run_id)) throw MetricsError("invalid run_id '" + r.run_id + "'");
    if (r.run_id != current_) {
      if (finished_.contains(r.run_id)) {
        throw MetricsError("rows for run '" + r.run_id + "' are interleaved with another run");
      }
      if (!current_.empty()) finished_.insert(current_);
      current_ = r.run_id;
      last_t_.reset();
    }
    if (last_t_ && r.t <= *last_t_) {
      throw MetricsError("step " + std::to_string(r.t) + " of run '" + r.run_id + "' does not increase");
    }
    last_t_ = r.t;

    std::string line = r.run_id;
    line += ',';
    line += std::to_string(r.seed);
    line += ',';
    line += r.formulation;
    for (double v : {r.mu, r.lambda}) {
      line += ',';
      detail::append_double(line, v);
    }
    line += ',';
    line += std::to_string(r.t);
    for (double v : {r.eta, r.train_loss}) {
      line += ',';
      detail::append_double(line, v);
    }
    line += ',';
    if (r.grad_norm) detail::append_double(line, *r.grad_norm);
    line += ',';
    line += std::to_string(r.region_flag);
    line += ',';
    detail::append_double(line, r.wall_ms);
    line += '\n';
    out_ << line;
    check_stream();
  }

  void close() {
    out_.flush();
    check_stream();
    out_.close();
  }

private:
  void check_stream() {
    if (!out_) throw MetricsError("write failed for '" + path_ + "'");
  }

  std::string path_;
  std::ofstream out_;
  std::string current_;
  std::set<std::string> finished_;
  std::optional<std::int64_t> last_t_;
};

inline void write_metrics(const std::vector<MetricsRow>& rows, const std::string& path) {
  MetricsWriter w(path);
  for (const auto& r : rows) w.write(r);
  w.close();
}

inline std::vector<MetricsRow> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MetricsError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw MetricsError(path + ":1: missing or unexpected header");
  }
  std::vector<MetricsRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 11) throw MetricsError(path + ":" + std::to_string(lineno) + ": expected 11 fields");
    MetricsRow r;
    r.run_id = std::string(f[0]);
    r.seed = detail::parse_field<std::uint64_t>(f[1], path, lineno, "seed");
    r.formulation = std::string(f[2]);
    r.mu = detail::parse_field<double>(f[3], path, lineno, "mu");
    r.lambda = detail::parse_field<double>(f[4], path, lineno, "lambda");
    r.t = detail::parse_field<std::int64_t>(f[5], path, lineno, "t");
    r.eta = detail::parse_field<double>(f[6], path, lineno, "eta");
    r.train_loss = detail::parse_field<double>(f[7], path, lineno, "train_loss");
    if (!f[8].empty()) r.grad_norm = detail::parse_field<double>(f[8], path, lineno, "grad_norm");
    r.region_flag = detail::parse_field<int>(f[9], path, lineno, "region_flag");
    r.wall_ms = detail::parse_field<double>(f[10], path, lineno, "wall_ms");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace summ
