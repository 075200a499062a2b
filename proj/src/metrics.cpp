#include "svrpl/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace svrpl {

Vector exact_gradient_mapping(const CompositeProblem& problem, const Vector& x, double M,
                              double tol, int max_iters) {
  check_input(problem, x, "exact_gradient_mapping");
  if (!problem.reg().in_domain(x)) throw invalid_argument("exact_gradient_mapping: x outside dom h");
  ProxLinearModel model;
  model.x_bar = x;
  model.g_tilde = full_average_map(problem, x);
  model.J_tilde = full_average_jacobian(problem, x);
  model.M = M;
  model.outer = problem.outer();
  model.reg = problem.reg();
  const auto sol = solve(model, tol, max_iters);
  return M * (x - sol.x_plus);
}

Vector approx_gradient_mapping(const Vector& x, const Vector& x_next, double M) {
  if (x.size() != x_next.size()) throw dimension_error("approx_gradient_mapping: length mismatch");
  return M * (x - x_next);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_trace(std::span<const TraceRecord> records, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : records) {
    out << r.samples_g << ',' << r.samples_j << ',' << r.epoch << ',' << r.inner << ','
        << format_real(r.objective) << ',' << format_real(r.grad_map_sq) << ',' << r.wall_ms
        << '\n';
  }
}

void emit_trace(std::span<const TraceRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Data, "cannot open " + path.string() + " for writing");
  emit_trace(records, out);
  if (!out) throw Error(ErrorKind::Data, "write failed: " + path.string());
}

namespace {

template <typename T>
T parse_field(const std::string& s, std::size_t line) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (in.fail() || !(in >> std::ws).eof())
    throw Error(ErrorKind::Data, "trace line " + std::to_string(line) + ": bad field '" + s + "'");
  return v;
}

double parse_real(const std::string& s, std::size_t line) {
  // strtod accepts inf/nan, which %.17g can emit for a diverged run.
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw Error(ErrorKind::Data, "trace line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kTraceHeader) throw Error(ErrorKind::Data, "trace: unexpected header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7)
      throw Error(ErrorKind::Data, "trace line " + std::to_string(lineno) + ": expected 7 fields");
    TraceRecord r;
    r.samples_g = parse_field<std::uint64_t>(f[0], lineno);
    r.samples_j = parse_field<std::uint64_t>(f[1], lineno);
    r.epoch = parse_field<std::uint64_t>(f[2], lineno);
    r.inner = parse_field<std::uint64_t>(f[3], lineno);
    r.objective = parse_real(f[4], lineno);
    r.grad_map_sq = parse_real(f[5], lineno);
    r.wall_ms = parse_field<std::int64_t>(f[6], lineno);
    out.push_back(r);
  }
  if (lineno == 0) throw Error(ErrorKind::Data, "trace: missing header");
  return out;
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Data, "cannot open " + path.string());
  return read_trace(in);
}

double min_objective(std::span<const std::vector<TraceRecord>> traces) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : traces)
    for (const auto& r : t) best = std::min(best, r.objective);
  return best;
}

std::vector<TraceRecord> mean_trace(std::span<const std::vector<TraceRecord>> traces) {
  if (traces.empty()) return {};
  const std::size_t len = traces.front().size();
  for (const auto& t : traces)
    if (t.size() != len) throw invalid_argument("mean_trace: traces differ in length");
  const double count = static_cast<double>(traces.size());
  std::vector<TraceRecord> out(len);
  for (std::size_t i = 0; i < len; ++i) {
    double sg = 0, sj = 0, obj = 0, gm = 0, ms = 0;
    for (const auto& t : traces) {
      sg += static_cast<double>(t[i].samples_g);
      sj += static_cast<double>(t[i].samples_j);
      obj += t[i].objective;
      gm += t[i].grad_map_sq;
      ms += static_cast<double>(t[i].wall_ms);
    }
    auto& r = out[i];
    r.epoch = traces.front()[i].epoch;
    r.inner = traces.front()[i].inner;
    r.samples_g = static_cast<std::uint64_t>(sg / count);
    r.samples_j = static_cast<std::uint64_t>(sj / count);
    r.objective = obj / count;
    r.grad_map_sq = gm / count;
    r.wall_ms = static_cast<std::int64_t>(ms / count);
  }
  return out;
}

}  // namespace svrpl
