#include "svrpl/cli.hpp"

#include "svrpl/ingest.hpp"
#include "svrpl/metrics.hpp"
#include "svrpl/problems.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace svrpl::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(trim(part));
  return parts;
}

double to_real(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    throw invalid_argument(key + ": expected a number, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw invalid_argument(key + ": expected a nonnegative integer, got '" + v + "'");
  errno = 0;
  const auto x = std::strtoull(v.c_str(), nullptr, 10);
  if (errno == ERANGE) throw invalid_argument(key + ": value out of range");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw invalid_argument(key + ": expected true or false, got '" + v + "'");
}

std::uint64_t to_batch(const std::string& key, const std::string& v) {
  if (v == "full") return 0;
  const auto x = to_u64(key, v);
  if (x == 0) throw invalid_argument(key + ": batch size must be positive (or 'full')");
  return x;
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <typename M>
Field string_field(const char* key, M member, std::initializer_list<const char*> allowed = {}) {
  std::vector<const char*> opts(allowed);
  return {key,
          [=](RunConfig& c, const std::string& v) {
            if (!opts.empty()) {
              bool ok = std::any_of(opts.begin(), opts.end(), [&](const char* a) { return v == a; });
              if (!ok) {
                std::string list;
                for (const char* a : opts) list += std::string(list.empty() ? "" : ", ") + a;
                throw invalid_argument(std::string(key) + ": '" + v + "' is not one of " + list);
              }
            }
            c.*member = v;
          },
          [=](const RunConfig& c) -> std::optional<std::string> { return c.*member; }};
}

template <typename M>
Field real_field(const char* key, M member) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*member = to_real(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> { return format_real(c.*member); }};
}

template <typename M>
Field opt_real_field(const char* key, M member) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*member = to_real(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return format_real(*(c.*member));
          }};
}

template <typename M>
Field u64_field(const char* key, M member) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*member = to_u64(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.*member); }};
}

template <typename M>
Field opt_u64_field(const char* key, M member) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*member = to_u64(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return std::to_string(*(c.*member));
          }};
}

template <typename M>
Field batch_field(const char* key, M member) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*member = to_batch(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> {
            if (!(c.*member)) return std::nullopt;
            return *(c.*member) == 0 ? std::string("full") : std::to_string(*(c.*member));
          }};
}

template <typename M>
Field bool_field(const char* key, M member) {
  return {key, [=](RunConfig& c, const std::string& v) { c.*member = to_bool(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> {
            return std::string(c.*member ? "true" : "false");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      string_field("problem", &RunConfig::problem,
                   {"multiloss", "multiloss-smooth", "portfolio", "linear-least-squares",
                    "shifted-identity", "truncated-sg", "quadratic-bowl"}),
      string_field("dataset", &RunConfig::dataset, {"synthetic", "libsvm", "mnist", "returns"}),
      string_field("data_path", &RunConfig::data_path),
      {"labels",
       [](RunConfig& c, const std::string& v) {
         const auto parts = split(v, ',');
         if (parts.size() != 2) throw invalid_argument("labels: expected two labels 'pos,neg'");
         c.labels = std::make_pair(to_real("labels", parts[0]), to_real("labels", parts[1]));
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.labels) return std::nullopt;
         return format_real(c.labels->first) + "," + format_real(c.labels->second);
       }},
      u64_field("subsample", &RunConfig::subsample),
      u64_field("data_seed", &RunConfig::data_seed),
      u64_field("samples", &RunConfig::samples),
      u64_field("dim", &RunConfig::dim),
      opt_real_field("feature_scale", &RunConfig::feature_scale),
      bool_field("skip_header", &RunConfig::skip_header),
      real_field("beta", &RunConfig::beta),
      real_field("cvar_beta", &RunConfig::cvar_beta),
      real_field("rho", &RunConfig::rho),
      real_field("gamma", &RunConfig::gamma),
      string_field("regime", &RunConfig::regime, {"finite", "expectation"}),
      string_field("algorithm", &RunConfig::algorithm, {"pl", "spl", "svrpl", "sarahpl"}),
      string_field("schedule", &RunConfig::schedule,
                   {"manual", "svrg-finite", "minibatch", "sarah-expect-nonsmooth",
                    "sarah-finite-smooth", "sarah-expect-smooth", "adaptive"}),
      opt_real_field("M", &RunConfig::M),
      opt_real_field("epsilon", &RunConfig::epsilon),
      opt_real_field("objective_gap", &RunConfig::objective_gap),
      opt_real_field("sigma_g", &RunConfig::sigma_g),
      opt_real_field("sigma_gprime", &RunConfig::sigma_gprime),
      opt_u64_field("K", &RunConfig::K),
      opt_u64_field("tau", &RunConfig::tau),
      batch_field("anchor_g", &RunConfig::anchor_g),
      batch_field("anchor_j", &RunConfig::anchor_j),
      batch_field("batch_g", &RunConfig::batch_g),
      batch_field("batch_j", &RunConfig::batch_j),
      {"shared", [](RunConfig& c, const std::string& v) { c.shared = to_bool("shared", v); },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (!c.shared) return std::nullopt;
         return std::string(*c.shared ? "true" : "false");
       }},
      {"grid_M",
       [](RunConfig& c, const std::string& v) {
         c.grid_M.clear();
         for (const auto& p : split(v, ',')) c.grid_M.push_back(to_real("grid_M", p));
       },
       [](const RunConfig& c) -> std::optional<std::string> {
         if (c.grid_M.empty()) return std::nullopt;
         std::string s;
         for (double m : c.grid_M) s += (s.empty() ? "" : ",") + format_real(m);
         return s;
       }},
      u64_field("seed", &RunConfig::seed),
      u64_field("repeats", &RunConfig::repeats),
      u64_field("stride", &RunConfig::stride),
      string_field("out", &RunConfig::out),
      bool_field("wall_clock", &RunConfig::wall_clock),
      real_field("subproblem_tol", &RunConfig::subproblem_tol),
      u64_field("subproblem_iters", &RunConfig::subproblem_iters),
  };
  return table;
}

}  // namespace

void set_field(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(config, value);
      return;
    }
  }
  throw invalid_argument("unknown configuration key '" + key + "'");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_argument(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      set_field(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw invalid_argument(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return config;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_argument("cannot open config file " + path);
  return parse_config(in, path);
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    if (auto v = f.get(config)) out += std::string(f.key) + " = " + *v + "\n";
  }
  return out;
}

Setup build_setup(const RunConfig& c) {
  const auto samples = c.samples;
  const auto dim = static_cast<Eigen::Index>(c.dim);
  if (c.dataset == "synthetic" && (samples == 0 || dim == 0))
    throw invalid_argument("synthetic data needs samples and dim of at least 1");

  auto base_problem = [&]() -> Setup {
    if (c.problem == "multiloss" || c.problem == "multiloss-smooth") {
      MultiLossInstance inst;
      if (c.dataset == "synthetic") {
        inst = synthetic_multiloss(samples, dim, c.data_seed, 1.0, 0.1, c.beta);
      } else if (c.dataset == "libsvm" || c.dataset == "mnist") {
        if (c.data_path.empty()) throw invalid_argument("dataset " + c.dataset + " needs data_path");
        LibsvmOptions opts;
        opts.two_labels = c.labels;
        auto data = read_libsvm(std::filesystem::path(c.data_path), opts);
        if (c.subsample > 0) data = svrpl::subsample(data, c.subsample, c.data_seed);
        if (data.rows.empty()) throw Error(ErrorKind::Data, "no rows left in " + c.data_path);
        const double scale = c.feature_scale.value_or(c.dataset == "mnist" ? 1.0 / 255.0 : 1.0);
        inst = to_multiloss(data, c.beta, scale);
      } else {
        throw invalid_argument("problem " + c.problem + " cannot use dataset " + c.dataset);
      }
      const Vector x0 = Vector::Zero(inst.features.cols());
      return {c.problem == "multiloss" ? multiloss_oracle(inst) : multiloss_smooth_oracle(inst), x0};
    }
    if (c.problem == "portfolio") {
      PortfolioInstance inst;
      if (c.dataset == "synthetic") {
        inst = synthetic_portfolio(samples, dim, c.data_seed, c.cvar_beta, c.rho, c.gamma);
      } else if (c.dataset == "returns") {
        if (c.data_path.empty()) throw invalid_argument("dataset returns needs data_path");
        auto table = read_returns_csv(std::filesystem::path(c.data_path), c.skip_header);
        if (c.subsample > 0) table = svrpl::subsample(table, c.subsample, c.data_seed);
        if (table.values.rows() == 0) throw Error(ErrorKind::Data, "no rows in " + c.data_path);
        inst = to_portfolio(table, c.cvar_beta, c.rho, c.gamma);
      } else {
        throw invalid_argument("problem portfolio cannot use dataset " + c.dataset);
      }
      return {portfolio_oracle(inst), portfolio_start(inst)};
    }
    if (c.dataset != "synthetic")
      throw invalid_argument("problem " + c.problem + " only has synthetic data");
    SyntheticProblem sp = [&] {
      if (c.problem == "linear-least-squares") return linear_least_squares(samples, dim + 2, dim, c.data_seed);
      if (c.problem == "shifted-identity") return shifted_identity(samples, dim, c.data_seed);
      if (c.problem == "truncated-sg") return truncated_sg(samples, dim, c.data_seed);
      return quadratic_bowl(samples, 3, dim, c.data_seed);
    }();
    return {sp.problem, sp.x0};
  };

  Setup setup = base_problem();
  if (c.sigma_g || c.sigma_gprime) {
    auto k = setup.problem.constants();
    if (c.sigma_g) k.sigma_g = c.sigma_g;
    if (c.sigma_gprime) k.sigma_gprime = c.sigma_gprime;
    setup.problem = setup.problem.with_constants(k);
  }
  if (c.regime == "expectation")
    setup.problem = setup.problem.with_regime(uniform_expectation(setup.problem.num_components()));
  return setup;
}

Schedule build_schedule(const RunConfig& c, const CompositeProblem& problem) {
  const std::uint64_t N = problem.reference_tokens().size();
  const double M = c.M.value_or(problem.constants().default_M());
  auto full = [&](std::uint64_t v) { return v == 0 ? N : v; };
  auto need = [&](const std::optional<std::uint64_t>& v, const char* key) {
    if (!v) throw invalid_argument("schedule " + c.schedule + " with algorithm " + c.algorithm +
                                   " needs " + key);
    return *v;
  };

  Schedule s;
  if (c.schedule == "manual") {
    s.M = M;
    s.epsilon = c.epsilon;
    if (c.algorithm == "pl") {
      const auto T = c.K.value_or(1) * need(c.tau, "tau");
      s.epochs.push_back({T, {N, N, false}, {N, N, false}});
    } else if (c.algorithm == "spl") {
      if (c.K && *c.K != 1) throw invalid_argument("algorithm spl runs a single epoch; K must be 1");
      const BatchSpec b{full(need(c.batch_g, "batch_g")), full(need(c.batch_j, "batch_j")),
                        c.shared.value_or(false)};
      s.epochs.push_back({need(c.tau, "tau"), b, b});
    } else {
      EpochPlan plan;
      plan.tau = need(c.tau, "tau");
      plan.anchor = {full(need(c.anchor_g, "anchor_g")), full(need(c.anchor_j, "anchor_j")), false};
      plan.inner = {full(need(c.batch_g, "batch_g")), full(need(c.batch_j, "batch_j")),
                    c.shared.value_or(c.algorithm == "svrpl")};
      s.epochs.assign(need(c.K, "K"), plan);
    }
  } else {
    const std::string& name = c.schedule;
    const char* wants = name == "svrg-finite" ? "svrpl" : name == "minibatch" ? "spl" : "sarahpl";
    if (c.algorithm != wants)
      throw invalid_argument("schedule " + name + " drives algorithm " + wants + ", not " + c.algorithm);
    if (name != "adaptive" && !c.epsilon) throw invalid_argument("schedule " + name + " needs epsilon");
    if (!c.K && !c.objective_gap)
      throw invalid_argument("schedule " + name + " needs K or objective_gap");
    EpochRule rule{c.objective_gap, c.K.value_or(1)};
    const auto& k = problem.constants();
    if (name == "svrg-finite") s = schedule_svrg_finite(N, *c.epsilon, M, rule);
    else if (name == "minibatch") s = schedule_minibatch(k, *c.epsilon, M, rule);
    else if (name == "sarah-expect-nonsmooth") s = schedule_sarah_expect_nonsmooth(k, *c.epsilon, M, rule);
    else if (name == "sarah-finite-smooth") s = schedule_sarah_finite_smooth(N, *c.epsilon, M, rule);
    else if (name == "sarah-expect-smooth") s = schedule_sarah_expect_smooth(k, *c.epsilon, M, rule);
    else s = schedule_adaptive(k, need(c.K, "K"), M);
    for (auto& e : s.epochs) {
      if (c.tau) e.tau = *c.tau;
      if (c.anchor_g) e.anchor.size_g = full(*c.anchor_g);
      if (c.anchor_j) e.anchor.size_j = full(*c.anchor_j);
      if (c.batch_g) e.inner.size_g = full(*c.batch_g);
      if (c.batch_j) e.inner.size_j = full(*c.batch_j);
      if (c.shared) e.inner.shared = *c.shared;
    }
  }
  s.validate(problem);
  return s;
}

RunResult run_once(const RunConfig& c, const Setup& setup, std::uint64_t seed) {
  const Schedule s = build_schedule(c, setup.problem);
  if (c.stride == 0) throw invalid_argument("stride must be at least 1");
  RunOptions opts;
  opts.trace_stride = c.stride;
  opts.wall_clock = c.wall_clock;
  opts.subproblem_tol = c.subproblem_tol;
  opts.subproblem_iters = static_cast<int>(std::min<std::uint64_t>(c.subproblem_iters, 1u << 30));
  if (c.algorithm == "pl")
    return run_deterministic_pl(setup.problem, s.M, s.total_iterations(), setup.x0, opts);
  if (c.algorithm == "spl") return run_minibatch_pl(setup.problem, s, setup.x0, seed, opts);
  const Scheme scheme = c.algorithm == "svrpl" ? Scheme::SvrgCorrected : Scheme::Sarah;
  return run_svr_pl(setup.problem, scheme, s, setup.x0, seed, opts);
}

namespace {

std::filesystem::path with_tag(const std::string& out, const std::string& tag) {
  std::filesystem::path p(out);
  const auto ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  return p.parent_path() / (p.stem().string() + "." + tag + ext);
}

struct Batch {
  std::vector<std::vector<TraceRecord>> traces;
  double mean_final_objective = 0.0;
};

// Runs every repeat and writes traces under `out`; prints one line per seed.
Batch run_repeats(const RunConfig& c, const Setup& setup, const std::string& out,
                  std::ostream& log) {
  if (c.repeats == 0) throw invalid_argument("repeats must be at least 1");
  Batch batch;
  const double M = build_schedule(c, setup.problem).M;
  for (std::uint64_t r = 0; r < c.repeats; ++r) {
    const auto seed = c.seed + r;
    const RunResult res = run_once(c, setup, seed);
    const double fin_obj = objective_value(setup.problem, res.final_x);
    const double fin_gm = exact_gradient_mapping(setup.problem, res.final_x, M).squaredNorm();
    const double out_obj = objective_value(setup.problem, res.output_x);
    log << "seed=" << seed << " algorithm=" << c.algorithm << " M=" << format_real(M)
        << " final_objective=" << format_real(fin_obj) << " final_grad_map_sq=" << format_real(fin_gm)
        << " output_objective=" << format_real(out_obj) << " calls_g=" << res.total_calls_g
        << " calls_j=" << res.total_calls_j << "\n";
    batch.mean_final_objective += fin_obj / static_cast<double>(c.repeats);
    if (c.repeats == 1) emit_trace(res.trace, std::filesystem::path(out));
    else emit_trace(res.trace, with_tag(out, "seed" + std::to_string(seed)));
    batch.traces.push_back(res.trace);
  }
  if (c.repeats > 1) emit_trace(mean_trace(batch.traces), with_tag(out, "mean"));
  return batch;
}

}  // namespace

int cmd_run(const RunConfig& c, std::ostream& out) {
  const Setup setup = build_setup(c);
  run_repeats(c, setup, c.out, out);
  return kOk;
}

int check_problem(const CompositeProblem& problem, std::ostream& out, std::uint64_t seed,
                  int probe_pairs) {
  bool ok = true;
  const double radius = problem.constants().domain_radius.value_or(1.0);
  const auto jac = check_jacobian(problem, seed, 20, radius);
  out << (jac.passed ? "PASS" : "FAIL") << " jacobian points=" << jac.points
      << " worst_rel_error=" << format_real(jac.worst_rel_error) << "\n";
  ok = ok && jac.passed;
  for (const auto& p : probe_lipschitz(problem, seed + 1, probe_pairs, radius)) {
    out << (p.passed() ? "PASS" : "FAIL") << " " << p.name << " documented=" << format_real(p.documented)
        << " observed=" << format_real(p.observed) << "\n";
    ok = ok && p.passed();
  }
  return ok ? kOk : kNumerical;
}

int cmd_check(const RunConfig& c, std::ostream& out) {
  const Setup setup = build_setup(c);
  out << "problem=" << setup.problem.name() << " n=" << setup.problem.n() << " m=" << setup.problem.m()
      << "\n";
  return check_problem(setup.problem, out, c.seed);
}

int cmd_grid(const RunConfig& c, std::ostream& out) {
  if (c.grid_M.empty()) throw invalid_argument("grid needs a list of M values (grid_M or --M-list)");
  const Setup setup = build_setup(c);
  double best_M = c.grid_M.front();
  double best = std::numeric_limits<double>::infinity();
  for (double M : c.grid_M) {
    RunConfig run = c;
    run.M = M;
    const auto path = with_tag(c.out, "M" + format_real(M)).string();
    const Batch b = run_repeats(run, setup, path, out);
    out << "M=" << format_real(M) << " mean_final_objective=" << format_real(b.mean_final_objective)
        << "\n";
    if (b.mean_final_objective < best) {
      best = b.mean_final_objective;
      best_M = M;
    }
  }
  out << "best_M=" << format_real(best_M) << " mean_final_objective=" << format_real(best) << "\n";
  return kOk;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic variance-reduced prox-linear methods"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> assignments;
  std::optional<std::uint64_t> seed, repeats, stride;
  std::optional<std::string> out_path;
  std::string m_list;
  bool print_config = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--set", assignments, "override one key, as key=value (repeatable)");
    sub->add_option("--seed", seed, "first run seed");
    sub->add_option("--out", out_path, "trace CSV path");
    sub->add_option("--repeats", repeats, "number of seeded repetitions");
    sub->add_option("--stride", stride, "iterations between trace rows");
    sub->add_flag("--print-config", print_config, "print the effective configuration and exit");
  };
  auto* run = app.add_subcommand("run", "run one configured algorithm and write traces");
  auto* check = app.add_subcommand("check", "finite-difference and Lipschitz checks for a problem");
  auto* grid = app.add_subcommand("grid", "sweep M and report the best final objective");
  add_common(run);
  add_common(check);
  add_common(grid);
  grid->add_option("--M-list", m_list, "comma-separated M values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    // Precedence: defaults, then the config file, then --set, then flags.
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& a : assignments) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw invalid_argument("--set expects key=value, got '" + a + "'");
      set_field(config, trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
    }
    if (seed) config.seed = *seed;
    if (repeats) config.repeats = *repeats;
    if (stride) config.stride = *stride;
    if (out_path) config.out = *out_path;
    if (!m_list.empty()) set_field(config, "grid_M", m_list);

    if (print_config) {
      out << serialize_config(config);
      return kOk;
    }
    if (run->parsed()) return cmd_run(config, out);
    if (check->parsed()) return cmd_check(config, out);
    return cmd_grid(config, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Data: return kData;
      case ErrorKind::Numerical: return kNumerical;
      default: return kUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace svrpl::cli
