#pragma once

#include "svrpl/driver.hpp"
#include "svrpl/problem.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace svrpl::cli {

enum ExitStatus : int {
  kOk = 0,
  kUsage = 1,      // bad flags or configuration
  kData = 2,       // unreadable or malformed data
  kNumerical = 3,  // solver failure or a failed check
};

// Everything a run needs. Serialized as "key = value" lines; '#' starts a
// comment. Batch sizes of 0 mean the full data set and print as "full".
struct RunConfig {
  // Problem
  std::string problem = "multiloss";  // multiloss | multiloss-smooth | portfolio |
                                      // linear-least-squares | shifted-identity |
                                      // truncated-sg | quadratic-bowl
  std::string dataset = "synthetic";  // synthetic | libsvm | mnist | returns
  std::string data_path;
  std::optional<std::pair<double, double>> labels;  // two-label filter, first -> +1
  std::uint64_t subsample = 0;                      // 0 keeps every row
  std::uint64_t data_seed = 1;
  std::uint64_t samples = 2000;  // synthetic N
  std::uint64_t dim = 20;        // synthetic feature count / assets
  std::optional<double> feature_scale;  // default 1, or 1/255 for mnist
  bool skip_header = false;
  double beta = 0.0;       // l1 weight of the multiloss problem
  double cvar_beta = 0.1;  // CVaR level
  double rho = 5.0;
  double gamma = 1e-3;
  std::string regime = "finite";  // finite | expectation

  // Algorithm and schedule
  std::string algorithm = "svrpl";  // pl | spl | svrpl | sarahpl
  std::string schedule = "manual";  // manual | svrg-finite | minibatch |
                                    // sarah-expect-nonsmooth | sarah-finite-smooth |
                                    // sarah-expect-smooth | adaptive
  std::optional<double> M;
  std::optional<double> epsilon;
  std::optional<double> objective_gap;
  std::optional<double> sigma_g;
  std::optional<double> sigma_gprime;
  std::optional<std::uint64_t> K;
  std::optional<std::uint64_t> tau;
  std::optional<std::uint64_t> anchor_g;
  std::optional<std::uint64_t> anchor_j;
  std::optional<std::uint64_t> batch_g;
  std::optional<std::uint64_t> batch_j;
  std::optional<bool> shared;
  std::vector<double> grid_M;

  // Run
  std::uint64_t seed = 1;
  std::uint64_t repeats = 1;
  std::uint64_t stride = 1;
  std::string out = "trace.csv";
  bool wall_clock = false;
  double subproblem_tol = 1e-9;
  std::uint64_t subproblem_iters = 100000;

  bool operator==(const RunConfig&) const = default;
};

// Applies one "key = value" assignment; unknown keys and bad values throw.
void set_field(RunConfig& config, const std::string& key, const std::string& value);

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Problem, start point and schedule the configuration describes.
struct Setup {
  CompositeProblem problem;
  Vector x0;
};
Setup build_setup(const RunConfig& config);
Schedule build_schedule(const RunConfig& config, const CompositeProblem& problem);

// One run of the configured algorithm.
RunResult run_once(const RunConfig& config, const Setup& setup, std::uint64_t seed);

int cmd_run(const RunConfig& config, std::ostream& out);
int cmd_check(const RunConfig& config, std::ostream& out);
int cmd_grid(const RunConfig& config, std::ostream& out);

// Finite-difference and Lipschitz checks on an arbitrary problem.
int check_problem(const CompositeProblem& problem, std::ostream& out, std::uint64_t seed,
                  int probe_pairs = 1000);

// Full command line: "<prog> run|check|grid [flags]".
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svrpl::cli
