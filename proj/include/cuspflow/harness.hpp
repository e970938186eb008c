#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cuspflow/harnack.hpp"
#include "cuspflow/solver.hpp"

namespace cuspflow {
namespace harness {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitResult {
  double p = kNaN;   // exponent of value ~ c * t^{-p}
  double c = kNaN;
  double r2 = kNaN;
};

/// Least-squares line on (log t, log value) over samples inside the window.
/// Requires >= 5 usable samples, all with positive values.
FitResult rate_fit(const std::vector<std::pair<double, double>>& samples, double t_lo,
                   double t_hi);

struct ExperimentConfig {
  std::string experiment;  // lemmas | validate | contract
  std::vector<double> r0_list;
  int grid_n = 4096;
  std::vector<double> r_out_list = {0.9};
  std::vector<double> t_samples;           // empty: suite defaults
  double t_fit_lo = -1.0, t_fit_hi = -1.0; // < 0: window from the cap's initial curvature
  double alpha = 1.05;
  double mu = 0.12;
  double c1 = 40.0;
  unsigned seed = 1;
  int threads = 0;  // 0: CUSPFLOW_THREADS env var or hardware concurrency
  std::string out_dir = ".";
  std::string format = "both";  // csv | json | both

  void validate() const;
};

/// Flat key=value file with '#' comments; unknown keys are rejected.
/// Radii accept either plain floats or "e-30" for exp(-30).
ExperimentConfig load_config_file(const std::string& path);
double parse_radius_token(const std::string& token);
std::vector<double> parse_list(const std::string& csv, bool radii);

struct AssertionResult {
  std::string name;
  bool passed;
  std::string detail;  // measured value(s), human readable
};

struct ReportRow {
  double t = kNaN;
  double v0 = kNaN;
  double t_v0 = kNaN;
  double max_k = kNaN;
  double t2_max_k = kNaN;
  double witness_k0 = kNaN;
  double t2_witness = kNaN;
  double liyau_sup = kNaN;      // re-based (t - t1) max K/v when inside a window
  double annulus_dev = kNaN;    // sup_{0.5 <= r <= 0.8} |K + 1/(1+2t)|
  double sandwich_lo = kNaN;    // min over nodes of v - (1/2)log((1+2t) h~)
  double sandwich_hi = kNaN;    // min over r > 0 nodes of (1/2)log((1+2t) h) - v
  double max_v_half = kNaN;     // max v over r <= 1/2 (JSON only)
  std::string witness_note;     // reason when witness_k0 is NaN
};

// Full parameterisation of one contracting-cusp run.
struct ContractSpec {
  double r0 = 9.357622968840175e-14;  // e^{-30}
  int grid_n = 4096;
  double r_out = 0.9;
  double alpha = 1.05;
  double mu = 0.12;
  double t_fit_lo = -1.0, t_fit_hi = 0.2;  // t_fit_lo < 0: 3/sqrt(initial max K)
  std::vector<double> fit_samples;         // empty: 16 log-spaced in the window
  std::vector<double> liyau_t1;            // window base times (may be empty)
  std::vector<double> extra_samples;       // appended (e.g. 0.3, 0.5 for smoothing)
  bool compute_witness = true;
  bool compute_annulus = true;
  solver::SolverConfig solver_cfg;
};

struct ContractOutcome {
  ContractSpec spec;                    // with the resolved fit window
  std::vector<ReportRow> rows;
  FitResult fit;                        // max K ~ c t^{-p} over the window
  double v_upper_c = kNaN;                // max over window rows of (max v on B_1/2 - 1/t)
  double smoothing_c = kNaN;            // max over t <= 0.5 rows of (2 max v - 2/t)
  double liyau_sup = kNaN;
  double liyau_hyp_margin = kNaN;
  std::vector<double> liyau_windows;
  double dynamic_grad_sup = kNaN;       // sup |grad log v|_u^2 on B_1/2, t <= 1
  solver::RunStats stats;
  std::vector<solver::FlowState> samples;
};

ContractOutcome run_contract(const ContractSpec& spec);

/// Lemma battery (no PDE): the closed-form checks with measured violations.
std::vector<AssertionResult> lemma_battery(double alpha);

struct ValidationOutcome {
  double cigar_max_err;                 // N = 4096, t = 0.1
  double sphere_max_err;
  solver::ConvergenceResult cigar_orders;
  solver::ConvergenceResult sphere_orders;
  std::vector<AssertionResult> assertions;
};

ValidationOutcome run_validation(int grid_n, const std::vector<int>& study_sizes);

struct RunEntry {
  double r0;
  double r_out;
  int grid_n;
  std::vector<ReportRow> rows;
  FitResult fit;
  double fit_window[2] = {kNaN, kNaN};
  double v_upper_c = kNaN;
  double smoothing_c = kNaN;
  double liyau_sup = kNaN;
  double dynamic_grad_sup = kNaN;
  long steps = 0;
  long newton_iters = 0;
  double dt_smallest = kNaN;
  double dt_largest = kNaN;
};

struct RunReport {
  int schema = 1;
  std::string experiment;
  std::map<std::string, std::string> config_echo;
  std::vector<RunEntry> runs;
  std::vector<AssertionResult> assertions;
  std::string first_failure;  // empty when everything passed
};

RunReport run_experiment(const ExperimentConfig& cfg);

/// report.json and/or series.csv (rows of the first run); UTF-8, LF,
/// shortest round-trip floats, deterministic byte-for-byte.
void emit_report(const RunReport& report, const std::string& format,
                 const std::string& out_dir);

std::string to_json_string(const RunReport& report);
std::string to_csv_string(const RunReport& report);

int exit_code(const RunReport& report);  // 0 pass, 1 any assertion failed

/// Bounded-concurrency map over [0, n); order-independent tasks only.
void parallel_for(int n, int max_threads, const std::function<void(int)>& task);
int resolve_threads(int configured);

}  // namespace harness
}  // namespace cuspflow
