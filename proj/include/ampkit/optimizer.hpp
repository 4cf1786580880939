#pragma once

#include <functional>

#include "ampkit/metrics.hpp"

namespace ampkit {

struct SpecSet {
  double gain_min_db = 60.0;
  double gbw_min_hz = 0.5e6;
  double pm_lo_deg = 45.0;
  double pm_hi_deg = 90.0;
  double power_max_w = 250e-6;
  double pm_opt_lo_deg = 55.0;  // tightened band used during optimization
  double pm_opt_hi_deg = 65.0;

  void validate() const;  // throws unless the opt band sits inside the PM band
};

SpecSet parse_specs(const std::string& text);  // key=value lines, '#' comments
std::string serialize_specs(const SpecSet& s);

/// One scalar functional over the log-space variables, evaluable with plain
/// doubles or with dual numbers for exact gradients.
struct ScalarFn {
  std::string name;
  std::function<double(const std::vector<double>&)> value;
  std::function<Dual(const std::vector<Dual>&)> dual;
};

template <class F>
ScalarFn make_fn(std::string name, F f) {
  return {std::move(name), f, f};
}

struct OptProblem {
  std::vector<std::string> var_names;  // free variables, topology order
  std::vector<double> lo, hi;          // log-space box
  ScalarFn objective;                  // minimized: -log(FoM)
  std::vector<ScalarFn> constraints;   // g(u) <= 0
  std::vector<std::string> constraint_texts;
  std::shared_ptr<const SymbolicModel> model;
  std::shared_ptr<const MetricFormulas> formulas;

  std::string dump() const;
};

enum class OptStatus { feasible_optimum, infeasible, max_iter };
const char* to_string(OptStatus s);

struct OptResult {
  OptStatus status = OptStatus::infeasible;
  std::map<std::string, double> x_star;
  PredictedMetrics predicted;
  std::vector<std::string> active_constraints;
  int starts_tried = 0;
  int best_start = -1;
  double objective = 0;      // -log(FoM) at x*
  double fom = 0;
  double max_violation = 0;  // over normalized constraints at x*
  double kkt_residual = 0;
};

struct OptOptions {
  uint64_t seed = 1;
  int n_starts = 16;
  int max_outer = 50;
  int max_inner = 500;
  double kkt_tol = 1e-8;
  bool parallel = true;  // OpenMP across starts when available
};

/// Objective = FoM; constraints = specs (with the tightened PM band) plus
/// every hypothesis inequality; variables are log-transformed.
OptProblem build_problem(const MetricFormulas& formulas, const std::vector<Hypothesis>& hyps,
                         const SpecSet& specs, std::shared_ptr<const SymbolicModel> model);

OptResult solve(const OptProblem& p, const OptOptions& opt);
/// Reference implementation without the OpenMP start loop; identical results.
OptResult solve_serial(const OptProblem& p, const OptOptions& opt);

/// The deterministic Latin-hypercube start points used by solve().
std::vector<std::vector<double>> lhs_starts(const OptProblem& p, const OptOptions& opt);

struct SlackRow {
  std::string name;
  double g = 0;      // normalized constraint value, feasible when <= 0
  double slack = 0;  // -g
  bool active = false;
  bool box_violation = false;
};

std::vector<SlackRow> feasibility_report(const OptProblem& p,
                                         const std::map<std::string, double>& x);

}  // namespace ampkit
