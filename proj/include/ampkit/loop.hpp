#pragma once

#include "ampkit/optimizer.hpp"
#include "ampkit/oracle.hpp"

namespace ampkit {

/// Theory-vs-simulation agreement thresholds for the result check.
struct Tolerances {
  double gain_db = 1.0;
  double gbw_rel = 0.20;
  double pm_deg = 5.0;
};

struct Verdict {
  enum Status { ACCEPT, REJECT };
  Status status = REJECT;
  bool opt_feasible = false;
  bool specs_met = false;
  bool theory_sim_agree = false;
  std::vector<std::string> detail;
};

enum class FixKind { add_constraint, tighten_margin, relax_margin, widen_pm_band, rederive };
const char* to_string(FixKind k);

enum class RollbackPoint { propose, optimize };
const char* to_string(RollbackPoint r);

struct FixAction {
  FixKind kind = FixKind::add_constraint;
  std::string target;   // hypothesis id or rule id
  std::string payload;  // what changes, human readable
  double new_margin = 0;
  RollbackPoint rollback_to = RollbackPoint::optimize;
};

enum class Attribution {
  none,
  over_constrained,
  missing_pz_gbw_coupling,
  separation_too_weak,
  simplification_violated,
  unattributed,
};
const char* to_string(Attribution a);

struct RunConfig {
  SpecSet specs;
  Margins margins;
  RuleToggles rules;
  Tolerances tolerances;
  int max_iter = 3;
  int n_starts = 16;
  bool parallel = true;
};

struct IterationRecord {
  int index = 1;
  std::vector<Hypothesis> hypotheses;
  std::vector<std::string> engine_notes;
  std::string tf_grouped_text;
  std::string tf_simplified_text;
  std::string pz_text;
  std::string formulas_text;
  std::string problem_dump;
  OptResult opt;
  bool oracle_ran = false;
  MeasuredMetrics measured;
  PZComparison pz_compare;
  Verdict verdict;
  Attribution attribution = Attribution::none;
  std::vector<FixAction> fixes;
  std::string rationale;
};

struct DesignState {
  std::string netlist_echo;
  std::string raw_tf_text;
  std::string intermediate_tf_text;
  std::shared_ptr<const SymbolTable> table;  // for rendering hypotheses
  RunConfig config;
  uint64_t seed = 0;
  std::vector<IterationRecord> iterations;
  bool accepted = false;
  std::map<std::string, double> final_x;
  PredictedMetrics final_predicted;
  MeasuredMetrics final_measured;
  std::string error;  // nonempty when a module error aborted the run
};

/// Criterion (i): the optimization is feasible; (ii): the measured metrics
/// satisfy the original spec set (not the tightened PM band); (iii): theory
/// and simulation agree within the tolerances.
Verdict check_result(const OptResult& opt, bool oracle_ran, const MeasuredMetrics& measured,
                     const PredictedMetrics& predicted, const SpecSet& specs,
                     const Tolerances& tol);

/// Inputs that the error-attribution decision tree inspects.
struct AttributionContext {
  bool opt_feasible = false;
  bool oracle_ran = false;
  double measured_gbw_hz = 0;
  bool unity_crossing_found = false;
  /// exact non-dominant pole magnitudes in Hz (ascending, dominant removed)
  std::vector<double> exact_nondominant_pole_hz;
  /// per-root rows: relative error and the enabling-hypothesis relative slack
  struct RootRow {
    double rel_err = 0;
    double min_enabling_slack = std::numeric_limits<double>::infinity();
    std::string weakest_hyp_id;
  };
  std::vector<RootRow> roots;
  /// per-coefficient relative deviation of simplified vs intermediate at x*
  struct CoeffRow {
    std::string label;
    double rel_dev = 0;
    std::vector<std::string> hyp_ids;  // A hypotheses that reduced it
  };
  std::vector<CoeffRow> coeffs;
  double k_dom = 10.0;
  double kappa_p = 2.0;
};

Attribution attribute_error(const AttributionContext& ctx, std::string* why = nullptr);

std::vector<FixAction> propose_fix(Attribution a, const AttributionContext& ctx,
                                   const Margins& margins, bool coupling_already_on);

/// The full hypothesis-verification-decision loop on one topology.
DesignState run_design(const Topology& parsed, const RunConfig& config, uint64_t seed);

}  // namespace ampkit
