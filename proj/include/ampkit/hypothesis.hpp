#pragma once

#include <map>

#include "ampkit/interval.hpp"
#include "ampkit/kcl.hpp"

namespace ampkit {

/// Margin factors that operationalize the ">>" judgements.
struct Margins {
  double k_dom = 10.0;    // retained sum >= k_dom * dropped term
  double k_sep = 10.0;    // b1^2 >= 4*k_sep*b0*b2 root separation
  double k_auto = 100.0;  // unconditional drop threshold
  double kappa_p = 2.0;   // non-dominant pole magnitude >= kappa_p * GBW
  double kappa_z = 10.0;  // RHP zero magnitude >= kappa_z * GBW
  double zeta_min = 0.5;
  double lhp_margin = 1.1;  // forcing an ambiguous zero into the LHP
};

struct RuleToggles {
  bool c_dominance = true;
  bool c_zero_lhp = true;
  bool c_zero_rhp = true;
  bool c_complex = true;
  bool c_cancel = false;  // zero-pole cancellation band, off by default

  bool* by_name(const std::string& name);
};

enum class HypKind { A, B, C };
const char* to_string(HypKind k);

/// A numeric multiple of a rational expression.
struct ScaledExpr {
  double scale = 1.0;
  RationalExpr expr;

  template <class T, class F>
  T eval(F&& sym_value) const {
    return T(scale) * expr.eval<T>(sym_value);
  }
  std::string to_string(const SymbolTable& tab) const;
};

/// A recorded inequality  lhs >= margin * rhs  with machine-checkable
/// interval evidence.  `guaranteed` marks relations that hold over the whole
/// variable box; they are kept in the audit trail but can never be active.
struct Hypothesis {
  std::string id;
  HypKind kind = HypKind::A;
  ScaledExpr lhs, rhs;
  double margin = 1.0;
  bool guaranteed = false;
  std::string origin;         // coefficient/root/rule that produced it
  std::string justification;
  Interval lhs_iv{}, rhs_iv{};
  double ratio_hi = 0;  // rigorous upper bound of rhs/lhs over the box

  std::string relation_text(const SymbolTable& tab) const;
};

/// Both sides expanded to design variables, inverse symbols cleared and the
/// common content cancelled; used to compare hypotheses structurally.
struct CanonicalInequality {
  Poly lhs;
  double factor = 1.0;  // combined margin and numeric scales
  Poly rhs;
};
CanonicalInequality canonical_inequality(const Hypothesis& h, const SymbolTable& tab);

std::string hypothesis_hash(const std::string& seed);

// ---------------------------------------------------------------------------
// Pole/zero model

enum class Plane { lhp, rhp, ambiguous };
const char* to_string(Plane p);

struct ZeroExpr {
  RationalExpr root;  // signed zero location, rad/s
  Plane plane = Plane::ambiguous;
  std::vector<std::string> enabling;
};

struct RealPoleExpr {
  RationalExpr magnitude;  // |p| in rad/s, positive on the feasible set
  std::vector<std::string> enabling;
};

struct ComplexPairExpr {
  RationalExpr omega_n_sq;  // (rad/s)^2
  RationalExpr zeta_sq;
  std::vector<std::string> enabling;
};

struct PZModel {
  std::vector<ZeroExpr> zeros;
  std::vector<RealPoleExpr> real_poles;  // dominant first
  std::vector<ComplexPairExpr> complex_pairs;

  std::string to_string(const SymbolTable& tab) const;
};

// ---------------------------------------------------------------------------
// Operations

struct SimplifyResult {
  TransferFunction tf;  // simplified, same symbol table
  std::vector<Hypothesis> hypotheses;
  std::vector<std::string> notes;  // silent unconditional drops
};

/// Margin overrides are keyed by hypothesis id (stable under tightening).
using MarginOverrides = std::map<std::string, double>;

/// Drop dominated terms per coefficient, emitting kind-A hypotheses for every
/// reduction that bounds alone cannot justify.  Terms whose drop would assert
/// that a free compensation capacitor dominates a parasitic capacitance are
/// retained ("equivalent total node capacitance" policy).
SimplifyResult simplify_coefficients(const TransferFunction& grouped,
                                     const IntervalContext& ictx, const Margins& margins,
                                     const MarginOverrides& overrides = {});

struct ExtractResult {
  PZModel pz;
  std::vector<Hypothesis> hypotheses;
  std::vector<std::string> notes;
};

/// Approximate pole/zero extraction: exact degree-1 roots, root separation
/// under kind-B hypotheses, omega_n/zeta pairs when separation is untenable.
ExtractResult extract_pz(const TransferFunction& simplified, const IntervalContext& ictx,
                         const Margins& margins, const MarginOverrides& overrides = {});

/// Positioning rule table (kind C).  Resolves ambiguous zero planes and
/// couples every non-dominant pole/zero magnitude to the symbolic GBW.
std::vector<Hypothesis> position_pz(PZModel& pz, const ScaledExpr& gbw_hz,
                                    const IntervalContext& ictx, const Margins& margins,
                                    const RuleToggles& toggles,
                                    const MarginOverrides& overrides = {});

}  // namespace ampkit
