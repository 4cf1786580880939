#pragma once

#include "ampkit/dual.hpp"
#include "ampkit/hypothesis.hpp"

namespace ampkit {

/// Resolve every symbol value from the design-variable values.
/// `design_value(info)` supplies design symbols; inverse and derived symbols
/// follow from their definitions (ids only reference earlier ids).
template <class T, class F>
std::vector<T> bind_symbols(const SymbolTable& tab, F&& design_value) {
  std::vector<T> v(static_cast<size_t>(tab.size()), T(0.0));
  for (int id = 1; id < tab.size(); ++id) {
    const auto& si = tab.info(id);
    switch (si.kind) {
      case SymbolKind::design:
        v[id] = design_value(si);
        break;
      case SymbolKind::inverse:
        v[id] = T(1.0) / v[static_cast<size_t>(si.base)];
        break;
      case SymbolKind::derived:
        v[id] = si.definition->template eval<T>(
            [&](int sid) { return v[static_cast<size_t>(sid)]; });
        break;
      case SymbolKind::s:
        break;
    }
  }
  return v;
}

struct PmPoleTerm {
  ScaledExpr mag_hz;
  std::string label;
};
struct PmZeroTerm {
  ScaledExpr mag_hz;
  int sign = +1;  // +1 LHP (phase lead), -1 RHP (phase loss)
  std::string label;
};
struct PmPairTerm {
  RationalExpr omega_n_sq;  // (rad/s)^2
  RationalExpr zeta_sq;
  std::string label;
};

/// PM = 90 deg - sum(atan(GBW/|p|)) +/- sum(atan(GBW/|z|)) - pair phases.
struct PmFormula {
  std::vector<PmPoleTerm> poles;
  std::vector<PmZeroTerm> zeros;
  std::vector<PmPairTerm> pairs;
  std::string to_string(const SymbolTable& tab) const;
};

template <class T, class F>
T eval_pm_deg(const PmFormula& pm, const T& gbw_hz, F&& sym) {
  const double r2d = 180.0 / std::numbers::pi;
  T total = T(90.0);
  for (const auto& p : pm.poles)
    total = total - T(r2d) * atan(gbw_hz / abs(p.mag_hz.eval<T>(sym)));
  for (const auto& z : pm.zeros) {
    T term = T(r2d) * atan(gbw_hz / abs(z.mag_hz.eval<T>(sym)));
    total = z.sign > 0 ? total + term : total - term;
  }
  for (const auto& pr : pm.pairs) {
    T wn = sqrt(abs(pr.omega_n_sq.eval<T>(sym)));
    T zeta = sqrt(abs(pr.zeta_sq.eval<T>(sym)));
    T ratio = T(2.0 * std::numbers::pi) * gbw_hz / wn;
    T phase = atan2(T(2.0) * zeta * ratio, T(1.0) - ratio * ratio);
    total = total - T(r2d) * phase;
  }
  return total;
}

/// Power = sum_i gm_i * vdd / (gm/Id)_i, a weighted sum over gm symbols.
struct PowerFormula {
  std::vector<std::pair<int, double>> terms;  // (gm symbol, weight)
  std::string text;

  template <class T, class F>
  T eval(F&& sym) const {
    T total = T(0.0);
    for (auto [sid, w] : terms) total = total + T(w) * sym(sid);
    return total;
  }
};

struct MetricFormulas {
  RationalExpr gain;   // |H(0)|; reported in dB
  ScaledExpr gbw_hz;   // Gain*|p1|/(2*pi), algebraically reduced
  bool gbw_from_pair = false;  // flagged omega_n fallback
  PmFormula pm;
  PowerFormula power;
  double cl_farad = 0;  // load capacitance used by the FoM

  template <class T, class F>
  T fom(const T& gbw_hz_value, const T& power_w, F&&) const {
    return gbw_hz_value * T(1e-6) * T(cl_farad * 1e12) / (power_w * T(1e3));
  }
  std::string render(const SymbolTable& tab) const;
};

RationalExpr derive_gain(const TransferFunction& simplified);
ScaledExpr derive_gbw(const RationalExpr& gain, const RealPoleExpr& dominant);
PmFormula derive_pm(const PZModel& pz, const ScaledExpr& gbw);
PowerFormula derive_power(const SymbolicModel& m);
double load_capacitance(const SymbolicModel& m);

/// Full formula set; positions must be resolved before calling (the PM
/// formula rejects sign-ambiguous zeros).
MetricFormulas assemble_formulas(const SymbolicModel& m, const TransferFunction& simplified,
                                 const PZModel& pz);

/// GBW expression only (needed by positioning before the PM formula exists).
ScaledExpr derive_gbw_expr(const TransferFunction& simplified, const PZModel& pz,
                           bool* from_pair = nullptr);

struct PredictedMetrics {
  double gain_db = 0, gbw_hz = 0, pm_deg = 0, power_w = 0, fom = 0;
  std::vector<std::string> issues;  // per-metric domain errors
};

PredictedMetrics eval_formulas(const MetricFormulas& f, const SymbolicModel& m,
                               const std::map<std::string, double>& x);

}  // namespace ampkit
