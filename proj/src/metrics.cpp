#include "ampkit/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ampkit {

std::string PmFormula::to_string(const SymbolTable& tab) const {
  std::ostringstream out;
  out << "PM = 90";
  for (const auto& p : poles)
    out << " - (180/pi)*atan(GBW/|" << p.mag_hz.to_string(tab) << "|)";
  for (const auto& z : zeros)
    out << (z.sign > 0 ? " + " : " - ") << "(180/pi)*atan(GBW/|" << z.mag_hz.to_string(tab)
        << "|)";
  for (const auto& pr : pairs)
    out << " - (180/pi)*phase(2*pi*GBW; wn=sqrt(" << pr.omega_n_sq.to_string(tab)
        << "), zeta=sqrt(" << pr.zeta_sq.to_string(tab) << "))";
  return out.str();
}

RationalExpr derive_gain(const TransferFunction& simplified) {
  if (simplified.den.coeff(0).is_zero())
    throw DerivationError("denominator has no DC term; gain undefined");
  return RationalExpr(simplified.num.coeff(0), simplified.den.coeff(0));
}

ScaledExpr derive_gbw(const RationalExpr& gain, const RealPoleExpr& dominant) {
  return {1.0 / (2.0 * std::numbers::pi), gain * dominant.magnitude};
}

ScaledExpr derive_gbw_expr(const TransferFunction& simplified, const PZModel& pz,
                           bool* from_pair) {
  RationalExpr gain = derive_gain(simplified);
  if (!pz.real_poles.empty()) {
    if (from_pair) *from_pair = false;
    return derive_gbw(gain, pz.real_poles.front());
  }
  if (pz.complex_pairs.empty())
    throw DerivationError("no poles available for a bandwidth estimate");
  // omega_n-based fallback: GBW ~ Gain * omega_n / (2*pi), kept squared-free
  // by multiplying gain with sqrt at evaluation is not rational, so use the
  // conservative Gain * omega_n^2 / (omega_n * 2*pi) == Gain*omega_n/(2*pi)
  // represented through omega_n^2 and a half-power at evaluation time.
  if (from_pair) *from_pair = true;
  // Store gain^2 * omega_n^2 and take the square root when evaluating.
  RationalExpr expr = gain * gain * pz.complex_pairs.front().omega_n_sq;
  ScaledExpr out{1.0 / (2.0 * std::numbers::pi), expr};
  return out;
}

PmFormula derive_pm(const PZModel& pz, const ScaledExpr&) {
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  PmFormula pm;
  for (size_t i = 1; i < pz.real_poles.size(); ++i)
    pm.poles.push_back({{inv2pi, pz.real_poles[i].magnitude}, "p" + std::to_string(i + 1)});
  for (size_t i = 0; i < pz.zeros.size(); ++i) {
    const auto& z = pz.zeros[i];
    if (z.plane == Plane::ambiguous)
      throw DerivationError("zero z" + std::to_string(i + 1) +
                            " is sign-ambiguous; run positioning first");
    // |z| as a positive expression: root = -c0/c1 oriented by plane
    RationalExpr mag = z.plane == Plane::lhp ? RationalExpr(-z.root.num(), z.root.den())
                                             : z.root;
    pm.zeros.push_back(
        {{inv2pi, mag}, z.plane == Plane::lhp ? +1 : -1, "z" + std::to_string(i + 1)});
  }
  for (size_t i = 0; i < pz.complex_pairs.size(); ++i)
    pm.pairs.push_back({pz.complex_pairs[i].omega_n_sq, pz.complex_pairs[i].zeta_sq,
                        "pair" + std::to_string(i + 1)});
  return pm;
}

PowerFormula derive_power(const SymbolicModel& m) {
  PowerFormula p;
  for (const auto& st : m.topo.stages) {
    double gmid = st.gm_over_id.value_or(m.topo.gm_over_id);
    int sym = m.var_sym[st.gm_var];
    bool merged = false;
    for (auto& [sid, w] : p.terms)
      if (sid == sym) {
        w += m.topo.vdd / gmid;
        merged = true;
      }
    if (!merged) p.terms.push_back({sym, m.topo.vdd / gmid});
  }
  std::ostringstream out;
  bool uniform = true;
  for (auto [sid, w] : p.terms)
    if (w != p.terms.front().second) uniform = false;
  if (uniform && !p.terms.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", p.terms.front().second);
    out << buf << "*(";
    for (size_t i = 0; i < p.terms.size(); ++i)
      out << (i ? " + " : "") << m.table->info(p.terms[i].first).name;
    out << ")";
  } else {
    for (size_t i = 0; i < p.terms.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", p.terms[i].second);
      out << (i ? " + " : "") << buf << "*" << m.table->info(p.terms[i].first).name;
    }
  }
  p.text = out.str();
  return p;
}

double load_capacitance(const SymbolicModel& m) {
  double cl = 0;
  for (const auto& e : m.topo.passives) {
    if (e.kind != PassiveElement::capacitor) continue;
    bool at_load = (e.node_a == m.topo.output_node && e.node_b == "0") ||
                   (e.node_b == m.topo.output_node && e.node_a == "0");
    if (!at_load) continue;
    const auto& v = m.topo.variables[e.value_var];
    if (v.is_fixed()) cl += *v.fixed;
  }
  if (cl == 0)
    throw DerivationError("no fixed load capacitance at the output; FoM undefined");
  return cl;
}

MetricFormulas assemble_formulas(const SymbolicModel& m, const TransferFunction& simplified,
                                 const PZModel& pz) {
  MetricFormulas f;
  f.gain = derive_gain(simplified);
  f.gbw_hz = derive_gbw_expr(simplified, pz, &f.gbw_from_pair);
  f.pm = derive_pm(pz, f.gbw_hz);
  f.power = derive_power(m);
  f.cl_farad = load_capacitance(m);
  return f;
}

std::string MetricFormulas::render(const SymbolTable& tab) const {
  std::ostringstream out;
  out << "Gain      = " << gain.to_string(tab) << "   (reported as 20*log10)\n";
  out << "GBW (Hz)  = " << gbw_hz.to_string(tab);
  if (gbw_from_pair) out << "   [omega_n fallback: evaluated as sqrt]";
  out << "\n";
  out << pm.to_string(tab) << "\n";
  out << "Power (W) = " << power.text << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", cl_farad * 1e12);
  out << "FoM       = GBW[MHz] * " << buf << "[pF] / Power[mW]\n";
  return out.str();
}

PredictedMetrics eval_formulas(const MetricFormulas& f, const SymbolicModel& m,
                               const std::map<std::string, double>& x) {
  auto values = bind_symbols<double>(*m.table, [&](const SymbolInfo& si) {
    auto it = x.find(si.name);
    if (it != x.end()) return it->second;
    if (si.fixed) return *si.fixed;
    throw DerivationError("unbound variable '" + si.name + "'");
  });
  auto sym = [&](int sid) { return values[static_cast<size_t>(sid)]; };

  PredictedMetrics out;
  double g = std::abs(f.gain.eval<double>(sym));
  if (g <= 0 || !std::isfinite(g)) {
    out.issues.push_back("gain: log of a non-positive value");
    out.gain_db = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.gain_db = 20.0 * std::log10(g);
  }
  double gbw = f.gbw_from_pair
                   ? f.gbw_hz.scale * std::sqrt(std::abs(f.gbw_hz.expr.eval<double>(sym)))
                   : f.gbw_hz.eval<double>(sym);
  if (!(gbw > 0) || !std::isfinite(gbw)) {
    out.issues.push_back("gbw: non-positive bandwidth expression");
    out.gbw_hz = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.gbw_hz = gbw;
  }
  out.pm_deg = eval_pm_deg<double>(f.pm, out.gbw_hz, sym);
  out.power_w = f.power.eval<double>(sym);
  out.fom = f.fom<double>(out.gbw_hz, out.power_w, sym);
  return out;
}

}  // namespace ampkit
