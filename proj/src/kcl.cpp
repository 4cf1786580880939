#include "ampkit/kcl.hpp"

#include <algorithm>

namespace ampkit {

namespace {

// "g1" -> "1", "gf" -> "f", anything else verbatim
std::string stage_suffix(const Stage& s) {
  if (s.name.size() > 1 && s.name[0] == 'g') return s.name.substr(1);
  return s.name;
}

}  // namespace

SymbolicModel build_symbols(const Topology& elaborated) {
  if (!elaborated.elaborated)
    throw DerivationError("topology must be elaborated before symbol registration");
  SymbolicModel m;
  m.topo = elaborated;
  m.table = std::make_shared<SymbolTable>();
  auto& tab = *m.table;

  m.var_sym.resize(m.topo.variables.size(), -1);
  m.var_inv_sym.resize(m.topo.variables.size(), -1);
  for (size_t i = 0; i < m.topo.variables.size(); ++i) {
    const auto& v = m.topo.variables[i];
    m.var_sym[i] = tab.add_design(v.name, static_cast<int>(i), v.lower, v.upper, v.fixed,
                                  v.kind == VarKind::capacitance);
  }
  m.wt_sym = tab.add_design("wt", -1, m.topo.omega_t, m.topo.omega_t, m.topo.omega_t);
  for (size_t i = 0; i < m.topo.variables.size(); ++i) {
    const auto& v = m.topo.variables[i];
    if (v.kind == VarKind::stage_gain || v.kind == VarKind::resistance)
      m.var_inv_sym[i] = tab.add_inverse(m.var_sym[i]);
  }
  m.wt_inv_sym = tab.add_inverse(m.wt_sym);

  // Parasitic conductances 1/Rp = gm/gain, one per stage.
  m.rp_inv_sym.resize(m.topo.stages.size(), -1);
  for (const auto& pr : m.topo.parasitic_r) {
    const Stage& st = m.topo.stages[pr.stage];
    Poly def = Poly::symbol(m.var_sym[st.gm_var]) *
               Poly::symbol(m.var_inv_sym[st.gain_var]);
    m.rp_inv_sym[pr.stage] =
        tab.add_derived("1/Rp" + stage_suffix(st), DerivedRole::parasitic_conductance, def);
  }
  // Parasitic capacitances Cp = sum of driven gm / omega_t.
  m.cp_sym.resize(m.topo.parasitic_c.size(), -1);
  for (size_t k = 0; k < m.topo.parasitic_c.size(); ++k) {
    const auto& pc = m.topo.parasitic_c[k];
    Poly def;
    for (int j : pc.driven_stages)
      def += Poly::symbol(m.gm_symbol(j)) * Poly::symbol(m.wt_inv_sym);
    m.cp_sym[k] = tab.add_derived("Cp" + stage_suffix(m.topo.stages[pc.stage]),
                                  DerivedRole::parasitic_capacitance, def);
  }

  // Grouped node output conductances: every resistive element to ground at an
  // unknown node (stage parasitics and ground resistors) folds into go_k.
  auto unknowns = m.topo.unknown_nodes();
  m.node_cond_sym.resize(unknowns.size(), -1);
  for (size_t n = 0; n < unknowns.size(); ++n) {
    Poly def;
    for (const auto& pr : m.topo.parasitic_r) {
      const Stage& st = m.topo.stages[pr.stage];
      if (st.output_node == unknowns[n])
        def += *tab.info(m.rp_inv_sym[pr.stage]).definition;
    }
    for (const auto& e : m.topo.passives) {
      if (e.kind != PassiveElement::resistor) continue;
      bool grounded = (e.node_a == "0" && e.node_b == unknowns[n]) ||
                      (e.node_b == "0" && e.node_a == unknowns[n]);
      if (grounded) def += Poly::symbol(m.var_inv_sym[e.value_var]);
    }
    if (!def.is_zero())
      m.node_cond_sym[n] = tab.add_derived("go" + std::to_string(n + 1),
                                           DerivedRole::node_conductance, def);
  }
  return m;
}

KclSystem build_kcl_system(const SymbolicModel& m, KclMode mode) {
  const Topology& t = m.topo;
  KclSystem sys;
  sys.unknowns = t.unknown_nodes();
  sys.table = m.table;
  const size_t n = sys.unknowns.size();
  if (n == 0) throw DerivationError("no unknown nodes");
  sys.matrix.assign(n, std::vector<Poly>(n));
  sys.rhs.assign(n, Poly());

  auto row_of = [&](const std::string& node) -> int {
    for (size_t i = 0; i < n; ++i)
      if (sys.unknowns[i] == node) return static_cast<int>(i);
    return -1;
  };

  // Admittance Y between nodes a and b: +Y on each unknown diagonal, -Y in
  // the coupling entries; a vin terminal moves Y to the right-hand side.
  auto stamp = [&](const std::string& a, const std::string& b, const Poly& y) {
    int ra = a == "0" ? -2 : (a == t.input_node ? -1 : row_of(a));
    int rb = b == "0" ? -2 : (b == t.input_node ? -1 : row_of(b));
    if (ra >= 0) {
      sys.matrix[ra][ra] += y;
      if (rb >= 0) sys.matrix[ra][rb] -= y;
      if (rb == -1) sys.rhs[ra] += y;
    }
    if (rb >= 0) {
      sys.matrix[rb][rb] += y;
      if (ra >= 0) sys.matrix[rb][ra] -= y;
      if (ra == -1) sys.rhs[rb] += y;
    }
  };

  const Poly s = Poly::symbol(SymbolTable::s_id);

  for (const auto& e : t.passives) {
    if (e.kind == PassiveElement::capacitor) {
      stamp(e.node_a, e.node_b, s * Poly::symbol(m.var_sym[e.value_var]));
    } else {
      bool grounded = e.node_a == "0" || e.node_b == "0";
      if (mode == KclMode::grouped && grounded) continue;  // folded into go_k
      stamp(e.node_a, e.node_b, Poly::symbol(m.var_inv_sym[e.value_var]));
    }
  }
  if (mode == KclMode::raw) {
    for (const auto& pr : t.parasitic_r)
      stamp(t.stages[pr.stage].output_node, "0", Poly::symbol(m.rp_inv_sym[pr.stage]));
  } else {
    for (size_t i = 0; i < n; ++i)
      if (m.node_cond_sym[i] >= 0)
        sys.matrix[i][i] += Poly::symbol(m.node_cond_sym[i]);
  }
  for (size_t k = 0; k < t.parasitic_c.size(); ++k)
    stamp(t.stages[t.parasitic_c[k].stage].output_node, "0",
          s * Poly::symbol(m.cp_sym[k]));

  // Stage currents: polarity*gm*V(input) appears in the output-node equation.
  for (const auto& st : t.stages) {
    int out = row_of(st.output_node);
    Poly g = Poly::symbol(m.var_sym[st.gm_var], 1, st.polarity);
    if (st.input_node == t.input_node) {
      sys.rhs[out] -= g;  // moved across the equals sign
    } else {
      int in = row_of(st.input_node);
      sys.matrix[out][in] += g;
    }
  }

  for (size_t i = 0; i < n; ++i)
    if (sys.matrix[i][i].is_zero())
      throw DerivationError("node '" + sys.unknowns[i] + "' has no admittance to anywhere");
  return sys;
}

Poly det_bareiss(std::vector<std::vector<Poly>> w) {
  const size_t n = w.size();
  if (n == 0) return Poly::one();
  int sign = 1;
  Poly prev = Poly::one();
  for (size_t k = 0; k + 1 < n; ++k) {
    if (w[k][k].is_zero()) {
      size_t r = k + 1;
      while (r < n && w[r][k].is_zero()) ++r;
      if (r == n) return Poly::zero();
      std::swap(w[k], w[r]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        Poly t = w[i][j] * w[k][k] - w[i][k] * w[k][j];
        auto q = t.divided_by(prev);
        if (!q) throw DerivationError("Bareiss elimination lost exact divisibility");
        w[i][j] = std::move(*q);
      }
      w[i][k] = Poly::zero();
    }
    prev = w[k][k];
  }
  Poly det = w[n - 1][n - 1];
  return sign > 0 ? det : -det;
}

Poly det_cofactor(const std::vector<std::vector<Poly>>& w) {
  const size_t n = w.size();
  if (n == 0) return Poly::one();
  if (n == 1) return w[0][0];
  Poly det;
  for (size_t c = 0; c < n; ++c) {
    std::vector<std::vector<Poly>> minor(n - 1, std::vector<Poly>(n - 1));
    for (size_t i = 1; i < n; ++i) {
      size_t jj = 0;
      for (size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        minor[i - 1][jj++] = w[i][j];
      }
    }
    Poly term = w[0][c] * det_cofactor(minor);
    det += (c % 2 == 0) ? term : -term;
  }
  return det;
}

TransferFunction cramer_solve(const KclSystem& sys, const std::string& out_node) {
  int col = -1;
  for (size_t i = 0; i < sys.unknowns.size(); ++i)
    if (sys.unknowns[i] == out_node) col = static_cast<int>(i);
  if (col < 0) throw DerivationError("output node '" + out_node + "' is not an unknown");

  Poly d = det_bareiss(sys.matrix);
  if (d.is_zero()) throw DerivationError("structurally singular KCL system");

  auto replaced = sys.matrix;
  for (size_t i = 0; i < replaced.size(); ++i) replaced[i][col] = sys.rhs[i];
  Poly nn = det_bareiss(replaced);

  TransferFunction tf;
  tf.num = SPoly::collect(nn);
  tf.den = SPoly::collect(d);
  tf.form = TfForm::raw;
  tf.table = sys.table;
  if (tf.den.is_zero()) throw DerivationError("zero denominator after Cramer solve");
  if (tf.den.coeff(0).is_zero())
    throw DerivationError("denominator vanishes at s=0; no DC operating point");
  if (tf.num.degree() > tf.den.degree())
    throw DerivationError("numerator degree exceeds denominator degree");
  return tf;
}

TransferFunction substitute_parasitics(const TransferFunction& raw, const SymbolicModel& m) {
  std::map<int, Poly> defs;
  for (int sid : m.rp_inv_sym)
    if (sid >= 0) defs[sid] = *m.table->info(sid).definition;
  for (int sid : m.cp_sym)
    if (sid >= 0) defs[sid] = *m.table->info(sid).definition;

  auto apply = [&](const SPoly& sp) {
    std::vector<Poly> out;
    out.reserve(static_cast<size_t>(sp.degree()) + 1);
    for (int k = 0; k <= sp.degree(); ++k) out.push_back(sp.coeff(k).substituted(defs));
    return SPoly(std::move(out));
  };
  TransferFunction tf;
  tf.num = apply(raw.num);
  tf.den = apply(raw.den);
  tf.form = TfForm::intermediate;
  tf.table = raw.table;
  return tf;
}

Poly expand_derived(const Poly& p, const SymbolTable& tab) {
  Poly cur = p;
  for (int pass = 0; pass < 8; ++pass) {
    std::map<int, Poly> defs;
    for (const auto& m : cur.terms())
      for (auto [sid, e] : m.exps)
        if (tab.info(sid).kind == SymbolKind::derived)
          defs.emplace(sid, *tab.info(sid).definition);
    if (defs.empty()) return cur;
    cur = cur.substituted(defs);
  }
  throw DerivationError("derived-symbol expansion did not reach a fixpoint");
}

// ---------------------------------------------------------------------------

NumericBinding::NumericBinding(const SymbolicModel& m, const std::map<std::string, double>& x) {
  const auto& tab = *m.table;
  values_.assign(static_cast<size_t>(tab.size()), 0.0);
  for (int id = 1; id < tab.size(); ++id) {
    const auto& si = tab.info(id);
    switch (si.kind) {
      case SymbolKind::design: {
        auto it = x.find(si.name);
        if (it != x.end()) values_[id] = it->second;
        else if (si.fixed) values_[id] = *si.fixed;
        else throw DerivationError("unbound variable '" + si.name + "'");
        break;
      }
      case SymbolKind::inverse:
        values_[id] = 1.0 / values_[static_cast<size_t>(si.base)];
        break;
      case SymbolKind::derived:
        values_[id] = si.definition->eval<double>(
            [&](int sid) { return values_[static_cast<size_t>(sid)]; });
        break;
      case SymbolKind::s:
        break;
    }
  }
}

std::complex<double> NumericTF::eval(std::complex<double> s) const {
  auto horner = [&](const std::vector<double>& c) {
    std::complex<double> acc = 0.0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
    return acc;
  };
  return horner(num) / horner(den);
}

NumericTF compile_tf(const TransferFunction& tf, const NumericBinding& b) {
  NumericTF n;
  auto get = [&](int sid) { return b.value(sid); };
  for (int k = 0; k <= tf.num.degree(); ++k) n.num.push_back(tf.num.coeff(k).eval<double>(get));
  for (int k = 0; k <= tf.den.degree(); ++k) n.den.push_back(tf.den.coeff(k).eval<double>(get));
  return n;
}

std::complex<double> tf_eval(const TransferFunction& tf, const NumericBinding& b,
                             std::complex<double> s) {
  NumericTF n = compile_tf(tf, b);
  auto horner = [&](const std::vector<double>& c) {
    std::complex<double> acc = 0.0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
    return acc;
  };
  std::complex<double> den = horner(n.den);
  if (den == std::complex<double>(0.0, 0.0))
    throw DerivationError("transfer function evaluated exactly at a pole");
  return horner(n.num) / den;
}

}  // namespace ampkit
