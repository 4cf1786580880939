#include "ampkit/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ampkit {

const char* to_string(HypKind k) {
  switch (k) {
    case HypKind::A: return "A";
    case HypKind::B: return "B";
    case HypKind::C: return "C";
  }
  return "?";
}

const char* to_string(Plane p) {
  switch (p) {
    case Plane::lhp: return "LHP";
    case Plane::rhp: return "RHP";
    case Plane::ambiguous: return "sign-ambiguous";
  }
  return "?";
}

bool* RuleToggles::by_name(const std::string& name) {
  if (name == "c-dominance") return &c_dominance;
  if (name == "c-zero-lhp") return &c_zero_lhp;
  if (name == "c-zero-rhp") return &c_zero_rhp;
  if (name == "c-complex") return &c_complex;
  if (name == "c-cancel") return &c_cancel;
  return nullptr;
}

std::string hypothesis_hash(const std::string& seed) {
  // FNV-1a, printed as 16 hex digits
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : seed) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ScaledExpr::to_string(const SymbolTable& tab) const {
  std::string body = expr.to_string(tab);
  if (scale == 1.0) return body;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", scale);
  return std::string(buf) + "*(" + body + ")";
}

std::string Hypothesis::relation_text(const SymbolTable& tab) const {
  char kbuf[32];
  std::snprintf(kbuf, sizeof(kbuf), "%.6g", margin);
  std::string r = rhs.to_string(tab);
  if (margin != 1.0) r = std::string(kbuf) + "*" + (rhs.scale == 1.0 && rhs.expr.num().terms().size() <= 1 && rhs.expr.den_is_one() ? r : "(" + r + ")");
  return lhs.to_string(tab) + " >= " + r;
}

// ---------------------------------------------------------------------------
// Canonical form for structural comparison

namespace {

// Rewrite a poly over base symbols only, with inverse symbols folded in as
// negative exponents.  Returns per-monomial signed exponent maps.
std::vector<std::pair<mpq_class, std::map<int, int>>> signed_exponents(const Poly& p,
                                                                       const SymbolTable& tab) {
  std::vector<std::pair<mpq_class, std::map<int, int>>> out;
  for (const auto& m : p.terms()) {
    std::map<int, int> net;
    for (auto [sid, e] : m.exps) {
      const auto& si = tab.info(sid);
      if (si.kind == SymbolKind::inverse) net[si.base] -= e;
      else net[sid] += e;
    }
    out.push_back({m.coeff, std::move(net)});
  }
  return out;
}

Poly from_signed(const std::vector<std::pair<mpq_class, std::map<int, int>>>& terms,
                 const std::map<int, int>& shift) {
  std::vector<Monomial> ms;
  for (const auto& [c, net] : terms) {
    Monomial m;
    m.coeff = c;
    std::map<int, int> exps = net;
    for (auto [sid, sh] : shift) exps[sid] += sh;
    for (auto [sid, e] : exps) {
      if (e < 0) throw std::logic_error("negative exponent after inverse clearing");
      if (e > 0) m.exps.push_back({sid, e});
    }
    ms.push_back(std::move(m));
  }
  return Poly::from_terms(std::move(ms));
}

}  // namespace

CanonicalInequality canonical_inequality(const Hypothesis& h, const SymbolTable& tab) {
  // cross-multiply and expand derived symbols
  Poly L = expand_derived(h.lhs.expr.num() * h.rhs.expr.den(), tab);
  Poly R = expand_derived(h.rhs.expr.num() * h.lhs.expr.den(), tab);
  double factor = h.margin * h.rhs.scale / h.lhs.scale;

  auto ls = signed_exponents(L, tab);
  auto rs = signed_exponents(R, tab);
  std::map<int, int> mins;
  for (const auto& [c, net] : ls)
    for (auto [sid, e] : net) mins[sid] = std::min(mins.count(sid) ? mins[sid] : 0, e);
  for (const auto& [c, net] : rs)
    for (auto [sid, e] : net) mins[sid] = std::min(mins.count(sid) ? mins[sid] : 0, e);
  std::map<int, int> shift;
  for (auto [sid, mn] : mins)
    if (mn < 0) shift[sid] = -mn;

  CanonicalInequality out;
  out.lhs = from_signed(ls, shift);
  out.rhs = from_signed(rs, shift);
  out.factor = factor;
  // cancel shared monomial content
  Poly g = monomial_gcd(out.lhs.content(), out.rhs.content());
  const Monomial& gm = g.leading();
  if (!gm.exps.empty()) {
    out.lhs = out.lhs.divided_by_monomial(gm);
    out.rhs = out.rhs.divided_by_monomial(gm);
  }
  // scale both sides so lhs has leading coefficient +-1
  mpq_class lc = out.lhs.leading().coeff;
  if (lc < 0) lc = -lc;
  out.lhs = out.lhs.scaled(1 / lc);
  out.rhs = out.rhs.scaled(1 / lc);
  return out;
}

std::string PZModel::to_string(const SymbolTable& tab) const {
  std::ostringstream out;
  for (size_t i = 0; i < zeros.size(); ++i)
    out << "z" << i + 1 << " = " << zeros[i].root.to_string(tab) << "  ["
        << ampkit::to_string(zeros[i].plane) << "]\n";
  for (size_t i = 0; i < real_poles.size(); ++i)
    out << "p" << i + 1 << " = -" << real_poles[i].magnitude.to_string(tab)
        << (i == 0 ? "  [dominant]" : "") << "\n";
  for (size_t i = 0; i < complex_pairs.size(); ++i)
    out << "pair" << i + 1 << ": omega_n^2 = " << complex_pairs[i].omega_n_sq.to_string(tab)
        << ", zeta^2 = " << complex_pairs[i].zeta_sq.to_string(tab) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Coefficient simplification

namespace {

struct TermInfo {
  Monomial m;
  Interval iv;
  double abs_mid;
};

Poly mono_poly(const Monomial& m) { return Poly::from_terms({m}); }

Monomial abs_mono(const Monomial& m) {
  Monomial a = m;
  if (a.coeff < 0) a.coeff = -a.coeff;
  return a;
}

// True when dropping `t` against some retained term would assert that a free
// compensation capacitor dominates a parasitic capacitance (the cancelled
// ratio is exactly parasitic-C over one free capacitance variable).
bool preference_blocked(const Monomial& t, const std::vector<Monomial>& retained,
                        const SymbolTable& tab) {
  for (const auto& r : retained) {
    Poly g = monomial_gcd(t, r);
    const Monomial& gm = g.leading();
    Monomial tn = mono_poly(abs_mono(t)).divided_by_monomial(gm).leading();
    Monomial rn = mono_poly(abs_mono(r)).divided_by_monomial(gm).leading();
    if (tn.exps.empty() || rn.exps.size() != 1) continue;
    bool t_parasitic = true;
    for (auto [sid, e] : tn.exps)
      if (tab.info(sid).role != DerivedRole::parasitic_capacitance) t_parasitic = false;
    const auto& rsym = tab.info(rn.exps[0].first);
    bool r_free_cap = rsym.kind == SymbolKind::design && rsym.capacitance_var && !rsym.fixed;
    if (t_parasitic && r_free_cap) return true;
  }
  return false;
}

struct Emitter {
  const IntervalContext& ictx;
  const Margins& margins;
  const MarginOverrides& overrides;
  std::vector<Hypothesis>* hyps;

  Hypothesis make(HypKind kind, const std::string& origin, ScaledExpr lhs, ScaledExpr rhs,
                  double margin, bool guaranteed, double ratio_hi,
                  const std::string& justification) {
    Hypothesis h;
    h.kind = kind;
    h.origin = origin;
    h.lhs = std::move(lhs);
    h.rhs = std::move(rhs);
    h.margin = margin;
    h.guaranteed = guaranteed;
    h.ratio_hi = ratio_hi;
    h.justification = justification;
    h.lhs_iv = ictx.poly(h.lhs.expr.num()) / ictx.poly(h.lhs.expr.den());
    h.lhs_iv = Interval{h.lhs_iv.lo * h.lhs.scale, h.lhs_iv.hi * h.lhs.scale};
    h.rhs_iv = ictx.poly(h.rhs.expr.num()) / ictx.poly(h.rhs.expr.den());
    h.rhs_iv = Interval{h.rhs_iv.lo * h.rhs.scale, h.rhs_iv.hi * h.rhs.scale};
    h.id = hypothesis_hash(origin + "|" + h.lhs.expr.to_string(ictx.table()) + ">=" +
                           h.rhs.expr.to_string(ictx.table()));
    double k = margin;
    if (auto it = overrides.find(h.id); it != overrides.end()) k = it->second;
    h.margin = k;
    hyps->push_back(h);
    return h;
  }
};

Poly simplify_coefficient(const std::string& label, const Poly& coeff,
                          const IntervalContext& ictx, const Margins& margins,
                          Emitter& emit, std::vector<std::string>* notes) {
  const auto& tab = ictx.table();
  if (coeff.terms().size() <= 1) return coeff;

  std::vector<TermInfo> infos;
  for (const auto& m : coeff.terms()) {
    Interval iv = ictx.monomial(m);
    infos.push_back({m, iv, iv.abs().mid()});
  }
  size_t dom = 0;
  for (size_t i = 1; i < infos.size(); ++i)
    if (infos[i].abs_mid > infos[dom].abs_mid) dom = i;

  std::vector<Monomial> retained = {infos[dom].m};
  Poly rsum = mono_poly(infos[dom].m);
  double threshold = infos[dom].abs_mid / margins.k_dom;

  std::vector<size_t> order;
  for (size_t i = 0; i < infos.size(); ++i)
    if (i != dom) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return infos[a].abs_mid > infos[b].abs_mid; });

  for (size_t idx : order) {
    const TermInfo& t = infos[idx];
    Interval div = ictx.poly(rsum);
    if (div.contains_zero()) {  // dominance not sign-definite; cannot justify a drop
      retained.push_back(t.m);
      rsum += mono_poly(t.m);
      continue;
    }
    Poly dsigned = div.is_positive() ? rsum : -rsum;
    Poly n_exp = expand_derived(mono_poly(abs_mono(t.m)), tab);
    Poly d_exp = expand_derived(dsigned, tab);
    double r_hi = ictx.ratio_upper_bound(n_exp, d_exp);

    bool desired = t.abs_mid <= threshold;
    bool blocked = preference_blocked(t.m, retained, tab);

    if (r_hi <= 1.0 / margins.k_auto) {
      notes->push_back(label + ": dropped " + mono_poly(t.m).to_string(tab) +
                       " unconditionally (<= 1/" + std::to_string((int)margins.k_auto) +
                       " of retained sum by bounds)");
      continue;
    }
    if (r_hi <= 1.0 / margins.k_dom) {
      // shared-content cancellation for the recorded relation
      Poly g = monomial_gcd(dsigned.content(), abs_mono(t.m));
      const Monomial& gm = g.leading();
      Poly lhs = dsigned.divided_by_monomial(gm);
      Poly rhs = mono_poly(abs_mono(t.m)).divided_by_monomial(gm);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.3g", r_hi);
      emit.make(HypKind::A, "A:" + label + ":drop:" + mono_poly(t.m).to_string(tab),
                {1.0, RationalExpr(lhs, Poly::one())}, {1.0, RationalExpr(rhs, Poly::one())},
                margins.k_dom, /*guaranteed=*/true, r_hi,
                "satisfied by variable bounds: ratio upper bound " + std::string(buf));
      continue;
    }
    if (blocked || !desired) {
      retained.push_back(t.m);
      rsum += mono_poly(t.m);
      continue;
    }
    Poly g = monomial_gcd(dsigned.content(), abs_mono(t.m));
    const Monomial& gm = g.leading();
    Poly lhs = dsigned.divided_by_monomial(gm);
    Poly rhs = mono_poly(abs_mono(t.m)).divided_by_monomial(gm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", r_hi);
    emit.make(HypKind::A, "A:" + label + ":drop:" + mono_poly(t.m).to_string(tab),
              {1.0, RationalExpr(lhs, Poly::one())}, {1.0, RationalExpr(rhs, Poly::one())},
              margins.k_dom, /*guaranteed=*/false, r_hi,
              "not guaranteed by bounds (ratio upper bound " + std::string(buf) +
                  "); dominance enforced as a constraint");
  }
  return Poly::from_terms(std::move(retained));
}

}  // namespace

SimplifyResult simplify_coefficients(const TransferFunction& grouped,
                                     const IntervalContext& ictx, const Margins& margins,
                                     const MarginOverrides& overrides) {
  SimplifyResult res;
  Emitter emit{ictx, margins, overrides, &res.hypotheses};

  auto run = [&](const SPoly& sp, char prefix) {
    std::vector<Poly> out;
    for (int k = 0; k <= sp.degree(); ++k) {
      std::string label = std::string(1, prefix) + std::to_string(k);
      out.push_back(
          simplify_coefficient(label, sp.coeff(k), ictx, margins, emit, &res.notes));
    }
    return SPoly(std::move(out));
  };

  res.tf.num = run(grouped.num, 'a');
  res.tf.den = run(grouped.den, 'b');
  res.tf.form = TfForm::simplified;
  res.tf.table = grouped.table;
  if (res.tf.num.degree() != grouped.num.degree() ||
      res.tf.den.degree() != grouped.den.degree())
    throw DerivationError("simplification destroyed a leading coefficient");
  return res;
}

// ---------------------------------------------------------------------------
// Approximate PZ extraction

namespace {

struct PolySolver {
  const IntervalContext& ictx;
  const Margins& margins;
  Emitter& emit;
  std::vector<std::string>* notes;
  bool zero_side;  // numerator roots carry signed expressions and planes
  std::string side_label;

  // Optimistic existence test for c1^2 >= scale*k*c0*c2 somewhere in the box.
  bool separation_feasible(const Poly& c0, const Poly& c1, const Poly& c2,
                           double scale) const {
    Interval num = ictx.poly(c1 * c1);
    Interval den = ictx.poly(c0 * c2);
    double rhs_lo = scale * margins.k_sep * std::max(den.lo, 0.0);
    return num.hi >= rhs_lo;
  }

  Plane classify(const RationalExpr& root) const {
    Interval iv = ictx.poly(root.num()) / ictx.poly(root.den());
    if (iv.is_negative()) return Plane::lhp;
    if (iv.is_positive()) return Plane::rhp;
    return Plane::ambiguous;
  }

  void record_root(PZModel& pz, const Poly& c_lo, const Poly& c_hi,
                   const std::vector<std::string>& enabling) {
    if (zero_side) {
      ZeroExpr z;
      z.root = RationalExpr(-c_lo, c_hi);
      z.plane = classify(z.root);
      z.enabling = enabling;
      pz.zeros.push_back(std::move(z));
    } else {
      RealPoleExpr p;
      p.magnitude = RationalExpr(c_lo, c_hi);
      Interval iv = ictx.poly(p.magnitude.num()) / ictx.poly(p.magnitude.den());
      if (iv.hi < 0)
        p.magnitude = RationalExpr(-c_lo, c_hi);  // keep the magnitude positive
      p.enabling = enabling;
      pz.real_poles.push_back(std::move(p));
    }
  }

  void record_pair(PZModel& pz, const Poly& c0, const Poly& c1, const Poly& c2,
                   const std::vector<std::string>& enabling) {
    ComplexPairExpr pr;
    pr.omega_n_sq = RationalExpr(c0, c2);
    pr.zeta_sq = RationalExpr(c1 * c1, (c0 * c2).scaled(4));
    pr.enabling = enabling;
    pz.complex_pairs.push_back(std::move(pr));
  }

  void quadratic(PZModel& pz, const Poly& c0, const Poly& c1, const Poly& c2) {
    Poly disc = c1 * c1 - (c0 * c2).scaled(4);
    Interval disc_iv = ictx.poly(disc);
    if (separation_feasible(c0, c1, c2, 4.0)) {
      Hypothesis h = emit.make(
          HypKind::B, "B:" + side_label + ":separation",
          {1.0, RationalExpr(c1 * c1, Poly::one())},
          {1.0, RationalExpr((c0 * c2).scaled(4), Poly::one())}, margins.k_sep,
          /*guaranteed=*/false, 0.0,
          "root separation: with the discriminant forced positive and large, the "
          "quadratic factors as (s + c0/c1)(s + c1/c2) up to O(1/k_sep)");
      record_root(pz, c0, c1, {h.id});
      record_root(pz, c1, c2, {h.id});
      return;
    }
    if (disc_iv.lo >= 0)
      notes->push_back(side_label +
                       ": roots provably real but not separable; using omega_n/zeta form");
    record_pair(pz, c0, c1, c2, {});
  }

  void solve(PZModel& pz, std::vector<Poly> c) {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
    int deg = static_cast<int>(c.size()) - 1;
    if (deg <= 0) return;
    Interval lead = ictx.poly(c.back());
    if (lead.contains_zero()) {
      // A numerator may legitimately change sign (that is what plane
      // regulation resolves); a denominator must not.
      if (!zero_side)
        throw DerivationError(side_label + ": leading coefficient interval spans zero");
      notes->push_back(side_label + ": leading coefficient sign depends on the design "
                                    "point; zero planes left to positioning");
    }
    if (deg > 4) throw DerivationError(side_label + ": degree > 4 unsupported");
    if (deg == 1) {
      record_root(pz, c[0], c[1], {});
      return;
    }
    if (deg == 2) {
      quadratic(pz, c[0], c[1], c[2]);
      return;
    }
    // Degree 3 or 4: iterated dominant-root splitting when every consecutive
    // ratio is separable, else split the dominant root and recurse.
    bool all_ok = true;
    for (int k = 1; k < deg; ++k)
      if (!separation_feasible(c[k - 1], c[k], c[k + 1], 1.0)) all_ok = false;
    if (all_ok) {
      for (int k = 1; k < deg; ++k) {
        Hypothesis h = emit.make(HypKind::B,
                                 "B:" + side_label + ":chain" + std::to_string(k),
                                 {1.0, RationalExpr(c[k] * c[k], Poly::one())},
                                 {1.0, RationalExpr(c[k - 1] * c[k + 1], Poly::one())},
                                 margins.k_sep, false, 0.0,
                                 "consecutive-coefficient separation for iterated "
                                 "dominant-root splitting");
        record_root(pz, c[k - 1], c[k], {h.id});
      }
      record_root(pz, c[deg - 1], c[deg], {});
      return;
    }
    if (separation_feasible(c[0], c[1], c[2], 1.0)) {
      Hypothesis h = emit.make(HypKind::B, "B:" + side_label + ":chain1",
                               {1.0, RationalExpr(c[1] * c[1], Poly::one())},
                               {1.0, RationalExpr(c[0] * c[2], Poly::one())}, margins.k_sep,
                               false, 0.0, "dominant root split off before deflation");
      record_root(pz, c[0], c[1], {h.id});
      std::vector<Poly> rest(c.begin() + 1, c.end());
      solve(pz, std::move(rest));
      return;
    }
    notes->push_back(side_label + ": no separable structure; keeping the leading "
                                  "quadratic as a pair and deflating the remainder");
    record_pair(pz, c[0], c[1], c[2], {});
    if (deg >= 3) {
      std::vector<Poly> rest(c.begin() + 2, c.end());
      solve(pz, std::move(rest));
    }
  }
};

}  // namespace

ExtractResult extract_pz(const TransferFunction& simplified, const IntervalContext& ictx,
                         const Margins& margins, const MarginOverrides& overrides) {
  ExtractResult res;
  Emitter emit{ictx, margins, overrides, &res.hypotheses};

  PolySolver zsolver{ictx, margins, emit, &res.notes, true, "num"};
  zsolver.solve(res.pz, simplified.num.coeffs());
  PolySolver psolver{ictx, margins, emit, &res.notes, false, "den"};
  psolver.solve(res.pz, simplified.den.coeffs());

  // Dominant pole: smallest interval-hi of the magnitude, ties by interval-lo.
  auto mag_iv = [&](const RealPoleExpr& p) {
    return (ictx.poly(p.magnitude.num()) / ictx.poly(p.magnitude.den())).abs();
  };
  std::stable_sort(res.pz.real_poles.begin(), res.pz.real_poles.end(),
                   [&](const RealPoleExpr& a, const RealPoleExpr& b) {
                     Interval ia = mag_iv(a), ib = mag_iv(b);
                     if (ia.hi != ib.hi) return ia.hi < ib.hi;
                     return ia.lo < ib.lo;
                   });
  return res;
}

// ---------------------------------------------------------------------------
// PZ positioning

std::vector<Hypothesis> position_pz(PZModel& pz, const ScaledExpr& gbw_hz,
                                    const IntervalContext& ictx, const Margins& margins,
                                    const RuleToggles& toggles,
                                    const MarginOverrides& overrides) {
  const auto& tab = ictx.table();
  std::vector<Hypothesis> hyps;
  Emitter emit{ictx, margins, overrides, &hyps};
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);

  if (toggles.c_dominance) {
    for (size_t i = 1; i < pz.real_poles.size(); ++i) {
      Hypothesis h = emit.make(
          HypKind::C, "C:dominance:p" + std::to_string(i + 1),
          {inv2pi, pz.real_poles[i].magnitude}, gbw_hz, margins.kappa_p, false, 0.0,
          "non-dominant pole held above the gain-bandwidth product so the "
          "single-pole roll-off assumption behind the GBW formula stays valid");
      pz.real_poles[i].enabling.push_back(h.id);
    }
  }

  for (size_t zi = 0; zi < pz.zeros.size(); ++zi) {
    ZeroExpr& z = pz.zeros[zi];
    std::string zlabel = "z" + std::to_string(zi + 1);
    if (z.plane == Plane::ambiguous && toggles.c_zero_lhp) {
      // Orient the root expression -c0/c1 so that c0 is positive, then force
      // every negative term of c1 under a positive partner with margin.
      Poly c0 = -z.root.num();
      Poly c1 = z.root.den();
      if (ictx.poly(c0).is_negative()) {
        c0 = -c0;
        c1 = -c1;
      }
      bool resolved = true;
      for (const auto& tneg : c1.terms()) {
        if (tneg.coeff >= 0) continue;
        const Monomial* best = nullptr;
        int best_deg = -1;
        for (const auto& tpos : c1.terms()) {
          if (tpos.coeff <= 0) continue;
          int d = monomial_gcd(tneg, tpos).leading().total_degree();
          if (d > best_deg) {
            best_deg = d;
            best = &tpos;
          }
        }
        if (!best) {
          resolved = false;
          continue;
        }
        Monomial tneg_abs = tneg;
        tneg_abs.coeff = -tneg_abs.coeff;
        Poly g = monomial_gcd(tneg_abs, *best);
        const Monomial& gm = g.leading();
        Poly lhs = Poly::from_terms({*best}).divided_by_monomial(gm);
        Poly rhs = Poly::from_terms({tneg_abs}).divided_by_monomial(gm);
        Hypothesis h = emit.make(HypKind::C, "C:zero-lhp:" + zlabel,
                                 {1.0, RationalExpr(lhs, Poly::one())},
                                 {1.0, RationalExpr(rhs, Poly::one())}, margins.lhp_margin,
                                 false, 0.0,
                                 "keeps the zero in the left half-plane so it adds "
                                 "phase lead instead of degrading the margin");
        z.enabling.push_back(h.id);
      }
      if (resolved) z.plane = Plane::lhp;
    } else if (z.plane == Plane::rhp && toggles.c_zero_rhp) {
      // |z| = c0/(-c1) with the root expression oriented so c0 > 0.
      Poly c0 = -z.root.num();
      Poly c1 = z.root.den();
      if (ictx.poly(c0).is_negative()) {
        c0 = -c0;
        c1 = -c1;
      }
      Hypothesis h = emit.make(
          HypKind::C, "C:zero-rhp:" + zlabel, {inv2pi, RationalExpr(c0, -c1)}, gbw_hz,
          margins.kappa_z, false, 0.0,
          "right-half-plane zero pushed well above GBW to bound its phase loss");
      z.enabling.push_back(h.id);
    }
  }

  if (toggles.c_complex) {
    for (size_t pi = 0; pi < pz.complex_pairs.size(); ++pi) {
      auto& pr = pz.complex_pairs[pi];
      std::string label = "pair" + std::to_string(pi + 1);
      Hypothesis hz = emit.make(HypKind::C, "C:complex-zeta:" + label, {1.0, pr.zeta_sq},
                                {1.0, RationalExpr(Poly::one(), Poly::one())},
                                margins.zeta_min * margins.zeta_min, false, 0.0,
                                "damping floor for the complex pole pair");
      double wscale = 2.0 * std::numbers::pi * gbw_hz.scale;
      Hypothesis hw = emit.make(HypKind::C, "C:complex-wn:" + label, {1.0, pr.omega_n_sq},
                                {wscale * wscale, gbw_hz.expr * gbw_hz.expr},
                                margins.kappa_p * margins.kappa_p, false, 0.0,
                                "natural frequency held above GBW like a real "
                                "non-dominant pole");
      pr.enabling.push_back(hz.id);
      pr.enabling.push_back(hw.id);
    }
  }

  if (toggles.c_cancel && !pz.zeros.empty() && pz.real_poles.size() >= 2) {
    // optional cancellation band 0.8 <= |z|/|p| <= 1.25 for the first
    // LHP zero against the first non-dominant pole
    for (const auto& z : pz.zeros) {
      if (z.plane != Plane::lhp) continue;
      Poly c0 = -z.root.num();
      Poly c1 = z.root.den();
      if (ictx.poly(c0).is_negative()) {
        c0 = -c0;
        c1 = -c1;
      }
      RationalExpr zmag(c0, c1);
      const RationalExpr& pmag = pz.real_poles[1].magnitude;
      emit.make(HypKind::C, "C:cancel:lo", {1.0, zmag}, {1.0, pmag}, 0.8, false, 0.0,
                "zero-pole cancellation band, lower edge");
      emit.make(HypKind::C, "C:cancel:hi", {1.0, pmag}, {1.0, zmag}, 0.8, false, 0.0,
                "zero-pole cancellation band, upper edge");
      break;
    }
  }
  (void)tab;
  return hyps;
}

}  // namespace ampkit
