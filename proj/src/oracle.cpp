#include "ampkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ampkit {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

std::complex<double> at_freq(const NumericTF& tf, double f) {
  return tf.eval(std::complex<double>(0.0, two_pi * f));
}

double principal_deg(std::complex<double> h) {
  return std::arg(h) * 180.0 / std::numbers::pi;
}

// continue an unwrapped phase sequence by the nearest 360-degree multiple
double continue_phase(double prev_deg, double principal) {
  double k = std::round((prev_deg - principal) / 360.0);
  return principal + 360.0 * k;
}
}  // namespace

std::vector<double> sweep_frequencies(double f_lo, double f_hi, int points_per_decade) {
  if (!(f_lo > 0) || f_hi < f_lo || points_per_decade < 1)
    throw std::invalid_argument("bad sweep range");
  std::vector<double> f;
  double decades = std::log10(f_hi / f_lo);
  long total = std::lround(std::ceil(decades * points_per_decade));
  for (long k = 0; k < total; ++k)
    f.push_back(f_lo * std::pow(10.0, static_cast<double>(k) / points_per_decade));
  f.push_back(f_hi);  // exact upper endpoint
  return f;
}

std::vector<SweepPoint> ac_sweep_serial(const NumericTF& tf, double f_lo, double f_hi,
                                        int points_per_decade) {
  auto freqs = sweep_frequencies(f_lo, f_hi, points_per_decade);
  std::vector<SweepPoint> out(freqs.size());
  for (size_t i = 0; i < freqs.size(); ++i) out[i] = {freqs[i], at_freq(tf, freqs[i])};
  return out;
}

std::vector<SweepPoint> ac_sweep(const NumericTF& tf, double f_lo, double f_hi,
                                 int points_per_decade) {
  auto freqs = sweep_frequencies(f_lo, f_hi, points_per_decade);
  std::vector<SweepPoint> out(freqs.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(freqs.size()); ++i) {
    size_t k = static_cast<size_t>(i);
    out[k] = {freqs[k], at_freq(tf, freqs[k])};
  }
  return out;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& sweep) {
  std::ostringstream out;
  out << "freq_hz,mag_db,phase_deg\n";
  double prev = 0;
  bool first = true;
  for (const auto& p : sweep) {
    double mag_db = 20.0 * std::log10(std::abs(p.h));
    double ph = principal_deg(p.h);
    ph = first ? ph : continue_phase(prev, ph);
    first = false;
    prev = ph;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", p.freq_hz, mag_db, ph);
    out << buf;
  }
  return out.str();
}

MeasuredMetrics measure(const NumericTF& tf, double power_w, double cl_farad, double f_lo,
                        double f_hi, int points_per_decade) {
  MeasuredMetrics m;
  m.power_w = power_w;
  m.gain_db = 20.0 * std::log10(std::abs(at_freq(tf, 1.0)));

  auto sweep = ac_sweep_serial(tf, f_lo, f_hi, points_per_decade);
  std::vector<double> mag(sweep.size());
  for (size_t i = 0; i < sweep.size(); ++i) mag[i] = std::abs(sweep[i].h);

  // first downward unity crossing; later crossings only set the flag
  size_t cross = sweep.size();
  int crossings = 0;
  for (size_t i = 0; i + 1 < sweep.size(); ++i) {
    if (mag[i] >= 1.0 && mag[i + 1] < 1.0) {
      ++crossings;
      if (cross == sweep.size()) cross = i;
    }
  }
  m.multiple_crossings = crossings > 1;
  if (cross == sweep.size()) {
    m.unity_crossing_found = false;
    return m;
  }
  m.unity_crossing_found = true;

  double lo = sweep[cross].freq_hz, hi = sweep[cross + 1].freq_hz;
  while (hi / lo - 1.0 > 1e-6) {
    double mid = std::sqrt(lo * hi);
    if (std::abs(at_freq(tf, mid)) >= 1.0) lo = mid;
    else hi = mid;
  }
  m.gbw_hz = std::sqrt(lo * hi);

  // continuous phase from the low end of the sweep up to the crossing
  double phase = principal_deg(sweep[0].h);
  for (size_t i = 1; i <= cross; ++i)
    phase = continue_phase(phase, principal_deg(sweep[i].h));
  phase = continue_phase(phase, principal_deg(at_freq(tf, m.gbw_hz)));
  m.pm_deg = 180.0 + phase;

  m.fom = (m.gbw_hz * 1e-6) * (cl_farad * 1e12) / (power_w * 1e3);
  return m;
}

ExactPZ exact_pz(const NumericTF& tf) {
  auto to_cplx = [](const std::vector<double>& c) {
    std::vector<std::complex<double>> out(c.size());
    for (size_t i = 0; i < c.size(); ++i) out[i] = c[i];
    return out;
  };
  ExactPZ pz;
  RootResult zn = exact_roots(to_cplx(tf.num));
  RootResult pd = exact_roots(to_cplx(tf.den));
  pz.zeros = zn.roots;
  pz.poles = pd.roots;
  pz.converged = zn.converged && pd.converged;
  auto by_mag = [](const std::complex<double>& a, const std::complex<double>& b) {
    return std::abs(a) < std::abs(b);
  };
  std::sort(pz.zeros.begin(), pz.zeros.end(), by_mag);
  std::sort(pz.poles.begin(), pz.poles.end(), by_mag);
  return pz;
}

ApproxPZValues approx_pz_values(const PZModel& pz, const SymbolicModel& m,
                                const std::map<std::string, double>& x) {
  auto values = bind_symbols<double>(*m.table, [&](const SymbolInfo& si) {
    auto it = x.find(si.name);
    if (it != x.end()) return it->second;
    if (si.fixed) return *si.fixed;
    throw DerivationError("unbound variable '" + si.name + "'");
  });
  auto sym = [&](int sid) { return values[static_cast<size_t>(sid)]; };

  ApproxPZValues out;
  for (const auto& z : pz.zeros) out.zeros.push_back(z.root.eval<double>(sym));
  for (const auto& p : pz.real_poles)
    out.poles.push_back(-std::abs(p.magnitude.eval<double>(sym)));
  for (const auto& pr : pz.complex_pairs) {
    double wn = std::sqrt(std::abs(pr.omega_n_sq.eval<double>(sym)));
    double zeta = std::sqrt(std::abs(pr.zeta_sq.eval<double>(sym)));
    if (zeta < 1.0) {
      std::complex<double> root(-zeta * wn, wn * std::sqrt(1.0 - zeta * zeta));
      out.poles.push_back(root);
      out.poles.push_back(std::conj(root));
    } else {
      double inner = std::sqrt(zeta * zeta - 1.0);
      out.poles.push_back(-wn * (zeta - inner));
      out.poles.push_back(-wn * (zeta + inner));
    }
  }
  auto by_mag = [](const std::complex<double>& a, const std::complex<double>& b) {
    return std::abs(a) < std::abs(b);
  };
  std::sort(out.zeros.begin(), out.zeros.end(), by_mag);
  std::sort(out.poles.begin(), out.poles.end(), by_mag);
  return out;
}

PZComparison compare_pz(const ApproxPZValues& approx, const ExactPZ& exact) {
  PZComparison cmp;
  auto run = [&](const std::vector<std::complex<double>>& a,
                 const std::vector<std::complex<double>>& e, const char* kind) {
    size_t n = std::max(a.size(), e.size());
    for (size_t i = 0; i < n; ++i) {
      PZComparison::Row row;
      row.kind = kind;
      if (i < a.size() && i < e.size()) {
        row.approx = a[i];
        row.exact = e[i];
        row.matched = true;
        double scale = std::abs(e[i]);
        row.rel_err = scale > 0 ? std::abs(a[i] - e[i]) / scale
                                : std::abs(a[i] - e[i]);
      } else if (i < a.size()) {
        row.approx = a[i];
        row.matched = false;  // approximate root with no exact partner
      } else {
        row.exact = e[i];
        row.matched = false;  // exact root missing from the approximation
      }
      cmp.rows.push_back(row);
    }
  };
  run(approx.zeros, exact.zeros, "zero");
  run(approx.poles, exact.poles, "pole");
  return cmp;
}

// ---------------------------------------------------------------------------
// Independent numeric MNA path

std::vector<std::complex<double>> solve_complex_linear(
    std::vector<std::vector<std::complex<double>>> m, std::vector<std::complex<double>> rhs) {
  const size_t n = m.size();
  for (size_t k = 0; k < n; ++k) {
    size_t piv = k;
    for (size_t r = k + 1; r < n; ++r)
      if (std::abs(m[r][k]) > std::abs(m[piv][k])) piv = r;
    if (std::abs(m[piv][k]) == 0.0) throw std::runtime_error("singular linear system");
    std::swap(m[k], m[piv]);
    std::swap(rhs[k], rhs[piv]);
    for (size_t r = k + 1; r < n; ++r) {
      std::complex<double> factor = m[r][k] / m[k][k];
      for (size_t c = k; c < n; ++c) m[r][c] -= factor * m[k][c];
      rhs[r] -= factor * rhs[k];
    }
  }
  std::vector<std::complex<double>> x(n);
  for (size_t k = n; k-- > 0;) {
    std::complex<double> acc = rhs[k];
    for (size_t c = k + 1; c < n; ++c) acc -= m[k][c] * x[c];
    x[k] = acc / m[k][k];
  }
  return x;
}

std::complex<double> mna_transfer(const Topology& t, const std::map<std::string, double>& x,
                                  std::complex<double> s) {
  auto value_of = [&](int var) {
    const auto& v = t.variables[static_cast<size_t>(var)];
    auto it = x.find(v.name);
    if (it != x.end()) return it->second;
    if (v.fixed) return *v.fixed;
    throw std::runtime_error("unbound variable '" + v.name + "'");
  };

  auto unknowns = t.unknown_nodes();
  const size_t n = unknowns.size();
  auto row_of = [&](const std::string& node) -> int {
    for (size_t i = 0; i < n; ++i)
      if (unknowns[i] == node) return static_cast<int>(i);
    return -1;
  };

  std::vector<std::vector<std::complex<double>>> m(n, std::vector<std::complex<double>>(n));
  std::vector<std::complex<double>> rhs(n);

  auto stamp = [&](const std::string& a, const std::string& b, std::complex<double> y) {
    int ra = a == "0" ? -2 : (a == t.input_node ? -1 : row_of(a));
    int rb = b == "0" ? -2 : (b == t.input_node ? -1 : row_of(b));
    if (ra >= 0) {
      m[ra][ra] += y;
      if (rb >= 0) m[ra][rb] -= y;
      if (rb == -1) rhs[ra] += y;
    }
    if (rb >= 0) {
      m[rb][rb] += y;
      if (ra >= 0) m[rb][ra] -= y;
      if (ra == -1) rhs[rb] += y;
    }
  };

  for (const auto& e : t.passives) {
    double v = value_of(e.value_var);
    stamp(e.node_a, e.node_b,
          e.kind == PassiveElement::capacitor ? s * v : std::complex<double>(1.0 / v));
  }
  // behavioral parasitics recomputed from the stage list
  for (const auto& st : t.stages) {
    double gm = value_of(st.gm_var);
    double gain = value_of(st.gain_var);
    stamp(st.output_node, "0", gm / gain);
    double cp = 0;
    for (const auto& other : t.stages)
      if (other.input_node == st.output_node) cp += value_of(other.gm_var) / t.omega_t;
    if (cp > 0) stamp(st.output_node, "0", s * cp);
  }
  for (const auto& st : t.stages) {
    double gm = value_of(st.gm_var) * st.polarity;
    int out = row_of(st.output_node);
    if (st.input_node == t.input_node) rhs[out] -= gm;
    else m[out][row_of(st.input_node)] += gm;
  }

  auto v = solve_complex_linear(std::move(m), std::move(rhs));
  int out = row_of(t.output_node);
  if (out < 0) throw std::runtime_error("output node is not an unknown");
  return v[static_cast<size_t>(out)];
}

}  // namespace ampkit
