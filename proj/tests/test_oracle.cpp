#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ampkit/kcl.hpp"
#include "ampkit/oracle.hpp"

using namespace ampkit;

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
std::string netlist_path(const char* name) {
  return std::string(AMPKIT_NETLIST_DIR) + "/" + name;
}

// multiply polynomial coefficient vectors (ascending powers)
std::vector<std::complex<double>> conv(const std::vector<std::complex<double>>& a,
                                       const std::vector<std::complex<double>>& b) {
  std::vector<std::complex<double>> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}
}  // namespace

TEST_CASE("single pole magnitude at the corner frequency") {
  double p = two_pi * 1000;
  NumericTF tf{{1.0}, {1.0, 1.0 / p}};
  double mag_db = 20 * std::log10(std::abs(tf.eval({0.0, two_pi * 1000})));
  CHECK(mag_db == doctest::Approx(-3.0103).epsilon(1e-3));
}

TEST_CASE("sweep endpoints are honored exactly") {
  NumericTF tf{{1.0}, {1.0, 1.0}};
  auto sweep = ac_sweep_serial(tf, 2.5, 9.7e6, 17);
  CHECK(sweep.front().freq_hz == 2.5);
  CHECK(sweep.back().freq_hz == 9.7e6);
  for (size_t i = 1; i < sweep.size(); ++i)
    CHECK(sweep[i].freq_hz > sweep[i - 1].freq_hz);
}

TEST_CASE("MZC: |H| at 1 Hz equals the DC gain within 0.01 dB") {
  SymbolicModel m =
      build_symbols(elaborate(parse_netlist(slurp(netlist_path("mzc.net")))));
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  std::map<std::string, double> x = {{"G1", 1e-4}, {"G2", 2e-4}, {"Gf", 1.1e-4},
                                     {"A1", 60.0}, {"A2", 60.0}, {"Af", 60.0},
                                     {"Cm", 1e-12}};
  NumericBinding b(m, x);
  NumericTF ntf = compile_tf(raw, b);
  double dc_db = 20 * std::log10(std::abs(ntf.num[0] / ntf.den[0]));
  double at1_db = 20 * std::log10(std::abs(ntf.eval({0.0, two_pi * 1.0})));
  CHECK(std::abs(dc_db - at1_db) < 0.01);
}

TEST_CASE("first-order system measures gbw ~ gain*p/2pi and PM ~ 90") {
  double p = two_pi * 1000;
  NumericTF tf{{1000.0}, {1.0, 1.0 / p}};
  MeasuredMetrics mm = measure(tf, 1e-4, 1e-11);
  REQUIRE(mm.unity_crossing_found);
  CHECK(!mm.multiple_crossings);
  CHECK(mm.gbw_hz == doctest::Approx(1e6).epsilon(1e-3));
  CHECK(mm.pm_deg == doctest::Approx(90.0).epsilon(0.002));
  CHECK(mm.gain_db == doctest::Approx(60.0).epsilon(1e-4));
  CHECK(mm.fom == doctest::Approx((1e6 * 1e-6) * (1e-11 * 1e12) / (1e-4 * 1e3)));
}

TEST_CASE("no unity crossing is reported, not invented") {
  NumericTF tf{{0.5}, {1.0, 1.0 / two_pi}};  // DC gain below unity
  MeasuredMetrics mm = measure(tf, 1e-4, 1e-11);
  CHECK(!mm.unity_crossing_found);
}

TEST_CASE("multiple unity crossings: first one wins, flag raised") {
  // gain 100 with a double pole at 1 kHz, double zero at 20 kHz (plateau at
  // 0.25), double zero at 100 kHz (+40 dB/dec back above unity), then four
  // poles at 10 MHz to roll off for good
  std::vector<std::complex<double>> num = {100.0};
  std::vector<std::complex<double>> den = {1.0};
  auto zpair = [&](double f) {
    std::vector<std::complex<double>> lin = {1.0, 1.0 / (two_pi * f)};
    num = conv(num, conv(lin, lin));
  };
  auto ppair = [&](double f, int count) {
    std::vector<std::complex<double>> lin = {1.0, 1.0 / (two_pi * f)};
    for (int k = 0; k < count; ++k) den = conv(den, lin);
  };
  zpair(2e4);
  zpair(1e5);
  ppair(1e3, 2);
  ppair(1e7, 4);
  NumericTF tf;
  for (auto c : num) tf.num.push_back(c.real());
  for (auto c : den) tf.den.push_back(c.real());

  MeasuredMetrics mm = measure(tf, 1e-4, 1e-11);
  REQUIRE(mm.unity_crossing_found);
  CHECK(mm.multiple_crossings);
  CHECK(mm.gbw_hz < 2e4);  // the first (lowest-frequency) crossing
}

TEST_CASE("exact roots of small polynomials") {
  RootResult r1 = exact_roots({2.0, 3.0, 1.0});  // s^2+3s+2
  REQUIRE(r1.converged);
  REQUIRE(r1.roots.size() == 2);
  std::sort(r1.roots.begin(), r1.roots.end(),
            [](auto a, auto b) { return a.real() > b.real(); });
  CHECK(r1.roots[0].real() == doctest::Approx(-1.0));
  CHECK(r1.roots[1].real() == doctest::Approx(-2.0));
  CHECK(r1.roots[0].imag() == 0.0);

  RootResult r2 = exact_roots({5.0, 2.0, 1.0});  // s^2+2s+5 -> -1 +/- 2j
  REQUIRE(r2.converged);
  REQUIRE(r2.roots.size() == 2);
  std::sort(r2.roots.begin(), r2.roots.end(),
            [](auto a, auto b) { return a.imag() < b.imag(); });
  CHECK(r2.roots[0].real() == doctest::Approx(-1.0));
  CHECK(r2.roots[0].imag() == doctest::Approx(-2.0));
  CHECK(r2.roots[1] == std::conj(r2.roots[0]));  // conjugates exact
}

TEST_CASE("constructed-root recovery and reconstruction residual, 100 draws") {
  std::mt19937_64 rng(31);
  auto unit = [&]() { return (rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 100; ++trial) {
    int deg = 1 + static_cast<int>(rng() % 5);
    std::vector<std::complex<double>> roots;
    while (static_cast<int>(roots.size()) < deg) {
      double mag = std::pow(10.0, 1 + 4 * unit());
      if (deg - static_cast<int>(roots.size()) >= 2 && rng() % 2) {
        double re = -mag * (0.2 + 0.8 * unit());
        double im = mag * (0.2 + 0.8 * unit());
        roots.push_back({re, im});
        roots.push_back({re, -im});
      } else {
        roots.push_back({-mag, 0.0});
      }
    }
    std::vector<std::complex<double>> coeffs = {1.0};
    for (const auto& r : roots) coeffs = conv(coeffs, {-r, 1.0});

    RootResult found = exact_roots(coeffs);
    REQUIRE(found.converged);
    REQUIRE(found.roots.size() == roots.size());

    const auto& got = found.roots;
    auto pool = got;
    for (const auto& want : roots) {
      size_t best = 0;
      for (size_t i = 1; i < pool.size(); ++i)
        if (std::abs(pool[i] - want) < std::abs(pool[best] - want)) best = i;
      CHECK(std::abs(pool[best] - want) <= 1e-8 * std::abs(want));
      pool.erase(pool.begin() + static_cast<long>(best));
    }

    // re-expanded polynomial matches the input coefficients
    std::vector<std::complex<double>> re = {1.0};
    for (const auto& r : got) re = conv(re, {-r, 1.0});
    for (size_t i = 0; i < coeffs.size(); ++i) {
      double scale = std::abs(coeffs[i]);
      if (scale == 0) scale = 1;
      CHECK(std::abs(re[i] - coeffs[i]) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("oracle equals the independent MNA solve at every sweep point") {
  SymbolicModel m =
      build_symbols(elaborate(parse_netlist(slurp(netlist_path("mzc.net")))));
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  std::mt19937_64 rng(77);
  auto uni = [&](double lo, double hi) {
    double t = (rng() >> 11) * 0x1.0p-53;
    return lo * std::pow(hi / lo, t);
  };
  for (int pt = 0; pt < 20; ++pt) {
    std::map<std::string, double> x = {
        {"G1", uni(1e-5, 1e-3)}, {"G2", uni(1e-5, 1e-3)}, {"Gf", uni(1e-5, 1e-3)},
        {"A1", uni(40, 80)},     {"A2", uni(40, 80)},     {"Af", uni(40, 80)},
        {"Cm", uni(1e-14, 1e-11)}};
    NumericBinding b(m, x);
    NumericTF ntf = compile_tf(raw, b);
    std::complex<double> s(0.0, two_pi * uni(1.0, 1e10));
    auto h1 = ntf.eval(s);
    auto h2 = mna_transfer(m.topo, x, s);
    CHECK(std::abs(h1 - h2) <= 1e-10 * std::abs(h2));
  }
}

TEST_CASE("unwrapped phase has no jumps above 90 degrees at 50+ points/decade") {
  SymbolicModel m =
      build_symbols(elaborate(parse_netlist(slurp(netlist_path("mzc.net")))));
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  std::map<std::string, double> x = {{"G1", 1e-4}, {"G2", 2e-4}, {"Gf", 1.1e-4},
                                     {"A1", 60.0}, {"A2", 60.0}, {"Af", 60.0},
                                     {"Cm", 1e-13}};
  NumericBinding b(m, x);
  NumericTF ntf = compile_tf(raw, b);
  auto sweep = ac_sweep_serial(ntf, 1.0, 1e11, 50);
  std::istringstream csv(sweep_to_csv(sweep));
  std::string line;
  std::getline(csv, line);  // header
  double prev = 0;
  bool first = true;
  while (std::getline(csv, line)) {
    auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
    double ph = std::stod(line.substr(c2 + 1));
    if (!first) CHECK(std::abs(ph - prev) <= 90.0);
    prev = ph;
    first = false;
    (void)c1;
  }
}

TEST_CASE("compare_pz matches by magnitude order and flags leftovers") {
  ExactPZ exact;
  exact.poles = {{-100.0, 0.0}, {-1e5, 0.0}};
  exact.zeros = {{-5e4, 0.0}};
  ApproxPZValues same;
  same.poles = {{-100.0, 0.0}, {-1e5, 0.0}};
  same.zeros = {{-5e4, 0.0}};
  PZComparison c1 = compare_pz(same, exact);
  for (const auto& row : c1.rows) {
    CHECK(row.matched);
    CHECK(row.rel_err == doctest::Approx(0.0));
  }

  ApproxPZValues fewer;
  fewer.poles = {{-101.0, 0.0}};  // order reduction: one pole missing
  fewer.zeros = {};
  PZComparison c2 = compare_pz(fewer, exact);
  int unmatched = 0;
  for (const auto& row : c2.rows)
    if (!row.matched) ++unmatched;
  CHECK(unmatched == 2);  // the second pole and the zero
}

TEST_CASE("approx_pz_values expands complex pairs") {
  SymbolTable tab0;
  auto table = std::make_shared<SymbolTable>(tab0);
  SymbolicModel m;
  m.table = table;
  PZModel pz;
  ComplexPairExpr pr;
  pr.omega_n_sq = RationalExpr(Poly::one().scaled(25), Poly::one());
  pr.zeta_sq = RationalExpr(Poly::one().scaled(mpq_class(9, 100)), Poly::one());
  pz.complex_pairs.push_back(pr);
  auto vals = approx_pz_values(pz, m, {});
  REQUIRE(vals.poles.size() == 2);
  CHECK(vals.poles[0] == std::conj(vals.poles[1]));
  CHECK(std::abs(vals.poles[0]) == doctest::Approx(5.0));
  CHECK(vals.poles[0].real() == doctest::Approx(-1.5));  // -zeta*wn
}
