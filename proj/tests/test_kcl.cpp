#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "ampkit/kcl.hpp"
#include "ampkit/oracle.hpp"

using namespace ampkit;

namespace {
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

SymbolicModel mzc_model() {
  return build_symbols(elaborate(parse_netlist(slurp(netlist_path("mzc.net")))));
}

// shorthand for looking up a registered symbol as a degree-1 poly
Poly sym(const SymbolicModel& m, const char* name) {
  int id = m.table->find(name);
  REQUIRE(id >= 0);
  return Poly::symbol(id);
}
}  // namespace

TEST_CASE("MZC KCL system matches the reference equations term for term") {
  SymbolicModel m = mzc_model();
  KclSystem sys = build_kcl_system(m, KclMode::raw);
  REQUIRE(sys.unknowns == std::vector<std::string>{"n1", "vout"});

  Poly s = Poly::symbol(SymbolTable::s_id);
  Poly G1 = sym(m, "G1"), G2 = sym(m, "G2"), Gf = sym(m, "Gf");
  Poly Cm = sym(m, "Cm"), CL = sym(m, "CL"), Cp1 = sym(m, "Cp1");
  Poly Rp1i = sym(m, "1/Rp1"), Rp2i = sym(m, "1/Rp2"), Rpfi = sym(m, "1/Rpf");
  Poly RLi = sym(m, "1/RL");

  // G1 Vin + V1 (1/Rp1 + s Cp1 + s Cm) - Vout s Cm = 0
  CHECK(sys.matrix[0][0] == Rp1i + s * Cp1 + s * Cm);
  CHECK(sys.matrix[0][1] == -(s * Cm));
  CHECK(sys.rhs[0] == -G1);
  // -Gf Vin + V1 (G2 - s Cm) + Vout (1/Rp2 + 1/Rpf + 1/RL + s CL + s Cm) = 0
  CHECK(sys.matrix[1][0] == G2 - s * Cm);
  CHECK(sys.matrix[1][1] == Rp2i + Rpfi + RLi + s * CL + s * Cm);
  CHECK(sys.rhs[1] == Gf);
}

TEST_CASE("SMC KCL system from hand-derived two-node analysis") {
  SymbolicModel m =
      build_symbols(elaborate(parse_netlist(slurp(netlist_path("smc.net")))));
  KclSystem sys = build_kcl_system(m, KclMode::raw);
  Poly s = Poly::symbol(SymbolTable::s_id);
  Poly Cm = sym(m, "Cm"), Cp1 = sym(m, "Cp1"), Rp1i = sym(m, "1/Rp1");
  CHECK(sys.matrix[0][0] == Rp1i + s * Cp1 + s * Cm);
  CHECK(sys.matrix[0][1] == -(s * Cm));
  // cross-check with a numeric MNA solve at a random point
  std::map<std::string, double> x = {{"G1", 3e-5}, {"G2", 2e-4}, {"A1", 55.0},
                                     {"A2", 61.0}, {"Cm", 2e-12}};
  TransferFunction raw = cramer_solve(sys, "vout");
  NumericBinding b(m, x);
  std::complex<double> sv(1234.5, 7.7e5);
  auto href = mna_transfer(m.topo, x, sv);
  auto hval = tf_eval(raw, b, sv);
  CHECK(std::abs(hval - href) / std::abs(href) < 1e-12);
}

TEST_CASE("single stage with only RL and CL yields a 1x1 system") {
  SymbolicModel m =
      build_symbols(elaborate(parse_netlist(slurp(netlist_path("single.net")))));
  KclSystem sys = build_kcl_system(m, KclMode::raw);
  CHECK(sys.unknowns.size() == 1);
  TransferFunction tf = cramer_solve(sys, "vout");
  CHECK(tf.num.degree() == 0);
  CHECK(tf.den.degree() == 1);
}

TEST_CASE("MZC raw TF has degree-1 numerator over a degree-2 denominator") {
  SymbolicModel m = mzc_model();
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  CHECK(raw.num.degree() == 1);
  CHECK(raw.den.degree() == 2);
  CHECK(raw.form == TfForm::raw);
  CHECK(!raw.den.coeff(0).is_zero());
}

TEST_CASE("random 3x3 symbolic systems agree with a numeric complex solve") {
  std::mt19937_64 rng(2024);
  SymbolTable tab;
  int a = tab.add_design("a", -1, 0.5, 2, std::nullopt);
  int b2 = tab.add_design("b", -1, 0.5, 2, std::nullopt);
  auto rnd_poly = [&](bool with_s) {
    Poly p = Poly::constant(mpq_class(static_cast<long>(rng() % 7) - 3));
    if (rng() % 2) p += Poly::symbol(a, 1, mpq_class(static_cast<long>(rng() % 5) - 2));
    if (rng() % 2) p += Poly::symbol(b2, 1, mpq_class(static_cast<long>(rng() % 5) - 2));
    if (with_s && rng() % 2)
      p += Poly::symbol(SymbolTable::s_id) * Poly::symbol(a, 1, mpq_class(1 + (long)(rng() % 3)));
    return p;
  };

  int checked = 0;
  for (int trial = 0; trial < 40 && checked < 12; ++trial) {
    KclSystem sys;
    sys.unknowns = {"v1", "v2", "v3"};
    sys.table = std::shared_ptr<SymbolTable>(&tab, [](SymbolTable*) {});
    sys.matrix.assign(3, std::vector<Poly>(3));
    sys.rhs.assign(3, Poly());
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) sys.matrix[i][j] = rnd_poly(true);
      sys.rhs[i] = rnd_poly(false);
    }
    TransferFunction tf;
    try {
      tf = cramer_solve(sys, "v2");
    } catch (const DerivationError&) {
      continue;  // singular or improper draw
    }
    ++checked;

    double av = 0.5 + (rng() % 1000) / 999.0;
    double bv = 0.5 + (rng() % 1000) / 999.0;
    std::complex<double> s(0.3 * (double)(rng() % 100), 0.7 * (double)(rng() % 100) + 1);
    std::vector<std::vector<std::complex<double>>> mnum(3, std::vector<std::complex<double>>(3));
    std::vector<std::complex<double>> rnum(3);
    auto eval_poly = [&](const Poly& p) {
      std::complex<double> acc = 0;
      for (const auto& mo : p.terms()) {
        std::complex<double> term = mo.coeff.get_d();
        for (auto [sid, e] : mo.exps)
          for (int k = 0; k < e; ++k)
            term *= sid == SymbolTable::s_id ? s
                   : sid == a                ? std::complex<double>(av)
                                             : std::complex<double>(bv);
        acc += term;
      }
      return acc;
    };
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) mnum[i][j] = eval_poly(sys.matrix[i][j]);
      rnum[i] = eval_poly(sys.rhs[i]);
    }
    std::vector<std::complex<double>> v;
    try {
      v = solve_complex_linear(mnum, rnum);
    } catch (const std::exception&) {
      continue;
    }
    // evaluate the symbolic solution at the same point
    auto eval_spoly = [&](const SPoly& sp) {
      std::complex<double> acc = 0, pw = 1;
      for (int k = 0; k <= sp.degree(); ++k) {
        acc += pw * eval_poly(sp.coeff(k));
        pw *= s;
      }
      return acc;
    };
    std::complex<double> hs = eval_spoly(tf.num) / eval_spoly(tf.den);
    CHECK(std::abs(hs - v[1]) <= 1e-10 * std::max(1.0, std::abs(v[1])));
  }
  CHECK(checked >= 10);
}

TEST_CASE("Bareiss determinant matches cofactor expansion") {
  std::mt19937_64 rng(7);
  SymbolTable tab;
  int a = tab.add_design("a", -1, 1, 2, std::nullopt);
  int b = tab.add_design("b", -1, 1, 2, std::nullopt);
  auto rnd_poly = [&]() {
    Poly p = Poly::constant(mpq_class(static_cast<long>(rng() % 5) - 2));
    if (rng() % 2) p += Poly::symbol(a, 1 + (int)(rng() % 2));
    if (rng() % 2) p += Poly::symbol(b);
    if (rng() % 3 == 0) p += Poly::symbol(SymbolTable::s_id);
    return p;
  };
  for (int trial = 0; trial < 20; ++trial) {
    size_t n = 2 + (trial % 2);
    std::vector<std::vector<Poly>> w(n, std::vector<Poly>(n));
    for (auto& row : w)
      for (auto& cell : row) cell = rnd_poly();
    CHECK(det_bareiss(w) == det_cofactor(w));
  }
}

TEST_CASE("intermediate TF coefficients match the substituted forms exactly") {
  SymbolicModel m = mzc_model();
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  TransferFunction inter = substitute_parasitics(raw, m);
  CHECK(inter.form == TfForm::intermediate);

  Poly G1 = sym(m, "G1"), G2 = sym(m, "G2"), Gf = sym(m, "Gf");
  Poly Cm = sym(m, "Cm"), CL = sym(m, "CL");
  Poly A1i = sym(m, "1/A1"), wti = sym(m, "1/wt");

  // a1 = Gf*G2/wt + Cm*(Gf - G1)
  CHECK(inter.num.coeff(1) == Gf * G2 * wti + Cm * (Gf - G1));
  // a0 = G1*G2 + G1*Gf/A1
  CHECK(inter.num.coeff(0) == G1 * G2 + G1 * Gf * A1i);
  // b2 = (G2/wt)*(CL + Cm) + CL*Cm
  CHECK(inter.den.coeff(2) == G2 * wti * (CL + Cm) + CL * Cm);
}

TEST_CASE("substitution preserves the transfer function value") {
  SymbolicModel m = mzc_model();
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  TransferFunction inter = substitute_parasitics(raw, m);
  TransferFunction grouped = cramer_solve(build_kcl_system(m, KclMode::grouped), "vout");

  std::mt19937_64 rng(99);
  auto uni = [&](double lo, double hi) {
    double t = (rng() >> 11) * 0x1.0p-53;
    return lo * std::pow(hi / lo, t);
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::map<std::string, double> x = {
        {"G1", uni(1e-5, 1e-3)}, {"G2", uni(1e-5, 1e-3)}, {"Gf", uni(1e-5, 1e-3)},
        {"A1", uni(40, 80)},     {"A2", uni(40, 80)},     {"Af", uni(40, 80)},
        {"Cm", uni(1e-14, 1e-11)}};
    NumericBinding b(m, x);
    std::complex<double> s(0.0, 2 * std::numbers::pi * uni(1.0, 1e9));
    auto h_raw = tf_eval(raw, b, s);
    auto h_int = tf_eval(inter, b, s);
    auto h_grp = tf_eval(grouped, b, s);
    CHECK(std::abs(h_int - h_raw) <= 1e-12 * std::abs(h_raw));
    CHECK(std::abs(h_grp - h_raw) <= 1e-12 * std::abs(h_raw));
  }
}

TEST_CASE("tf_eval spot values") {
  // H(s) = 1/(1+s) at s = j -> (1-j)/2
  NumericTF simple{{1.0}, {1.0, 1.0}};
  auto h = simple.eval({0.0, 1.0});
  CHECK(h.real() == doctest::Approx(0.5));
  CHECK(h.imag() == doctest::Approx(-0.5));

  SymbolicModel m = mzc_model();
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  std::map<std::string, double> x = {{"G1", 1e-4}, {"G2", 2e-4}, {"Gf", 1.1e-4},
                                     {"A1", 40.0}, {"A2", 40.0}, {"Af", 40.0},
                                     {"Cm", 1e-12}};
  NumericBinding b(m, x);
  // H(0) = a0/b0 = DC gain
  auto h0 = tf_eval(raw, b, {0.0, 0.0});
  NumericTF ntf = compile_tf(raw, b);
  CHECK(h0.real() == doctest::Approx(ntf.num[0] / ntf.den[0]));

  // raw TF at random (x, s) equals the direct numeric MNA solve
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::complex<double> s(0.0, 2 * std::numbers::pi * std::pow(10.0, 0.3 * (trial + 1)));
    auto href = mna_transfer(m.topo, x, s);
    auto hval = tf_eval(raw, b, s);
    CHECK(std::abs(hval - href) <= 1e-12 * std::abs(href));
  }
}

TEST_CASE("grouped KCL folds node conductances into go symbols") {
  SymbolicModel m = mzc_model();
  TransferFunction grouped = cramer_solve(build_kcl_system(m, KclMode::grouped), "vout");
  Poly go1 = sym(m, "go1"), go2 = sym(m, "go2");
  CHECK(grouped.den.coeff(0) == go1 * go2);
  // definitions: go1 = G1/A1, go2 = G2/A2 + Gf/Af + 1/RL
  Poly G1 = sym(m, "G1"), A1i = sym(m, "1/A1");
  CHECK(*m.table->info(m.table->find("go1")).definition == G1 * A1i);
  Poly G2 = sym(m, "G2"), A2i = sym(m, "1/A2"), Gf = sym(m, "Gf"), Afi = sym(m, "1/Af"),
       RLi = sym(m, "1/RL");
  CHECK(*m.table->info(m.table->find("go2")).definition == G2 * A2i + Gf * Afi + RLi);
}
