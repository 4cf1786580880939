#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ampkit/loop.hpp"
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

struct Chain {
  SymbolicModel m;
  IntervalContext ictx;
  TransferFunction raw, grouped;
  SimplifyResult simp;
  PZModel pz;
  MetricFormulas formulas;

  explicit Chain(const char* name)
      : m(build_symbols(elaborate(parse_netlist(slurp(netlist_path(name)))))),
        ictx(m.table) {
    raw = cramer_solve(build_kcl_system(m, KclMode::raw), m.topo.output_node);
    grouped = cramer_solve(build_kcl_system(m, KclMode::grouped), m.topo.output_node);
    Margins margins;
    simp = simplify_coefficients(grouped, ictx, margins);
    auto extr = extract_pz(simp.tf, ictx, margins);
    pz = extr.pz;
    ScaledExpr gbw = derive_gbw_expr(simp.tf, pz);
    RuleToggles toggles;
    position_pz(pz, gbw, ictx, margins, toggles);
    formulas = assemble_formulas(m, simp.tf, pz);
  }
  Poly sym(const char* n) const { return Poly::symbol(m.table->find(n)); }
};

const std::map<std::string, double> kSamplePoint = {
    {"G1", 100e-6}, {"G2", 200e-6}, {"Gf", 110e-6}, {"A1", 40.0},
    {"A2", 40.0},   {"Af", 40.0},   {"Cm", 1e-12}};
}  // namespace

TEST_CASE("MZC gain formula is G1*G2/(go1*go2)") {
  Chain c("mzc.net");
  CHECK(c.formulas.gain ==
        RationalExpr(c.sym("G1") * c.sym("G2"), c.sym("go1") * c.sym("go2")));
}

TEST_CASE("constant transfer function: gain 5 is 13.98 dB") {
  CHECK(20.0 * std::log10(5.0) == doctest::Approx(13.9794).epsilon(1e-4));
}

TEST_CASE("gain at the worked sample point: 60.16 dB, oracle-confirmed") {
  Chain c("mzc.net");
  PredictedMetrics y = eval_formulas(c.formulas, c.m, kSamplePoint);
  // go1 = 2.5 uS, go2 = 7.85 uS, gain = 1019.1 -> 60.16 dB
  CHECK(y.gain_db == doctest::Approx(60.16).epsilon(2e-4));

  NumericBinding b(c.m, kSamplePoint);
  NumericTF ntf = compile_tf(c.raw, b);
  double oracle_db = 20.0 * std::log10(std::abs(ntf.eval(
      {0.0, 2 * std::numbers::pi * 1e-2})));
  // the dropped a0 term contributes ~1.4% here (hypothesis slack is only 7x)
  CHECK(std::abs(y.gain_db - oracle_db) < 0.2);
}

TEST_CASE("MZC GBW formula reduces to G1/(2*pi*Cm)") {
  Chain c("mzc.net");
  CHECK(c.formulas.gbw_hz.expr == RationalExpr(c.sym("G1"), c.sym("Cm")));
  CHECK(c.formulas.gbw_hz.scale == doctest::Approx(1.0 / (2 * std::numbers::pi)));
  CHECK(!c.formulas.gbw_from_pair);
}

TEST_CASE("gain 1000 with a 1 kHz dominant pole gives 1 MHz GBW") {
  SymbolTable tab;
  int pmag = tab.add_design("pmag", -1, 1, 1e12, std::nullopt);
  RealPoleExpr p;
  p.magnitude = RationalExpr(Poly::symbol(pmag), Poly::one());
  ScaledExpr gbw = derive_gbw(RationalExpr(Poly::one().scaled(1000), Poly::one()), p);
  auto sym = [&](int) { return 2 * std::numbers::pi * 1000; };  // |p1| in rad/s
  CHECK(gbw.eval<double>(sym) == doctest::Approx(1e6).epsilon(1e-9));
}

TEST_CASE("GBW at the sample point with Cm = 1 pF is 15.92 MHz") {
  Chain c("mzc.net");
  PredictedMetrics y = eval_formulas(c.formulas, c.m, kSamplePoint);
  CHECK(y.gbw_hz == doctest::Approx(15.9155e6).epsilon(1e-4));
}

TEST_CASE("PM formula structure for MZC: one pole term, one LHP zero term") {
  Chain c("mzc.net");
  REQUIRE(c.formulas.pm.poles.size() == 1);
  REQUIRE(c.formulas.pm.zeros.size() == 1);
  CHECK(c.formulas.pm.zeros[0].sign == +1);  // LHP zero adds phase
  CHECK(c.formulas.pm.pairs.empty());
}

TEST_CASE("PM degenerate cases") {
  // no non-dominant poles or zeros: PM = 90
  PmFormula empty;
  auto one = [](int) { return 1.0; };
  CHECK(eval_pm_deg<double>(empty, 1e6, one) == doctest::Approx(90.0));

  // GBW = |p2| and no zeros: PM = 45
  PmFormula pm;
  pm.poles.push_back({{1.0, RationalExpr(Poly::one().scaled(12345), Poly::one())}, "p2"});
  CHECK(eval_pm_deg<double>(pm, 12345.0, one) == doctest::Approx(45.0));
}

TEST_CASE("ambiguous zeros are rejected by derive_pm") {
  Chain c("mzc.net");
  Margins margins;
  auto extr = extract_pz(c.simp.tf, c.ictx, margins);
  CHECK_THROWS_AS(derive_pm(extr.pz, c.formulas.gbw_hz), DerivationError);
}

TEST_CASE("power formula: 0.09*(G1 + G2 + Gf)") {
  Chain c("mzc.net");
  CHECK(c.formulas.power.text == "0.09*(G1 + G2 + Gf)");
  PredictedMetrics y = eval_formulas(c.formulas, c.m, kSamplePoint);
  CHECK(y.power_w == doctest::Approx(36.9e-6).epsilon(1e-9));  // 0.09*410uS
}

TEST_CASE("per-stage gm/Id overrides change the power weights") {
  Topology t = elaborate(parse_netlist(
      "stage g1 in=vin out=n1 gm=G1 sign=+ gain=A1 gmid=10\n"
      "stage g2 in=n1 out=vout gm=G2 sign=+ gain=A2\n"
      "cap cl vout 0 value=CL fixed=10p\nres rl vout 0 value=RL fixed=10Meg\n"));
  SymbolicModel m = build_symbols(t);
  PowerFormula p = derive_power(m);
  REQUIRE(p.terms.size() == 2);
  CHECK(p.terms[0].second == doctest::Approx(1.8 / 10));
  CHECK(p.terms[1].second == doctest::Approx(1.8 / 20));
}

TEST_CASE("FoM unit arithmetic: 1 MHz, 10 pF, 0.1 mW -> 100") {
  Chain c("mzc.net");
  auto one = [](int) { return 1.0; };
  double fom = c.formulas.fom<double>(1e6, 1e-4, one);
  CHECK(fom == doctest::Approx(100.0));
}

TEST_CASE("eval_formulas bundles the predicted metric vector") {
  Chain c("mzc.net");
  PredictedMetrics y = eval_formulas(c.formulas, c.m, kSamplePoint);
  CHECK(y.issues.empty());
  CHECK(y.gain_db == doctest::Approx(60.16).epsilon(1e-3));
  CHECK(y.gbw_hz == doctest::Approx(15.92e6).epsilon(1e-3));
  CHECK(y.power_w == doctest::Approx(36.9e-6).epsilon(1e-6));
  CHECK(std::isfinite(y.pm_deg));
  CHECK(y.fom == doctest::Approx(15.92 * 10 / (36.9e-3)).epsilon(1e-3));

  // all gms at the lower bound for a 3-stage topology: 2.7 uW
  std::map<std::string, double> lo = {{"G1", 1e-5}, {"G2", 1e-5}, {"Gf", 1e-5},
                                      {"A1", 40.0}, {"A2", 40.0}, {"Af", 40.0},
                                      {"Cm", 1e-12}};
  CHECK(eval_formulas(c.formulas, c.m, lo).power_w == doctest::Approx(2.7e-6));
}

TEST_CASE("formula PM and GBW track the oracle at hypothesis-feasible points") {
  for (const char* name : {"mzc.net", "smc.net"}) {
    CAPTURE(name);
    Chain c(name);
    // start from a solved design point, then jitter within feasibility
    RunConfig cfg;
    cfg.n_starts = 8;
    DesignState st = run_design(parse_netlist(slurp(netlist_path(name))), cfg, 3);
    REQUIRE(st.error.empty());
    REQUIRE(st.accepted);

    Margins margins;
    auto extr = extract_pz(c.simp.tf, c.ictx, margins);
    PZModel pz = extr.pz;
    ScaledExpr gexp = derive_gbw_expr(c.simp.tf, pz);
    RuleToggles toggles;
    auto pos = position_pz(pz, gexp, c.ictx, margins, toggles);
    std::vector<Hypothesis> hyps = c.simp.hypotheses;
    hyps.insert(hyps.end(), extr.hypotheses.begin(), extr.hypotheses.end());
    hyps.insert(hyps.end(), pos.begin(), pos.end());

    std::mt19937_64 rng(17);
    auto jitter = [&](double v) { return v * std::pow(1.12, ((rng() >> 11) * 0x1.0p-53) * 2 - 1); };
    int tested = 0;
    for (int trial = 0; trial < 200 && tested < 8; ++trial) {
      std::map<std::string, double> x = st.final_x;
      for (auto& [k, v] : x) {
        int vi = c.m.topo.find_variable(k);
        if (vi < 0 || c.m.topo.variables[vi].is_fixed()) continue;
        v = std::clamp(jitter(v), c.m.topo.variables[vi].lower,
                       c.m.topo.variables[vi].upper);
      }
      auto values = bind_symbols<double>(*c.m.table, [&](const SymbolInfo& si) {
        auto it = x.find(si.name);
        return it != x.end() ? it->second : si.fixed.value_or(0.0);
      });
      auto sym = [&](int sid) { return values[(size_t)sid]; };
      bool sat = true;
      for (const auto& h : hyps)
        sat = sat && h.lhs.eval<double>(sym) >= h.margin * h.rhs.eval<double>(sym);
      if (!sat) continue;
      ++tested;

      PredictedMetrics y = eval_formulas(c.formulas, c.m, x);
      NumericBinding b(c.m, x);
      NumericTF ntf = compile_tf(c.raw, b);
      MeasuredMetrics meas = measure(ntf, y.power_w, c.formulas.cl_farad);
      REQUIRE(meas.unity_crossing_found);
      CHECK(std::abs(y.pm_deg - meas.pm_deg) <= 5.0);
      CHECK(std::abs(y.gbw_hz - meas.gbw_hz) / meas.gbw_hz <= 0.20);
      CHECK(std::abs(y.gain_db - meas.gain_db) <= 0.1);
    }
    CHECK(tested >= 5);
  }
}

TEST_CASE("PM formula is monotone decreasing in GBW with fixed PZ magnitudes") {
  PmFormula pm;
  pm.poles.push_back({{1.0, RationalExpr(Poly::one().scaled(2e6), Poly::one())}, "p2"});
  pm.zeros.push_back({{1.0, RationalExpr(Poly::one().scaled(5e7), Poly::one())}, +1, "z1"});
  auto one = [](int) { return 1.0; };
  double prev = eval_pm_deg<double>(pm, 1e5, one);
  for (double g = 2e5; g <= 5e6; g *= 1.5) {
    double cur = eval_pm_deg<double>(pm, g, one);
    CHECK(cur < prev);
    prev = cur;
  }
}
