#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>

#include "ampkit/loop.hpp"

using namespace ampkit;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
bool bits_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}
}  // namespace

TEST_CASE("the OpenMP sweep is bitwise identical to the serial reference") {
  SymbolicModel m = build_symbols(elaborate(
      parse_netlist(slurp(std::string(AMPKIT_NETLIST_DIR) + "/mzc.net"))));
  TransferFunction raw = cramer_solve(build_kcl_system(m, KclMode::raw), "vout");
  std::map<std::string, double> x = {{"G1", 3e-5}, {"G2", 2.2e-4}, {"Gf", 4e-5},
                                     {"A1", 55.0}, {"A2", 70.0},   {"Af", 45.0},
                                     {"Cm", 8e-13}};
  NumericBinding b(m, x);
  NumericTF ntf = compile_tf(raw, b);

  auto serial = ac_sweep_serial(ntf, 1.0, 1e11, 200);
  auto parallel = ac_sweep(ntf, 1.0, 1e11, 200);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(bits_equal(serial[i].freq_hz, parallel[i].freq_hz));
    CHECK(bits_equal(serial[i].h.real(), parallel[i].h.real()));
    CHECK(bits_equal(serial[i].h.imag(), parallel[i].h.imag()));
  }
}

TEST_CASE("the OpenMP multistart solve matches the serial reference bitwise") {
  Topology topo = elaborate(
      parse_netlist(slurp(std::string(AMPKIT_NETLIST_DIR) + "/smc.net")));
  auto model = std::make_shared<SymbolicModel>(build_symbols(topo));
  IntervalContext ictx(model->table);
  TransferFunction grouped =
      cramer_solve(build_kcl_system(*model, KclMode::grouped), topo.output_node);
  Margins margins;
  auto simp = simplify_coefficients(grouped, ictx, margins);
  auto extr = extract_pz(simp.tf, ictx, margins);
  PZModel pz = extr.pz;
  ScaledExpr gbw = derive_gbw_expr(simp.tf, pz);
  RuleToggles toggles;
  auto pos = position_pz(pz, gbw, ictx, margins, toggles);
  std::vector<Hypothesis> hyps = simp.hypotheses;
  hyps.insert(hyps.end(), extr.hypotheses.begin(), extr.hypotheses.end());
  hyps.insert(hyps.end(), pos.begin(), pos.end());
  MetricFormulas formulas = assemble_formulas(*model, simp.tf, pz);
  OptProblem problem = build_problem(formulas, hyps, SpecSet{}, model);

  OptOptions oo;
  oo.seed = 17;
  oo.n_starts = 12;
  OptResult par = solve(problem, oo);
  OptResult ser = solve_serial(problem, oo);
  CHECK(par.status == ser.status);
  CHECK(par.best_start == ser.best_start);
  REQUIRE(par.x_star.size() == ser.x_star.size());
  for (const auto& [k, v] : par.x_star) CHECK(bits_equal(v, ser.x_star.at(k)));
}
