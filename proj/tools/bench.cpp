// Benchmark comparing the serial reference kernels against the OpenMP ones:
// dense AC sweeps of a compiled transfer function and the multi-start solve.

#include <chrono>
#include <cstdio>
#include <string>

#include "ampkit/loop.hpp"
#include "ampkit/report.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

const char* kMzcNetlist = R"(
stage g1 in=vin out=n1 gm=G1 sign=+ gain=A1
stage g2 in=n1 out=vout gm=G2 sign=+ gain=A2
stage gf in=vin out=vout gm=Gf sign=- gain=Af
cap cm n1 vout value=Cm
cap cl vout 0 value=CL fixed=10p
res rl vout 0 value=RL fixed=10Meg
)";

template <class F>
double time_ms(F&& fn, int reps) {
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  using namespace ampkit;
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled; both columns run the serial path\n\n");
#endif

  Topology topo = elaborate(parse_netlist(kMzcNetlist));
  SymbolicModel model = build_symbols(topo);
  TransferFunction raw =
      cramer_solve(build_kcl_system(model, KclMode::raw), topo.output_node);

  std::map<std::string, double> x = {{"G1", 1e-4}, {"G2", 2e-4}, {"Gf", 1.1e-4},
                                     {"A1", 60.0}, {"A2", 60.0}, {"Af", 60.0},
                                     {"Cm", 1e-12}};
  NumericBinding binding(model, x);
  NumericTF ntf = compile_tf(raw, binding);

  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial (ms)", "openmp (ms)", "speedup");

  {
    const int ppd = 20000;  // ~2.2e5 points over 11 decades
    double ts = time_ms([&] { ac_sweep_serial(ntf, 1.0, 1e11, ppd); }, 5);
    double tp = time_ms([&] { ac_sweep(ntf, 1.0, 1e11, ppd); }, 5);
    std::printf("%-34s %12.3f %12.3f %8.2fx\n", "ac_sweep (220k points)", ts, tp, ts / tp);
  }

  {
    IntervalContext ictx(model.table);
    Margins margins;
    TransferFunction grouped =
        cramer_solve(build_kcl_system(model, KclMode::grouped), topo.output_node);
    auto simp = simplify_coefficients(grouped, ictx, margins);
    auto extr = extract_pz(simp.tf, ictx, margins);
    PZModel pz = extr.pz;
    ScaledExpr gbw = derive_gbw_expr(simp.tf, pz);
    RuleToggles toggles;
    auto pos = position_pz(pz, gbw, ictx, margins, toggles);
    std::vector<Hypothesis> hyps = simp.hypotheses;
    hyps.insert(hyps.end(), extr.hypotheses.begin(), extr.hypotheses.end());
    hyps.insert(hyps.end(), pos.begin(), pos.end());
    MetricFormulas formulas = assemble_formulas(model, simp.tf, pz);
    auto shared = std::make_shared<SymbolicModel>(model);
    OptProblem problem = build_problem(formulas, hyps, SpecSet{}, shared);

    OptOptions oo;
    oo.seed = 7;
    oo.n_starts = 32;
    double ts = time_ms([&] { solve_serial(problem, oo); }, 1);
    double tp = time_ms([&] { solve(problem, oo); }, 1);
    std::printf("%-34s %12.3f %12.3f %8.2fx\n", "multistart solve (32 starts)", ts, tp,
                ts / tp);
  }
  return 0;
}
