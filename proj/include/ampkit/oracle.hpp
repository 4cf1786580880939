#pragma once

#include "ampkit/metrics.hpp"
#include "ampkit/roots.hpp"

namespace ampkit {

struct SweepPoint {
  double freq_hz = 0;
  std::complex<double> h;
};

/// Log-spaced grid with both endpoints honored exactly.
std::vector<double> sweep_frequencies(double f_lo, double f_hi, int points_per_decade);

std::vector<SweepPoint> ac_sweep_serial(const NumericTF& tf, double f_lo, double f_hi,
                                        int points_per_decade);
/// OpenMP kernel; bitwise identical to the serial reference.
std::vector<SweepPoint> ac_sweep(const NumericTF& tf, double f_lo, double f_hi,
                                 int points_per_decade);

std::string sweep_to_csv(const std::vector<SweepPoint>& sweep);

struct MeasuredMetrics {
  double gain_db = 0;
  double gbw_hz = 0;
  double pm_deg = 0;
  double power_w = 0;
  double fom = 0;
  bool unity_crossing_found = false;
  bool multiple_crossings = false;
};

/// AC measurement: gain at 1 Hz, unity crossing by coarse sweep plus
/// log-bisection to 1e-6 relative, PM with continuous phase unwrapping from
/// the low end.  Power uses the same expression as the theory side.
MeasuredMetrics measure(const NumericTF& tf, double power_w, double cl_farad,
                        double f_lo = 1.0, double f_hi = 1e11, int points_per_decade = 64);

struct ExactPZ {
  std::vector<std::complex<double>> zeros;  // ascending magnitude
  std::vector<std::complex<double>> poles;
  bool converged = true;
};

ExactPZ exact_pz(const NumericTF& tf);

/// Numeric PZ values of the approximate symbolic model at one design point.
struct ApproxPZValues {
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> poles;
};
ApproxPZValues approx_pz_values(const PZModel& pz, const SymbolicModel& m,
                                const std::map<std::string, double>& x);

struct PZComparison {
  struct Row {
    std::string kind;  // "pole" or "zero"
    std::complex<double> approx, exact;
    double rel_err = 0;
    bool matched = false;
  };
  std::vector<Row> rows;
};

/// Greedy magnitude-order matching; unmatched roots are flagged.
PZComparison compare_pz(const ApproxPZValues& approx, const ExactPZ& exact);

/// Independent numeric path: stamp the modified-nodal system directly from
/// the topology at (x, s) and solve it, bypassing the symbolic pipeline.
std::complex<double> mna_transfer(const Topology& t, const std::map<std::string, double>& x,
                                  std::complex<double> s);

std::vector<std::complex<double>> solve_complex_linear(
    std::vector<std::vector<std::complex<double>>> m, std::vector<std::complex<double>> rhs);

}  // namespace ampkit
