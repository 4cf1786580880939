#pragma once

#include <complex>
#include <vector>

namespace ampkit {

struct RootResult {
  std::vector<std::complex<double>> roots;
  bool converged = true;
};

/// All roots of a complex polynomial (coefficients ascending in degree) by
/// Aberth-Ehrlich simultaneous iteration from a perturbed-circle start,
/// polished by Newton steps.  Residual target is 1e-10 * sum|a_i||r|^i per
/// root; `converged` goes false after 1000 sweeps without reaching it.
RootResult exact_roots(std::vector<std::complex<double>> coeffs);

}  // namespace ampkit
