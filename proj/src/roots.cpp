#include "ampkit/roots.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ampkit {

namespace {

using cplx = std::complex<double>;

// p(z) and p'(z) by Horner
std::pair<cplx, cplx> horner2(const std::vector<cplx>& a, cplx z) {
  cplx p = 0, dp = 0;
  for (size_t k = a.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + a[k];
  }
  return {p, dp};
}

double scale_norm(const std::vector<cplx>& a, cplx z) {
  double az = std::abs(z), pw = 1.0, s = 0.0;
  for (const auto& c : a) {
    s += std::abs(c) * pw;
    pw *= az;
  }
  return s;
}

}  // namespace

RootResult exact_roots(std::vector<cplx> coeffs) {
  while (!coeffs.empty() && std::abs(coeffs.back()) == 0.0) coeffs.pop_back();
  if (coeffs.size() < 2) {
    if (coeffs.empty()) throw std::invalid_argument("zero polynomial has no defined roots");
    return {{}, true};  // nonzero constant
  }

  RootResult out;
  // roots at the origin from vanishing low-order coefficients
  size_t low = 0;
  while (low < coeffs.size() - 1 && std::abs(coeffs[low]) == 0.0) ++low;
  for (size_t k = 0; k < low; ++k) out.roots.push_back(0.0);
  std::vector<cplx> a(coeffs.begin() + static_cast<long>(low), coeffs.end());

  const size_t n = a.size() - 1;
  if (n == 0) return out;
  if (n == 1) {
    out.roots.push_back(-a[0] / a[1]);
    return out;
  }

  // perturbed circle start
  double radius = std::pow(std::abs(a[0] / a[n]), 1.0 / static_cast<double>(n));
  if (!(radius > 0) || !std::isfinite(radius)) radius = 1.0;
  std::vector<cplx> z(n);
  for (size_t k = 0; k < n; ++k) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
    double r = radius * (1.0 + 1e-3 * static_cast<double>(k));
    z[k] = std::polar(r, angle);
  }

  bool converged = false;
  for (int iter = 0; iter < 1000 && !converged; ++iter) {
    converged = true;
    for (size_t k = 0; k < n; ++k) {
      auto [p, dp] = horner2(a, z[k]);
      if (std::abs(p) <= 1e-14 * scale_norm(a, z[k])) continue;
      cplx newton = dp != cplx(0.0) ? p / dp : cplx(1.0);
      cplx sum = 0.0;
      for (size_t j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      cplx denom = 1.0 - newton * sum;
      cplx w = denom != cplx(0.0) ? newton / denom : newton;
      z[k] -= w;
      if (std::abs(w) > 1e-14 * (1.0 + std::abs(z[k]))) converged = false;
    }
  }

  // Newton polish and residual check
  bool all_ok = true;
  for (size_t k = 0; k < n; ++k) {
    for (int it = 0; it < 4; ++it) {
      auto [p, dp] = horner2(a, z[k]);
      if (dp == cplx(0.0)) break;
      cplx step = p / dp;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z[k]))) break;
      z[k] -= step;
    }
    auto [p, dp] = horner2(a, z[k]);
    if (std::abs(p) > 1e-10 * scale_norm(a, z[k])) all_ok = false;
  }

  // symmetrize conjugate pairs when the input coefficients are real
  bool real_coeffs = true;
  for (const auto& c : a)
    if (c.imag() != 0.0) real_coeffs = false;
  if (real_coeffs) {
    std::vector<bool> used(n, false);
    for (size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (std::abs(z[i].imag()) <= 1e-9 * std::max(1.0, std::abs(z[i]))) {
        z[i] = cplx(z[i].real(), 0.0);
        used[i] = true;
        continue;
      }
      size_t best = n;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t j = i + 1; j < n; ++j) {
        if (used[j]) continue;
        double d = std::abs(std::conj(z[i]) - z[j]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best < n && best_d <= 1e-6 * std::max(1.0, std::abs(z[i]))) {
        cplx avg = 0.5 * (z[i] + std::conj(z[best]));
        z[i] = avg;
        z[best] = std::conj(avg);
        used[i] = used[best] = true;
      }
    }
  }

  for (const auto& r : z) out.roots.push_back(r);
  out.converged = converged && all_ok;
  return out;
}

}  // namespace ampkit
