#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace ampkit {

/// Forward-mode dual number: value plus gradient.  An empty gradient vector
/// means zero gradient, which keeps constants cheap.
struct Dual {
  double v = 0;
  std::vector<double> g;

  Dual() = default;
  explicit Dual(double value) : v(value) {}
  Dual(double value, size_t n, size_t seed_index) : v(value), g(n, 0.0) {
    g[seed_index] = 1.0;
  }

  static Dual constant(double value) { return Dual(value); }
};

namespace dual_detail {
inline void axpy(std::vector<double>& out, double a, const std::vector<double>& x) {
  if (x.empty() || a == 0.0) return;
  if (out.empty()) out.assign(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
}
}  // namespace dual_detail

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v);
  r.g = a.g;
  dual_detail::axpy(r.g, 1.0, b.g);
  return r;
}

inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v);
  r.g = a.g;
  dual_detail::axpy(r.g, -1.0, b.g);
  return r;
}

inline Dual operator-(const Dual& a) {
  Dual r(-a.v);
  r.g.resize(a.g.size());
  for (size_t i = 0; i < a.g.size(); ++i) r.g[i] = -a.g[i];
  return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v);
  dual_detail::axpy(r.g, b.v, a.g);
  dual_detail::axpy(r.g, a.v, b.g);
  return r;
}

inline Dual operator/(const Dual& a, const Dual& b) {
  Dual r(a.v / b.v);
  dual_detail::axpy(r.g, 1.0 / b.v, a.g);
  dual_detail::axpy(r.g, -a.v / (b.v * b.v), b.g);
  return r;
}

inline Dual chain(double value, double deriv, const Dual& x) {
  Dual r(value);
  dual_detail::axpy(r.g, deriv, x.g);
  return r;
}

inline Dual exp(const Dual& x) {
  double e = std::exp(x.v);
  return chain(e, e, x);
}
inline Dual log(const Dual& x) { return chain(std::log(x.v), 1.0 / x.v, x); }
inline Dual log10(const Dual& x) {
  return chain(std::log10(x.v), 1.0 / (x.v * std::numbers::ln10), x);
}
inline Dual sqrt(const Dual& x) {
  double s = std::sqrt(x.v);
  return chain(s, 0.5 / s, x);
}
inline Dual atan(const Dual& x) {
  return chain(std::atan(x.v), 1.0 / (1.0 + x.v * x.v), x);
}
inline Dual abs(const Dual& x) { return x.v < 0 ? -x : x; }

inline Dual atan2(const Dual& y, const Dual& x) {
  double denom = x.v * x.v + y.v * y.v;
  Dual r(std::atan2(y.v, x.v));
  dual_detail::axpy(r.g, x.v / denom, y.g);
  dual_detail::axpy(r.g, -y.v / denom, x.g);
  return r;
}

// adl helpers so generic code can write abs(x)/log(x) for double too
using std::abs;
using std::atan;
using std::atan2;
using std::exp;
using std::log;
using std::log10;
using std::sqrt;

}  // namespace ampkit
