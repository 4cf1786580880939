#pragma once

#include "ampkit/poly.hpp"

namespace ampkit {

struct Interval {
  double lo = 0;
  double hi = 0;

  static Interval point(double v) { return {v, v}; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  bool is_positive() const { return lo > 0; }
  bool is_negative() const { return hi < 0; }
  Interval abs() const;
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a, Interval b);
Interval operator*(Interval a, Interval b);
Interval operator/(Interval a, Interval b);  // b spanning zero yields +/-inf ends

/// Symbol ranges from the variable box, with derived definitions expanded.
class IntervalContext {
 public:
  explicit IntervalContext(std::shared_ptr<const SymbolTable> table);

  Interval symbol(int sid) const;
  /// Signed range of one term over the box (monotone in each variable).
  Interval monomial(const Monomial& m) const;
  /// Interval sum across terms.
  Interval poly(const Poly& p) const;

  /// Rigorous upper bound of N/D over the box for positive-term N and D,
  /// exploiting shared factors: N/D <= sum_j min_k (n_j / d_k).
  /// Coefficients are taken by absolute value.
  double ratio_upper_bound(const Poly& n, const Poly& d) const;

  const SymbolTable& table() const { return *table_; }

 private:
  std::shared_ptr<const SymbolTable> table_;
  mutable std::vector<int> state_;  // memo guard for derived symbols
  mutable std::vector<Interval> cache_;
};

}  // namespace ampkit
