#include "ampkit/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ampkit {

Interval Interval::abs() const {
  if (lo >= 0) return *this;
  if (hi <= 0) return {-hi, -lo};
  return {0, std::max(-lo, hi)};
}

Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(Interval a, Interval b) { return {a.lo - b.hi, a.hi - b.lo}; }

Interval operator*(Interval a, Interval b) {
  double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

Interval operator/(Interval a, Interval b) {
  if (b.contains_zero()) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {-inf, inf};
  }
  return a * Interval{1.0 / b.hi, 1.0 / b.lo};
}

IntervalContext::IntervalContext(std::shared_ptr<const SymbolTable> table)
    : table_(std::move(table)) {
  state_.assign(static_cast<size_t>(table_->size()), 0);
  cache_.resize(static_cast<size_t>(table_->size()));
}

Interval IntervalContext::symbol(int sid) const {
  auto idx = static_cast<size_t>(sid);
  if (state_[idx]) return cache_[idx];
  const auto& si = table_->info(sid);
  Interval iv;
  switch (si.kind) {
    case SymbolKind::design:
      iv = {si.lo, si.hi};
      break;
    case SymbolKind::inverse:
      iv = Interval{1.0, 1.0} / symbol(si.base);
      break;
    case SymbolKind::derived:
      iv = poly(*si.definition);
      break;
    case SymbolKind::s:
      throw std::logic_error("no interval for the frequency symbol");
  }
  state_[idx] = 1;
  cache_[idx] = iv;
  return iv;
}

Interval IntervalContext::monomial(const Monomial& m) const {
  // All symbols are positive, so the magnitude is monotone per variable.
  double lo = 1, hi = 1;
  for (auto [sid, e] : m.exps) {
    Interval v = symbol(sid);
    for (int k = 0; k < e; ++k) {
      lo *= v.lo;
      hi *= v.hi;
    }
  }
  double c = m.coeff.get_d();
  return c >= 0 ? Interval{c * lo, c * hi} : Interval{c * hi, c * lo};
}

Interval IntervalContext::poly(const Poly& p) const {
  Interval acc{0, 0};
  for (const auto& m : p.terms()) acc = acc + monomial(m);
  return acc;
}

double IntervalContext::ratio_upper_bound(const Poly& n, const Poly& d) const {
  if (n.is_zero()) return 0;
  if (d.is_zero()) return std::numeric_limits<double>::infinity();
  double total = 0;
  for (const auto& nm : n.terms()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& dm : d.terms()) {
      // exact sup of the monomial quotient: shared symbols cancel
      double v = std::abs(nm.coeff.get_d() / dm.coeff.get_d());
      std::map<int, int> net;
      for (auto [sid, e] : nm.exps) net[sid] += e;
      for (auto [sid, e] : dm.exps) net[sid] -= e;
      for (auto [sid, e] : net) {
        if (e == 0) continue;
        Interval iv = symbol(sid);
        double base = e > 0 ? iv.hi : iv.lo;
        for (int k = 0; k < std::abs(e); ++k) v *= (e > 0 ? base : 1.0 / base);
      }
      best = std::min(best, v);
    }
    total += best;
  }
  return total;
}

}  // namespace ampkit
