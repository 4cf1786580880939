#include "ampkit/poly.hpp"

#include <algorithm>
#include <sstream>

namespace ampkit {

// ---------------------------------------------------------------------------
// SymbolTable

SymbolTable::SymbolTable() {
  SymbolInfo s;
  s.name = "s";
  s.kind = SymbolKind::s;
  add(std::move(s));
}

int SymbolTable::add(SymbolInfo si) {
  if (by_name_.count(si.name))
    throw std::logic_error("symbol '" + si.name + "' registered twice");
  int id = static_cast<int>(infos_.size());
  by_name_[si.name] = id;
  infos_.push_back(std::move(si));
  return id;
}

int SymbolTable::add_design(const std::string& name, int design_var, double lo,
                            double hi, std::optional<double> fixed, bool capacitance_var) {
  SymbolInfo si;
  si.name = name;
  si.kind = SymbolKind::design;
  si.design_var = design_var;
  si.fixed = fixed;
  si.lo = fixed ? *fixed : lo;
  si.hi = fixed ? *fixed : hi;
  si.capacitance_var = capacitance_var;
  return add(std::move(si));
}

int SymbolTable::add_inverse(int base) {
  const auto& b = info(base);
  SymbolInfo si;
  si.name = "1/" + b.name;
  si.kind = SymbolKind::inverse;
  si.base = base;
  si.lo = 1.0 / b.hi;
  si.hi = 1.0 / b.lo;
  if (b.fixed) si.fixed = 1.0 / *b.fixed;
  return add(std::move(si));
}

int SymbolTable::add_derived(const std::string& name, DerivedRole role, const Poly& def) {
  SymbolInfo si;
  si.name = name;
  si.kind = SymbolKind::derived;
  si.role = role;
  si.definition = std::make_shared<Poly>(def);
  return add(std::move(si));
}

int SymbolTable::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// Monomial

int Monomial::exponent(int sym) const {
  for (auto [sid, e] : exps)
    if (sid == sym) return e;
  return 0;
}

int Monomial::total_degree() const {
  int d = 0;
  for (auto [sid, e] : exps) d += e;
  return d;
}

int compare_monomials(const Monomial& a, const Monomial& b) {
  int da = a.total_degree(), db = b.total_degree();
  if (da != db) return da > db ? 1 : -1;
  // lexicographic with lower symbol ids ranked higher
  size_t i = 0, j = 0;
  while (i < a.exps.size() && j < b.exps.size()) {
    if (a.exps[i].first != b.exps[j].first)
      return a.exps[i].first < b.exps[j].first ? 1 : -1;
    if (a.exps[i].second != b.exps[j].second)
      return a.exps[i].second > b.exps[j].second ? 1 : -1;
    ++i, ++j;
  }
  if (i < a.exps.size()) return 1;
  if (j < b.exps.size()) return -1;
  return 0;
}

// ---------------------------------------------------------------------------
// Poly

Poly::Poly(const mpq_class& c) {
  if (c != 0) terms_.push_back({c, {}});
}

Poly Poly::symbol(int sym, int exp, const mpq_class& coeff) {
  if (coeff == 0) return Poly();
  Monomial m;
  m.coeff = coeff;
  if (exp > 0) m.exps.push_back({sym, exp});
  Poly p;
  p.terms_.push_back(std::move(m));
  return p;
}

Poly Poly::from_terms(std::vector<Monomial> terms) {
  std::sort(terms.begin(), terms.end(), [](const Monomial& a, const Monomial& b) {
    return compare_monomials(a, b) > 0;
  });
  Poly p;
  for (auto& m : terms) {
    if (m.coeff == 0) continue;
    if (!p.terms_.empty() && p.terms_.back().same_exps(m)) {
      p.terms_.back().coeff += m.coeff;
      if (p.terms_.back().coeff == 0) p.terms_.pop_back();
    } else {
      p.terms_.push_back(std::move(m));
    }
  }
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exps.empty());
}

const Monomial& Poly::leading() const {
  if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
  return terms_.front();
}

int Poly::max_exponent(int sym) const {
  int d = 0;
  for (const auto& m : terms_) d = std::max(d, m.exponent(sym));
  return d;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& m : p.terms_) m.coeff = -m.coeff;
  return p;
}

Poly Poly::operator+(const Poly& o) const {
  // merge two sorted term lists
  std::vector<Monomial> out;
  out.reserve(terms_.size() + o.terms_.size());
  size_t i = 0, j = 0;
  while (i < terms_.size() && j < o.terms_.size()) {
    int c = compare_monomials(terms_[i], o.terms_[j]);
    if (c > 0) out.push_back(terms_[i++]);
    else if (c < 0) out.push_back(o.terms_[j++]);
    else {
      Monomial m = terms_[i++];
      m.coeff += o.terms_[j++].coeff;
      if (m.coeff != 0) out.push_back(std::move(m));
    }
  }
  while (i < terms_.size()) out.push_back(terms_[i++]);
  while (j < o.terms_.size()) out.push_back(o.terms_[j++]);
  Poly p;
  p.terms_ = std::move(out);
  return p;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

namespace {
Monomial mul_monomials(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.coeff = a.coeff * b.coeff;
  size_t i = 0, j = 0;
  while (i < a.exps.size() && j < b.exps.size()) {
    if (a.exps[i].first == b.exps[j].first) {
      m.exps.push_back({a.exps[i].first, a.exps[i].second + b.exps[j].second});
      ++i, ++j;
    } else if (a.exps[i].first < b.exps[j].first) {
      m.exps.push_back(a.exps[i++]);
    } else {
      m.exps.push_back(b.exps[j++]);
    }
  }
  while (i < a.exps.size()) m.exps.push_back(a.exps[i++]);
  while (j < b.exps.size()) m.exps.push_back(b.exps[j++]);
  return m;
}
}  // namespace

Poly Poly::operator*(const Poly& o) const {
  std::vector<Monomial> out;
  out.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) out.push_back(mul_monomials(a, b));
  return from_terms(std::move(out));
}

Poly Poly::pow(int e) const {
  Poly acc = Poly::one();
  for (int k = 0; k < e; ++k) acc *= *this;
  return acc;
}

Poly Poly::scaled(const mpq_class& c) const {
  if (c == 0) return Poly();
  Poly p = *this;
  for (auto& m : p.terms_) m.coeff *= c;
  return p;
}

std::optional<Poly> Poly::divided_by(const Poly& d) const {
  if (d.is_zero()) return std::nullopt;
  Poly r = *this;
  std::vector<Monomial> q;
  const Monomial& dl = d.leading();
  while (!r.is_zero()) {
    const Monomial& rl = r.leading();
    // quotient term rl / dl, fails if any exponent would go negative
    Monomial t;
    t.coeff = rl.coeff / dl.coeff;
    size_t i = 0, j = 0;
    bool ok = true;
    while (j < dl.exps.size()) {
      if (i >= rl.exps.size() || rl.exps[i].first > dl.exps[j].first) {
        ok = false;
        break;
      }
      if (rl.exps[i].first < dl.exps[j].first) {
        t.exps.push_back(rl.exps[i++]);
        continue;
      }
      int e = rl.exps[i].second - dl.exps[j].second;
      if (e < 0) {
        ok = false;
        break;
      }
      if (e > 0) t.exps.push_back({rl.exps[i].first, e});
      ++i, ++j;
    }
    if (!ok) return std::nullopt;
    while (i < rl.exps.size()) t.exps.push_back(rl.exps[i++]);
    Poly tp;
    tp.terms_.push_back(t);
    r = r - tp * d;
    q.push_back(std::move(t));
  }
  return from_terms(std::move(q));
}

Poly Poly::substituted(const std::map<int, Poly>& defs) const {
  Poly out;
  for (const auto& m : terms_) {
    Poly term = Poly::constant(m.coeff);
    for (auto [sid, e] : m.exps) {
      auto it = defs.find(sid);
      if (it == defs.end()) term *= Poly::symbol(sid, e);
      else term *= it->second.pow(e);
    }
    out += term;
  }
  return out;
}

Monomial Poly::content() const {
  Monomial c;
  if (terms_.empty()) {
    c.coeff = 0;
    return c;
  }
  c.coeff = 1;
  c.exps = terms_[0].exps;
  for (size_t t = 1; t < terms_.size() && !c.exps.empty(); ++t) {
    std::vector<std::pair<int, int>> merged;
    for (auto [sid, e] : c.exps) {
      int o = terms_[t].exponent(sid);
      if (o > 0) merged.push_back({sid, std::min(e, o)});
    }
    c.exps = std::move(merged);
  }
  return c;
}

Poly Poly::divided_by_monomial(const Monomial& m) const {
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    Monomial r;
    r.coeff = t.coeff / m.coeff;
    size_t i = 0;
    for (auto [sid, e] : t.exps) {
      int sub = 0;
      while (i < m.exps.size() && m.exps[i].first < sid) ++i;
      if (i < m.exps.size() && m.exps[i].first == sid) sub = m.exps[i].second;
      int ne = e - sub;
      if (ne < 0) throw std::logic_error("monomial division with negative exponent");
      if (ne > 0) r.exps.push_back({sid, ne});
    }
    out.push_back(std::move(r));
  }
  return from_terms(std::move(out));
}

Poly monomial_gcd(const Monomial& a, const Monomial& b) {
  Monomial g;
  g.coeff = 1;
  size_t i = 0, j = 0;
  while (i < a.exps.size() && j < b.exps.size()) {
    if (a.exps[i].first == b.exps[j].first) {
      g.exps.push_back({a.exps[i].first, std::min(a.exps[i].second, b.exps[j].second)});
      ++i, ++j;
    } else if (a.exps[i].first < b.exps[j].first) ++i;
    else ++j;
  }
  return Poly::from_terms({g});
}

namespace {
std::string coeff_string(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return "(" + q.get_num().get_str() + "/" + q.get_den().get_str() + ")";
}
}  // namespace

std::string Poly::to_string(const SymbolTable& tab) const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& m : terms_) {
    mpq_class c = m.coeff;
    bool neg = c < 0;
    if (neg) c = -c;
    if (first) {
      if (neg) out << "-";
      first = false;
    } else {
      out << (neg ? " - " : " + ");
    }
    bool wrote = false;
    if (c != 1 || m.exps.empty()) {
      out << coeff_string(c);
      wrote = true;
    }
    for (auto [sid, e] : m.exps) {
      if (wrote) out << "*";
      out << tab.info(sid).name;
      if (e != 1) out << "^" << e;
      wrote = true;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// RationalExpr

RationalExpr::RationalExpr(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::logic_error("rational expression with zero denominator");
  if (num_.is_zero()) {
    den_ = Poly::one();
    return;
  }
  // cancel shared monomial content
  Monomial cn = num_.content();
  Monomial cd = den_.content();
  Poly g = monomial_gcd(cn, cd);
  const Monomial& gm = g.leading();
  if (!gm.exps.empty()) {
    num_ = num_.divided_by_monomial(gm);
    den_ = den_.divided_by_monomial(gm);
  }
  // scale so den's leading coefficient is one
  mpq_class lc = den_.leading().coeff;
  num_ = num_.scaled(1 / lc);
  den_ = den_.scaled(1 / lc);
}

RationalExpr RationalExpr::operator*(const RationalExpr& o) const {
  // structural cancellation first
  if (num_ == o.den_) return RationalExpr(o.num_, den_);
  if (o.num_ == den_) return RationalExpr(num_, o.den_);
  return RationalExpr(num_ * o.num_, den_ * o.den_);
}

RationalExpr RationalExpr::reciprocal() const {
  if (num_.is_zero()) throw std::logic_error("reciprocal of zero");
  return RationalExpr(den_, num_);
}

RationalExpr RationalExpr::scaled(const mpq_class& c) const {
  return RationalExpr(num_.scaled(c), den_);
}

std::string RationalExpr::to_string(const SymbolTable& tab) const {
  if (den_is_one()) return num_.to_string(tab);
  std::string n = num_.to_string(tab);
  std::string d = den_.to_string(tab);
  if (num_.terms().size() > 1) n = "(" + n + ")";
  bool den_simple = den_.terms().size() == 1 && den_.leading().coeff == 1 &&
                    den_.leading().exps.size() == 1 && den_.leading().exps[0].second == 1;
  if (!den_simple) d = "(" + d + ")";
  return n + "/" + d;
}

// ---------------------------------------------------------------------------
// SPoly

SPoly::SPoly(std::vector<Poly> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

const Poly& SPoly::coeff(int k) const {
  static const Poly zero;
  if (k < 0 || k > degree()) return zero;
  return coeffs_[static_cast<size_t>(k)];
}

SPoly SPoly::collect(const Poly& p) {
  std::vector<std::vector<Monomial>> buckets;
  for (const auto& m : p.terms()) {
    int k = m.exponent(SymbolTable::s_id);
    if (static_cast<size_t>(k) >= buckets.size()) buckets.resize(k + 1);
    Monomial r = m;
    std::erase_if(r.exps, [](const auto& pr) { return pr.first == SymbolTable::s_id; });
    buckets[static_cast<size_t>(k)].push_back(std::move(r));
  }
  std::vector<Poly> coeffs;
  coeffs.reserve(buckets.size());
  for (auto& b : buckets) coeffs.push_back(Poly::from_terms(std::move(b)));
  return SPoly(std::move(coeffs));
}

Poly SPoly::to_poly() const {
  Poly p;
  for (size_t k = 0; k < coeffs_.size(); ++k)
    p += coeffs_[k] * Poly::symbol(SymbolTable::s_id, static_cast<int>(k));
  return p;
}

std::string SPoly::to_string(const SymbolTable& tab) const {
  if (coeffs_.empty()) return "0";
  std::ostringstream out;
  for (int k = degree(); k >= 0; --k) {
    if (coeff(k).is_zero()) continue;
    if (out.tellp() > 0) out << " + ";
    if (k > 0) {
      out << "(" << coeff(k).to_string(tab) << ")*s";
      if (k > 1) out << "^" << k;
    } else {
      out << "(" << coeff(k).to_string(tab) << ")";
    }
  }
  return out.str();
}

std::string TransferFunction::to_string() const {
  return "H(s) = [" + num.to_string(*table) + "] / [" + den.to_string(*table) + "]";
}

}  // namespace ampkit
