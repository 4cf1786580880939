#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ampkit {

// ---------------------------------------------------------------------------
// Symbols

enum class SymbolKind {
  s,        // the complex frequency, reserved id 0
  design,   // a design variable or a named constant (omega_t)
  inverse,  // reciprocal of another symbol, its own bounded quantity
  derived,  // defined by a polynomial over other symbols
};

enum class DerivedRole { none, parasitic_conductance, parasitic_capacitance, node_conductance };

struct SymbolInfo {
  std::string name;
  SymbolKind kind = SymbolKind::design;
  int design_var = -1;  // index into Topology::variables, -1 for constants
  int base = -1;        // inverse: the symbol being inverted
  double lo = 0, hi = 0;
  std::optional<double> fixed;
  bool capacitance_var = false;  // design symbol of capacitance kind
  DerivedRole role = DerivedRole::none;
  std::shared_ptr<const class Poly> definition;  // derived symbols only
};

/// Registry of all symbols appearing in one topology's derivation.
/// Symbol ids are dense and assigned in registration order, so every
/// construction pass over the same netlist yields identical ids.
class SymbolTable {
 public:
  static constexpr int s_id = 0;

  SymbolTable();

  int add_design(const std::string& name, int design_var, double lo, double hi,
                 std::optional<double> fixed, bool capacitance_var = false);
  int add_inverse(int base);
  int add_derived(const std::string& name, DerivedRole role, const class Poly& def);

  const SymbolInfo& info(int id) const { return infos_.at(static_cast<size_t>(id)); }
  int find(const std::string& name) const;
  int size() const { return static_cast<int>(infos_.size()); }

 private:
  int add(SymbolInfo si);
  std::vector<SymbolInfo> infos_;
  std::map<std::string, int> by_name_;
};

// ---------------------------------------------------------------------------
// Exact multivariate polynomials

struct Monomial {
  mpq_class coeff;
  std::vector<std::pair<int, int>> exps;  // (symbol, exponent > 0), sorted by symbol

  int exponent(int sym) const;
  int total_degree() const;
  bool same_exps(const Monomial& o) const { return exps == o.exps; }
};

/// Graded-lexicographic order; returns <0, 0, >0 like strcmp.
int compare_monomials(const Monomial& a, const Monomial& b);

class Poly {
 public:
  Poly() = default;
  explicit Poly(const mpq_class& c);
  static Poly zero() { return Poly(); }
  static Poly one() { return Poly(mpq_class(1)); }
  static Poly constant(const mpq_class& c) { return Poly(c); }
  static Poly symbol(int sym, int exp = 1, const mpq_class& coeff = 1);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  const std::vector<Monomial>& terms() const { return terms_; }
  const Monomial& leading() const;

  int max_exponent(int sym) const;
  bool contains(int sym) const { return max_exponent(sym) > 0; }

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  bool operator==(const Poly& o) const { return terms_ == o.terms_; }

  Poly pow(int e) const;
  Poly scaled(const mpq_class& c) const;

  /// Exact quotient; nullopt when the divisor does not divide exactly.
  std::optional<Poly> divided_by(const Poly& d) const;

  /// Replace symbols by polynomial definitions (applied simultaneously).
  Poly substituted(const std::map<int, Poly>& defs) const;

  /// Largest monomial dividing every term; zero poly yields coefficient 0.
  Monomial content() const;
  /// Divide every term by a monomial (exponents must not go negative).
  Poly divided_by_monomial(const Monomial& m) const;

  /// Numeric evaluation; `sym_value(id)` supplies symbol values.
  template <class T, class F>
  T eval(F&& sym_value) const {
    T acc{};
    for (const auto& m : terms_) {
      T term = T(m.coeff.get_d());
      for (auto [sid, e] : m.exps) {
        T v = sym_value(sid);
        for (int k = 0; k < e; ++k) term = term * v;
      }
      acc = acc + term;
    }
    return acc;
  }

  std::string to_string(const SymbolTable& tab) const;

  static Poly from_terms(std::vector<Monomial> terms);  // normalizes

 private:
  std::vector<Monomial> terms_;  // canonical graded-lex order, leading first
};

inline bool operator==(const Monomial& a, const Monomial& b) {
  return a.coeff == b.coeff && a.exps == b.exps;
}

Poly monomial_gcd(const Monomial& a, const Monomial& b);

// ---------------------------------------------------------------------------
// Ratio of polynomials

/// num/den with the common monomial content cancelled and the denominator
/// scaled so its leading coefficient is 1.
class RationalExpr {
 public:
  RationalExpr() : num_(Poly::zero()), den_(Poly::one()) {}
  RationalExpr(Poly num, Poly den);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool den_is_one() const { return den_ == Poly::one(); }

  RationalExpr operator*(const RationalExpr& o) const;
  RationalExpr reciprocal() const;
  RationalExpr scaled(const mpq_class& c) const;
  bool operator==(const RationalExpr& o) const { return num_ == o.num_ && den_ == o.den_; }

  template <class T, class F>
  T eval(F&& sym_value) const {
    return num_.eval<T>(sym_value) / den_.eval<T>(sym_value);
  }

  std::string to_string(const SymbolTable& tab) const;

 private:
  Poly num_, den_;
};

// ---------------------------------------------------------------------------
// Polynomials in s with Poly coefficients

class SPoly {
 public:
  SPoly() = default;
  explicit SPoly(std::vector<Poly> coeffs);  // coeffs[k] multiplies s^k

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Poly& coeff(int k) const;
  const std::vector<Poly>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  bool operator==(const SPoly& o) const { return coeffs_ == o.coeffs_; }

  /// Split a mixed polynomial over {s, x...} by powers of s.
  static SPoly collect(const Poly& p);
  /// The inverse of collect(): re-embed s as symbol id 0.
  Poly to_poly() const;

  std::string to_string(const SymbolTable& tab) const;

 private:
  std::vector<Poly> coeffs_;
};

enum class TfForm { raw, intermediate, simplified };

/// H(s) = num(s)/den(s) with polynomial coefficients in the design symbols.
struct TransferFunction {
  SPoly num;
  SPoly den;
  TfForm form = TfForm::raw;
  std::shared_ptr<const SymbolTable> table;

  std::string to_string() const;
};

}  // namespace ampkit
