#pragma once

#include <complex>
#include <map>

#include "ampkit/netlist.hpp"
#include "ampkit/poly.hpp"

namespace ampkit {

struct DerivationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Symbol registry for one elaborated topology.  Registration order is a
/// pure function of the netlist, so symbol ids are reproducible.
struct SymbolicModel {
  Topology topo;  // elaborated
  std::shared_ptr<SymbolTable> table;

  std::vector<int> var_sym;       // per design variable: direct symbol id
  std::vector<int> var_inv_sym;   // per design variable: inverse symbol or -1
  int wt_sym = -1;                // omega_t constant
  int wt_inv_sym = -1;
  std::vector<int> rp_inv_sym;    // per stage: 1/Rp (parasitic conductance)
  std::vector<int> cp_sym;        // per ParasiticC record: Cp symbol
  std::vector<int> node_cond_sym; // per unknown node: grouped go symbol or -1

  int gm_symbol(int stage) const { return var_sym[topo.stages[stage].gm_var]; }
};

SymbolicModel build_symbols(const Topology& elaborated);

/// One KCL equation per unknown node; matrix entries are polynomials over
/// the model symbols including s.  M * V = rhs with V(vin) = 1.
struct KclSystem {
  std::vector<std::vector<Poly>> matrix;
  std::vector<Poly> rhs;
  std::vector<std::string> unknowns;
  std::shared_ptr<const SymbolTable> table;
};

enum class KclMode {
  raw,      // individual 1/Rp, 1/RL admittance symbols (Key-response form)
  grouped,  // per-node output conductances folded into go_k symbols
};

KclSystem build_kcl_system(const SymbolicModel& m, KclMode mode);

Poly det_bareiss(std::vector<std::vector<Poly>> w);
Poly det_cofactor(const std::vector<std::vector<Poly>>& w);  // reference path

/// H(s) = det(M with the output column replaced by rhs) / det(M).
TransferFunction cramer_solve(const KclSystem& sys, const std::string& out_node);

/// Replace the parasitic R/C symbols by their design-variable definitions,
/// yielding the intermediate transfer function.
TransferFunction substitute_parasitics(const TransferFunction& raw, const SymbolicModel& m);

/// Expand every derived symbol to its definition (fixpoint).
Poly expand_derived(const Poly& p, const SymbolTable& tab);

// ---------------------------------------------------------------------------
// Numeric evaluation

/// Values for every non-s symbol at one design point.
class NumericBinding {
 public:
  NumericBinding(const SymbolicModel& m, const std::map<std::string, double>& x);
  double value(int sym) const { return values_.at(static_cast<size_t>(sym)); }

 private:
  std::vector<double> values_;
};

/// Transfer function with numeric coefficients, for fast sweeps.
struct NumericTF {
  std::vector<double> num, den;  // ascending powers of s
  std::complex<double> eval(std::complex<double> s) const;
};

NumericTF compile_tf(const TransferFunction& tf, const NumericBinding& b);

/// Evaluate H at one point; throws DerivationError when den(s) == 0.
std::complex<double> tf_eval(const TransferFunction& tf, const NumericBinding& b,
                             std::complex<double> s);

}  // namespace ampkit
