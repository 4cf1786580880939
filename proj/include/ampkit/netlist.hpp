#pragma once

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ampkit {

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class VarKind { transconductance, stage_gain, resistance, capacitance };

const char* to_string(VarKind k);

/// An independent design variable with box bounds.  A fixed variable
/// (e.g. the load capacitance) collapses to a point interval.
struct DesignVariable {
  std::string name;
  VarKind kind = VarKind::transconductance;
  double lower = 0;
  double upper = 0;
  std::optional<double> fixed;

  bool is_fixed() const { return fixed.has_value(); }
};

/// One behavioral gain stage: a transconductance gm_var driving
/// output_node from input_node.  polarity is the sign of the current
/// gm*V(input) injected into the output-node KCL equation.
struct Stage {
  std::string name;
  std::string input_node;
  std::string output_node;
  int polarity = +1;
  int gm_var = -1;
  int gain_var = -1;
  bool drives_load_only = false;
  std::optional<double> gm_over_id;  // per-stage override of the topology value
};

struct PassiveElement {
  enum Kind { resistor, capacitor };
  std::string name;
  Kind kind = resistor;
  std::string node_a;
  std::string node_b;  // "0" is ground
  int value_var = -1;
};

/// Parasitic output resistance of stage `stage`: R_p = gain/gm,
/// attached output_node -> ground during elaboration.
struct ParasiticR {
  int stage = -1;
};

/// Parasitic input capacitance attached at the output node of `stage`:
/// C_p = sum of gm_j/omega_t over the stages j driven from that node.
struct ParasiticC {
  int stage = -1;
  std::vector<int> driven_stages;
};

struct Topology {
  std::vector<DesignVariable> variables;
  std::vector<Stage> stages;
  std::vector<PassiveElement> passives;
  std::vector<std::string> nodes;  // non-ground nodes in first-use order
  std::string input_node = "vin";
  std::string output_node = "vout";
  std::vector<ParasiticR> parasitic_r;  // one per stage after elaboration
  std::vector<ParasiticC> parasitic_c;
  double omega_t = 2.0 * std::numbers::pi * 2e8;
  double vdd = 1.8;
  double gm_over_id = 20.0;
  bool elaborated = false;

  int find_variable(const std::string& name) const;
  int find_node(const std::string& name) const;
  /// Non-ground nodes excluding the input; these are the KCL unknowns.
  std::vector<std::string> unknown_nodes() const;
  /// Design variables that are not fixed, in declaration order.
  std::vector<int> free_variables() const;
};

Topology parse_netlist(const std::string& text);
std::string serialize_netlist(const Topology& t);

/// Attach parasitics per the behavioral model and set drives_load_only.
/// Idempotent; validates stage connectivity.
Topology elaborate(Topology t);

struct SignalPath {
  std::vector<int> stages;  // indices in forward order
  int polarity = +1;
};

struct TopologyDiagnostics {
  std::vector<SignalPath> paths;
  std::vector<std::string> notes;
  std::string to_string(const Topology& t) const;
};

/// Enumerate forward signal paths input -> output and report their
/// cumulative polarities; diagnostics only, never throws.
TopologyDiagnostics validate_topology(const Topology& t);

}  // namespace ampkit
