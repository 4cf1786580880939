#include "ampkit/netlist.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ampkit/si.hpp"

namespace ampkit {

const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::transconductance: return "gm";
    case VarKind::stage_gain: return "gain";
    case VarKind::resistance: return "res";
    case VarKind::capacitance: return "cap";
  }
  return "?";
}

namespace {

struct Bounds {
  double lo, hi;
};

Bounds default_bounds(VarKind k) {
  switch (k) {
    case VarKind::transconductance: return {10e-6, 1e-3};
    case VarKind::stage_gain: return {40.0, 80.0};
    case VarKind::resistance: return {10.0, 1e6};
    case VarKind::capacitance: return {10e-15, 10e-12};
  }
  return {0, 0};
}

std::optional<VarKind> kind_from_string(const std::string& s) {
  if (s == "gm") return VarKind::transconductance;
  if (s == "gain") return VarKind::stage_gain;
  if (s == "res") return VarKind::resistance;
  if (s == "cap") return VarKind::capacitance;
  return std::nullopt;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

// key=value attributes after the positional tokens
std::map<std::string, std::string> parse_attrs(const std::vector<std::string>& toks,
                                               size_t first, int line) {
  std::map<std::string, std::string> attrs;
  for (size_t i = first; i < toks.size(); ++i) {
    auto eq = toks[i].find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= toks[i].size())
      throw ParseError(line, "expected key=value, got '" + toks[i] + "'");
    std::string key = toks[i].substr(0, eq);
    if (attrs.count(key)) throw ParseError(line, "duplicate attribute '" + key + "'");
    attrs[key] = toks[i].substr(eq + 1);
  }
  return attrs;
}

double require_si(const std::string& value, const std::string& what, int line) {
  auto v = parse_si(value);
  if (!v) throw ParseError(line, "bad numeric value for " + what + ": '" + value + "'");
  return *v;
}

// Tracks declarations and usages so `var` lines may appear anywhere.
struct VarBuilder {
  struct Rec {
    std::string name;
    std::optional<VarKind> declared_kind;
    std::optional<VarKind> used_kind;
    std::optional<double> min, max;
    std::optional<double> fixed;
    int first_line = 0;
  };
  std::vector<Rec> recs;
  std::map<std::string, int> index;

  int touch(const std::string& name, int line) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(recs.size());
    index[name] = id;
    recs.push_back({name, {}, {}, {}, {}, {}, line});
    return id;
  }

  int use(const std::string& name, VarKind kind, int line) {
    int id = touch(name, line);
    auto& r = recs[id];
    if (r.used_kind && *r.used_kind != kind)
      throw ParseError(line, "variable '" + name + "' already used as " +
                                 to_string(*r.used_kind));
    r.used_kind = kind;
    return id;
  }
};

}  // namespace

int Topology::find_variable(const std::string& name) const {
  for (size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return static_cast<int>(i);
  return -1;
}

int Topology::find_node(const std::string& name) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> Topology::unknown_nodes() const {
  std::vector<std::string> out;
  for (const auto& n : nodes)
    if (n != input_node) out.push_back(n);
  return out;
}

std::vector<int> Topology::free_variables() const {
  std::vector<int> out;
  for (size_t i = 0; i < variables.size(); ++i)
    if (!variables[i].is_fixed()) out.push_back(static_cast<int>(i));
  return out;
}

Topology parse_netlist(const std::string& text) {
  Topology t;
  VarBuilder vars;
  std::set<std::string> element_names;
  std::vector<int> stage_lines;

  auto touch_node = [&](const std::string& name, int line) {
    if (name.empty()) throw ParseError(line, "empty node name");
    if (name == "0") return;
    if (t.find_node(name) < 0) t.nodes.push_back(name);
  };

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0];

    if (kw == "stage") {
      if (toks.size() < 2) throw ParseError(lineno, "stage needs a name");
      const std::string name = toks[1];
      if (!element_names.insert(name).second)
        throw ParseError(lineno, "duplicate element name '" + name + "'");
      auto attrs = parse_attrs(toks, 2, lineno);
      for (const char* req : {"in", "out", "gm", "sign", "gain"})
        if (!attrs.count(req))
          throw ParseError(lineno, std::string("stage missing ") + req + "=");
      Stage s;
      s.name = name;
      s.input_node = attrs["in"];
      s.output_node = attrs["out"];
      if (s.input_node == s.output_node)
        throw ParseError(lineno, "stage input and output nodes coincide");
      if (s.output_node == "0")
        throw ParseError(lineno, "stage output cannot be ground");
      if (s.input_node == "0")
        throw ParseError(lineno, "stage input cannot be ground");
      if (attrs["sign"] == "+") s.polarity = +1;
      else if (attrs["sign"] == "-") s.polarity = -1;
      else throw ParseError(lineno, "sign must be + or -");
      s.gm_var = vars.use(attrs["gm"], VarKind::transconductance, lineno);
      s.gain_var = vars.use(attrs["gain"], VarKind::stage_gain, lineno);
      if (attrs.count("gmid"))
        s.gm_over_id = require_si(attrs["gmid"], "gmid", lineno);
      touch_node(s.input_node, lineno);
      touch_node(s.output_node, lineno);
      t.stages.push_back(s);
      stage_lines.push_back(lineno);
    } else if (kw == "cap" || kw == "res") {
      if (toks.size() < 4) throw ParseError(lineno, kw + " needs: name nodeA nodeB value=...");
      const std::string name = toks[1];
      if (!element_names.insert(name).second)
        throw ParseError(lineno, "duplicate element name '" + name + "'");
      PassiveElement e;
      e.name = name;
      e.kind = kw == "cap" ? PassiveElement::capacitor : PassiveElement::resistor;
      e.node_a = toks[2];
      e.node_b = toks[3];
      if (e.node_a == e.node_b)
        throw ParseError(lineno, "element connects a node to itself");
      auto attrs = parse_attrs(toks, 4, lineno);
      if (!attrs.count("value")) throw ParseError(lineno, kw + " missing value=");
      VarKind vk = e.kind == PassiveElement::capacitor ? VarKind::capacitance
                                                       : VarKind::resistance;
      e.value_var = vars.use(attrs["value"], vk, lineno);
      if (attrs.count("fixed")) {
        double f = require_si(attrs["fixed"], "fixed", lineno);
        auto& rec = vars.recs[e.value_var];
        if (rec.fixed && *rec.fixed != f)
          throw ParseError(lineno, "conflicting fixed values for '" + rec.name + "'");
        rec.fixed = f;
      }
      touch_node(e.node_a, lineno);
      touch_node(e.node_b, lineno);
      t.passives.push_back(e);
    } else if (kw == "var") {
      if (toks.size() < 2) throw ParseError(lineno, "var needs a name");
      auto attrs = parse_attrs(toks, 2, lineno);
      int id = vars.touch(toks[1], lineno);
      auto& rec = vars.recs[id];
      if (attrs.count("kind")) {
        auto k = kind_from_string(attrs["kind"]);
        if (!k) throw ParseError(lineno, "unknown kind '" + attrs["kind"] + "'");
        if (rec.declared_kind && *rec.declared_kind != *k)
          throw ParseError(lineno, "variable '" + rec.name + "' redeclared with different kind");
        rec.declared_kind = k;
      }
      if (attrs.count("min")) rec.min = require_si(attrs["min"], "min", lineno);
      if (attrs.count("max")) rec.max = require_si(attrs["max"], "max", lineno);
      if (attrs.count("fixed")) rec.fixed = require_si(attrs["fixed"], "fixed", lineno);
    } else if (kw == "const") {
      auto attrs = parse_attrs(toks, 1, lineno);
      for (auto& [k, v] : attrs) {
        if (k == "omega_t") t.omega_t = require_si(v, "omega_t", lineno);
        else if (k == "vdd") t.vdd = require_si(v, "vdd", lineno);
        else if (k == "gm_id") t.gm_over_id = require_si(v, "gm_id", lineno);
        else throw ParseError(lineno, "unknown const '" + k + "'");
      }
    } else {
      throw ParseError(lineno, "unknown statement '" + kw + "'");
    }
  }

  // Resolve variables: declared kind must match usage; unused declarations keep
  // their declared kind.
  for (auto& rec : vars.recs) {
    DesignVariable v;
    v.name = rec.name;
    if (rec.declared_kind && rec.used_kind && *rec.declared_kind != *rec.used_kind)
      throw ParseError(rec.first_line, "variable '" + rec.name + "' declared as " +
                                           to_string(*rec.declared_kind) + " but used as " +
                                           to_string(*rec.used_kind));
    if (rec.used_kind) v.kind = *rec.used_kind;
    else if (rec.declared_kind) v.kind = *rec.declared_kind;
    else throw ParseError(rec.first_line, "variable '" + rec.name + "' has no kind");
    Bounds db = default_bounds(v.kind);
    v.fixed = rec.fixed;
    if (rec.min || rec.max) {
      v.lower = rec.min.value_or(db.lo);
      v.upper = rec.max.value_or(db.hi);
    } else if (v.fixed) {
      v.lower = v.upper = *v.fixed;  // fixed value may sit outside default bounds
    } else {
      v.lower = db.lo;
      v.upper = db.hi;
    }
    if (!(v.lower > 0) || v.lower > v.upper)
      throw ParseError(rec.first_line, "variable '" + v.name + "' needs 0 < min <= max");
    if (v.fixed && (*v.fixed < v.lower || *v.fixed > v.upper))
      throw ParseError(rec.first_line, "fixed value of '" + v.name + "' outside its bounds");
    t.variables.push_back(v);
  }

  if (t.stages.empty() && t.passives.empty())
    throw ParseError(lineno ? lineno : 1, "empty netlist");
  if (t.find_node(t.input_node) < 0)
    throw ParseError(lineno, "netlist never references input node 'vin'");
  if (t.find_node(t.output_node) < 0)
    throw ParseError(lineno, "netlist never references output node 'vout'");
  return t;
}

std::string serialize_netlist(const Topology& t) {
  std::ostringstream out;
  out << "const omega_t=" << format_number(t.omega_t)
      << " vdd=" << format_number(t.vdd)
      << " gm_id=" << format_number(t.gm_over_id) << "\n";
  for (const auto& v : t.variables) {
    out << "var " << v.name << " kind=" << to_string(v.kind)
        << " min=" << format_number(v.lower) << " max=" << format_number(v.upper);
    if (v.fixed) out << " fixed=" << format_number(*v.fixed);
    out << "\n";
  }
  for (const auto& s : t.stages) {
    out << "stage " << s.name << " in=" << s.input_node << " out=" << s.output_node
        << " gm=" << t.variables[s.gm_var].name << " sign=" << (s.polarity > 0 ? "+" : "-")
        << " gain=" << t.variables[s.gain_var].name;
    if (s.gm_over_id) out << " gmid=" << format_number(*s.gm_over_id);
    out << "\n";
  }
  for (const auto& e : t.passives) {
    out << (e.kind == PassiveElement::capacitor ? "cap " : "res ") << e.name << " "
        << e.node_a << " " << e.node_b << " value=" << t.variables[e.value_var].name
        << "\n";
  }
  return out.str();
}

Topology elaborate(Topology t) {
  if (t.elaborated) return t;

  // Connectivity checks before attaching parasitics.
  for (size_t i = 0; i < t.stages.size(); ++i) {
    const auto& s = t.stages[i];
    if (s.output_node == t.output_node) continue;
    bool connected = false;
    for (size_t j = 0; j < t.stages.size(); ++j)
      if (j != i && (t.stages[j].input_node == s.output_node ||
                     t.stages[j].output_node == s.output_node))
        connected = true;
    for (const auto& e : t.passives)
      if (e.node_a == s.output_node || e.node_b == s.output_node) connected = true;
    if (!connected)
      throw TopologyError("stage '" + s.name + "' has an unconnected output node '" +
                          s.output_node + "'");
  }
  // Every stage input must be driven by something.
  for (const auto& s : t.stages) {
    if (s.input_node == t.input_node) continue;
    bool driven = false;
    for (const auto& o : t.stages)
      if (o.output_node == s.input_node) driven = true;
    for (const auto& e : t.passives)
      if (e.node_a == s.input_node || e.node_b == s.input_node) driven = true;
    if (!driven)
      throw TopologyError("stage '" + s.name + "' input node '" + s.input_node +
                          "' is driven by nothing");
  }

  t.parasitic_r.clear();
  t.parasitic_c.clear();
  for (size_t i = 0; i < t.stages.size(); ++i) {
    t.parasitic_r.push_back({static_cast<int>(i)});
    std::vector<int> driven;
    for (size_t j = 0; j < t.stages.size(); ++j)
      if (t.stages[j].input_node == t.stages[i].output_node)
        driven.push_back(static_cast<int>(j));
    if (driven.empty()) {
      t.stages[i].drives_load_only = true;  // null C_p for stages into the load
    } else {
      t.stages[i].drives_load_only = false;
      t.parasitic_c.push_back({static_cast<int>(i), driven});
    }
  }
  t.elaborated = true;
  return t;
}

TopologyDiagnostics validate_topology(const Topology& t) {
  TopologyDiagnostics d;
  // DFS over stage graph from the input node.
  std::vector<int> path;
  std::set<int> on_path;
  auto dfs = [&](auto&& self, const std::string& node) -> void {
    if (node == t.output_node && !path.empty()) {
      SignalPath p;
      p.stages = path;
      p.polarity = 1;
      for (int idx : path) p.polarity *= t.stages[idx].polarity;
      d.paths.push_back(p);
      return;
    }
    for (size_t i = 0; i < t.stages.size(); ++i) {
      if (t.stages[i].input_node != node || on_path.count(static_cast<int>(i))) continue;
      path.push_back(static_cast<int>(i));
      on_path.insert(static_cast<int>(i));
      self(self, t.stages[i].output_node);
      on_path.erase(static_cast<int>(i));
      path.pop_back();
    }
  };
  dfs(dfs, t.input_node);

  if (d.paths.empty()) {
    d.notes.push_back("no signal path from " + t.input_node + " to " + t.output_node);
    return d;
  }
  bool mixed = false;
  for (const auto& p : d.paths)
    if (p.polarity != d.paths.front().polarity) mixed = true;
  if (mixed)
    d.notes.push_back(
        "signal paths disagree in DC polarity; check stage sign declarations");
  return d;
}

std::string TopologyDiagnostics::to_string(const Topology& t) const {
  std::ostringstream out;
  for (const auto& p : paths) {
    out << "path:";
    for (int idx : p.stages) out << " " << t.stages[idx].name;
    out << " (polarity " << (p.polarity > 0 ? "+1" : "-1") << ")\n";
  }
  for (const auto& n : notes) out << "note: " << n << "\n";
  return out.str();
}

}  // namespace ampkit
