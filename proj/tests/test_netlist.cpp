#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ampkit/netlist.hpp"

using namespace ampkit;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
std::string netlist_path(const char* name) {
  return std::string(AMPKIT_NETLIST_DIR) + "/" + name;
}
}  // namespace

TEST_CASE("stage line maps directly onto Stage fields") {
  Topology t = parse_netlist(
      "stage g1 in=vin out=n1 gm=G1 sign=+ gain=A1\n"
      "res r1 n1 0 value=R1\n"
      "stage g2 in=n1 out=vout gm=G2 sign=- gain=A2\n"
      "cap cl vout 0 value=CL\n");
  REQUIRE(t.stages.size() == 2);
  CHECK(t.stages[0].polarity == +1);
  CHECK(t.stages[0].input_node == "vin");
  CHECK(t.stages[0].output_node == "n1");
  CHECK(t.variables[t.stages[0].gm_var].name == "G1");
  CHECK(t.variables[t.stages[0].gm_var].kind == VarKind::transconductance);
  CHECK(t.variables[t.stages[0].gain_var].kind == VarKind::stage_gain);
  CHECK(t.stages[1].polarity == -1);
}

TEST_CASE("fixed load capacitance") {
  Topology t = parse_netlist(slurp(netlist_path("mzc.net")));
  int cl = t.find_variable("CL");
  REQUIRE(cl >= 0);
  CHECK(t.variables[cl].is_fixed());
  CHECK(*t.variables[cl].fixed == 10e-12);
  int rl = t.find_variable("RL");
  REQUIRE(rl >= 0);
  CHECK(*t.variables[rl].fixed == 10e6);  // fixed value may exceed default bounds
  CHECK(t.variables[rl].lower == t.variables[rl].upper);
}

TEST_CASE("default bounds by kind") {
  Topology t = parse_netlist(slurp(netlist_path("mzc.net")));
  const auto& g1 = t.variables[t.find_variable("G1")];
  CHECK(g1.lower == 10e-6);
  CHECK(g1.upper == 1e-3);
  const auto& a1 = t.variables[t.find_variable("A1")];
  CHECK(a1.lower == 40.0);
  CHECK(a1.upper == 80.0);
  const auto& cm = t.variables[t.find_variable("Cm")];
  CHECK(cm.lower == 10e-15);
  CHECK(cm.upper == 10e-12);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_AS(parse_netlist("res rx n1 n1 value=R1\n"), ParseError);
  try {
    parse_netlist("stage g1 in=vin out=vout gm=G1 sign=+ gain=A1\n"
                  "bogus line here\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  // duplicate element names
  CHECK_THROWS_AS(parse_netlist("cap c1 vout 0 value=C1\ncap c1 vin 0 value=C2\n"),
                  ParseError);
  // one variable cannot serve two kinds
  CHECK_THROWS_AS(
      parse_netlist("stage g1 in=vin out=vout gm=X sign=+ gain=A1\ncap c1 vout 0 value=X\n"),
      ParseError);
  // vin/vout must be referenced
  CHECK_THROWS_AS(parse_netlist("cap c1 n1 0 value=C1\n"), ParseError);
  // fixed outside explicit bounds
  CHECK_THROWS_AS(
      parse_netlist("stage g1 in=vin out=vout gm=G1 sign=+ gain=A1\n"
                    "cap cl vout 0 value=CL fixed=1\nvar CL kind=cap min=1p max=10p\n"),
      ParseError);
}

TEST_CASE("elaboration attaches the behavioral parasitics") {
  Topology t = elaborate(parse_netlist(slurp(netlist_path("mzc.net"))));
  CHECK(t.elaborated);
  // one parasitic R per stage
  CHECK(t.parasitic_r.size() == t.stages.size());
  // Cp only at nodes that drive another stage input: g1 drives g2
  REQUIRE(t.parasitic_c.size() == 1);
  CHECK(t.stages[t.parasitic_c[0].stage].name == "g1");
  REQUIRE(t.parasitic_c[0].driven_stages.size() == 1);
  CHECK(t.stages[t.parasitic_c[0].driven_stages[0]].name == "g2");
  // stages into the load carry no parasitic capacitance
  CHECK(t.stages[1].drives_load_only);
  CHECK(t.stages[2].drives_load_only);
  CHECK(!t.stages[0].drives_load_only);
}

TEST_CASE("parasitic resistance numeric check") {
  // A=40, G=100uS -> Rp = A/G = 400k
  double rp = 40.0 / 100e-6;
  CHECK(rp == doctest::Approx(4e5));
}

TEST_CASE("elaboration is idempotent") {
  Topology t1 = elaborate(parse_netlist(slurp(netlist_path("mzc.net"))));
  Topology t2 = elaborate(t1);
  CHECK(serialize_netlist(t1) == serialize_netlist(t2));
  CHECK(t1.parasitic_r.size() == t2.parasitic_r.size());
  CHECK(t1.parasitic_c.size() == t2.parasitic_c.size());
}

TEST_CASE("parasitic count invariants across benchmark netlists") {
  for (const char* name : {"mzc.net", "smc.net", "single.net"}) {
    Topology t = elaborate(parse_netlist(slurp(netlist_path(name))));
    CHECK(t.parasitic_r.size() == t.stages.size());
    size_t driving = 0;
    for (const auto& s : t.stages)
      if (!s.drives_load_only) ++driving;
    CHECK(t.parasitic_c.size() == driving);
  }
}

TEST_CASE("when several stages share an input node their capacitances sum") {
  Topology t = elaborate(parse_netlist(
      "stage g1 in=vin out=n1 gm=G1 sign=+ gain=A1\n"
      "stage g2 in=n1 out=vout gm=G2 sign=+ gain=A2\n"
      "stage g3 in=n1 out=vout gm=G3 sign=- gain=A3\n"
      "cap cl vout 0 value=CL fixed=10p\nres rl vout 0 value=RL fixed=10Meg\n"));
  REQUIRE(t.parasitic_c.size() == 1);
  CHECK(t.parasitic_c[0].driven_stages.size() == 2);
}

TEST_CASE("parse-serialize-parse round trip") {
  for (const char* name : {"mzc.net", "smc.net", "single.net"}) {
    Topology t1 = parse_netlist(slurp(netlist_path(name)));
    std::string once = serialize_netlist(t1);
    Topology t2 = parse_netlist(once);
    CHECK(serialize_netlist(t2) == once);
    CHECK(t2.variables.size() == t1.variables.size());
    CHECK(t2.stages.size() == t1.stages.size());
    CHECK(t2.omega_t == t1.omega_t);
  }
}

TEST_CASE("unconnected and undriven stages are elaboration errors") {
  CHECK_THROWS_AS(elaborate(parse_netlist(
                      "stage g1 in=vin out=n1 gm=G1 sign=+ gain=A1\n"
                      "stage g2 in=vin out=vout gm=G2 sign=+ gain=A2\n"
                      "cap cl vout 0 value=CL\n")),
                  TopologyError);  // g1 output dangles
  CHECK_THROWS_AS(elaborate(parse_netlist(
                      "stage g1 in=nx out=vout gm=G1 sign=+ gain=A1\n"
                      "cap c1 vin vout value=C1\n")),
                  TopologyError);  // nx driven by nothing
}

TEST_CASE("validate_topology reports signal paths and polarities") {
  Topology mzc = elaborate(parse_netlist(slurp(netlist_path("mzc.net"))));
  auto d = validate_topology(mzc);
  REQUIRE(d.paths.size() == 2);
  // declared signs: g1*g2 -> +1, gf -> -1; disagreement is reported
  int pol_prod = d.paths[0].polarity * d.paths[1].polarity;
  CHECK(pol_prod == -1);
  CHECK(!d.notes.empty());

  Topology single = elaborate(parse_netlist(slurp(netlist_path("single.net"))));
  auto ds = validate_topology(single);
  CHECK(ds.paths.size() == 1);
  CHECK(ds.notes.empty());

  // no input->output path
  Topology nopath = parse_netlist(
      "stage g1 in=vin out=n1 gm=G1 sign=+ gain=A1\n"
      "cap c1 n1 0 value=C1\n"
      "res r1 vout 0 value=R1\ncap c2 vin vout value=C2\n");
  auto dn = validate_topology(nopath);
  CHECK(dn.paths.empty());
  REQUIRE(!dn.notes.empty());
  CHECK(dn.notes[0].find("no signal path") != std::string::npos);
}
