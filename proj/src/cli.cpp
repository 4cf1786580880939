#include "ampkit/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ampkit/report.hpp"
#include "ampkit/si.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ampkit {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_parse = 2;
constexpr int exit_reject = 3;
constexpr int exit_io = 4;
constexpr int exit_internal = 5;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct DesignArgs {
  std::vector<std::string> netlists;
  std::string spec_path;
  std::string out;
  uint64_t seed = 1;
  int max_iter = 3;
  int starts = 16;
  int jobs = 1;
  std::vector<std::string> disabled_rules;
  Margins margins;
  Tolerances tolerances;
};

RunConfig make_config(const DesignArgs& a) {
  RunConfig cfg;
  if (!a.spec_path.empty()) cfg.specs = parse_specs(slurp(a.spec_path));
  cfg.margins = a.margins;
  cfg.tolerances = a.tolerances;
  cfg.max_iter = a.max_iter;
  cfg.n_starts = a.starts;
  for (const auto& r : a.disabled_rules) {
    bool* flag = cfg.rules.by_name(r);
    if (!flag) throw std::invalid_argument("unknown rule '" + r + "'");
    *flag = false;
  }
  return cfg;
}

int cmd_derive(const std::string& path) {
  Topology topo = elaborate(parse_netlist(slurp(path)));
  SymbolicModel model = build_symbols(topo);
  IntervalContext ictx(model.table);
  const auto& tab = *model.table;

  auto diag = validate_topology(topo);
  std::cout << "# topology\n" << diag.to_string(topo);

  KclSystem raw_sys = build_kcl_system(model, KclMode::raw);
  std::cout << "\n# KCL system (raw)\n";
  for (size_t i = 0; i < raw_sys.unknowns.size(); ++i) {
    std::cout << "node " << raw_sys.unknowns[i] << ": ";
    for (size_t jcol = 0; jcol < raw_sys.unknowns.size(); ++jcol)
      std::cout << (jcol ? " | " : "") << "V(" << raw_sys.unknowns[jcol] << ")*["
                << raw_sys.matrix[i][jcol].to_string(tab) << "]";
    std::cout << " = V(vin)*[" << raw_sys.rhs[i].to_string(tab) << "]\n";
  }

  TransferFunction raw = cramer_solve(raw_sys, topo.output_node);
  std::cout << "\n# raw TF\n" << raw.to_string() << "\n";
  TransferFunction inter = substitute_parasitics(raw, model);
  std::cout << "\n# intermediate TF (parasitics substituted)\n" << inter.to_string() << "\n";

  TransferFunction grouped =
      cramer_solve(build_kcl_system(model, KclMode::grouped), topo.output_node);
  std::cout << "\n# grouped TF (node conductances as go_k)\n" << grouped.to_string() << "\n";
  std::cout << "\n# auxiliary definitions\n";
  for (int id = 0; id < tab.size(); ++id) {
    const auto& si = tab.info(id);
    if (si.kind == SymbolKind::derived)
      std::cout << si.name << " = " << si.definition->to_string(tab) << "\n";
  }

  Margins margins;
  auto simp = simplify_coefficients(grouped, ictx, margins);
  std::cout << "\n# simplified TF\n" << simp.tf.to_string() << "\n";
  auto extr = extract_pz(simp.tf, ictx, margins);
  PZModel pz = extr.pz;
  ScaledExpr gbw = derive_gbw_expr(simp.tf, pz);
  RuleToggles toggles;
  auto pos = position_pz(pz, gbw, ictx, margins, toggles);

  std::cout << "\n# hypotheses\n";
  auto print_hyps = [&](const std::vector<Hypothesis>& hs) {
    for (const auto& h : hs)
      std::cout << "[" << to_string(h.kind) << (h.guaranteed ? "*" : "") << "] "
                << h.relation_text(tab) << "   (" << h.origin << ")\n";
  };
  print_hyps(simp.hypotheses);
  print_hyps(extr.hypotheses);
  print_hyps(pos);
  for (const auto& n : simp.notes) std::cout << "note: " << n << "\n";
  for (const auto& n : extr.notes) std::cout << "note: " << n << "\n";

  std::cout << "\n# pole/zero model\n" << pz.to_string(tab);
  MetricFormulas formulas = assemble_formulas(model, simp.tf, pz);
  std::cout << "\n# metric formulas\n" << formulas.render(tab);
  return exit_ok;
}

int cmd_design(const DesignArgs& args) {
  RunConfig cfg = make_config(args);
  struct Job {
    std::string netlist_path;
    std::string out_path;
    DesignState state;
  };
  std::vector<Job> jobs;
  for (const auto& np : args.netlists) {
    Job j;
    j.netlist_path = np;
    if (args.netlists.size() == 1) {
      j.out_path = args.out.empty()
                       ? std::filesystem::path(np).stem().string() + ".report.json"
                       : args.out;
    } else {
      std::filesystem::path dir = args.out.empty() ? "." : args.out;
      std::filesystem::create_directories(dir);
      j.out_path = (dir / (std::filesystem::path(np).stem().string() + ".report.json"))
                       .string();
    }
    jobs.push_back(std::move(j));
  }

  std::vector<Topology> parsed(jobs.size());
  for (size_t i = 0; i < jobs.size(); ++i)
    parsed[i] = parse_netlist(slurp(jobs[i].netlist_path));

  // --jobs parallelizes across topologies only; each run stays sequential
  cfg.parallel = args.jobs <= 1;
#ifdef _OPENMP
  if (args.jobs > 1) omp_set_num_threads(args.jobs);
#pragma omp parallel for schedule(dynamic) if (args.jobs > 1)
#endif
  for (long i = 0; i < static_cast<long>(jobs.size()); ++i)
    jobs[static_cast<size_t>(i)].state =
        run_design(parsed[static_cast<size_t>(i)], cfg, args.seed);

  bool all_accept = true;
  for (auto& j : jobs) {
    if (!j.state.error.empty()) throw std::runtime_error(j.state.error);
    write_report(j.out_path, j.state);
    std::cout << j.netlist_path << ": " << (j.state.accepted ? "ACCEPT" : "REJECT") << " in "
              << j.state.iterations.size() << " iteration(s), report: " << j.out_path
              << "\n";
    all_accept = all_accept && j.state.accepted;
  }
  return all_accept ? exit_ok : exit_reject;
}

std::map<std::string, double> parse_values(const std::string& text) {
  std::map<std::string, double> x;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line = raw.substr(0, hash == std::string::npos ? raw.size() : hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError(lineno, "expected name=value");
      auto v = parse_si(tok.substr(eq + 1));
      if (!v) throw ParseError(lineno, "bad value in '" + tok + "'");
      x[tok.substr(0, eq)] = *v;
    }
  }
  return x;
}

int cmd_simulate(const std::string& netlist_path, const std::string& values_path,
                 double f_lo, double f_hi, int ppd, const std::string& out_csv) {
  Topology topo = elaborate(parse_netlist(slurp(netlist_path)));
  SymbolicModel model = build_symbols(topo);
  auto x = parse_values(slurp(values_path));

  for (const auto& [name, value] : x) {
    int vi = topo.find_variable(name);
    if (vi < 0) continue;
    const auto& v = topo.variables[static_cast<size_t>(vi)];
    if (value < v.lower || value > v.upper)
      std::cerr << "warning: " << name << "=" << format_number(value)
                << " lies outside [" << format_number(v.lower) << ", "
                << format_number(v.upper) << "]; simulating anyway\n";
  }

  TransferFunction raw =
      cramer_solve(build_kcl_system(model, KclMode::raw), topo.output_node);
  NumericBinding binding(model, x);
  NumericTF ntf = compile_tf(raw, binding);

  auto sweep = ac_sweep(ntf, f_lo, f_hi, ppd);
  std::string csv = sweep_to_csv(sweep);
  if (out_csv.empty() || out_csv == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(out_csv, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + out_csv);
    out << csv;
  }

  PowerFormula power = derive_power(model);
  auto values = bind_symbols<double>(*model.table, [&](const SymbolInfo& si) {
    auto it = x.find(si.name);
    if (it != x.end()) return it->second;
    if (si.fixed) return *si.fixed;
    throw DerivationError("unbound variable '" + si.name + "'");
  });
  double power_w = power.eval<double>([&](int sid) { return values[static_cast<size_t>(sid)]; });
  double cl = load_capacitance(model);
  MeasuredMetrics m = measure(ntf, power_w, cl, std::max(f_lo, 1.0), std::max(f_hi, 1e11), 64);

  std::ostringstream js;
  js << "{\n  \"gain_db\": " << format_number(m.gain_db)
     << ",\n  \"gbw_hz\": " << format_number(m.gbw_hz)
     << ",\n  \"pm_deg\": " << format_number(m.pm_deg)
     << ",\n  \"power_w\": " << format_number(m.power_w)
     << ",\n  \"fom\": " << format_number(m.fom) << ",\n  \"unity_crossing_found\": "
     << (m.unity_crossing_found ? "true" : "false")
     << ",\n  \"multiple_crossings\": " << (m.multiple_crossings ? "true" : "false")
     << "\n}\n";
  if (out_csv.empty() || out_csv == "-") std::cerr << js.str();
  else std::cout << js.str();
  return exit_ok;
}

int cmd_report(const std::string& path) {
  std::cout << report_summary(slurp(path));
  return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"behavioral op-amp sizing by symbolic derivation, hypothesis "
               "constraints and white-box optimization"};
  app.require_subcommand(1);

  std::string derive_netlist;
  auto* derive = app.add_subcommand("derive", "print the symbolic derivation chain");
  derive->add_option("netlist", derive_netlist, "netlist file")->required();

  DesignArgs dargs;
  auto* design = app.add_subcommand("design", "run the full design loop");
  design->add_option("netlist", dargs.netlists, "netlist file(s)")->required();
  design->add_option("--specs", dargs.spec_path, "spec file (key=value)");
  design->add_option("--seed", dargs.seed, "RNG seed");
  design->add_option("--max-iter", dargs.max_iter, "maximum loop iterations");
  design->add_option("--starts", dargs.starts, "multi-start count");
  design->add_option("--jobs", dargs.jobs, "parallel batch jobs");
  design->add_option("--disable-rule", dargs.disabled_rules,
                     "disable a positioning rule (c-dominance, c-zero-lhp, c-zero-rhp, "
                     "c-complex, c-cancel)");
  design->add_option("--k-dom", dargs.margins.k_dom, "dominance margin");
  design->add_option("--k-sep", dargs.margins.k_sep, "separation margin");
  design->add_option("--kappa-p", dargs.margins.kappa_p, "pole/GBW coupling factor");
  design->add_option("--kappa-z", dargs.margins.kappa_z, "RHP-zero/GBW factor");
  design->add_option("--zeta-min", dargs.margins.zeta_min, "damping floor");
  design->add_option("--out", dargs.out, "report path (or directory for batches)");

  std::string sim_netlist, sim_values, sim_out;
  double sim_flo = 1.0, sim_fhi = 1e11;
  int sim_ppd = 64;
  auto* sim = app.add_subcommand("simulate", "AC sweep and measured metrics at a point");
  sim->add_option("netlist", sim_netlist, "netlist file")->required();
  sim->add_option("--values", sim_values, "name=value file for all variables")->required();
  sim->add_option("--f-lo", sim_flo, "sweep start (Hz)");
  sim->add_option("--f-hi", sim_fhi, "sweep end (Hz)");
  sim->add_option("--ppd", sim_ppd, "points per decade");
  sim->add_option("--out", sim_out, "CSV output path ('-' for stdout)");

  std::string report_path;
  auto* rep = app.add_subcommand("report", "pretty-print a design report");
  rep->add_option("report", report_path, "report JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_parse;
  }

  try {
    if (derive->parsed()) return cmd_derive(derive_netlist);
    if (design->parsed()) return cmd_design(dargs);
    if (sim->parsed())
      return cmd_simulate(sim_netlist, sim_values, sim_flo, sim_fhi, sim_ppd, sim_out);
    if (rep->parsed()) return cmd_report(report_path);
    return exit_parse;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_parse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
}

}  // namespace ampkit
