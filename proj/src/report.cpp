#include "ampkit/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ampkit {

namespace {

using nlohmann::json;

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

json metrics_json(const PredictedMetrics& m) {
  return {{"gain_db", m.gain_db}, {"gbw_hz", m.gbw_hz},   {"pm_deg", m.pm_deg},
          {"power_w", m.power_w}, {"fom", m.fom},         {"issues", m.issues}};
}

json measured_json(const MeasuredMetrics& m) {
  return {{"gain_db", m.gain_db},
          {"gbw_hz", m.gbw_hz},
          {"pm_deg", m.pm_deg},
          {"power_w", m.power_w},
          {"fom", m.fom},
          {"unity_crossing_found", m.unity_crossing_found},
          {"multiple_crossings", m.multiple_crossings}};
}

json xmap_json(const std::map<std::string, double>& x) {
  json j = json::object();
  for (const auto& [k, v] : x) j[k] = v;
  return j;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace

std::string report_json(const DesignState& state) {
  json j;
  j["schema_version"] = 1;
  j["accepted"] = state.accepted;
  j["seed"] = state.seed;
  j["netlist"] = state.netlist_echo;
  j["raw_tf"] = state.raw_tf_text;
  j["intermediate_tf"] = state.intermediate_tf_text;

  const auto& c = state.config;
  j["config"] = {
      {"specs",
       {{"gain_min_db", c.specs.gain_min_db},
        {"gbw_min_hz", c.specs.gbw_min_hz},
        {"pm_lo_deg", c.specs.pm_lo_deg},
        {"pm_hi_deg", c.specs.pm_hi_deg},
        {"power_max_w", c.specs.power_max_w},
        {"pm_opt_lo_deg", c.specs.pm_opt_lo_deg},
        {"pm_opt_hi_deg", c.specs.pm_opt_hi_deg}}},
      {"margins",
       {{"k_dom", c.margins.k_dom},
        {"k_sep", c.margins.k_sep},
        {"k_auto", c.margins.k_auto},
        {"kappa_p", c.margins.kappa_p},
        {"kappa_z", c.margins.kappa_z},
        {"zeta_min", c.margins.zeta_min},
        {"lhp_margin", c.margins.lhp_margin}}},
      {"rules",
       {{"c-dominance", c.rules.c_dominance},
        {"c-zero-lhp", c.rules.c_zero_lhp},
        {"c-zero-rhp", c.rules.c_zero_rhp},
        {"c-complex", c.rules.c_complex},
        {"c-cancel", c.rules.c_cancel}}},
      {"tolerances",
       {{"gain_db", c.tolerances.gain_db},
        {"gbw_rel", c.tolerances.gbw_rel},
        {"pm_deg", c.tolerances.pm_deg}}},
      {"max_iter", c.max_iter},
      {"n_starts", c.n_starts}};

  j["iterations"] = json::array();
  for (const auto& it : state.iterations) {
    json ji;
    ji["index"] = it.index;
    ji["hypotheses"] = json::array();
    for (const auto& h : it.hypotheses) {
      json jh = {{"id", h.id},
                 {"kind", to_string(h.kind)},
                 {"margin", h.margin},
                 {"guaranteed", h.guaranteed},
                 {"origin", h.origin},
                 {"justification", h.justification},
                 {"lhs_interval", interval_json(h.lhs_iv)},
                 {"rhs_interval", interval_json(h.rhs_iv)},
                 {"ratio_upper_bound", h.ratio_hi}};
      if (state.table) jh["relation"] = h.relation_text(*state.table);
      ji["hypotheses"].push_back(jh);
    }
    ji["notes"] = it.engine_notes;
    ji["grouped_tf"] = it.tf_grouped_text;
    ji["simplified_tf"] = it.tf_simplified_text;
    ji["pz"] = it.pz_text;
    ji["formulas"] = it.formulas_text;
    ji["problem"] = it.problem_dump;
    ji["optimization"] = {{"status", to_string(it.opt.status)},
                          {"x_star", xmap_json(it.opt.x_star)},
                          {"predicted", metrics_json(it.opt.predicted)},
                          {"active_constraints", it.opt.active_constraints},
                          {"starts_tried", it.opt.starts_tried},
                          {"best_start", it.opt.best_start},
                          {"objective", it.opt.objective},
                          {"fom", it.opt.fom},
                          {"max_violation", it.opt.max_violation},
                          {"kkt_residual", it.opt.kkt_residual}};
    if (it.oracle_ran) {
      ji["measured"] = measured_json(it.measured);
      ji["pz_comparison"] = json::array();
      for (const auto& row : it.pz_compare.rows)
        ji["pz_comparison"].push_back({{"kind", row.kind},
                                       {"approx", complex_json(row.approx)},
                                       {"exact", complex_json(row.exact)},
                                       {"rel_err", row.rel_err},
                                       {"matched", row.matched}});
    } else {
      ji["measured"] = nullptr;
    }
    ji["verdict"] = {{"status", it.verdict.status == Verdict::ACCEPT ? "ACCEPT" : "REJECT"},
                     {"criteria",
                      {{"opt_feasible", it.verdict.opt_feasible},
                       {"specs_met", it.verdict.specs_met},
                       {"theory_sim_agree", it.verdict.theory_sim_agree}}},
                     {"detail", it.verdict.detail}};
    ji["attribution"] = to_string(it.attribution);
    ji["fixes"] = json::array();
    for (const auto& f : it.fixes)
      ji["fixes"].push_back({{"kind", to_string(f.kind)},
                             {"target", f.target},
                             {"payload", f.payload},
                             {"rollback_to", to_string(f.rollback_to)}});
    ji["rationale"] = it.rationale;
    j["iterations"].push_back(std::move(ji));
  }

  j["final"] = {{"x", xmap_json(state.final_x)},
                {"predicted", metrics_json(state.final_predicted)},
                {"measured", measured_json(state.final_measured)}};
  if (!state.error.empty()) j["error"] = state.error;
  return j.dump(2) + "\n";
}

void write_report(const std::string& path, const DesignState& state) {
  std::string text = report_json(state);
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string report_summary(const std::string& json_text) {
  json j = json::parse(json_text);
  std::ostringstream out;
  out << "design report (schema " << j.value("schema_version", 0) << ")\n";
  out << "verdict: " << (j.value("accepted", false) ? "ACCEPT" : "REJECT")
      << "  seed: " << j.value("seed", 0) << "\n";
  for (const auto& it : j["iterations"]) {
    out << "-- iteration " << it.value("index", 0) << ": "
        << it["verdict"].value("status", "?") << " (opt "
        << it["optimization"].value("status", "?") << ", "
        << it["hypotheses"].size() << " hypotheses)\n";
    for (const auto& d : it["verdict"]["detail"])
      out << "   " << d.get<std::string>() << "\n";
    if (it.value("attribution", "none") != std::string("none"))
      out << "   attribution: " << it.value("attribution", "") << "\n";
    for (const auto& f : it["fixes"])
      out << "   fix: " << f.value("kind", "") << " -> " << f.value("payload", "") << "\n";
  }
  if (j.contains("final")) {
    const auto& fin = j["final"];
    out << "final x*:";
    for (auto& [k, v] : fin["x"].items()) out << " " << k << "=" << v.dump();
    out << "\n";
    const auto& p = fin["predicted"];
    out << "predicted: gain " << p.value("gain_db", 0.0) << " dB, gbw "
        << p.value("gbw_hz", 0.0) << " Hz, pm " << p.value("pm_deg", 0.0) << " deg, power "
        << p.value("power_w", 0.0) << " W\n";
    const auto& m = fin["measured"];
    out << "measured:  gain " << m.value("gain_db", 0.0) << " dB, gbw "
        << m.value("gbw_hz", 0.0) << " Hz, pm " << m.value("pm_deg", 0.0) << " deg, fom "
        << m.value("fom", 0.0) << "\n";
  }
  if (j.contains("error")) out << "error: " << j["error"].get<std::string>() << "\n";
  return out.str();
}

}  // namespace ampkit
