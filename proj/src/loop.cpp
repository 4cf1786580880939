#include "ampkit/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ampkit {

const char* to_string(FixKind k) {
  switch (k) {
    case FixKind::add_constraint: return "add_constraint";
    case FixKind::tighten_margin: return "tighten_margin";
    case FixKind::relax_margin: return "relax_margin";
    case FixKind::widen_pm_band: return "widen_pm_band";
    case FixKind::rederive: return "rederive";
  }
  return "?";
}

const char* to_string(RollbackPoint r) {
  return r == RollbackPoint::propose ? "propose" : "optimize";
}

const char* to_string(Attribution a) {
  switch (a) {
    case Attribution::none: return "none";
    case Attribution::over_constrained: return "over-constrained";
    case Attribution::missing_pz_gbw_coupling: return "missing PZ-GBW coupling";
    case Attribution::separation_too_weak: return "separation hypothesis too weak";
    case Attribution::simplification_violated: return "simplification hypothesis violated";
    case Attribution::unattributed: return "unattributed";
  }
  return "?";
}

Verdict check_result(const OptResult& opt, bool oracle_ran, const MeasuredMetrics& measured,
                     const PredictedMetrics& predicted, const SpecSet& specs,
                     const Tolerances& tol) {
  Verdict v;
  char buf[160];
  v.opt_feasible = opt.status == OptStatus::feasible_optimum;
  if (!v.opt_feasible)
    v.detail.push_back(std::string("optimization: ") + to_string(opt.status));

  if (v.opt_feasible && oracle_ran && measured.unity_crossing_found) {
    bool gain_ok = measured.gain_db >= specs.gain_min_db;
    bool gbw_ok = measured.gbw_hz >= specs.gbw_min_hz;
    bool pm_ok = measured.pm_deg >= specs.pm_lo_deg && measured.pm_deg <= specs.pm_hi_deg;
    bool pw_ok = measured.power_w <= specs.power_max_w;
    v.specs_met = gain_ok && gbw_ok && pm_ok && pw_ok;
    std::snprintf(buf, sizeof(buf),
                  "specs: gain %.2f dB [%s], gbw %.4g Hz [%s], pm %.2f deg [%s], power "
                  "%.4g W [%s]",
                  measured.gain_db, gain_ok ? "ok" : "violated", measured.gbw_hz,
                  gbw_ok ? "ok" : "violated", measured.pm_deg, pm_ok ? "ok" : "violated",
                  measured.power_w, pw_ok ? "ok" : "violated");
    v.detail.push_back(buf);

    double dgain = std::abs(predicted.gain_db - measured.gain_db);
    double dgbw = std::abs(predicted.gbw_hz - measured.gbw_hz) / measured.gbw_hz;
    double dpm = std::abs(predicted.pm_deg - measured.pm_deg);
    v.theory_sim_agree =
        dgain <= tol.gain_db && dgbw <= tol.gbw_rel && dpm <= tol.pm_deg;
    std::snprintf(buf, sizeof(buf),
                  "theory-sim: dGain %.3f dB (<= %.3g), dGBW %.2f%% (<= %.3g%%), dPM %.2f "
                  "deg (<= %.3g)",
                  dgain, tol.gain_db, 100 * dgbw, 100 * tol.gbw_rel, dpm, tol.pm_deg);
    v.detail.push_back(buf);
  } else if (v.opt_feasible) {
    v.detail.push_back("oracle: no unity crossing found; specs cannot be met");
  }

  v.status = (v.opt_feasible && v.specs_met && v.theory_sim_agree) ? Verdict::ACCEPT
                                                                   : Verdict::REJECT;
  return v;
}

Attribution attribute_error(const AttributionContext& ctx, std::string* why) {
  auto note = [&](const std::string& s) {
    if (why) *why = s;
  };
  if (!ctx.opt_feasible) {
    note("optimization reported no feasible point");
    return Attribution::over_constrained;
  }
  if (!ctx.oracle_ran) {
    note("no oracle data available");
    return Attribution::unattributed;
  }
  if (ctx.unity_crossing_found) {
    for (double p_hz : ctx.exact_nondominant_pole_hz) {
      if (p_hz < ctx.kappa_p * ctx.measured_gbw_hz) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "exact non-dominant pole at %.4g Hz sits below %.3g x measured GBW "
                      "(%.4g Hz): single-pole roll-off assumption broken",
                      p_hz, ctx.kappa_p, ctx.measured_gbw_hz);
        note(buf);
        return Attribution::missing_pz_gbw_coupling;
      }
    }
  }
  for (const auto& r : ctx.roots) {
    if (r.rel_err > 0.30 && r.min_enabling_slack < 0.10) {
      note("approximate root off by " + std::to_string(r.rel_err * 100) +
           "% with enabling-hypothesis slack below 10%");
      return Attribution::separation_too_weak;
    }
  }
  for (const auto& c : ctx.coeffs) {
    if (c.rel_dev > 1.0 / ctx.k_dom) {
      note("coefficient " + c.label + " deviates " + std::to_string(c.rel_dev * 100) +
           "% from the intermediate value");
      return Attribution::simplification_violated;
    }
  }
  note("no branch of the attribution tree matched");
  return Attribution::unattributed;
}

std::vector<FixAction> propose_fix(Attribution a, const AttributionContext& ctx,
                                   const Margins& margins, bool coupling_already_on) {
  std::vector<FixAction> fixes;
  switch (a) {
    case Attribution::missing_pz_gbw_coupling: {
      FixAction f;
      if (!coupling_already_on) {
        f.kind = FixKind::add_constraint;
        f.target = "c-dominance";
        f.payload = "|p_nd| >= " + std::to_string(margins.kappa_p) + "*GBW for every "
                    "non-dominant pole";
      } else {
        f.kind = FixKind::tighten_margin;
        f.target = "c-dominance";
        f.new_margin = margins.kappa_p * 2;
        f.payload = "kappa_p doubled to " + std::to_string(f.new_margin);
      }
      f.rollback_to = RollbackPoint::optimize;
      fixes.push_back(f);
      break;
    }
    case Attribution::separation_too_weak: {
      FixAction f;
      f.kind = FixKind::tighten_margin;
      // the weakest enabling hypothesis among large-error roots
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& r : ctx.roots)
        if (r.rel_err > 0.30 && r.min_enabling_slack < worst && !r.weakest_hyp_id.empty()) {
          worst = r.min_enabling_slack;
          f.target = r.weakest_hyp_id;
        }
      f.payload = "separation margin doubled";
      f.rollback_to = RollbackPoint::optimize;
      fixes.push_back(f);
      break;
    }
    case Attribution::simplification_violated: {
      FixAction f;
      f.kind = FixKind::tighten_margin;
      for (const auto& c : ctx.coeffs)
        if (c.rel_dev > 1.0 / ctx.k_dom && !c.hyp_ids.empty()) {
          f.target = c.hyp_ids.front();
          break;
        }
      f.payload = "dominance margin doubled; coefficients re-simplified";
      f.rollback_to = RollbackPoint::propose;
      fixes.push_back(f);
      break;
    }
    case Attribution::over_constrained: {
      FixAction relax;
      relax.kind = FixKind::relax_margin;
      relax.target = "all";
      relax.payload = "all hypothesis margins K <- max(3, K/2)";
      relax.rollback_to = RollbackPoint::optimize;
      fixes.push_back(relax);
      FixAction widen;
      widen.kind = FixKind::widen_pm_band;
      widen.target = "pm_opt";
      widen.payload = "optimization PM band widened by 5 deg each side";
      widen.rollback_to = RollbackPoint::optimize;
      fixes.push_back(widen);
      break;
    }
    default:
      break;
  }
  return fixes;
}

// ---------------------------------------------------------------------------

namespace {

double hyp_relative_slack(const Hypothesis& h, const std::vector<double>& values) {
  auto sym = [&](int sid) { return values[static_cast<size_t>(sid)]; };
  double lhs = h.lhs.eval<double>(sym);
  double rhs = h.margin * h.rhs.eval<double>(sym);
  if (rhs == 0) return std::numeric_limits<double>::infinity();
  return lhs / rhs - 1.0;
}

}  // namespace

DesignState run_design(const Topology& parsed, const RunConfig& config, uint64_t seed) {
  DesignState state;
  state.config = config;
  state.seed = seed;
  try {
    state.netlist_echo = serialize_netlist(parsed);
    Topology topo = elaborate(parsed);
    auto model = std::make_shared<SymbolicModel>(build_symbols(topo));
    state.table = model->table;
    IntervalContext ictx(model->table);

    TransferFunction raw =
        cramer_solve(build_kcl_system(*model, KclMode::raw), topo.output_node);
    TransferFunction intermediate = substitute_parasitics(raw, *model);
    TransferFunction grouped =
        cramer_solve(build_kcl_system(*model, KclMode::grouped), topo.output_node);
    state.raw_tf_text = raw.to_string();
    state.intermediate_tf_text = intermediate.to_string();

    Margins margins = config.margins;
    RuleToggles toggles = config.rules;
    MarginOverrides overrides;
    double pm_widen = 0;

    bool need_propose = true;
    SimplifyResult simp;
    ExtractResult extr;

    for (int iter = 1; iter <= config.max_iter; ++iter) {
      IterationRecord rec;
      rec.index = iter;

      if (need_propose) {
        simp = simplify_coefficients(grouped, ictx, margins, overrides);
        extr = extract_pz(simp.tf, ictx, margins, overrides);
        need_propose = false;
      }
      PZModel pz = extr.pz;  // positioning resolves planes on a fresh copy
      ScaledExpr gbw_expr = derive_gbw_expr(simp.tf, pz);
      std::vector<Hypothesis> pos_hyps =
          position_pz(pz, gbw_expr, ictx, margins, toggles, overrides);

      rec.hypotheses = simp.hypotheses;
      rec.hypotheses.insert(rec.hypotheses.end(), extr.hypotheses.begin(),
                            extr.hypotheses.end());
      rec.hypotheses.insert(rec.hypotheses.end(), pos_hyps.begin(), pos_hyps.end());
      rec.engine_notes = simp.notes;
      rec.engine_notes.insert(rec.engine_notes.end(), extr.notes.begin(), extr.notes.end());

      MetricFormulas formulas = assemble_formulas(*model, simp.tf, pz);
      rec.tf_grouped_text = grouped.to_string();
      rec.tf_simplified_text = simp.tf.to_string();
      rec.pz_text = pz.to_string(*model->table);
      rec.formulas_text = formulas.render(*model->table);

      SpecSet opt_specs = config.specs;
      opt_specs.pm_opt_lo_deg = std::max(config.specs.pm_lo_deg,
                                         config.specs.pm_opt_lo_deg - pm_widen);
      opt_specs.pm_opt_hi_deg = std::min(config.specs.pm_hi_deg,
                                         config.specs.pm_opt_hi_deg + pm_widen);

      OptProblem problem = build_problem(formulas, rec.hypotheses, opt_specs, model);
      rec.problem_dump = problem.dump();
      OptOptions oo;
      oo.seed = seed;
      oo.n_starts = config.n_starts;
      oo.parallel = config.parallel;
      rec.opt = solve(problem, oo);

      AttributionContext actx;
      actx.opt_feasible = rec.opt.status == OptStatus::feasible_optimum;
      actx.k_dom = margins.k_dom;
      actx.kappa_p = margins.kappa_p;

      if (actx.opt_feasible) {
        NumericBinding binding(*model, rec.opt.x_star);
        NumericTF ntf = compile_tf(raw, binding);
        rec.measured = measure(ntf, rec.opt.predicted.power_w, formulas.cl_farad);
        rec.oracle_ran = true;
        ExactPZ exact = exact_pz(ntf);
        ApproxPZValues approx = approx_pz_values(pz, *model, rec.opt.x_star);
        rec.pz_compare = compare_pz(approx, exact);

        actx.oracle_ran = true;
        actx.measured_gbw_hz = rec.measured.gbw_hz;
        actx.unity_crossing_found = rec.measured.unity_crossing_found;
        for (size_t i = 1; i < exact.poles.size(); ++i)
          actx.exact_nondominant_pole_hz.push_back(std::abs(exact.poles[i]) /
                                                   (2.0 * std::numbers::pi));

        // per-root error rows with enabling-hypothesis slack
        auto values = bind_symbols<double>(*model->table, [&](const SymbolInfo& si) {
          auto it = rec.opt.x_star.find(si.name);
          if (it != rec.opt.x_star.end()) return it->second;
          return si.fixed.value_or(0.0);
        });
        auto slack_of = [&](const std::vector<std::string>& ids) {
          AttributionContext::RootRow row;
          for (const auto& id : ids)
            for (const auto& h : rec.hypotheses)
              if (h.id == id) {
                double s = hyp_relative_slack(h, values);
                if (s < row.min_enabling_slack) {
                  row.min_enabling_slack = s;
                  row.weakest_hyp_id = id;
                }
              }
          return row;
        };
        std::vector<std::pair<double, AttributionContext::RootRow>> model_poles;
        for (const auto& p : pz.real_poles) {
          auto sym = [&](int sid) { return values[static_cast<size_t>(sid)]; };
          auto row = slack_of(p.enabling);
          model_poles.push_back({std::abs(p.magnitude.eval<double>(sym)), row});
        }
        std::sort(model_poles.begin(), model_poles.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < model_poles.size() && i < exact.poles.size(); ++i) {
          auto row = model_poles[i].second;
          double e = std::abs(exact.poles[i]);
          row.rel_err = e > 0 ? std::abs(model_poles[i].first - e) / e : 0.0;
          actx.roots.push_back(row);
        }

        // coefficient deviation rows (simplified vs grouped intermediate)
        auto sym = [&](int sid) { return values[static_cast<size_t>(sid)]; };
        auto coeff_rows = [&](const SPoly& full, const SPoly& simpl, char prefix) {
          for (int k = 0; k <= full.degree(); ++k) {
            AttributionContext::CoeffRow row;
            row.label = std::string(1, prefix) + std::to_string(k);
            double f = full.coeff(k).eval<double>(sym);
            double sv = simpl.coeff(k).eval<double>(sym);
            row.rel_dev = f != 0 ? std::abs(sv - f) / std::abs(f) : 0.0;
            for (const auto& h : rec.hypotheses)
              if (h.kind == HypKind::A && h.origin.find(":" + row.label + ":") !=
                                              std::string::npos && !h.guaranteed)
                row.hyp_ids.push_back(h.id);
            actx.coeffs.push_back(row);
          }
        };
        coeff_rows(grouped.num, simp.tf.num, 'a');
        coeff_rows(grouped.den, simp.tf.den, 'b');
      }

      rec.verdict = check_result(rec.opt, rec.oracle_ran, rec.measured, rec.opt.predicted,
                                 config.specs, config.tolerances);

      if (rec.verdict.status == Verdict::ACCEPT) {
        state.accepted = true;
        state.final_x = rec.opt.x_star;
        state.final_predicted = rec.opt.predicted;
        state.final_measured = rec.measured;
        rec.rationale = "all three acceptance criteria satisfied";
        state.iterations.push_back(std::move(rec));
        break;
      }

      std::string why;
      rec.attribution = attribute_error(actx, &why);
      rec.rationale = why;
      rec.fixes = propose_fix(rec.attribution, actx, margins, toggles.c_dominance);

      // apply the fixes for the next round
      for (const auto& f : rec.fixes) {
        switch (f.kind) {
          case FixKind::add_constraint:
            toggles.c_dominance = true;
            break;
          case FixKind::tighten_margin:
            if (f.target == "c-dominance") {
              margins.kappa_p *= 2;
            } else {
              // look up the current margin of the targeted hypothesis
              double cur = 0;
              for (const auto& h : rec.hypotheses)
                if (h.id == f.target) cur = h.margin;
              overrides[f.target] = cur > 0 ? cur * 2 : margins.k_dom * 2;
            }
            if (f.rollback_to == RollbackPoint::propose) need_propose = true;
            break;
          case FixKind::relax_margin:
            margins.k_dom = std::max(3.0, margins.k_dom / 2);
            margins.k_sep = std::max(3.0, margins.k_sep / 2);
            for (auto& [id, k] : overrides) k = std::max(3.0, k / 2);
            need_propose = true;  // relaxed margins change the simplification
            break;
          case FixKind::widen_pm_band:
            pm_widen += 5.0;
            break;
          case FixKind::rederive:
            need_propose = true;
            break;
        }
      }

      bool stop = rec.attribution == Attribution::unattributed || rec.fixes.empty();
      if (!state.accepted && iter == config.max_iter) {
        // best-effort record of the final rejected iterate
        state.final_x = rec.opt.x_star;
        state.final_predicted = rec.opt.predicted;
        state.final_measured = rec.measured;
      }
      state.iterations.push_back(std::move(rec));
      if (stop) break;
    }
    if (!state.accepted && !state.iterations.empty() && state.final_x.empty()) {
      const auto& last = state.iterations.back();
      state.final_x = last.opt.x_star;
      state.final_predicted = last.opt.predicted;
      state.final_measured = last.measured;
    }
  } catch (const std::exception& e) {
    state.error = e.what();
  }
  return state;
}

}  // namespace ampkit
