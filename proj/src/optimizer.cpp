#include "ampkit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ampkit/si.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ampkit {

void SpecSet::validate() const {
  if (!(pm_lo_deg <= pm_opt_lo_deg && pm_opt_hi_deg <= pm_hi_deg) ||
      pm_opt_lo_deg > pm_opt_hi_deg)
    throw std::runtime_error("pm_opt band must sit inside the PM spec band");
  if (gain_min_db <= 0 || gbw_min_hz <= 0 || power_max_w <= 0)
    throw std::runtime_error("spec thresholds must be positive");
}

SpecSet parse_specs(const std::string& text) {
  SpecSet s;
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
      if (eq == std::string::npos)
        throw ParseError(lineno, "expected key=value in spec file");
      std::string key = tok.substr(0, eq);
      auto val = parse_si(tok.substr(eq + 1));
      if (!val) throw ParseError(lineno, "bad value for '" + key + "'");
      if (key == "gain_min_db") s.gain_min_db = *val;
      else if (key == "gbw_min_hz") s.gbw_min_hz = *val;
      else if (key == "pm_lo_deg") s.pm_lo_deg = *val;
      else if (key == "pm_hi_deg") s.pm_hi_deg = *val;
      else if (key == "power_max_w") s.power_max_w = *val;
      else if (key == "pm_opt_lo_deg") s.pm_opt_lo_deg = *val;
      else if (key == "pm_opt_hi_deg") s.pm_opt_hi_deg = *val;
      else throw ParseError(lineno, "unknown spec key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

std::string serialize_specs(const SpecSet& s) {
  std::ostringstream out;
  out << "gain_min_db=" << format_number(s.gain_min_db) << "\n"
      << "gbw_min_hz=" << format_number(s.gbw_min_hz) << "\n"
      << "pm_lo_deg=" << format_number(s.pm_lo_deg) << "\n"
      << "pm_hi_deg=" << format_number(s.pm_hi_deg) << "\n"
      << "power_max_w=" << format_number(s.power_max_w) << "\n"
      << "pm_opt_lo_deg=" << format_number(s.pm_opt_lo_deg) << "\n"
      << "pm_opt_hi_deg=" << format_number(s.pm_opt_hi_deg) << "\n";
  return out.str();
}

const char* to_string(OptStatus s) {
  switch (s) {
    case OptStatus::feasible_optimum: return "feasible_optimum";
    case OptStatus::infeasible: return "infeasible";
    case OptStatus::max_iter: return "max_iter";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Problem construction

namespace {

struct BuildData {
  std::shared_ptr<const SymbolicModel> model;
  std::shared_ptr<const MetricFormulas> formulas;
  std::vector<int> var_pos;  // per design variable: u index or -1 when fixed

  template <class T>
  std::vector<T> bind(const std::vector<T>& u) const {
    return bind_symbols<T>(*model->table, [&](const SymbolInfo& si) {
      if (si.design_var >= 0 && var_pos[static_cast<size_t>(si.design_var)] >= 0)
        return exp(u[static_cast<size_t>(var_pos[static_cast<size_t>(si.design_var)])]);
      return T(si.fixed.value_or(0.0));
    });
  }

  template <class T>
  T gbw(const std::vector<T>& vals) const {
    auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
    if (formulas->gbw_from_pair)
      return T(formulas->gbw_hz.scale) * sqrt(abs(formulas->gbw_hz.expr.eval<T>(sym)));
    return formulas->gbw_hz.eval<T>(sym);
  }
};

double geo_scale(const Interval& iv) {
  Interval a = iv.abs();
  if (a.lo > 0 && a.hi > 0) return std::sqrt(a.lo * a.hi);
  return std::max(a.hi, 1e-300);
}

}  // namespace

OptProblem build_problem(const MetricFormulas& formulas, const std::vector<Hypothesis>& hyps,
                         const SpecSet& specs, std::shared_ptr<const SymbolicModel> model) {
  specs.validate();
  OptProblem p;
  p.model = model;
  p.formulas = std::make_shared<MetricFormulas>(formulas);

  auto data = std::make_shared<BuildData>();
  data->model = model;
  data->formulas = p.formulas;
  data->var_pos.assign(model->topo.variables.size(), -1);
  for (size_t i = 0; i < model->topo.variables.size(); ++i) {
    const auto& v = model->topo.variables[i];
    if (v.is_fixed()) continue;
    data->var_pos[i] = static_cast<int>(p.var_names.size());
    p.var_names.push_back(v.name);
    p.lo.push_back(std::log(v.lower));
    p.hi.push_back(std::log(v.upper));
  }
  if (p.var_names.empty()) throw DerivationError("no free design variables to optimize");

  p.objective = make_fn("-log(FoM)", [data](const auto& u) {
    using T = std::decay_t<decltype(u[0])>;
    auto vals = data->bind(u);
    auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
    T gbw = data->gbw(vals);
    T power = data->formulas->power.eval<T>(sym);
    T fom = data->formulas->fom(gbw, power, sym);
    return -log(fom);
  });

  auto add = [&](std::string name, std::string text, ScalarFn fn) {
    fn.name = std::move(name);
    p.constraints.push_back(std::move(fn));
    p.constraint_texts.push_back(std::move(text));
  };

  char buf[160];
  std::snprintf(buf, sizeof(buf), "Gain_dB >= %.6g", specs.gain_min_db);
  add("spec:gain", buf, make_fn("", [data, specs](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        auto vals = data->bind(u);
        auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
        T gain_db = T(20.0) * log10(abs(data->formulas->gain.eval<T>(sym)));
        return (T(specs.gain_min_db) - gain_db) / T(std::abs(specs.gain_min_db));
      }));
  std::snprintf(buf, sizeof(buf), "GBW >= %.6g Hz", specs.gbw_min_hz);
  add("spec:gbw", buf, make_fn("", [data, specs](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        auto vals = data->bind(u);
        return log(T(specs.gbw_min_hz)) - log(data->gbw(vals));
      }));
  std::snprintf(buf, sizeof(buf), "PM >= %.6g deg (optimization band)", specs.pm_opt_lo_deg);
  add("spec:pm-lo", buf, make_fn("", [data, specs](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        auto vals = data->bind(u);
        auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
        T pm = eval_pm_deg<T>(data->formulas->pm, data->gbw(vals), sym);
        return (T(specs.pm_opt_lo_deg) - pm) / T(90.0);
      }));
  std::snprintf(buf, sizeof(buf), "PM <= %.6g deg (optimization band)", specs.pm_opt_hi_deg);
  add("spec:pm-hi", buf, make_fn("", [data, specs](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        auto vals = data->bind(u);
        auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
        T pm = eval_pm_deg<T>(data->formulas->pm, data->gbw(vals), sym);
        return (pm - T(specs.pm_opt_hi_deg)) / T(90.0);
      }));
  std::snprintf(buf, sizeof(buf), "Power <= %.6g W", specs.power_max_w);
  add("spec:power", buf, make_fn("", [data, specs](const auto& u) {
        using T = std::decay_t<decltype(u[0])>;
        auto vals = data->bind(u);
        auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
        return log(data->formulas->power.eval<T>(sym)) - log(T(specs.power_max_w));
      }));

  const auto& tab = *model->table;
  for (const auto& h : hyps) {
    // lhs >= K*rhs.  Positive-definite sides use the log form; otherwise a
    // linear form normalized by the bound magnitude.
    bool log_form = h.lhs_iv.lo > 0 && h.rhs_iv.lo > 0;
    double norm = std::max(geo_scale(h.lhs_iv), h.margin * geo_scale(h.rhs_iv));
    Hypothesis hc = h;  // captured by value
    ScalarFn fn =
        log_form ? make_fn("", [data, hc](const auto& u) {
            using T = std::decay_t<decltype(u[0])>;
            auto vals = data->bind(u);
            auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
            T lhs = hc.lhs.eval<T>(sym);
            T rhs = hc.rhs.eval<T>(sym);
            return log(T(hc.margin) * rhs) - log(lhs);
          })
                 : make_fn("", [data, hc, norm](const auto& u) {
                     using T = std::decay_t<decltype(u[0])>;
                     auto vals = data->bind(u);
                     auto sym = [&](int sid) { return vals[static_cast<size_t>(sid)]; };
                     T lhs = hc.lhs.eval<T>(sym);
                     T rhs = hc.rhs.eval<T>(sym);
                     return (T(hc.margin) * rhs - lhs) / T(norm);
                   });
    add("hyp:" + std::string(to_string(h.kind)) + ":" + h.origin,
        h.relation_text(tab), std::move(fn));
  }
  return p;
}

std::string OptProblem::dump() const {
  std::ostringstream out;
  out << "maximize FoM over log-space variables:\n";
  for (size_t i = 0; i < var_names.size(); ++i)
    out << "  " << var_names[i] << " in [" << format_number(std::exp(lo[i])) << ", "
        << format_number(std::exp(hi[i])) << "]\n";
  out << "subject to:\n";
  for (size_t i = 0; i < constraints.size(); ++i)
    out << "  [" << constraints[i].name << "] " << constraint_texts[i] << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Augmented-Lagrangian solver with an SPG inner loop

namespace {

struct Gradient {
  double value = 0;
  std::vector<double> grad;
};

Gradient eval_with_grad(const ScalarFn& fn, const std::vector<double>& u) {
  std::vector<Dual> du;
  du.reserve(u.size());
  for (size_t i = 0; i < u.size(); ++i) du.emplace_back(u[i], u.size(), i);
  Dual r = fn.dual(du);
  Gradient g;
  g.value = r.v;
  g.grad = r.g.empty() ? std::vector<double>(u.size(), 0.0) : r.g;
  return g;
}

struct StartResult {
  std::vector<double> u;
  double f = 0;
  double maxg = 0;
  double kkt = 0;
  bool converged = false;
};

class AugLag {
 public:
  AugLag(const OptProblem& p, const OptOptions& opt) : p_(p), opt_(opt) {}

  StartResult run(std::vector<double> u) const {
    const size_t m = p_.constraints.size();
    std::vector<double> lambda(m, 0.0);
    double mu = 10.0;
    double v_prev = std::numeric_limits<double>::infinity();
    double feas_prev = std::numeric_limits<double>::infinity();
    int stalled = 0;
    StartResult best;

    for (int outer = 0; outer < opt_.max_outer; ++outer) {
      double inner_tol = std::max(opt_.kkt_tol * 0.5, 1e-3 * std::pow(0.2, outer));
      u = spg(u, lambda, mu, inner_tol);

      std::vector<Gradient> g(m);
      Gradient fg = eval_with_grad(p_.objective, u);
      for (size_t j = 0; j < m; ++j) g[j] = eval_with_grad(p_.constraints[j], u);

      double feas = 0, comp = 0, v = 0;
      for (size_t j = 0; j < m; ++j) {
        feas = std::max(feas, g[j].value);
        v = std::max(v, std::abs(std::max(g[j].value, -lambda[j] / mu)));
      }
      // first-order multipliers, then the plain-Lagrangian residual
      for (size_t j = 0; j < m; ++j) lambda[j] = std::max(0.0, lambda[j] + mu * g[j].value);
      for (size_t j = 0; j < m; ++j) comp = std::max(comp, std::abs(lambda[j] * g[j].value));

      std::vector<double> lag = fg.grad;
      for (size_t j = 0; j < m; ++j)
        for (size_t i = 0; i < lag.size(); ++i) lag[i] += lambda[j] * g[j].grad[i];
      double stat = 0;
      for (size_t i = 0; i < u.size(); ++i) {
        double step = std::clamp(u[i] - lag[i], p_.lo[i], p_.hi[i]) - u[i];
        stat = std::max(stat, std::abs(step));
      }

      best.u = u;
      best.f = fg.value;
      best.maxg = feas;
      best.kkt = std::max({stat, std::max(feas, 0.0), comp});
      if (best.kkt <= opt_.kkt_tol) {
        best.converged = true;
        return best;
      }
      // stationary but infeasible: the penalty cannot push feasibility any
      // further, so report a converged-infeasible start
      if (feas > opt_.kkt_tol && feas >= 0.999 * feas_prev && mu >= 1e13) {
        if (++stalled >= 3) {
          best.converged = true;
          return best;
        }
      } else {
        stalled = 0;
      }
      feas_prev = feas;
      if (v > 0.25 * v_prev) mu = std::min(mu * 10.0, 1e14);
      v_prev = v;
    }
    return best;
  }

 private:
  double phi(const std::vector<double>& u, const std::vector<double>& lambda,
             double mu) const {
    double f = p_.objective.value(u);
    for (size_t j = 0; j < p_.constraints.size(); ++j) {
      double t = std::max(0.0, lambda[j] + mu * p_.constraints[j].value(u));
      f += (t * t - lambda[j] * lambda[j]) / (2.0 * mu);
    }
    return f;
  }

  Gradient phi_grad(const std::vector<double>& u, const std::vector<double>& lambda,
                    double mu) const {
    Gradient fg = eval_with_grad(p_.objective, u);
    for (size_t j = 0; j < p_.constraints.size(); ++j) {
      Gradient gg = eval_with_grad(p_.constraints[j], u);
      double t = std::max(0.0, lambda[j] + mu * gg.value);
      fg.value += (t * t - lambda[j] * lambda[j]) / (2.0 * mu);
      if (t > 0)
        for (size_t i = 0; i < fg.grad.size(); ++i) fg.grad[i] += t * gg.grad[i];
    }
    return fg;
  }

  std::vector<double> project(std::vector<double> u) const {
    for (size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i], p_.lo[i], p_.hi[i]);
    return u;
  }

  // Nonmonotone spectral projected gradient (Birgin-Martinez-Raydan style).
  std::vector<double> spg(std::vector<double> u, const std::vector<double>& lambda,
                          double mu, double tol) const {
    u = project(std::move(u));
    Gradient g = phi_grad(u, lambda, mu);
    double alpha = 1.0;
    std::vector<double> history(10, g.value);
    size_t hpos = 0;

    for (int it = 0; it < opt_.max_inner; ++it) {
      std::vector<double> d(u.size());
      double dinf = 0, gtd = 0;
      for (size_t i = 0; i < u.size(); ++i) {
        d[i] = std::clamp(u[i] - alpha * g.grad[i], p_.lo[i], p_.hi[i]) - u[i];
        dinf = std::max(dinf, std::abs(d[i]));
        gtd += g.grad[i] * d[i];
      }
      if (dinf <= tol) break;

      double fmax = *std::max_element(history.begin(), history.end());
      double step = 1.0;
      std::vector<double> un;
      double fn = 0;
      bool ok = false;
      while (step >= 1e-14) {
        un = u;
        for (size_t i = 0; i < u.size(); ++i) un[i] += step * d[i];
        fn = phi(un, lambda, mu);
        if (fn <= fmax + 1e-4 * step * gtd) {
          ok = true;
          break;
        }
        step *= 0.5;
      }
      if (!ok) break;  // no descent possible at machine precision

      Gradient gn = phi_grad(un, lambda, mu);
      double sts = 0, sty = 0;
      for (size_t i = 0; i < u.size(); ++i) {
        double s = un[i] - u[i];
        sts += s * s;
        sty += s * (gn.grad[i] - g.grad[i]);
      }
      alpha = sty > 1e-30 ? std::clamp(sts / sty, 1e-12, 1e12) : 1e4;
      u = std::move(un);
      g = std::move(gn);
      history[hpos] = g.value;
      hpos = (hpos + 1) % history.size();
    }
    return u;
  }

  const OptProblem& p_;
  const OptOptions& opt_;
};

std::vector<std::vector<double>> latin_hypercube(const OptProblem& p, const OptOptions& opt) {
  return lhs_starts(p, opt);
}

}  // namespace

std::vector<std::vector<double>> lhs_starts(const OptProblem& p, const OptOptions& opt) {
  const size_t n = static_cast<size_t>(opt.n_starts);
  const size_t dims = p.var_names.size();
  std::mt19937_64 rng(opt.seed);
  auto unit = [&]() { return (rng() >> 11) * 0x1.0p-53; };

  std::vector<std::vector<double>> starts(n, std::vector<double>(dims, 0.0));
  for (size_t d = 0; d < dims; ++d) {
    std::vector<size_t> perm(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    for (size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
    for (size_t s = 0; s < n; ++s) {
      double t = (static_cast<double>(perm[s]) + unit()) / static_cast<double>(n);
      starts[s][d] = p.lo[d] + (p.hi[d] - p.lo[d]) * t;
    }
  }
  return starts;
}

namespace {

OptResult solve_impl(const OptProblem& p, const OptOptions& opt, bool parallel) {
  auto starts = latin_hypercube(p, opt);
  std::vector<StartResult> results(starts.size());
  AugLag solver(p, opt);

#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < static_cast<int>(starts.size()); ++s)
      results[static_cast<size_t>(s)] = solver.run(starts[static_cast<size_t>(s)]);
  } else
#endif
  {
    (void)parallel;
    for (size_t s = 0; s < starts.size(); ++s) results[s] = solver.run(starts[s]);
  }

  OptResult out;
  out.starts_tried = static_cast<int>(starts.size());
  constexpr double feas_tol = 1e-6;
  int best = -1;
  bool any_converged = false;
  for (size_t s = 0; s < results.size(); ++s) {
    if (results[s].converged) any_converged = true;
    if (results[s].maxg > feas_tol) continue;
    if (best < 0 || results[s].f < results[static_cast<size_t>(best)].f)
      best = static_cast<int>(s);
  }
  if (best < 0) {
    out.status = any_converged ? OptStatus::infeasible : OptStatus::max_iter;
    // report the least-infeasible start for diagnostics
    size_t arg = 0;
    for (size_t s = 1; s < results.size(); ++s)
      if (results[s].maxg < results[arg].maxg) arg = s;
    best = static_cast<int>(arg);
  } else {
    out.status = OptStatus::feasible_optimum;
  }

  const StartResult& b = results[static_cast<size_t>(best)];
  out.best_start = best;
  out.objective = b.f;
  out.fom = std::exp(-b.f);
  out.max_violation = std::max(b.maxg, 0.0);
  out.kkt_residual = b.kkt;
  for (size_t i = 0; i < p.var_names.size(); ++i) out.x_star[p.var_names[i]] = std::exp(b.u[i]);
  for (const auto& v : p.model->topo.variables)
    if (v.is_fixed()) out.x_star[v.name] = *v.fixed;
  for (size_t j = 0; j < p.constraints.size(); ++j)
    if (std::abs(p.constraints[j].value(b.u)) <= feas_tol)
      out.active_constraints.push_back(p.constraints[j].name);
  try {
    out.predicted = eval_formulas(*p.formulas, *p.model, out.x_star);
  } catch (const std::exception& e) {
    out.predicted.issues.push_back(e.what());  // hand-built problems may not map
  }
  return out;
}

}  // namespace

OptResult solve(const OptProblem& p, const OptOptions& opt) {
  return solve_impl(p, opt, opt.parallel);
}

OptResult solve_serial(const OptProblem& p, const OptOptions& opt) {
  return solve_impl(p, opt, false);
}

std::vector<SlackRow> feasibility_report(const OptProblem& p,
                                         const std::map<std::string, double>& x) {
  std::vector<double> u(p.var_names.size(), 0.0);
  std::vector<SlackRow> rows;
  for (size_t i = 0; i < p.var_names.size(); ++i) {
    double v = x.at(p.var_names[i]);
    u[i] = std::log(v);
    if (u[i] < p.lo[i] - 1e-12 || u[i] > p.hi[i] + 1e-12) {
      SlackRow r;
      r.name = "box:" + p.var_names[i];
      r.g = std::max(p.lo[i] - u[i], u[i] - p.hi[i]);
      r.slack = -r.g;
      r.box_violation = true;
      rows.push_back(r);
    }
  }
  for (size_t j = 0; j < p.constraints.size(); ++j) {
    SlackRow r;
    r.name = p.constraints[j].name;
    r.g = p.constraints[j].value(u);
    r.slack = -r.g;
    r.active = std::abs(r.g) <= 1e-6;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ampkit
