#pragma once

// Experiment harness: JSON problem/experiment configs, instance building,
// method dispatch, scaling regressions, the desk-scale cost comparison, and
// CSV/JSON emission.

#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "catalyst.hpp"
#include "problems.hpp"

namespace optslide {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  std::size_t n = 10;
  std::size_t m = 10;
  std::size_t s = 1;
  std::uint64_t seed = 0;
  std::string loss = "squared";
  double eta = 0.0;  // 0: derive from eps for nonsmooth losses
  double lambda_max_target = 1.0;
  double mu_floor = 0.0;
  double mu_reg = 0.0;
  double eps = 1e-6;
  double loss_weight = 1.0;
  double lg_target = 0.0;  // > 0: rescale the loss so L_g hits this exactly
  double r = 0.0;          // > 0 and mu == 0: ridge-regularize with eps/R^2
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("config error: " + msg);
}

inline ProblemSpec parse_problem_spec(const json& j) {
  require(j.is_object(), "'problem' must be an object");
  ProblemSpec p;
  auto num = [&](const char* key, double lo, bool integer, double dflt,
                 bool required_field) -> double {
    if (!j.contains(key)) {
      require(!required_field, std::string("missing required field '") + key + "'");
      return dflt;
    }
    require(j[key].is_number(), std::string("field '") + key + "' must be a number");
    const double v = j[key].get<double>();
    require(v >= lo, std::string("field '") + key + "' must be >= " + std::to_string(lo));
    if (integer)
      require(v == std::floor(v), std::string("field '") + key + "' must be an integer");
    return v;
  };
  p.n = static_cast<std::size_t>(num("n", 1, true, 0, true));
  p.m = static_cast<std::size_t>(num("m", 1, true, 0, true));
  p.s = static_cast<std::size_t>(num("s", 1, true, 1, false));
  p.seed = static_cast<std::uint64_t>(num("seed", 0, true, 0, false));
  p.eps = num("eps", 0, false, 1e-6, true);
  require(p.eps > 0.0, "field 'eps' must be > 0");
  p.lambda_max_target = num("lambda_max_target", 0, false, 1.0, false);
  p.mu_floor = num("mu_floor", 0, false, 0.0, false);
  p.mu_reg = num("mu_reg", 0, false, 0.0, false);
  p.eta = num("eta", 0, false, 0.0, false);
  p.loss_weight = num("loss_weight", 0, false, 1.0, false);
  p.lg_target = num("lg_target", 0, false, 0.0, false);
  p.r = num("R", 0, false, 0.0, false);
  if (j.contains("loss")) {
    require(j["loss"].is_string(), "field 'loss' must be a string");
    p.loss = j["loss"].get<std::string>();
  }
  require(p.loss == "squared" || p.loss == "logistic" || p.loss == "abs" ||
              p.loss == "hinge",
          "field 'loss' must be one of squared|logistic|abs|hinge");
  require(p.s <= p.n, "field 's' must be <= n");
  return p;
}

inline json problem_spec_to_json(const ProblemSpec& p) {
  json j;
  j["n"] = p.n;
  j["m"] = p.m;
  j["s"] = p.s;
  j["seed"] = p.seed;
  j["loss"] = p.loss;
  if (p.eta > 0.0) j["eta"] = p.eta;
  j["lambda_max_target"] = p.lambda_max_target;
  j["mu_floor"] = p.mu_floor;
  j["mu_reg"] = p.mu_reg;
  j["eps"] = p.eps;
  if (p.loss_weight != 1.0) j["loss_weight"] = p.loss_weight;
  if (p.lg_target > 0.0) j["lg_target"] = p.lg_target;
  if (p.r > 0.0) j["R"] = p.r;
  return j;
}

// deterministic instance construction from a spec
inline CompositeObjective build_instance(const ProblemSpec& p) {
  SparseDesign design = gen_sparse_design(p.m, p.n, p.s, p.seed);

  std::mt19937_64 rng(p.seed + 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector targets(p.m);
  for (auto& t : targets) t = gauss(rng);
  if (p.loss == "logistic" || p.loss == "hinge")
    for (auto& t : targets) t = t > 0 ? 1.0 : (p.loss == "hinge" ? -1.0 : 0.0);

  ScalarLoss loss;
  if (p.loss == "squared") loss = ScalarLoss::squared();
  else if (p.loss == "logistic") loss = ScalarLoss::logistic();
  else if (p.loss == "abs") loss = ScalarLoss::abs();
  else loss = ScalarLoss::hinge();
  if (!loss_is_smooth(loss.kind)) {
    const double eta = p.eta > 0.0 ? p.eta : smoothing_accuracy(p.eps, loss);
    loss = smooth_loss(loss, eta);
  }

  GLMSpec glm;
  glm.design = std::move(design);
  glm.targets = std::move(targets);
  glm.loss = loss;
  glm.weight = p.loss_weight;
  if (p.lg_target > 0.0)
    glm.weight = p.lg_target / (loss.curvature_bound() * glm.design.max_row_norm_sq());

  QuadraticSpec quad = make_quadratic(p.n, p.lambda_max_target, p.mu_floor, p.seed + 2);
  CompositeObjective obj = assemble_problem(std::move(quad), std::move(glm), p.mu_reg);
  if (!(obj.mu > 0.0)) {
    require(p.r > 0.0, "convex instance (mu = 0) needs field 'R' for regularization");
    obj = regularize(obj, p.eps, p.r);
  }
  return obj;
}

enum class Method { Sliding, FgmBaseline, CatalystVr };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::Sliding: return "sliding";
    case Method::FgmBaseline: return "fgm_baseline";
    case Method::CatalystVr: return "catalyst_vr";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "sliding") return Method::Sliding;
  if (s == "fgm_baseline") return Method::FgmBaseline;
  if (s == "catalyst_vr") return Method::CatalystVr;
  throw ConfigError("config error: unknown method '" + s +
                    "' (expected sliding|fgm_baseline|catalyst_vr)");
}

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<Method> methods;
  double eps = 1e-6;
  std::vector<std::uint64_t> seeds;
  std::string axis_name;           // empty: no scaling axis
  std::vector<double> axis_values;
};

inline ExperimentConfig parse_experiment_config(const json& j) {
  require(j.is_object(), "top level must be an object");
  require(j.contains("problem"), "missing required field 'problem'");
  ExperimentConfig c;
  c.problem = parse_problem_spec(j["problem"]);
  require(j.contains("methods") && j["methods"].is_array() && !j["methods"].empty(),
          "field 'methods' must be a nonempty array");
  for (const auto& m : j["methods"]) {
    require(m.is_string(), "entries of 'methods' must be strings");
    c.methods.push_back(parse_method(m.get<std::string>()));
  }
  c.eps = j.value("eps", c.problem.eps);
  require(c.eps > 0.0, "field 'eps' must be > 0");
  if (j.contains("seeds")) {
    require(j["seeds"].is_array() && !j["seeds"].empty(),
            "field 'seeds' must be a nonempty array");
    for (const auto& s : j["seeds"]) {
      require(s.is_number_integer() && s.get<long long>() >= 0,
              "entries of 'seeds' must be nonnegative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    c.seeds = {c.problem.seed};
  }
  if (j.contains("axis")) {
    const auto& a = j["axis"];
    require(a.is_object() && a.contains("name") && a.contains("values"),
            "field 'axis' must be {name, values}");
    c.axis_name = a["name"].get<std::string>();
    require(c.axis_name == "m" || c.axis_name == "mu",
            "axis 'name' must be 'm' or 'mu'");
    require(a["values"].is_array() && !a["values"].empty(),
            "axis 'values' must be a nonempty array");
    for (const auto& v : a["values"]) c.axis_values.push_back(v.get<double>());
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: invalid JSON: ") + e.what());
  }
  return parse_experiment_config(j);
}

struct ResultRow {
  std::string method;
  std::size_t n = 0, m = 0, s = 0;
  double eps = 0.0;
  double l_used = 0.0;
  long long grad_f_calls = 0;
  long long grad_gk_calls = 0;
  double wall_time_s = 0.0;
  double final_gap = 0.0;
  bool converged = false;
  std::uint64_t seed = 0;
  double axis_value = 0.0;  // not emitted; sort key only
};

// shortest round-trip decimal form
inline std::string fmt_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline constexpr const char* kCsvHeader =
    "method,n,m,s,eps,L_used,grad_f_calls,grad_gk_calls,wall_time_s,final_gap,"
    "converged,seed";

inline std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.n << ',' << r.m << ',' << r.s << ','
        << fmt_double(r.eps) << ',' << fmt_double(r.l_used) << ',' << r.grad_f_calls
        << ',' << r.grad_gk_calls << ',' << fmt_double(r.wall_time_s) << ','
        << fmt_double(r.final_gap) << ',' << (r.converged ? "true" : "false") << ','
        << r.seed << "\n";
  }
  return out.str();
}

inline json row_to_json(const ResultRow& r) {
  json j;
  j["method"] = r.method;
  j["n"] = r.n;
  j["m"] = r.m;
  j["s"] = r.s;
  j["eps"] = r.eps;
  j["L_used"] = r.l_used;
  j["grad_f_calls"] = r.grad_f_calls;
  j["grad_gk_calls"] = r.grad_gk_calls;
  j["wall_time_s"] = r.wall_time_s;
  j["final_gap"] = r.final_gap;
  j["converged"] = r.converged;
  j["seed"] = r.seed;
  return j;
}

inline std::string rows_to_json_text(const std::vector<ResultRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(row_to_json(r));
  return arr.dump(2) + "\n";
}

inline void emit_results(const std::vector<ResultRow>& rows, const std::string& format,
                         const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_results: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("io error: cannot write '" + path + "'");
  out << (format == "json" ? rows_to_json_text(rows) : rows_to_csv(rows));
  if (!out) throw std::runtime_error("io error: write failed for '" + path + "'");
}

inline json report_to_json(const SolverReport& rep) {
  json j;
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  j["diagnostics"] = rep.diagnostics;
  j["counters"] = {{"grad_f_calls", rep.counters.grad_f_calls},
                   {"grad_gk_calls", rep.counters.grad_gk_calls},
                   {"f_evals", rep.counters.f_evals},
                   {"g_evals", rep.counters.g_evals}};
  json levels = json::object();
  for (const auto& lvl : rep.levels)
    levels[lvl.name] = {{"grad_f_calls", lvl.counters.grad_f_calls},
                        {"grad_gk_calls", lvl.counters.grad_gk_calls},
                        {"f_evals", lvl.counters.f_evals},
                        {"g_evals", lvl.counters.g_evals}};
  j["levels"] = levels;
  json trace = json::array();
  const std::size_t stride = rep.trace.size() > 1000 ? (rep.trace.size() + 999) / 1000 : 1;
  for (std::size_t i = 0; i < rep.trace.size(); i += stride)
    trace.push_back({rep.trace[i].first, rep.trace[i].second});
  j["trace"] = trace;
  return j;
}

// Catalyst wrapped directly around the VR solver on components
// h_k = f + g_k (no sliding level); every component call costs one grad f
// and one grad g_k. Kept as an ablation baseline.
inline SolverReport catalyst_vr_solve(const CompositeObjective& obj, double eps,
                                      std::uint64_t seed, OracleCounters& ctr) {
  const OracleCounters before = ctr;
  OracleCounters c_outer, c_vr;
  OracleCounters* vr_ctr = &c_vr;

  FiniteSumTerm hs;
  hs.m = obj.g.m;
  hs.lipschitz_grad = obj.f.lipschitz_grad + obj.g.lipschitz_grad;
  hs.component_value = [&obj, vr_ctr](int k, const Vector& x) {
    ++vr_ctr->f_evals;
    return obj.f.value(x) + obj.g.component_value(k, x);
  };
  hs.add_component_gradient = [&obj, vr_ctr](int k, const Vector& x, double w, Vector& out) {
    ++vr_ctr->grad_f_calls;
    Vector gf = obj.f.gradient(x);
    axpy(w, gf, out);
    obj.g.add_component_gradient(k, x, w, out);
  };

  const double lh = hs.lipschitz_grad;
  const double l = std::clamp((lh - obj.mu) / (obj.g.m + 1.0), obj.mu, lh);
  std::uint64_t vr_seed = seed;
  const double sigma = l;
  const long long cap =
      40 * (obj.g.m + static_cast<long long>(std::sqrt(obj.g.m * lh / sigma))) + 2000;

  auto inner = [&](const Vector& center, double eps_k, const Vector& warm) -> Vector {
    QuadraticAnchors psi;
    psi.v_lin = zeros(obj.n);
    psi.w1 = l;
    psi.a1 = center;
    psi.w2 = 0.0;
    psi.a2 = zeros(obj.n);
    const double tol = 0.25 * std::sqrt(2.0 * (obj.mu + l) * eps_k);
    SolverReport vrep =
        varag_solve(hs, psi, warm, StoppingRule::grad_norm(tol, cap), vr_seed++, c_vr);
    return vrep.x_out;
  };

  SolverReport rep = catalyst_outer(obj, l, StoppingRule::grad_norm(0.0, 100000), eps,
                                    true, inner, c_outer);
  rep.levels = {{"outer", c_outer}, {"vr", c_vr}};
  rep.counters = c_outer + c_vr;
  ctr = before;
  ctr += rep.counters;
  return rep;
}

// gap vs ground truth when available, else the strong-convexity surrogate
// ||grad F||^2 / (2 mu); measurement uses scratch counters.
inline double measure_gap(const CompositeObjective& obj, const Vector& x) {
  OracleCounters scratch;
  if (obj.quad && obj.glm && obj.glm->loss.kind == LossKind::Squared) {
    const Vector xs = exact_minimizer(obj);
    return obj.eval_F(x, scratch) - obj.eval_F(xs, scratch);
  }
  const double gn = norm2(obj.grad_F(x, scratch));
  return gn * gn / (2.0 * obj.mu);
}

inline ResultRow run_single(const CompositeObjective& obj, const ProblemSpec& spec,
                            Method method, double eps, std::uint64_t seed,
                            double axis_value) {
  ResultRow row;
  row.method = method_name(method);
  row.n = spec.n;
  row.m = obj.g.m;
  row.s = spec.s;
  row.eps = eps;
  row.seed = seed;
  row.axis_value = axis_value;

  OracleCounters ctr;
  SolverReport rep;
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::Sliding: {
      SlidingConfig cfg;
      cfg.eps = eps;
      cfg.seed = seed;
      cfg.l = 0.0;
      row.l_used = choose_L(ProblemConstants::of(obj));
      rep = sliding_solve(obj, cfg, ctr);
      break;
    }
    case Method::FgmBaseline: {
      row.l_used = obj.f.lipschitz_grad + obj.g.lipschitz_grad;
      const double tol = std::sqrt(obj.mu * eps);
      rep = plain_fgm_baseline(obj, zeros(obj.n),
                               StoppingRule::grad_norm(tol, 2000000), ctr);
      break;
    }
    case Method::CatalystVr: {
      const double lh = obj.f.lipschitz_grad + obj.g.lipschitz_grad;
      row.l_used = std::clamp((lh - obj.mu) / (obj.g.m + 1.0), obj.mu, lh);
      rep = catalyst_vr_solve(obj, eps, seed, ctr);
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  row.grad_f_calls = ctr.grad_f_calls;
  row.grad_gk_calls = ctr.grad_gk_calls;
  row.converged = rep.converged;
  row.final_gap = measure_gap(obj, rep.x_out);
  return row;
}

inline ProblemSpec spec_for_axis(ProblemSpec base, const std::string& axis, double value) {
  if (axis == "m") base.m = static_cast<std::size_t>(value);
  else if (axis == "mu") base.mu_reg = value;
  else if (!axis.empty()) throw ConfigError("config error: unknown axis '" + axis + "'");
  return base;
}

inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  std::vector<double> axis = cfg.axis_values.empty() ? std::vector<double>{0.0}
                                                     : cfg.axis_values;
  std::vector<ResultRow> rows;
  for (Method method : cfg.methods)
    for (double v : axis) {
      ProblemSpec spec = cfg.axis_name.empty() ? cfg.problem
                                               : spec_for_axis(cfg.problem, cfg.axis_name, v);
      for (std::uint64_t seed : cfg.seeds) {
        ProblemSpec sspec = spec;
        sspec.seed = seed;
        CompositeObjective obj = build_instance(sspec);
        rows.push_back(run_single(obj, sspec, method, cfg.eps, seed, v));
      }
    }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.axis_value != b.axis_value) return a.axis_value < b.axis_value;
    return a.seed < b.seed;
  });
  return rows;
}

// least-squares slope of y against x
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

struct ScalingSummary {
  std::vector<double> axis_values;
  std::vector<double> median_grad_f;
  std::vector<double> median_grad_gk;
  double slope_grad_f = 0.0;   // log-log, against the axis variable
  double slope_grad_gk = 0.0;
  double residual_grad_f = 0.0;
  double residual_grad_gk = 0.0;
};

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// Per-axis-value per-seed runs, then log-log regression of the per-seed
// medians. For axis mu the regression abscissa is 1/mu.
inline ScalingSummary scaling_study(const ExperimentConfig& cfg,
                                    std::vector<ResultRow>* rows_out = nullptr) {
  require(cfg.axis_values.size() >= 3, "scaling axis needs >= 3 values");
  require(!cfg.axis_name.empty(), "scaling_study requires an axis");
  std::vector<ResultRow> rows = run_experiment(cfg);
  if (rows_out) *rows_out = rows;

  ScalingSummary s;
  std::vector<double> lx, lgf, lgk;
  for (double v : cfg.axis_values) {
    std::vector<double> gf, gk;
    for (const auto& r : rows)
      if (r.axis_value == v) {
        gf.push_back(static_cast<double>(r.grad_f_calls));
        gk.push_back(static_cast<double>(r.grad_gk_calls));
      }
    s.axis_values.push_back(v);
    s.median_grad_f.push_back(median_of(gf));
    s.median_grad_gk.push_back(median_of(gk));
    lx.push_back(std::log(cfg.axis_name == "mu" ? 1.0 / v : v));
    lgf.push_back(std::log(s.median_grad_f.back()));
    lgk.push_back(std::log(s.median_grad_gk.back()));
  }
  s.slope_grad_f = regression_slope(lx, lgf);
  s.slope_grad_gk = regression_slope(lx, lgk);
  auto resid = [&](const std::vector<double>& ly, double slope) {
    double my = 0, mx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double r2 = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double e = ly[i] - (my + slope * (lx[i] - mx));
      r2 += e * e;
    }
    return std::sqrt(r2 / lx.size());
  };
  s.residual_grad_f = resid(lgf, s.slope_grad_f);
  s.residual_grad_gk = resid(lgk, s.slope_grad_gk);
  return s;
}

inline json scaling_summary_to_json(const ScalingSummary& s, const std::string& axis) {
  json j;
  j["axis"] = axis;
  j["axis_values"] = s.axis_values;
  j["median_grad_f_calls"] = s.median_grad_f;
  j["median_grad_gk_calls"] = s.median_grad_gk;
  j["slope_grad_f"] = s.slope_grad_f;
  j["slope_grad_gk"] = s.slope_grad_gk;
  j["residual_grad_f"] = s.residual_grad_f;
  j["residual_grad_gk"] = s.residual_grad_gk;
  return j;
}

struct Table1Summary {
  std::vector<ResultRow> rows;
  double sliding_weighted_cost = 0.0;
  double fgm_weighted_cost = 0.0;
  std::string winner;
  bool regime_ok = true;
};

// Weighted arithmetic cost mirroring the instance's per-oracle prices:
// a component gradient costs O(s), a grad f costs O(n^2).
inline double weighted_cost(const ResultRow& r) {
  return static_cast<double>(r.grad_gk_calls) * static_cast<double>(r.s) +
         static_cast<double>(r.grad_f_calls) * static_cast<double>(r.n) *
             static_cast<double>(r.n);
}

inline Table1Summary table1_comparison(const ExperimentConfig& cfg) {
  Table1Summary t;
  const ProblemSpec& p = cfg.problem;
  t.regime_ok = p.s > 1 &&
                p.lambda_max_target <= 1.0 / (p.eps * static_cast<double>(p.m)) &&
                (p.loss == "abs" || p.loss == "hinge");

  ExperimentConfig c2 = cfg;
  c2.methods = {Method::FgmBaseline, Method::Sliding};
  c2.axis_name.clear();
  c2.axis_values.clear();
  t.rows = run_experiment(c2);
  double slide = 0, fgm = 0;
  int ns = 0, nf = 0;
  for (const auto& r : t.rows) {
    if (r.method == "sliding") {
      slide += weighted_cost(r);
      ++ns;
    } else if (r.method == "fgm_baseline") {
      fgm += weighted_cost(r);
      ++nf;
    }
  }
  t.sliding_weighted_cost = ns ? slide / ns : 0.0;
  t.fgm_weighted_cost = nf ? fgm / nf : 0.0;
  t.winner = t.sliding_weighted_cost < t.fgm_weighted_cost ? "sliding" : "fgm_baseline";
  return t;
}

inline json table1_summary_to_json(const Table1Summary& t) {
  json j;
  j["sliding_weighted_cost"] = t.sliding_weighted_cost;
  j["fgm_weighted_cost"] = t.fgm_weighted_cost;
  j["winner"] = t.winner;
  j["regime_ok"] = t.regime_ok;
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(row_to_json(r));
  j["rows"] = rows;
  return j;
}

}  // namespace optslide
