#pragma once

// Catalyst outer acceleration composed with the composite gradient method
// and the variance-reduced inner solver, plus the total-cost model in the
// prox parameter L and its grid minimizer.

#include <algorithm>
#include <cmath>
#include <functional>

#include "base_solvers.hpp"

namespace optslide {

struct ProblemConstants {
  int m = 1;
  double l_f = 1.0;
  double l_g = 1.0;
  double mu = 1.0;

  static ProblemConstants of(const CompositeObjective& obj) {
    return {obj.g.m, obj.f.lipschitz_grad, obj.g.lipschitz_grad, obj.mu};
  }
};

struct CostEstimate {
  double grad_f_est = 0.0;
  double grad_gk_est = 0.0;
  double l_used = 0.0;
};

// Total-cost model (log factors omitted):
//   grad_f  ~ sqrt(L/mu) * L_f/(L+mu)
//   grad_gk ~ m sqrt(L/mu) + sqrt(L/mu) * L_f/(L+mu) * sqrt(m L_g/(L_f+L))
inline CostEstimate estimate_cost(const ProblemConstants& c, double l) {
  if (!(c.mu > 0.0)) throw std::invalid_argument("estimate_cost: mu must be > 0");
  if (!(l >= c.mu * (1.0 - 1e-12)) || !(l <= c.l_f * (1.0 + 1e-12)))
    throw std::invalid_argument("estimate_cost: L must lie in [mu, L_f]");
  CostEstimate e;
  e.l_used = l;
  const double outer = std::sqrt(l / c.mu);
  const double gd = c.l_f / (l + c.mu);
  const double vr = std::sqrt(c.m * c.l_g / (c.l_f + l));
  e.grad_f_est = outer * gd;
  e.grad_gk_est = c.m * outer + outer * gd * vr;
  return e;
}

// argmin of grad_gk_est over a 64-point geometric grid on [mu, L_f];
// ties broken toward larger L. Under m L_f <= L_g and mu << L_f this lands
// at the L_f end of the grid.
inline double choose_L(const ProblemConstants& c, int grid_points = 64) {
  if (!(c.mu > 0.0)) throw std::invalid_argument("choose_L: mu must be > 0");
  if (c.l_f <= c.mu) return c.l_f;
  double best_l = c.l_f;
  double best_cost = estimate_cost(c, c.l_f).grad_gk_est;
  const double ratio = c.l_f / c.mu;
  for (int i = grid_points - 1; i >= 0; --i) {
    const double l = c.mu * std::pow(ratio, static_cast<double>(i) / (grid_points - 1));
    const double cost = estimate_cost(c, l).grad_gk_est;
    if (cost < best_cost) {
      best_cost = cost;
      best_l = l;
    }
  }
  return best_l;
}

struct SlidingConfig {
  double l = 0.0;  // prox parameter; <= 0 means choose_L
  double eps = 1e-6;
  std::uint64_t seed = 0;
  bool warm_start = true;
  StoppingRule outer_stop = StoppingRule::grad_norm(0.0, 100000);  // tol 0: derive from eps
  StoppingRule inner_gd_budget = StoppingRule::grad_norm(0.0, 200);
  StoppingRule vr_budget = StoppingRule::grad_norm(0.0, 0);  // cap 0: derive from constants
};

// alpha_{k+1} in (0,1): positive root of a^2 = (1-a) ak^2 + q a
inline double catalyst_alpha_next(double alpha_k, double q) {
  const double b = alpha_k * alpha_k - q;
  return 0.5 * (-b + std::sqrt(b * b + 4.0 * alpha_k * alpha_k));
}

// Accelerated inexact proximal point loop. `inner(center, eps_k, warm)`
// returns an approximate minimizer of F(x) + L/2 ||x - center||^2 to gap
// accuracy eps_k. One full grad F per outer iteration (1 + m oracle calls)
// drives the stopping test; one eval F feeds the trace. `grad_full`, when
// set, replaces obj.grad_F so callers can reuse gradients already computed
// at the same point (the sliding composition shares the inner solver's last
// snapshot gradient).
inline SolverReport catalyst_outer(
    const CompositeObjective& obj, double l, const StoppingRule& outer_stop, double eps,
    bool warm_start,
    const std::function<Vector(const Vector&, double, const Vector&)>& inner,
    OracleCounters& ctr,
    const std::function<Vector(const Vector&, OracleCounters&)>& grad_full = {}) {
  if (!(obj.mu > 0.0)) throw std::invalid_argument("catalyst_outer: mu must be > 0");
  const OracleCounters before = ctr;
  const double mu = obj.mu;
  const double q = mu / (mu + l);
  const double rho = 1.0 - 0.9 * std::sqrt(q);

  SolverReport rep;
  Vector x = zeros(obj.n), y = x;
  double alpha = std::sqrt(q);

  auto full_gradient = [&](const Vector& at) {
    return grad_full ? grad_full(at, ctr) : obj.grad_F(at, ctr);
  };

  Vector g0 = full_gradient(x);
  rep.trace.emplace_back(0, obj.eval_F(x, ctr));
  const double g0n = norm2(g0);
  // strong-convexity gap bound at the start; seeds the geometric tightening
  double eps_k = std::max(g0n * g0n / (2.0 * mu), eps);
  const double grad_tol = outer_stop.tol > 0.0 ? outer_stop.tol : std::sqrt(mu * eps);
  // inner accuracy floor: certifying ||grad F|| <= grad_tol needs subproblem
  // gaps of order grad_tol^2 / smoothness, which can sit far below eps/8
  const double l_total = obj.f.lipschitz_grad + obj.g.lipschitz_grad + l;
  const double eps_floor =
      outer_stop.kind == StoppingRule::Kind::GradNorm
          ? std::min(eps / 8.0, grad_tol * grad_tol / (8.0 * l_total))
          : eps / 8.0;
  if (outer_stop.kind == StoppingRule::Kind::GradNorm && g0n <= grad_tol) {
    rep.converged = true;
    rep.x_out = x;
    rep.counters = counters_since(ctr, before);
    return rep;
  }

  for (long long k = 1; k <= outer_stop.max_iters; ++k) {
    eps_k = std::max(eps_k * rho, eps_floor);
    Vector xn = inner(y, eps_k, warm_start ? x : y);
    const double alpha_next = catalyst_alpha_next(alpha, q);
    const double beta = alpha * (1.0 - alpha) / (alpha * alpha + alpha_next);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = xn[i] + beta * (xn[i] - x[i]);
    x = std::move(xn);
    alpha = alpha_next;

    Vector gf = full_gradient(x);
    rep.trace.emplace_back(k, obj.eval_F(x, ctr));
    rep.iterations = k;
    const double gn = norm2(gf);
    if (outer_stop.kind == StoppingRule::Kind::GradNorm && gn <= grad_tol) {
      rep.converged = true;
      break;
    }
    if (outer_stop.kind == StoppingRule::Kind::FuncGap &&
        rep.trace.back().second - outer_stop.f_star <= outer_stop.tol) {
      rep.converged = true;
      break;
    }
  }
  if (outer_stop.kind == StoppingRule::Kind::FixedIters) rep.converged = true;
  if (!rep.converged) rep.diagnostics = "catalyst_outer: outer budget exhausted";
  rep.x_out = std::move(x);
  rep.counters = counters_since(ctr, before);
  return rep;
}

// Full composition of the sliding scheme:
//   outer: Catalyst on F with prox parameter L,
//   middle: composite gradient method on F(x) + L/2||x - y_k||^2, one grad f
//           per iteration,
//   inner: variance-reduced solver on the linearized model with the two
//          quadratic anchors (L_f at x~, L at y_k) as composite.
// Counters split by nesting level in the report.
inline SolverReport sliding_solve(const CompositeObjective& obj, const SlidingConfig& cfg,
                                  OracleCounters& ctr) {
  if (!(obj.mu > 0.0)) throw std::invalid_argument("sliding_solve: mu must be > 0");
  const OracleCounters before = ctr;
  const ProblemConstants cns = ProblemConstants::of(obj);
  const double l = cfg.l > 0.0 ? cfg.l : choose_L(cns);
  const double lf = obj.f.lipschitz_grad;
  const double sigma = lf + l;

  SolverReport rep;
  if (!obj.regime_m_le_Lg_over_mu() || !obj.regime_mLf_le_Lg())
    rep.diagnostics = "warning: outside the m <= L_g/mu, m L_f <= L_g regime; ";

  OracleCounters c_outer, c_gd, c_vr;
  // sum-gradient cache: the VR solver's last snapshot gradient of g is valid
  // wherever the same point reappears (outer stopping test, next VR anchor),
  // since only the prox anchors change between solves, never g itself
  Vector cache_point, cache_grad_g;
  bool cache_valid = false;

  long long vr_cap = cfg.vr_budget.max_iters;
  if (vr_cap <= 0) {
    const double steps = std::sqrt(cns.m * cns.l_g / sigma);
    vr_cap = 40 * (cns.m + static_cast<long long>(steps)) + 2000;
  }
  std::uint64_t vr_seed = cfg.seed;
  bool inner_exhausted = false;

  auto inner_gd = [&](const Vector& center, double eps_k, const Vector& warm) -> Vector {
    // Eq.(2) subproblem at this prox center, solved by composite GD whose
    // per-iteration model goes to the VR solver.
    const double gd_tol =
        cfg.inner_gd_budget.tol > 0.0 ? cfg.inner_gd_budget.tol
                                      : 0.5 * std::sqrt(2.0 * (obj.mu + l) * eps_k);
    const double vr_tol = cfg.vr_budget.tol > 0.0
                              ? cfg.vr_budget.tol
                              : 0.25 * std::sqrt(2.0 * sigma * (eps_k / 4.0));

    auto model_solver = [&](const Vector& gf, const Vector& xt) -> Vector {
      QuadraticAnchors psi;
      psi.v_lin = gf;
      psi.w1 = lf;
      psi.a1 = xt;
      psi.w2 = l;
      psi.a2 = center;
      StoppingRule vstop = cfg.vr_budget.kind == StoppingRule::Kind::FixedIters
                               ? cfg.vr_budget
                               : StoppingRule::grad_norm(vr_tol, vr_cap);
      const Vector* warm_grad =
          cache_valid && cache_point == xt ? &cache_grad_g : nullptr;
      Vector out_grad;
      SolverReport vrep =
          varag_solve(obj.g, psi, xt, vstop, vr_seed++, c_vr, warm_grad, &out_grad);
      if (!vrep.converged) inner_exhausted = true;
      cache_point = vrep.x_out;
      cache_grad_g = std::move(out_grad);
      cache_valid = true;
      return vrep.x_out;
    };

    StoppingRule gstop = cfg.inner_gd_budget.kind == StoppingRule::Kind::FixedIters
                             ? cfg.inner_gd_budget
                             : StoppingRule::grad_norm(gd_tol, cfg.inner_gd_budget.max_iters);
    SolverReport grep = composite_gd(obj, l, center, warm, gstop, model_solver, c_gd);
    if (!grep.converged && gstop.kind != StoppingRule::Kind::FixedIters)
      inner_exhausted = true;
    return grep.x_out;
  };

  auto grad_full = [&](const Vector& x, OracleCounters& c) {
    Vector g = obj.grad_f(x, c);
    if (cache_valid && cache_point == x) {
      axpy(1.0, cache_grad_g, g);
    } else {
      Vector gg = obj.full_grad_g(x, c);
      axpy(1.0, gg, g);
      cache_point = x;
      cache_grad_g = std::move(gg);
      cache_valid = true;
    }
    return g;
  };

  StoppingRule outer = cfg.outer_stop;
  SolverReport orep = catalyst_outer(obj, l, outer, cfg.eps, cfg.warm_start, inner_gd,
                                     c_outer, grad_full);

  rep.x_out = std::move(orep.x_out);
  rep.iterations = orep.iterations;
  rep.trace = std::move(orep.trace);
  rep.converged = orep.converged;
  if (!orep.diagnostics.empty()) rep.diagnostics += orep.diagnostics;
  if (inner_exhausted)
    rep.diagnostics += (rep.diagnostics.empty() ? "" : "; ") +
                       std::string("inner budget exhausted at least once");
  rep.levels = {{"outer", c_outer}, {"inner_gd", c_gd}, {"vr", c_vr}};
  rep.counters = c_outer + c_gd + c_vr;
  ctr = before;
  ctr += rep.counters;
  return rep;
}

}  // namespace optslide
