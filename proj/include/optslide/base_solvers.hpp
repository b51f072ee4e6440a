#pragma once

// Building-block solvers: accelerated composite gradient (FGM), the
// non-accelerated composite gradient outer loop, and an accelerated
// variance-reduced finite-sum solver whose composite part is a sum of
// quadratic anchors with a closed-form prox.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"

namespace optslide {

struct StoppingRule {
  enum class Kind { GradNorm, FuncGap, FixedIters };
  Kind kind = Kind::GradNorm;
  double tol = 1e-8;
  double f_star = 0.0;
  long long max_iters = 100000;  // safety cap; exact budget for FixedIters

  static StoppingRule grad_norm(double tol, long long cap = 100000) {
    return {Kind::GradNorm, tol, 0.0, cap};
  }
  static StoppingRule func_gap(double tol, double f_star, long long cap = 100000) {
    return {Kind::FuncGap, tol, f_star, cap};
  }
  static StoppingRule fixed_iters(long long t) {
    return {Kind::FixedIters, 0.0, 0.0, t};
  }
};

struct LevelCounters {
  std::string name;
  OracleCounters counters;
};

struct SolverReport {
  Vector x_out;
  long long iterations = 0;
  OracleCounters counters;
  std::vector<std::pair<long long, double>> trace;
  bool converged = false;
  std::string diagnostics;
  std::vector<LevelCounters> levels;  // filled by the nested sliding solver
};

inline OracleCounters counters_since(const OracleCounters& now, const OracleCounters& then) {
  OracleCounters d;
  d.grad_f_calls = now.grad_f_calls - then.grad_f_calls;
  d.grad_gk_calls = now.grad_gk_calls - then.grad_gk_calls;
  d.f_evals = now.f_evals - then.f_evals;
  d.g_evals = now.g_evals - then.g_evals;
  return d;
}

// argmin_x <v,x> + 1/(2 gamma) ||x - xbar||^2 + lf/2 ||x - xtilde||^2
//          + l/2 ||x - xk||^2, coordinatewise closed form.
inline void quadratic_prox_into(const Vector& v, double gamma, const Vector& xbar,
                                double lf, const Vector& xtilde, double l,
                                const Vector& xk, Vector& out) {
  if (!(gamma > 0.0)) throw std::invalid_argument("quadratic_prox: gamma must be > 0");
  if (lf < 0.0 || l < 0.0) throw std::invalid_argument("quadratic_prox: negative weight");
  const double denom = 1.0 / gamma + lf + l;
  out.resize(xbar.size());
  for (std::size_t i = 0; i < xbar.size(); ++i)
    out[i] = (xbar[i] / gamma + lf * xtilde[i] + l * xk[i] - v[i]) / denom;
}

inline Vector quadratic_prox(const Vector& v, double gamma, const Vector& xbar,
                             double lf, const Vector& xtilde, double l,
                             const Vector& xk) {
  Vector out;
  quadratic_prox_into(v, gamma, xbar, lf, xtilde, l, xk, out);
  return out;
}

// Smooth part + prox for the composite FGM. The callables are expected to
// carry their own oracle counting.
struct FgmProblem {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  // prox(g, y, L) = argmin <g,x> + L/2 ||x - y||^2 + psi(x)
  std::function<Vector(const Vector&, const Vector&, double)> prox;
  double l_smooth = 1.0;
  double mu = 0.0;
};

// Nesterov-accelerated composite scheme. GradNorm stopping uses the
// gradient-mapping norm L ||y - x+||, which for psi == 0 is exactly
// ||grad(y)||. Per iteration: 1 smooth gradient, 1 value (trace).
inline SolverReport composite_fgm(const FgmProblem& p, const Vector& x0,
                                  const StoppingRule& stop) {
  if (!(p.l_smooth >= p.mu) || p.mu < 0.0)
    throw std::invalid_argument("composite_fgm: need L >= mu >= 0");
  SolverReport rep;
  Vector x = x0, y = x0;
  double prev_val = p.value(x0);
  rep.trace.emplace_back(0, prev_val);

  const bool sc = p.mu > 0.0;
  const double beta_sc =
      sc ? (std::sqrt(p.l_smooth) - std::sqrt(p.mu)) / (std::sqrt(p.l_smooth) + std::sqrt(p.mu))
         : 0.0;
  double tk = 1.0;  // Nesterov t-sequence for mu == 0
  // momentum ripples are legitimately non-monotone for ~sqrt(L/mu) steps, so
  // divergence is flagged on absolute blowup, not on consecutive increases
  const double blowup = prev_val + 10.0 * (std::abs(prev_val) + 1.0);

  for (long long t = 1; t <= stop.max_iters; ++t) {
    Vector gy = p.grad(y);
    Vector xn = p.prox(gy, y, p.l_smooth);
    const double mapping = p.l_smooth * dist2(y, xn);
    double beta = beta_sc;
    if (!sc) {
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      beta = (tk - 1.0) / tn;
      tk = tn;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xi = xn[i];
      y[i] = xi + beta * (xi - x[i]);
      x[i] = xi;
    }
    const double fv = p.value(x);
    rep.trace.emplace_back(t, fv);
    rep.iterations = t;
    if (!std::isfinite(fv) || fv > blowup)
      throw std::runtime_error("composite_fgm: objective blew up, diverging "
                               "(L too small?)");
    prev_val = fv;
    if (stop.kind == StoppingRule::Kind::GradNorm && mapping <= stop.tol) {
      rep.converged = true;
      break;
    }
    if (stop.kind == StoppingRule::Kind::FuncGap && fv - stop.f_star <= stop.tol) {
      rep.converged = true;
      break;
    }
  }
  if (stop.kind == StoppingRule::Kind::FixedIters) rep.converged = true;
  rep.x_out = std::move(x);
  return rep;
}

// FGM on the whole of F, treating f + g as the smooth part with
// L = L_f + L_g. Each iteration costs 1 grad f and m component gradients.
inline SolverReport plain_fgm_baseline(const CompositeObjective& obj, const Vector& x0,
                                       const StoppingRule& stop, OracleCounters& ctr) {
  const OracleCounters before = ctr;
  FgmProblem p;
  p.l_smooth = obj.f.lipschitz_grad + obj.g.lipschitz_grad;
  p.mu = obj.mu;
  p.value = [&obj, &ctr](const Vector& x) { return obj.eval_F(x, ctr); };
  p.grad = [&obj, &ctr](const Vector& x) { return obj.grad_F(x, ctr); };
  p.prox = [](const Vector& g, const Vector& y, double l) {
    Vector x = y;
    axpy(-1.0 / l, g, x);
    return x;
  };
  SolverReport rep = composite_fgm(p, x0, stop);
  rep.counters = counters_since(ctr, before);
  return rep;
}

// Non-accelerated composite gradient method for the Catalyst subproblem
//   min_x f(x) + g(x) + l/2 ||x - center||^2,
// with g(x) + l/2||x-center||^2 treated as the composite. Each iteration
// takes one grad f and hands the linearized model to `inner`:
//   inner(grad_f(xt), xt) ~ argmin <grad,x-xt> + Lf/2||x-xt||^2 + g(x)
//                                  + l/2||x-center||^2.
// GradNorm stopping uses the surrogate 2 L_f ||x_{l+1} - x_l||, which upper
// bounds the subproblem gradient norm up to the inner residual.
inline SolverReport composite_gd(
    const CompositeObjective& obj, double l, const Vector& center, const Vector& x0,
    const StoppingRule& stop,
    const std::function<Vector(const Vector&, const Vector&)>& inner, OracleCounters& ctr) {
  const OracleCounters before = ctr;
  SolverReport rep;
  Vector x = x0;
  const double lf = obj.f.lipschitz_grad;
  for (long long it = 1; it <= stop.max_iters; ++it) {
    Vector gf = obj.grad_f(x, ctr);
    Vector xn = inner(gf, x);
    const double step = dist2(xn, x);
    x = std::move(xn);
    rep.iterations = it;
    if (stop.kind == StoppingRule::Kind::GradNorm && 2.0 * lf * step <= stop.tol) {
      rep.converged = true;
      break;
    }
    if (stop.kind == StoppingRule::Kind::FuncGap) {
      const double val =
          obj.eval_F(x, ctr) + 0.5 * l * dist2(x, center) * dist2(x, center);
      if (val - stop.f_star <= stop.tol) {
        rep.converged = true;
        break;
      }
    }
  }
  if (stop.kind == StoppingRule::Kind::FixedIters) rep.converged = true;
  rep.x_out = std::move(x);
  rep.counters = counters_since(ctr, before);
  return rep;
}

// psi(x) = <v_lin, x> + w1/2 ||x - a1||^2 + w2/2 ||x - a2||^2
struct QuadraticAnchors {
  Vector v_lin;
  double w1 = 0.0;
  Vector a1;
  double w2 = 0.0;
  Vector a2;

  double strong_convexity() const { return w1 + w2; }

  double value(const Vector& x) const {
    double s = dot(v_lin, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d1 = x[i] - a1[i], d2 = x[i] - a2[i];
      s += 0.5 * w1 * d1 * d1 + 0.5 * w2 * d2 * d2;
    }
    return s;
  }

  void grad_into(const Vector& x, Vector& out) const {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      out[i] = v_lin[i] + w1 * (x[i] - a1[i]) + w2 * (x[i] - a2[i]);
  }
};

// Accelerated variance-reduced solver for
//   min_x (1/m) sum_k g_k(x) + psi(x),
// psi strongly convex with modulus w1 + w2 and prox-friendly through
// quadratic_prox. Epochs take one full gradient of the sum at the snapshot
// (m component calls) plus one value pass for the trace; inner steps take
// two component calls each (fresh point and snapshot). Epoch lengths double
// until m, then stay at m. Deterministic per seed.
//
// `warm_full_grad`, when given, must be the full sum gradient at x0; the
// first anchor then costs nothing. `final_full_grad` receives the anchor
// gradient at the returned snapshot, so callers can chain solves without
// re-walking the sum.
//
// Exact counts for E epochs entered and S inner steps taken:
//   grad_gk = E * m + 2 * S (minus m with a warm anchor),  g_evals = E * m.
inline SolverReport varag_solve(const FiniteSumTerm& fs, const QuadraticAnchors& psi,
                                const Vector& x0, const StoppingRule& stop,
                                std::uint64_t seed, OracleCounters& ctr,
                                const Vector* warm_full_grad = nullptr,
                                Vector* final_full_grad = nullptr) {
  const double sigma = psi.strong_convexity();
  if (!(sigma > 0.0))
    throw std::invalid_argument("varag_solve: composite must be strongly convex");
  const OracleCounters before = ctr;
  const int m = fs.m;
  const double lg = std::max(fs.lipschitz_grad, 1e-12);

  const double tau1 = std::min(0.5, std::sqrt(2.0 * m * sigma / (3.0 * lg)));
  const double tau2 = 0.5;
  const double tau3 = 1.0 - tau1 - tau2;
  const double alpha = 1.0 / (3.0 * tau1 * lg);
  const double gamma_y = 1.0 / (3.0 * lg);
  const double wgrow = 1.0 + sigma * alpha;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, m - 1);

  const std::size_t n = x0.size();
  Vector xt = x0, y = x0, z = x0;
  Vector xcur(n), buf(n), psig(n), znew(n), ynew(n), acc(n);

  SolverReport rep;
  long long total_steps = 0;
  long long epoch_len = 1;
  const bool fixed = stop.kind == StoppingRule::Kind::FixedIters;

  bool first_epoch = true;
  Vector mu_full;
  while (true) {
    if (first_epoch && warm_full_grad) mu_full = *warm_full_grad;
    else mu_full = fs.full_grad(xt, ctr);
    first_epoch = false;
    const double val = fs.eval(xt, ctr) + psi.value(xt);
    psi.grad_into(xt, psig);
    axpy(1.0, mu_full, psig);
    const double gnorm = norm2(psig);
    rep.trace.emplace_back(total_steps, val);
    check_finite(xt, "varag_solve: snapshot");

    if (!fixed && stop.kind == StoppingRule::Kind::GradNorm && gnorm <= stop.tol) {
      rep.converged = true;
      break;
    }
    if (!fixed && stop.kind == StoppingRule::Kind::FuncGap && val - stop.f_star <= stop.tol) {
      rep.converged = true;
      break;
    }
    if (total_steps >= stop.max_iters) {
      rep.converged = fixed;
      break;
    }

    long long t = std::min<long long>(epoch_len, m);
    epoch_len = std::min<long long>(2 * epoch_len, m);
    t = std::min(t, stop.max_iters - total_steps);

    std::fill(acc.begin(), acc.end(), 0.0);
    double wsum = 0.0, w = 1.0;
    for (long long j = 0; j < t; ++j) {
      const int k = pick(rng);
      for (std::size_t i = 0; i < n; ++i)
        xcur[i] = tau1 * z[i] + tau2 * xt[i] + tau3 * y[i];
      buf = mu_full;
      fs.component_grad_add(k, xcur, 1.0, buf, ctr);
      fs.component_grad_add(k, xt, -1.0, buf, ctr);
      axpy(1.0, psi.v_lin, buf);  // linear part of psi; anchors go to the prox
      quadratic_prox_into(buf, alpha, z, psi.w1, psi.a1, psi.w2, psi.a2, znew);
      quadratic_prox_into(buf, gamma_y, xcur, psi.w1, psi.a1, psi.w2, psi.a2, ynew);
      std::swap(z, znew);
      std::swap(y, ynew);
      axpy(w, y, acc);
      wsum += w;
      w *= wgrow;
      if (w > 1e100) {
        scal(1e-100, acc);
        wsum *= 1e-100;
        w *= 1e-100;
      }
      ++total_steps;
    }
    for (std::size_t i = 0; i < n; ++i) xt[i] = acc[i] / wsum;
  }

  rep.iterations = total_steps;
  if (final_full_grad) *final_full_grad = std::move(mu_full);
  rep.x_out = xt;
  rep.counters = counters_since(ctr, before);
  return rep;
}

}  // namespace optslide
