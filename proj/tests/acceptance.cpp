// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <random>

#include <optslide/optslide.hpp>

#include "test_helpers.hpp"

using namespace optslide;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ProblemSpec regime_spec(std::size_t n, std::size_t m, std::size_t s, std::uint64_t seed,
                        double mu, double lg, double eps) {
  ProblemSpec p;
  p.n = n;
  p.m = m;
  p.s = s;
  p.seed = seed;
  p.loss = "squared";
  p.lambda_max_target = 1.0;
  p.mu_floor = mu;
  p.eps = eps;
  p.lg_target = lg;
  return p;
}

// 1: gap vs exact minimizer on 20 random regime instances
void criterion_1() {
  std::mt19937_64 rng(11);
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 20 && ok; ++i) {
    const std::size_t n = 10 + rng() % 41;           // <= 50
    const std::size_t m = 8 + rng() % 121;           // <= 128
    const std::size_t s = 2 + rng() % std::min<std::size_t>(n - 1, 6);
    const double mu = std::pow(10.0, -1.0 - double(rng() % 3));
    auto spec = regime_spec(n, m, s, 1000 + i, mu, 4.0 * double(m), 1e-6);
    auto obj = build_instance(spec);
    SlidingConfig cfg;
    cfg.eps = 1e-6;
    cfg.seed = i;
    OracleCounters ctr;
    const double t0 = now_s();
    auto rep = sliding_solve(obj, cfg, ctr);
    const double dt = now_s() - t0;
    Vector xs = exact_minimizer(obj);
    OracleCounters scratch;
    const double gap = obj.eval_F(rep.x_out, scratch) - obj.eval_F(xs, scratch);
    if (!(rep.converged && gap <= 1e-6 && dt < 10.0)) {
      ok = false;
      detail = "instance " + std::to_string(i) + ": gap " + std::to_string(gap) +
               ", time " + std::to_string(dt) + "s, converged " +
               std::to_string(rep.converged);
    }
  }
  report(1, ok,
         ok ? "20/20 regime instances reach gap <= 1e-6 vs exact minimizer" : detail);
}

// 2: fixed-budget counters match closed forms exactly
void criterion_2() {
  auto spec = regime_spec(10, 8, 3, 7, 1e-2, 32.0, 1e-4);
  auto obj = build_instance(spec);
  const long long m = obj.g.m;
  bool ok = true;
  std::string detail = "exact counter match for fgm, gd, vr, outer, sliding";

  {
    OracleCounters c;
    plain_fgm_baseline(obj, zeros(obj.n), StoppingRule::fixed_iters(17), c);
    if (!(c.grad_f_calls == 17 && c.grad_gk_calls == 17 * m && c.f_evals == 18 &&
          c.g_evals == 18 * m)) {
      ok = false;
      detail = "fgm fixed(17) counter mismatch";
    }
  }
  {
    OracleCounters c;
    auto step = [&](const Vector& gf, const Vector& xt) {
      Vector x = xt;
      axpy(-1.0 / obj.f.lipschitz_grad, gf, x);
      return x;
    };
    composite_gd(obj, 1.0, zeros(obj.n), zeros(obj.n), StoppingRule::fixed_iters(20),
                 step, c);
    if (!(c.grad_f_calls == 20 && c.grad_gk_calls == 0)) {
      ok = false;
      detail = "composite_gd fixed(20) counter mismatch";
    }
  }
  for (long long budget : {1, 7, 40, 200}) {
    OracleCounters c;
    QuadraticAnchors psi;
    psi.v_lin = zeros(obj.n);
    psi.w1 = 1.0;
    psi.a1 = zeros(obj.n);
    psi.w2 = 0.0;
    psi.a2 = zeros(obj.n);
    varag_solve(obj.g, psi, zeros(obj.n), StoppingRule::fixed_iters(budget), 3, c);
    const auto want = testutil::predict_varag_counters(obj.g.m, budget);
    if (!(c == want)) {
      ok = false;
      detail = "varag fixed(" + std::to_string(budget) + ") counter mismatch";
    }
  }
  {
    OracleCounters c;
    auto noop = [](const Vector& center, double, const Vector&) { return center; };
    catalyst_outer(obj, 1.0, StoppingRule::fixed_iters(5), 1e-4, true, noop, c);
    if (!(c.grad_f_calls == 6 && c.grad_gk_calls == 6 * m && c.f_evals == 6 &&
          c.g_evals == 6 * m)) {
      ok = false;
      detail = "catalyst_outer fixed(5) counter mismatch";
    }
  }
  {
    SlidingConfig cfg;
    cfg.eps = 1e-4;
    cfg.outer_stop = StoppingRule::fixed_iters(3);
    cfg.inner_gd_budget = StoppingRule::fixed_iters(2);
    cfg.vr_budget = StoppingRule::fixed_iters(10);
    OracleCounters c;
    auto rep = sliding_solve(obj, cfg, c);
    const auto vr = testutil::predict_varag_counters(obj.g.m, 10);
    const bool lvl_ok = rep.levels.size() == 3 &&
                        rep.levels[0].counters.grad_f_calls == 4 &&
                        rep.levels[0].counters.grad_gk_calls == m &&
                        rep.levels[1].counters.grad_f_calls == 6 &&
                        rep.levels[2].counters.grad_gk_calls ==
                            6 * (vr.grad_gk_calls - m);
    OracleCounters sum;
    for (const auto& l : rep.levels) sum += l.counters;
    if (!(lvl_ok && sum == rep.counters)) {
      ok = false;
      detail = "sliding fixed-budget counter mismatch";
    }
  }
  report(2, ok, detail);
}

ScalingSummary run_m_scaling() {
  ExperimentConfig cfg;
  cfg.problem = regime_spec(24, 64, 6, 1, 1e-3, 4.0 * 1024.0, 1e-6);
  cfg.methods = {Method::Sliding};
  cfg.eps = 1e-6;
  cfg.seeds = {1, 2, 3};
  cfg.axis_name = "m";
  cfg.axis_values = {64, 256, 1024};
  return scaling_study(cfg);
}

// 3 + 4: component-gradient slope ~ 1/2, grad-f slope ~ 0 along the m axis
void criteria_3_4() {
  const double t0 = now_s();
  auto s = run_m_scaling();
  const double dt = now_s() - t0;
  const bool ok3 = s.slope_grad_gk >= 0.35 && s.slope_grad_gk <= 0.8 && dt < 300.0;
  report(3, ok3,
         "grad_gk slope vs m = " + std::to_string(s.slope_grad_gk) + " (want [0.35,0.8], " +
             std::to_string(dt) + "s)");
  const bool ok4 = s.slope_grad_f >= -0.15 && s.slope_grad_f <= 0.25;
  report(4, ok4,
         "grad_f slope vs m = " + std::to_string(s.slope_grad_f) + " (want [-0.15,0.25])");
}

// 5: grad-f slope ~ 1/2 against 1/mu
void criterion_5() {
  ExperimentConfig cfg;
  cfg.problem = regime_spec(24, 32, 6, 1, 0.0, 4.0 * 32.0, 1e-6);
  cfg.methods = {Method::Sliding};
  cfg.eps = 1e-6;
  cfg.seeds = {1, 2, 3};
  cfg.axis_name = "mu";
  cfg.axis_values = {1e-2, 1e-3, 1e-4};
  auto s = scaling_study(cfg);
  const bool ok = s.slope_grad_f >= 0.35 && s.slope_grad_f <= 0.8;
  report(5, ok,
         "grad_f slope vs 1/mu = " + std::to_string(s.slope_grad_f) + " (want [0.35,0.8])");
}

// 6: weighted-cost ordering on the desk-scale smoothed-ABS instance
void criterion_6() {
  ExperimentConfig cfg;
  cfg.problem.n = 150;
  cfg.problem.m = 600;
  cfg.problem.s = 30;
  cfg.problem.seed = 1;
  cfg.problem.loss = "abs";
  cfg.problem.lambda_max_target = 0.1;  // <= 1/(eps m) = 1/6
  cfg.problem.mu_floor = 0.0;
  cfg.problem.r = 10.0;
  cfg.problem.eps = 1e-2;
  cfg.eps = 1e-2;
  cfg.seeds = {1};
  const double t0 = now_s();
  auto t = table1_comparison(cfg);
  const double dt = now_s() - t0;
  bool converged = true, gaps_ok = true;
  for (const auto& r : t.rows) {
    converged = converged && r.converged;
    gaps_ok = gaps_ok && r.final_gap <= cfg.eps;
  }
  const bool ok = t.regime_ok && converged && gaps_ok &&
                  t.sliding_weighted_cost < t.fgm_weighted_cost && dt < 120.0;
  report(6, ok,
         "weighted cost sliding " + std::to_string(t.sliding_weighted_cost) + " vs fgm " +
             std::to_string(t.fgm_weighted_cost) + " (" + std::to_string(dt) + "s)");
}

// 7: fine-grid cost minimizer sits within one coarse step of L_f
void criterion_7() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool ok = true;
  std::string detail = "10/10 fine-grid minimizers within one coarse step of L_f";
  for (int i = 0; i < 10 && ok; ++i) {
    ProblemConstants c;
    c.m = 8 << (rng() % 6);
    c.l_f = std::pow(10.0, 2.0 * u(rng) - 1.0);
    c.mu = c.l_f * std::pow(10.0, -2.0 - 2.0 * u(rng));
    c.l_g = 4.0 * c.m * c.l_f * (1.0 + u(rng));  // m L_f <= L_g, m <= L_g/mu
    double best_l = c.mu, best = 1e300;
    for (int k = 0; k <= 20000; ++k) {
      const double l = c.mu * std::pow(c.l_f / c.mu, k / 20000.0);
      const double cost = estimate_cost(c, l).grad_gk_est;
      if (cost < best) {
        best = cost;
        best_l = l;
      }
    }
    const double step = std::pow(c.l_f / c.mu, 1.0 / 63.0);
    if (!(best_l >= c.l_f / (step * 1.001))) {
      ok = false;
      detail = "constant set " + std::to_string(i) + ": minimizer " +
               std::to_string(best_l) + " far from L_f " + std::to_string(c.l_f);
    }
  }
  report(7, ok, detail);
}

// 8: Huber vs brute-force conjugate grid; end-to-end smoothed 2-D ABS GLM
void criterion_8() {
  bool ok = true;
  std::string detail;
  const double eta = 0.2;
  auto h = smooth_loss(ScalarLoss::abs(), eta);
  for (int i = 0; i < 400 && ok; ++i) {
    const double t = -2.0 + 4.0 * i / 399.0;
    double best = -1e300;
    for (int k = 0; k <= 100000; ++k) {
      const double z = -1.0 + 2.0 * k / 100000.0;
      best = std::max(best, z * t - 0.5 * eta * z * z);
    }
    if (std::abs(h.value(t, 0.0) - best) > 1e-6) {
      ok = false;
      detail = "Huber mismatch at t = " + std::to_string(t);
    }
  }

  if (ok) {
    const double eps = 5e-2;
    ProblemSpec p;
    p.n = 2;
    p.m = 6;
    p.s = 2;
    p.seed = 3;
    p.loss = "abs";
    p.mu_floor = 0.5;
    p.eps = eps / 2;  // smoothing takes eps/2, solve takes eps/2
    auto obj = build_instance(p);
    SlidingConfig cfg;
    cfg.eps = eps / 2;
    OracleCounters ctr;
    auto rep = sliding_solve(obj, cfg, ctr);

    // original nonsmooth objective, evaluated directly
    auto orig = [&](const Vector& x) {
      OracleCounters s2;
      double v = obj.f.eval(x, s2);
      double g = 0.0;
      for (int k = 0; k < obj.g.m; ++k)
        g += obj.glm->weight *
             std::abs(sparse_dot(obj.glm->design.rows[k], x) - obj.glm->targets[k]);
      return v + g / obj.g.m;
    };
    double grid_min = 1e300;
    for (int i = 0; i <= 400; ++i)
      for (int j = 0; j <= 400; ++j)
        grid_min = std::min(grid_min, orig({-2.0 + 4.0 * i / 400.0,
                                            -2.0 + 4.0 * j / 400.0}));
    const double sub = orig(rep.x_out) - grid_min;
    if (!(rep.converged && sub <= eps)) {
      ok = false;
      detail = "end-to-end suboptimality " + std::to_string(sub) + " > eps";
    } else {
      detail = "Huber grid oracle + end-to-end 2-D solve within eps of grid minimum";
    }
  }
  report(8, ok, detail);
}

// 9: ridge reduction on singular convex instances, checked against a grid
void criterion_9() {
  bool ok = true;
  std::string detail = "5/5 regularized solves within eps of the grid oracle";
  const double eps = 1e-2, r = 3.0;
  for (int i = 0; i < 5 && ok; ++i) {
    std::mt19937_64 rng(40 + i);
    GLMSpec glm;
    glm.design.n = 2;
    glm.design.s = 2;
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k < 4; ++k)
      glm.design.rows.push_back(SparseRow({0, 1}, {g(rng), g(rng)}));
    glm.targets = {g(rng), g(rng), g(rng), g(rng)};
    glm.loss = ScalarLoss::squared();
    auto obj = assemble_problem(make_quadratic(2, 0.5, 0.0, 50 + i), std::move(glm), 0.0);
    auto reg = regularize(obj, eps, r);

    SlidingConfig cfg;
    cfg.eps = eps / 2;
    OracleCounters ctr;
    auto rep = sliding_solve(reg, cfg, ctr);

    OracleCounters scratch;
    double grid_min = 1e300;
    for (int a = 0; a <= 400; ++a)
      for (int b = 0; b <= 400; ++b) {
        Vector x{-r + 2 * r * a / 400.0, -r + 2 * r * b / 400.0};
        grid_min = std::min(grid_min, obj.eval_F(x, scratch));
      }
    const double sub = obj.eval_F(rep.x_out, scratch) - grid_min;
    if (!(rep.converged && sub <= eps)) {
      ok = false;
      detail = "instance " + std::to_string(i) + ": original suboptimality " +
               std::to_string(sub);
    }
  }
  report(9, ok, detail);
}

// 10: FD checks per loss family, prox residual property, bit-level determinism
void criterion_10() {
  bool ok = true;
  std::string detail = "FD oracles, prox residuals <= 1e-12, bit-identical reruns";
  std::mt19937_64 rng(60);

  for (const std::string& loss : {"squared", "logistic", "abs", "hinge"}) {
    ProblemSpec p;
    p.n = 7;
    p.m = 5;
    p.s = 3;
    p.seed = 61;
    p.loss = loss;
    p.mu_floor = 0.3;
    p.eps = 1e-2;
    auto obj = build_instance(p);
    for (int i = 0; i < 20 && ok; ++i) {
      Vector x = testutil::random_vector(7, rng);
      OracleCounters c;
      Vector fd = testutil::central_fd_gradient(
          [&](const Vector& y) {
            OracleCounters s2;
            return obj.eval_F(y, s2);
          },
          x);
      if (testutil::rel_err_vec(obj.grad_F(x, c), fd) > 1e-5) {
        ok = false;
        detail = "FD mismatch for loss " + loss;
      }
    }
  }

  for (int i = 0; i < 1000 && ok; ++i) {
    const std::size_t n = 1 + rng() % 8;
    Vector v = testutil::random_vector(n, rng), xb = testutil::random_vector(n, rng);
    Vector xt = testutil::random_vector(n, rng), xk = testutil::random_vector(n, rng);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    const double gamma = u(rng), lf = u(rng), l = u(rng);
    Vector x = quadratic_prox(v, gamma, xb, lf, xt, l, xk);
    for (std::size_t d = 0; d < n && ok; ++d) {
      const double grad =
          v[d] + (x[d] - xb[d]) / gamma + lf * (x[d] - xt[d]) + l * (x[d] - xk[d]);
      if (std::abs(grad) > 1e-12) {
        ok = false;
        detail = "prox residual " + std::to_string(grad);
      }
    }
  }

  if (ok) {
    auto spec = regime_spec(12, 16, 4, 5, 1e-2, 64.0, 1e-6);
    auto obj = build_instance(spec);
    SlidingConfig cfg;
    cfg.eps = 1e-6;
    cfg.seed = 13;
    OracleCounters c1, c2;
    auto r1 = sliding_solve(obj, cfg, c1);
    auto r2 = sliding_solve(obj, cfg, c2);
    if (!(c1 == c2 && r1.x_out == r2.x_out)) {
      ok = false;
      detail = "same-seed rerun not bit-identical";
    }
  }
  report(10, ok, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criteria_3_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (g_failures) {
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
