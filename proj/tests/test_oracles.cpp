#include <doctest.h>

#include "test_helpers.hpp"

using namespace optslide;

namespace {

CompositeObjective small_instance(std::uint64_t seed, std::size_t n = 8, std::size_t m = 6,
                                  double mu_reg = 0.1) {
  auto quad = make_quadratic(n, 2.0, 0.0, seed);
  GLMSpec glm;
  glm.design = gen_sparse_design(m, n, 3, seed + 1);
  std::mt19937_64 rng(seed + 2);
  std::normal_distribution<double> g(0.0, 1.0);
  glm.targets.resize(m);
  for (auto& t : glm.targets) t = g(rng);
  glm.loss = ScalarLoss::squared();
  return assemble_problem(std::move(quad), std::move(glm), mu_reg);
}

}  // namespace

TEST_CASE("grad_f: identity quadratic and counter increments") {
  auto quad = QuadraticSpec(SymmetricMatrix::identity(2), zeros(2), 1.0, 1.0);
  auto obj = assemble_problem(std::move(quad), trivial_glm(2), 0.0);
  OracleCounters ctr;
  Vector x{3.0, -1.0};
  CHECK(obj.grad_f(x, ctr) == x);
  CHECK(ctr.grad_f_calls == 1);
  CHECK(obj.grad_f(zeros(2), ctr) == zeros(2));
  CHECK(ctr.grad_f_calls == 2);
}

TEST_CASE("grad_f matches central finite differences") {
  auto obj = small_instance(31);
  std::mt19937_64 rng(1);
  OracleCounters ctr;
  for (int rep = 0; rep < 5; ++rep) {
    Vector x = testutil::random_vector(obj.n, rng);
    Vector fd = testutil::central_fd_gradient(
        [&](const Vector& y) {
          OracleCounters c;
          return obj.f.eval(y, c);
        },
        x);
    CHECK(testutil::rel_err_vec(obj.grad_f(x, ctr), fd) <= 1e-5);
  }
}

TEST_CASE("grad_component: zero residual, chain rule, finite differences") {
  const std::size_t n = 4;
  GLMSpec glm;
  glm.design.n = n;
  glm.design.s = 1;
  glm.design.rows.push_back(SparseRow({0}, {1.0}));  // a_0 = e_1
  glm.targets = {0.0};
  glm.loss = ScalarLoss::squared();
  auto quad = QuadraticSpec(SymmetricMatrix::identity(n), zeros(n), 1.0, 1.0);
  auto obj = assemble_problem(std::move(quad), std::move(glm), 0.0);

  OracleCounters ctr;
  Vector x{2.0, 0.0, 0.0, 0.0};
  Vector g = obj.grad_component(0, x, ctr);
  CHECK(g == Vector{2.0, 0.0, 0.0, 0.0});
  CHECK(ctr.grad_gk_calls == 1);
  CHECK(obj.grad_component(0, zeros(n), ctr) == zeros(n));  // residual 0 at target
  CHECK_THROWS_AS(obj.grad_component(5, x, ctr), std::out_of_range);

  auto inst = small_instance(77);
  std::mt19937_64 rng(2);
  for (int k = 0; k < inst.g.m; ++k) {
    Vector p = testutil::random_vector(inst.n, rng);
    Vector fd = testutil::central_fd_gradient(
        [&](const Vector& y) { return inst.g.component_value(k, y); }, p);
    OracleCounters c;
    CHECK(testutil::rel_err_vec(inst.grad_component(k, p, c), fd) <= 1e-5);
  }
}

TEST_CASE("full_grad_g: counts m, matches component loop, zero at minimizer of g") {
  auto obj = small_instance(13, 10, 7, 0.2);
  OracleCounters ctr;
  std::mt19937_64 rng(3);
  Vector x = testutil::random_vector(obj.n, rng);
  Vector full = obj.full_grad_g(x, ctr);
  CHECK(ctr.grad_gk_calls == obj.g.m);

  Vector loop = zeros(obj.n);
  OracleCounters c2;
  for (int k = 0; k < obj.g.m; ++k) axpy(1.0 / obj.g.m, obj.grad_component(k, x, c2), loop);
  CHECK(c2.grad_gk_calls == obj.g.m);
  CHECK(testutil::rel_err_vec(full, loop) <= 1e-14);
}

TEST_CASE("full_grad_g with m = 1 equals the single component gradient") {
  auto obj = small_instance(99, 6, 1);
  OracleCounters ctr;
  Vector x{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  CHECK(testutil::rel_err_vec(obj.full_grad_g(x, ctr), obj.grad_component(0, x, ctr)) <=
        1e-15);
}

TEST_CASE("eval_F: closed form at origin and counter accounting") {
  auto obj = small_instance(55, 6, 4, 0.0);
  OracleCounters ctr;
  double expect = 0.0;
  for (int k = 0; k < 4; ++k)
    expect += 0.5 * obj.glm->targets[k] * obj.glm->targets[k];
  expect /= 4.0;
  CHECK(obj.eval_F(zeros(6), ctr) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(ctr.f_evals == 1);
  CHECK(ctr.g_evals == 4);
}

TEST_CASE("eval_F at exact minimizer is below random perturbations") {
  auto obj = small_instance(101, 12, 9, 0.3);
  Vector xs = exact_minimizer(obj);
  OracleCounters ctr;
  const double fs = obj.eval_F(xs, ctr);
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    Vector x = xs;
    axpy(0.5, testutil::random_vector(obj.n, rng), x);
    CHECK(obj.eval_F(x, ctr) >= fs - 1e-12);
  }
}

TEST_CASE("strong convexity spot check on random pairs") {
  auto obj = small_instance(7, 10, 8, 0.4);
  std::mt19937_64 rng(5);
  OracleCounters ctr;
  for (int rep = 0; rep < 20; ++rep) {
    Vector x = testutil::random_vector(obj.n, rng);
    Vector y = testutil::random_vector(obj.n, rng);
    const double fx = obj.eval_F(x, ctr), fy = obj.eval_F(y, ctr);
    Vector gx = obj.grad_F(x, ctr);
    Vector d = y;
    axpy(-1.0, x, d);
    CHECK(fy >= fx + dot(gx, d) + 0.5 * obj.mu * norm2_sq(d) - 1e-8);
  }
}

TEST_CASE("gradient Lipschitz constants hold empirically") {
  auto obj = small_instance(17, 9, 6, 0.25);
  std::mt19937_64 rng(6);
  OracleCounters ctr;
  for (int rep = 0; rep < 30; ++rep) {
    Vector x = testutil::random_vector(obj.n, rng);
    Vector y = testutil::random_vector(obj.n, rng);
    Vector dg = obj.grad_f(x, ctr);
    axpy(-1.0, obj.grad_f(y, ctr), dg);
    CHECK(norm2(dg) <= obj.f.lipschitz_grad * dist2(x, y) * (1.0 + 1e-9));
    const int k = static_cast<int>(rng() % obj.g.m);
    Vector dk = obj.grad_component(k, x, ctr);
    axpy(-1.0, obj.grad_component(k, y, ctr), dk);
    CHECK(norm2(dk) <= obj.g.lipschitz_grad * dist2(x, y) * (1.0 + 1e-9));
  }
}

TEST_CASE("regime flags follow the constants") {
  auto quad = QuadraticSpec(SymmetricMatrix::identity(3), zeros(3), 1.0, 1.0);
  GLMSpec glm = trivial_glm(3);
  glm.design.rows[0] = SparseRow({0}, {10.0});  // ||a||^2 = 100 -> L_g = 100
  glm.targets = {0.0};
  auto obj = assemble_problem(std::move(quad), std::move(glm), 0.0);
  // L_f = 1, L_g = 100, mu = 1, m = 1
  CHECK(obj.regime_m_le_Lg_over_mu());
  CHECK(obj.regime_mLf_le_Lg());
}

TEST_CASE("inconsistent constants are rejected at construction") {
  CompositeObjective obj;
  obj.n = 2;
  obj.g.m = 1;
  obj.f.lipschitz_grad = 0.5;
  obj.g.lipschitz_grad = 0.1;
  obj.mu = 10.0;
  CHECK_THROWS_AS(obj.validate(), std::invalid_argument);
}
