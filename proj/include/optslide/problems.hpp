#pragma once

// Instance generators: quadratic f with a prescribed spectrum, row-sparse
// GLM finite sums, assembly into a CompositeObjective, and a direct-solve
// ground-truth minimizer for all-quadratic instances.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>

#include "reductions.hpp"

namespace optslide {

struct SparseDesign {
  std::vector<SparseRow> rows;
  std::size_t n = 0;
  std::size_t s = 0;  // nonzeros per row

  std::size_t m() const { return rows.size(); }

  double max_row_norm_sq() const {
    double mx = 0.0;
    for (const auto& r : rows) mx = std::max(mx, r.norm_sq());
    return mx;
  }
};

struct GLMSpec {
  SparseDesign design;
  Vector targets;
  ScalarLoss loss;
  double weight = 1.0;  // scales every g_k; lets tests pin L_g exactly

  // analytic, never estimated: L_g = weight * curvature * max_k ||a_k||^2
  double lipschitz_grad() const {
    return weight * loss.curvature_bound() * design.max_row_norm_sq();
  }
};

struct QuadraticSpec {
  SymmetricMatrix c;
  Vector b;          // optional linear term; zero in the paper regime
  double lam_max = 0.0;
  double mu_floor = 0.0;

  QuadraticSpec(SymmetricMatrix cc, Vector bb, double lmax, double lmin)
      : c(std::move(cc)), b(std::move(bb)), lam_max(lmax), mu_floor(lmin) {}
};

// Each row: s distinct indices drawn uniformly, standard normal values
// rescaled so ||a_k||^2 lands in [s/2, 2s] (a concrete instantiation of the
// O(s) row-norm bound). Deterministic per seed.
inline SparseDesign gen_sparse_design(std::size_t m, std::size_t n, std::size_t s,
                                      std::uint64_t seed) {
  if (m < 1 || s < 1) throw std::invalid_argument("gen_sparse_design: m, s must be >= 1");
  if (s > n) throw std::invalid_argument("gen_sparse_design: s > n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SparseDesign d;
  d.n = n;
  d.s = s;
  d.rows.reserve(m);
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t k = 0; k < m; ++k) {
    // partial Fisher-Yates for s distinct indices
    for (std::size_t i = 0; i < s; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pool[i], pool[pick(rng)]);
    }
    std::vector<int> idx(pool.begin(), pool.begin() + s);
    std::sort(idx.begin(), idx.end());
    std::vector<double> val(s);
    double nrm = 0.0;
    for (auto& v : val) {
      v = gauss(rng);
      nrm += v * v;
    }
    if (nrm == 0.0) {
      val[0] = 1.0;
      nrm = 1.0;
    }
    // scale so the squared norm sits at s (inside [s/2, 2s])
    const double scale = std::sqrt(static_cast<double>(s) / nrm);
    for (auto& v : val) v *= scale;
    d.rows.emplace_back(std::move(idx), std::move(val));
  }
  return d;
}

// C = sum_k d_k q_k q_k^T with orthonormal q_k from a seeded Gaussian basis;
// d spans [mu_floor, lambda_max_target] with both extremes attained.
inline QuadraticSpec make_quadratic(std::size_t n, double lambda_max_target,
                                    double mu_floor, std::uint64_t seed) {
  if (!(mu_floor >= 0.0) || !(lambda_max_target >= mu_floor))
    throw std::invalid_argument("make_quadratic: need 0 <= mu_floor <= lambda_max_target");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // orthonormal basis via modified Gram-Schmidt with one re-orthogonalization
  std::vector<Vector> q(n, Vector(n));
  for (auto& v : q)
    for (auto& e : v) e = gauss(rng);
  for (std::size_t k = 0; k < n; ++k) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < k; ++j) axpy(-dot(q[j], q[k]), q[j], q[k]);
    const double nk = norm2(q[k]);
    if (nk < 1e-12) throw std::runtime_error("make_quadratic: degenerate basis draw");
    scal(1.0 / nk, q[k]);
  }

  Vector d(n);
  std::uniform_real_distribution<double> unif(mu_floor, lambda_max_target);
  for (auto& e : d) e = unif(rng);
  d[0] = lambda_max_target;
  if (n > 1) d[n - 1] = mu_floor;

  SymmetricMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += d[k] * q[k][i] * q[k][j];
      c.set(i, j, s);
    }
  c.mark_psd(true);
  return QuadraticSpec(std::move(c), zeros(n), lambda_max_target, mu_floor);
}

// single empty squared-loss component; stands in for "no finite sum"
inline GLMSpec trivial_glm(std::size_t n) {
  GLMSpec g;
  g.design.n = n;
  g.design.s = 1;
  g.design.rows.emplace_back();
  g.targets = {0.0};
  g.loss = ScalarLoss::squared();
  return g;
}

// F(x) = 1/2 <x,Cx> - <b,x> + mu_reg/2 ||x||^2 + (w/m) sum_k l(<a_k,x>, y_k).
// mu = mu_floor(C) + mu_reg; the finite sum is counted as merely convex.
inline CompositeObjective assemble_problem(QuadraticSpec q, GLMSpec glm, double mu_reg) {
  if (!(mu_reg >= 0.0)) throw std::invalid_argument("assemble_problem: mu_reg < 0");
  const std::size_t n = q.c.dim();
  if (glm.design.n != n || q.b.size() != n)
    throw std::invalid_argument("assemble_problem: dimension mismatch");
  if (glm.targets.size() != glm.design.m())
    throw std::invalid_argument("assemble_problem: targets/design size mismatch");
  if (!loss_is_smooth(glm.loss.kind))
    throw std::invalid_argument("assemble_problem: nonsmooth loss; smooth it first");

  auto qp = std::make_shared<const QuadraticSpec>(std::move(q));
  auto gp = std::make_shared<const GLMSpec>(std::move(glm));

  CompositeObjective obj;
  obj.n = n;
  obj.mu_reg = mu_reg;
  obj.mu = qp->mu_floor + mu_reg;
  obj.quad = qp;
  obj.glm = gp;

  obj.f.lipschitz_grad = qp->lam_max + mu_reg;
  obj.f.value = [qp, mu_reg](const Vector& x) {
    return 0.5 * dot(x, symv(qp->c, x)) - dot(qp->b, x) + 0.5 * mu_reg * norm2_sq(x);
  };
  obj.f.gradient = [qp, mu_reg](const Vector& x) {
    Vector g = symv(qp->c, x);
    axpy(-1.0, qp->b, g);
    axpy(mu_reg, x, g);
    return g;
  };

  obj.g.m = static_cast<int>(gp->design.m());
  obj.g.lipschitz_grad = gp->lipschitz_grad();
  obj.g.component_value = [gp](int k, const Vector& x) {
    const double t = sparse_dot(gp->design.rows[k], x);
    return gp->weight * gp->loss.value(t, gp->targets[k]);
  };
  obj.g.add_component_gradient = [gp](int k, const Vector& x, double w, Vector& out) {
    const double t = sparse_dot(gp->design.rows[k], x);
    const double d = gp->weight * gp->loss.derivative(t, gp->targets[k]);
    sparse_axpy(w * d, gp->design.rows[k], out);
  };

  obj.validate();
  return obj;
}

// Ground truth for all-quadratic instances: solves
// (C + mu_reg I + (w/m) A^T A) x = b + (w/m) A^T y by Cholesky.
inline Vector exact_minimizer(const CompositeObjective& obj) {
  if (!obj.quad || !obj.glm)
    throw std::invalid_argument("exact_minimizer: instance was not assembled from specs");
  if (obj.glm->loss.kind != LossKind::Squared)
    throw std::invalid_argument("exact_minimizer: only squared-loss instances are quadratic");
  const std::size_t n = obj.n;
  const double wm = obj.glm->weight / static_cast<double>(obj.g.m);

  SymmetricMatrix mat(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      mat.set(i, j, obj.quad->c(i, j) + (i == j ? obj.mu_reg : 0.0));
  for (const auto& row : obj.glm->design.rows)
    for (std::size_t p = 0; p < row.indices.size(); ++p)
      for (std::size_t r = 0; r <= p; ++r) {
        const int i = row.indices[r], j = row.indices[p];
        mat.set(i, j, mat(i, j) + wm * row.values[r] * row.values[p]);
      }

  Vector rhs = obj.quad->b;
  for (std::size_t k = 0; k < obj.glm->design.rows.size(); ++k)
    sparse_axpy(wm * obj.glm->targets[k], obj.glm->design.rows[k], rhs);

  Vector x;
  try {
    x = spd_solve(mat, rhs);
  } catch (const std::runtime_error&) {
    throw std::runtime_error(
        "exact_minimizer: singular normal equations (mu = 0); regularize the instance");
  }

  OracleCounters scratch;
  const double res = norm2(obj.grad_F(x, scratch));
  const double ref = norm2(obj.grad_F(zeros(n), scratch));
  if (res > 1e-10 * (1.0 + ref))
    throw std::runtime_error("exact_minimizer: residual check failed, ||grad|| = " +
                             std::to_string(res));
  return x;
}

}  // namespace optslide
