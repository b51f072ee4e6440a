#pragma once

// Two-oracle view of F(x) = f(x) + (1/m) sum_k g_k(x). Every gradient or
// value query goes through a caller-supplied OracleCounters, so nested
// solvers cannot bypass the accounting.

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "numerics.hpp"

namespace optslide {

struct OracleCounters {
  long long grad_f_calls = 0;
  long long grad_gk_calls = 0;
  long long f_evals = 0;
  long long g_evals = 0;

  OracleCounters& operator+=(const OracleCounters& o) {
    grad_f_calls += o.grad_f_calls;
    grad_gk_calls += o.grad_gk_calls;
    f_evals += o.f_evals;
    g_evals += o.g_evals;
    return *this;
  }
  friend OracleCounters operator+(OracleCounters a, const OracleCounters& b) {
    a += b;
    return a;
  }
  bool operator==(const OracleCounters&) const = default;
};

struct SmoothTerm {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz_grad = 0.0;  // L_f

  double eval(const Vector& x, OracleCounters& ctr) const {
    ++ctr.f_evals;
    const double v = value(x);
    if (!std::isfinite(v)) throw std::runtime_error("SmoothTerm: non-finite value");
    return v;
  }

  Vector grad(const Vector& x, OracleCounters& ctr) const {
    ++ctr.grad_f_calls;
    Vector g = gradient(x);
    check_finite(g, "SmoothTerm::grad");
    return g;
  }
};

struct FiniteSumTerm {
  int m = 0;
  std::function<double(int, const Vector&)> component_value;
  // out += w * grad g_k(x); sparse components accumulate in O(nnz)
  std::function<void(int, const Vector&, double, Vector&)> add_component_gradient;
  double lipschitz_grad = 0.0;  // uniform L_g over components

  void check_k(int k) const {
    if (k < 0 || k >= m)
      throw std::out_of_range("FiniteSumTerm: component " + std::to_string(k) +
                              " out of range [0," + std::to_string(m) + ")");
  }

  // single-component gradient, counted as one oracle call
  void component_grad_add(int k, const Vector& x, double w, Vector& out,
                          OracleCounters& ctr) const {
    check_k(k);
    ++ctr.grad_gk_calls;
    add_component_gradient(k, x, w, out);
  }

  Vector component_grad(int k, const Vector& x, OracleCounters& ctr) const {
    Vector out(x.size(), 0.0);
    component_grad_add(k, x, 1.0, out, ctr);
    return out;
  }

  // (1/m) sum_k grad g_k(x); counts exactly m component calls
  Vector full_grad(const Vector& x, OracleCounters& ctr) const {
    Vector out(x.size(), 0.0);
    const double w = 1.0 / m;
    for (int k = 0; k < m; ++k) add_component_gradient(k, x, w, out);
    ctr.grad_gk_calls += m;
    check_finite(out, "FiniteSumTerm::full_grad");
    return out;
  }

  // g(x) = (1/m) sum_k g_k(x); counts m component evaluations
  double eval(const Vector& x, OracleCounters& ctr) const {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += component_value(k, x);
    ctr.g_evals += m;
    s /= m;
    if (!std::isfinite(s)) throw std::runtime_error("FiniteSumTerm: non-finite value");
    return s;
  }
};

struct QuadraticSpec;  // problems.hpp
struct GLMSpec;        // problems.hpp

struct CompositeObjective {
  SmoothTerm f;
  FiniteSumTerm g;
  double mu = 0.0;  // strong convexity of F in the 2-norm
  std::size_t n = 0;

  // provenance, set by assemble_problem; enables the exact-minimizer oracle
  std::shared_ptr<const QuadraticSpec> quad;
  std::shared_ptr<const GLMSpec> glm;
  double mu_reg = 0.0;

  void validate() const {
    if (n == 0) throw std::invalid_argument("CompositeObjective: n must be >= 1");
    if (g.m < 1) throw std::invalid_argument("CompositeObjective: m must be >= 1");
    if (!(mu > 0.0) && mu != 0.0)
      throw std::invalid_argument("CompositeObjective: mu must be >= 0");
    if (mu > f.lipschitz_grad + g.lipschitz_grad + 1e-12)
      throw std::invalid_argument(
          "CompositeObjective: inconsistent constants, mu > L_f + L_g");
  }

  // Theorem-1 preconditions as checkable flags
  bool regime_m_le_Lg_over_mu() const {
    return mu > 0.0 && static_cast<double>(g.m) <= g.lipschitz_grad / mu;
  }
  bool regime_mLf_le_Lg() const {
    return static_cast<double>(g.m) * f.lipschitz_grad <= g.lipschitz_grad;
  }

  Vector grad_f(const Vector& x, OracleCounters& ctr) const {
    check_dim(x.size(), n, "grad_f");
    return f.grad(x, ctr);
  }

  Vector grad_component(int k, const Vector& x, OracleCounters& ctr) const {
    check_dim(x.size(), n, "grad_component");
    return g.component_grad(k, x, ctr);
  }

  Vector full_grad_g(const Vector& x, OracleCounters& ctr) const {
    check_dim(x.size(), n, "full_grad_g");
    return g.full_grad(x, ctr);
  }

  // grad F = grad f + full grad g; costs 1 + m oracle calls
  Vector grad_F(const Vector& x, OracleCounters& ctr) const {
    Vector gf = grad_f(x, ctr);
    Vector gg = full_grad_g(x, ctr);
    axpy(1.0, gg, gf);
    return gf;
  }

  double eval_F(const Vector& x, OracleCounters& ctr) const {
    check_dim(x.size(), n, "eval_F");
    return f.eval(x, ctr) + g.eval(x, ctr);
  }
};

}  // namespace optslide
