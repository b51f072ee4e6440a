#pragma once

// Test-only oracles, independent of the library's solve paths: Jacobi
// eigendecomposition, central finite differences, naive reference kernels.

#include <random>

#include <optslide/optslide.hpp>

namespace testutil {

using optslide::Vector;

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (auto& e : v) e = g(rng);
  return v;
}

// cyclic Jacobi; fine for the small symmetric matrices used in tests
inline Vector jacobi_eigenvalues(const optslide::SymmetricMatrix& c, int sweeps = 100) {
  const std::size_t n = c.dim();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = c(i, j);

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double cth = 1.0 / std::sqrt(t * t + 1.0);
        const double sth = t * cth;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = cth * akp - sth * akq;
          a[k * n + q] = sth * akp + cth * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = cth * apk - sth * aqk;
          a[q * n + k] = sth * apk + cth * aqk;
        }
      }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
  std::sort(eig.begin(), eig.end());
  return eig;
}

template <typename F>
Vector central_fd_gradient(const F& value, const Vector& x, double h = 1e-5) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (value(xp) - value(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline double rel_err_vec(const Vector& got, const Vector& want) {
  return optslide::dist2(got, want) / std::max(1.0, optslide::norm2(want));
}

// mirrors the documented varag accounting without running the solver:
// epochs entered E and steps S for a fixed inner-step budget
inline optslide::OracleCounters predict_varag_counters(int m, long long budget) {
  optslide::OracleCounters c;
  long long total = 0, epoch_len = 1;
  while (true) {
    c.grad_gk_calls += m;  // anchor full gradient
    c.g_evals += m;        // trace value at the snapshot
    if (total >= budget) break;
    long long t = std::min<long long>(epoch_len, m);
    epoch_len = std::min<long long>(2 * epoch_len, m);
    t = std::min(t, budget - total);
    c.grad_gk_calls += 2 * t;
    total += t;
  }
  return c;
}

}  // namespace testutil
