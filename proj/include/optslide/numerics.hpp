#pragma once

// Dense vectors, row-sparse rows, dense symmetric matrices and a power-method
// spectral estimator. Everything above this file works in terms of these.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace optslide {

using Vector = std::vector<double>;

inline void check_dim(std::size_t a, std::size_t b, const char* where) {
  if (a != b)
    throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

inline void check_finite(const Vector& v, const char* where) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw std::runtime_error(std::string(where) + ": non-finite entry at coordinate " +
                               std::to_string(i));
}

// Summation order is index-ascending everywhere; runs are bit-reproducible
// per platform.
inline double dot(const Vector& u, const Vector& v) {
  check_dim(u.size(), v.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double norm2_sq(const Vector& v) { return dot(v, v); }
inline double norm2(const Vector& v) { return std::sqrt(norm2_sq(v)); }

inline void axpy(double a, const Vector& x, Vector& y) {
  check_dim(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scal(double a, Vector& x) {
  for (auto& e : x) e *= a;
}

inline Vector zeros(std::size_t n) { return Vector(n, 0.0); }

inline double dist2(const Vector& u, const Vector& v) {
  check_dim(u.size(), v.size(), "dist2");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// One row a_k of a row-sparse design; indices strictly increasing.
struct SparseRow {
  std::vector<int> indices;
  std::vector<double> values;

  SparseRow() = default;
  SparseRow(std::vector<int> idx, std::vector<double> val)
      : indices(std::move(idx)), values(std::move(val)) {
    if (indices.size() != values.size())
      throw std::invalid_argument("SparseRow: index/value length mismatch");
    for (std::size_t i = 1; i < indices.size(); ++i)
      if (indices[i] <= indices[i - 1])
        throw std::invalid_argument("SparseRow: indices must be strictly increasing");
    if (!indices.empty() && indices.front() < 0)
      throw std::invalid_argument("SparseRow: negative index");
  }

  std::size_t nnz() const { return indices.size(); }

  double norm_sq() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }
};

// <a_k, x>; cost proportional to nnz, never to dim(x).
inline double sparse_dot(const SparseRow& row, const Vector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < row.indices.size(); ++i) {
    const int j = row.indices[i];
    if (j >= static_cast<int>(x.size()))
      throw std::out_of_range("sparse_dot: index " + std::to_string(j) +
                              " out of range for dim " + std::to_string(x.size()));
    s += row.values[i] * x[j];
  }
  return s;
}

// out += a * row (scattered)
inline void sparse_axpy(double a, const SparseRow& row, Vector& out) {
  for (std::size_t i = 0; i < row.indices.size(); ++i) {
    const int j = row.indices[i];
    if (j >= static_cast<int>(out.size()))
      throw std::out_of_range("sparse_axpy: index out of range");
    out[j] += a * row.values[i];
  }
}

// Dense symmetric matrix; entries mirrored exactly at construction time.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {
    if (n == 0) throw std::invalid_argument("SymmetricMatrix: n must be >= 1");
  }

  static SymmetricMatrix identity(std::size_t n) {
    SymmetricMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) c.a_[i * n + i] = 1.0;
    c.psd_ = true;
    return c;
  }

  static SymmetricMatrix diagonal(const Vector& d) {
    SymmetricMatrix c(d.size());
    bool nonneg = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
      c.a_[i * d.size() + i] = d[i];
      nonneg = nonneg && d[i] >= 0.0;
    }
    c.psd_ = nonneg;
    return c;
  }

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  // sets both (i,j) and (j,i)
  void set(std::size_t i, std::size_t j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }

  void mark_psd(bool flag) { psd_ = flag; }
  bool is_psd() const { return psd_; }

 private:
  std::size_t n_;
  std::vector<double> a_;
  bool psd_ = false;
};

inline Vector symv(const SymmetricMatrix& c, const Vector& x) {
  check_dim(c.dim(), x.size(), "symv");
  const std::size_t n = c.dim();
  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += c(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

struct LambdaMaxResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Power iteration for the top eigenvalue of a PSD matrix. Seeded start
// vector, so the estimate is deterministic.
inline LambdaMaxResult lambda_max(const SymmetricMatrix& c, double tol = 1e-6,
                                  int max_iters = 10000, std::uint64_t seed = 0) {
  if (!(tol > 0.0)) throw std::invalid_argument("lambda_max: tol must be > 0");
  const std::size_t n = c.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  for (auto& e : v) e = gauss(rng);
  double nv = norm2(v);
  if (nv == 0.0) v[0] = 1.0, nv = 1.0;
  scal(1.0 / nv, v);

  LambdaMaxResult res;
  double prev = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Vector w = symv(c, v);
    const double lam = dot(v, w);
    const double nw = norm2(w);
    res.value = lam;
    res.iterations = it;
    if (nw == 0.0) {  // matrix annihilates v: spectrum seen is 0
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    scal(1.0 / nw, w);
    v = std::move(w);
    if (it > 1 && std::abs(lam - prev) <= tol * std::max(1e-300, std::abs(lam))) {
      res.converged = true;
      return res;
    }
    prev = lam;
  }
  return res;  // best estimate, converged == false
}

// Cholesky solve of A x = b for symmetric positive definite A.
inline Vector spd_solve(const SymmetricMatrix& a, const Vector& b) {
  check_dim(a.dim(), b.size(), "spd_solve");
  const std::size_t n = a.dim();
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0))
      throw std::runtime_error("spd_solve: matrix not positive definite (pivot " +
                               std::to_string(j) + ")");
    l[j * n + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / l[j * n + j];
    }
  }
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * y[k];
    y[i] = s / l[i * n + i];
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * x[k];
    x[ii] = s / l[ii * n + ii];
  }
  return x;
}

}  // namespace optslide
