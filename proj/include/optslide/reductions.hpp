#pragma once

// Scalar losses, Nesterov dual smoothing of the nonsmooth ones (Huber /
// clipped quadratic via prox-friendly conjugates), and the ridge reduction
// from the convex to the strongly convex case.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oracles.hpp"

namespace optslide {

enum class LossKind { Squared, Logistic, Abs, Hinge, AbsSmoothed, HingeSmoothed };

inline bool loss_is_smooth(LossKind k) {
  return k == LossKind::Squared || k == LossKind::Logistic ||
         k == LossKind::AbsSmoothed || k == LossKind::HingeSmoothed;
}

// Scalar loss in its raw (possibly nonsmooth) form. Conventions:
//   Squared:  l(t) = (t - b)^2 / 2
//   Logistic: l(t) = log(1 + e^t) - b t            (logit link, b in [0,1])
//   Abs:      l(t) = |t - b|,  conjugate domain [-1, 1]
//   Hinge:    l(t) = max(0, 1 - b t), conjugate domain [-1, 0]
struct ScalarLoss {
  LossKind kind = LossKind::Squared;
  double eta = 0.0;  // smoothing parameter, > 0 for *Smoothed kinds
  double z_lo = 0.0, z_hi = 0.0;  // conjugate domain for smoothable kinds

  static ScalarLoss squared() { return {LossKind::Squared, 0.0, 0.0, 0.0}; }
  static ScalarLoss logistic() { return {LossKind::Logistic, 0.0, 0.0, 0.0}; }
  static ScalarLoss abs() { return {LossKind::Abs, 0.0, -1.0, 1.0}; }
  static ScalarLoss hinge() { return {LossKind::Hinge, 0.0, -1.0, 0.0}; }

  double max_conj_sq() const {
    return std::max(z_lo * z_lo, z_hi * z_hi);
  }

  // second-derivative bound used for L_g = bound * max_k ||a_k||^2
  double curvature_bound() const {
    switch (kind) {
      case LossKind::Squared: return 1.0;
      case LossKind::Logistic: return 0.25;
      case LossKind::AbsSmoothed:
      case LossKind::HingeSmoothed: return 1.0 / eta;
      default:
        throw std::logic_error("curvature_bound: nonsmooth loss has no bound");
    }
  }

  double value(double t, double b) const {
    switch (kind) {
      case LossKind::Squared: {
        const double r = t - b;
        return 0.5 * r * r;
      }
      case LossKind::Logistic: {
        // stable log(1+e^t)
        const double lse = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        return lse - b * t;
      }
      case LossKind::Abs: return std::abs(t - b);
      case LossKind::Hinge: return std::max(0.0, 1.0 - b * t);
      case LossKind::AbsSmoothed: {
        const double r = t - b;
        return std::abs(r) <= eta ? r * r / (2.0 * eta) : std::abs(r) - eta / 2.0;
      }
      case LossKind::HingeSmoothed: {
        const double r = 1.0 - b * t;  // hinge argument deficit
        if (r <= 0.0) return 0.0;
        return r <= eta ? r * r / (2.0 * eta) : r - eta / 2.0;
      }
    }
    throw std::logic_error("value: unknown loss kind");
  }

  double derivative(double t, double b) const {
    switch (kind) {
      case LossKind::Squared: return t - b;
      case LossKind::Logistic: return 1.0 / (1.0 + std::exp(-t)) - b;
      case LossKind::AbsSmoothed:
        return std::clamp((t - b) / eta, -1.0, 1.0);
      case LossKind::HingeSmoothed: {
        const double r = 1.0 - b * t;
        if (r <= 0.0) return 0.0;
        return -b * std::min(r / eta, 1.0);
      }
      default:
        throw std::logic_error("derivative: nonsmooth loss is not differentiable");
    }
  }
};

// Dual smoothing: smoothed(t) = max_{z in [z_lo, z_hi]} { z t - l*(z) - (eta/2) z^2 },
// evaluated in closed form per kind (Abs -> Huber, Hinge -> clipped quadratic).
inline ScalarLoss smooth_loss(const ScalarLoss& base, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("smooth_loss: eta must be > 0");
  if (loss_is_smooth(base.kind))
    throw std::invalid_argument("smooth_loss: base loss is already smooth");
  ScalarLoss s = base;
  s.eta = eta;
  s.kind = base.kind == LossKind::Abs ? LossKind::AbsSmoothed : LossKind::HingeSmoothed;
  return s;
}

// eta such that the uniform gap eta * max z^2 / 2 <= eps / 2, so an eps/2
// solution of the smoothed problem is an eps solution of the original.
inline double smoothing_accuracy(double eps, const ScalarLoss& base) {
  if (!(eps > 0.0)) throw std::invalid_argument("smoothing_accuracy: eps must be > 0");
  const double mz = base.max_conj_sq();
  if (!(mz > 0.0))
    throw std::invalid_argument("smoothing_accuracy: loss has no conjugate domain");
  return eps / mz;
}

// Ridge reduction: fold +mu/2 ||x||^2 into f with mu = eps / R^2. An eps/2
// solution of the regularized problem is an eps solution of the original.
inline CompositeObjective regularize(const CompositeObjective& obj, double eps, double r) {
  if (!(eps > 0.0) || !(r > 0.0))
    throw std::invalid_argument("regularize: eps and R must be > 0");
  const double mu = eps / (r * r);
  CompositeObjective out = obj;
  const SmoothTerm base = obj.f;
  out.f.lipschitz_grad = base.lipschitz_grad + mu;
  out.f.value = [base, mu](const Vector& x) {
    return base.value(x) + 0.5 * mu * norm2_sq(x);
  };
  out.f.gradient = [base, mu](const Vector& x) {
    Vector g = base.gradient(x);
    axpy(mu, x, g);
    return g;
  };
  out.mu = obj.mu + mu;
  out.mu_reg = obj.mu_reg + mu;
  return out;
}

}  // namespace optslide
