#pragma once

// Small numerically stable helpers over Eigen expressions shared by the
// linear classifiers.

#include <cmath>

#include <Eigen/Dense>

namespace simdoc {

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  return z > Scalar(0) ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Binary cross-entropy of logit z against label y in {0,1}.
template <typename Scalar>
Scalar bce_with_logit(Scalar z, int y) {
  return y == 1 ? softplus(-z) : softplus(z);
}

template <typename Derived>
typename Derived::PlainObject softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = logits.maxCoeff();
  typename Derived::PlainObject e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

template <typename Derived>
typename Derived::PlainObject log_softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = logits.maxCoeff();
  const Scalar lse = m + std::log((logits.array() - m).exp().sum());
  return (logits.array() - lse).matrix();
}

// Relative difference with an absolute fallback when both sides are ~0.
template <typename Scalar>
Scalar relative_error(Scalar a, Scalar b, Scalar floor = Scalar(1e-8)) {
  const Scalar scale = std::max(std::abs(a), std::abs(b));
  if (scale < floor) return std::abs(a - b);
  return std::abs(a - b) / scale;
}

}  // namespace simdoc
