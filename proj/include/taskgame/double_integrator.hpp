#pragma once

// Closed-form minimum-energy control for the planar double integrator
// p'' = u with running cost |u|^2 / 2 and a rest-to-point terminal
// constraint (p(h), v(h)) = (target, 0). The optimal input is affine in
// time, u(s) = alpha + s * beta.

#include <Eigen/Core>

namespace taskgame::di {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
struct AffineControl {
  Vector2<Scalar> alpha = Vector2<Scalar>::Zero();
  Vector2<Scalar> beta = Vector2<Scalar>::Zero();
};

/// Coefficients of the energy-optimal input steering (p0, v0) to
/// (target, 0) in exactly `horizon` time units. Requires horizon > 0.
template <typename DerivedP, typename DerivedV, typename DerivedT>
AffineControl<typename DerivedP::Scalar> landing_control(const Eigen::MatrixBase<DerivedP>& p0,
                                                         const Eigen::MatrixBase<DerivedV>& v0,
                                                         const Eigen::MatrixBase<DerivedT>& target,
                                                         typename DerivedP::Scalar horizon) {
  using Scalar = typename DerivedP::Scalar;
  const Scalar h = horizon;
  const Vector2<Scalar> gap = target - p0 - h * v0;
  AffineControl<Scalar> c;
  c.alpha = (Scalar(6) / (h * h)) * gap + (Scalar(2) / h) * v0;
  c.beta = -(Scalar(12) / (h * h * h)) * gap - (Scalar(6) / (h * h)) * v0;
  return c;
}

/// Energy of u(s) = alpha + s beta over [0, s]:
/// (s|alpha|^2 + s^2 alpha.beta + s^3 |beta|^2 / 3) / 2.
template <typename Scalar>
Scalar control_energy(const AffineControl<Scalar>& c, Scalar s) {
  return Scalar(0.5) * (s * c.alpha.squaredNorm() + s * s * c.alpha.dot(c.beta) +
                        s * s * s * c.beta.squaredNorm() / Scalar(3));
}

template <typename DerivedP, typename DerivedV>
Vector2<typename DerivedP::Scalar> position_at(const Eigen::MatrixBase<DerivedP>& p0,
                                               const Eigen::MatrixBase<DerivedV>& v0,
                                               const AffineControl<typename DerivedP::Scalar>& c,
                                               typename DerivedP::Scalar s) {
  using Scalar = typename DerivedP::Scalar;
  return p0 + s * v0 + (s * s / Scalar(2)) * c.alpha + (s * s * s / Scalar(6)) * c.beta;
}

template <typename DerivedV>
Vector2<typename DerivedV::Scalar> velocity_at(const Eigen::MatrixBase<DerivedV>& v0,
                                               const AffineControl<typename DerivedV::Scalar>& c,
                                               typename DerivedV::Scalar s) {
  using Scalar = typename DerivedV::Scalar;
  return v0 + s * c.alpha + (s * s / Scalar(2)) * c.beta;
}

}  // namespace taskgame::di
