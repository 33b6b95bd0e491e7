#pragma once

#include <string>

#include "cflow/point.hpp"

namespace cflow {

/// Symmetric C^2 interaction kernel from a closed catalog:
///   quadratic:          W(x) = |x|^2
///   inverse quadratic:  W(x) = s / (1 + a|x|^2),  s in {+1, -1}, a > 0
/// s = +1 is repulsive, s = -1 attractive.
class Potential {
 public:
  enum class Kind { Quadratic, InverseQuadratic };

  static Potential quadratic() { return Potential(Kind::Quadratic, 1.0, 1.0); }
  static Potential inverse_quadratic(double sign, double scale);

  Kind kind() const { return kind_; }
  double sign() const { return sign_; }
  double scale() const { return scale_; }

  double eval(const Point& x) const {
    const double r2 = norm_sq(x);
    if (kind_ == Kind::Quadratic) return r2;
    return sign_ / (1.0 + scale_ * r2);
  }

  Point grad(const Point& x) const {
    if (kind_ == Kind::Quadratic) return 2.0 * x;
    const double q = 1.0 + scale_ * norm_sq(x);
    return x * (-2.0 * sign_ * scale_ / (q * q));
  }

  /// sup_{|x| <= R} |grad W(x)|, in closed form.
  double grad_bound(double radius) const;

  /// Upper bound on the spectral norm of the Hessian over the ball B_R.
  /// Exact for the quadratic kernel; a dense radial scan of the closed-form
  /// Hessian eigenvalues with a 1% safety factor otherwise.
  double hessian_bound(double radius) const;

  /// Semiconvexity constant lambda_W <= 0 valid on B_R.
  double semiconvexity(double radius) const;

  std::string describe() const;

 private:
  Potential(Kind kind, double sign, double scale) : kind_(kind), sign_(sign), scale_(scale) {}

  Kind kind_;
  double sign_;
  double scale_;
};

}  // namespace cflow
