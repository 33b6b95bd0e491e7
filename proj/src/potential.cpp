#include "cflow/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cflow {

namespace {

void require_radius(double radius) {
  if (!(radius > 0.0)) throw Error(Errc::InvalidArgument, "ball radius must be positive");
}

}  // namespace

Potential Potential::inverse_quadratic(double sign, double scale) {
  if (sign != 1.0 && sign != -1.0) throw Error(Errc::InvalidArgument, "sign must be +1 or -1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(Errc::InvalidArgument, "scale must be positive");
  return Potential(Kind::InverseQuadratic, sign, scale);
}

double Potential::grad_bound(double radius) const {
  require_radius(radius);
  if (kind_ == Kind::Quadratic) return 2.0 * radius;
  // |grad W|(r) = 2ar / (1 + ar^2)^2 peaks at r = 1/sqrt(3a).
  const double r = std::min(radius, 1.0 / std::sqrt(3.0 * scale_));
  const double q = 1.0 + scale_ * r * r;
  return 2.0 * scale_ * r / (q * q);
}

double Potential::hessian_bound(double radius) const {
  require_radius(radius);
  if (kind_ == Kind::Quadratic) return 2.0;
  // Eigenvalues of D^2 W at |x| = r (up to the sign s):
  //   tangential  -2a / (1 + ar^2)^2
  //   radial       2a (3ar^2 - 1) / (1 + ar^2)^3
  constexpr int kSamples = 20000;
  double best = 0.0;
  for (int k = 0; k <= kSamples; ++k) {
    const double r = radius * double(k) / kSamples;
    const double q = 1.0 + scale_ * r * r;
    const double tangential = 2.0 * scale_ / (q * q);
    const double radial = std::abs(2.0 * scale_ * (3.0 * scale_ * r * r - 1.0) / (q * q * q));
    best = std::max({best, tangential, radial});
  }
  return 1.01 * best;
}

double Potential::semiconvexity(double radius) const {
  if (kind_ == Kind::Quadratic) return 0.0;
  return -hessian_bound(radius);
}

std::string Potential::describe() const {
  if (kind_ == Kind::Quadratic) return "W(x) = |x|^2";
  std::ostringstream os;
  os << "W(x) = " << (sign_ < 0 ? "-" : "") << "1/(1+" << scale_ << "|x|^2)";
  return os.str();
}

}  // namespace cflow
