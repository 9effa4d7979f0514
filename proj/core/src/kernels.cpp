//
// wingbem -- Laplace free-space kernels.
//
#include "wingbem/kernels.hpp"

#include <cmath>

namespace wingbem {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * pi);

double distance_checked(const Vec3& x, const Vec3& y) {
  const double r = (y - x).norm();
  if (!(r > 0.0)) throw KernelError("kernel evaluated at coincident points");
  return r;
}

}  // namespace

void FlowConditions::validate() const {
  if (!(v_inf > 0.0)) throw DomainError("flow: v_inf must be positive");
  if (!(rho > 0.0)) throw DomainError("flow: rho must be positive");
  if (!(g >= 0.0)) throw DomainError("flow: g must be non-negative");
}

double green(const Vec3& x, const Vec3& y) { return kInv4Pi / distance_checked(x, y); }

Vec3 green_grad(const Vec3& x, const Vec3& y) {
  const double r = distance_checked(x, y);
  return kInv4Pi / (r * r * r) * (x - y);
}

Vec3 hypersingular_kernel(const Vec3& x, const Vec3& y, const Vec3& n) {
  const double r = distance_checked(x, y);
  const Vec3 d = y - x;
  const double r2 = r * r;
  return kInv4Pi / (r2 * r) * (n - 3.0 * d.dot(n) / r2 * d);
}

}  // namespace wingbem
