//
// wingbem -- Laplace free-space kernels.
//
#pragma once

#include "wingbem/types.hpp"

namespace wingbem {

struct FlowConditions {
  double v_inf = 1.0;  // along +x
  double rho = 1.225;
  double g = 9.81;

  void validate() const;
  Vec3 velocity() const { return Vec3(v_inf, 0.0, 0.0); }
};

/// G = 1/(4π|y-x|).
double green(const Vec3& x, const Vec3& y);
/// ∇_y G = (x-y)/(4π|y-x|^3).
Vec3 green_grad(const Vec3& x, const Vec3& y);
/// ∇_x (∇_y G · n) = (n - 3((y-x)·n)(y-x)/r^2) / (4π r^3).
Vec3 hypersingular_kernel(const Vec3& x, const Vec3& y, const Vec3& n);

}  // namespace wingbem
