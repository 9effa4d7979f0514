//
// wingbem -- Kernel tests.
//
#include "wingbem/kernels.hpp"

#include <doctest.h>

#include <cmath>

using namespace wingbem;

TEST_CASE("green function values") {
  const Vec3 o = Vec3::Zero();
  CHECK(green(o, Vec3(1, 0, 0)) == doctest::Approx(0.0795775).epsilon(1e-6));
  CHECK(green(o, Vec3(0, 2, 0)) == doctest::Approx(0.5 * green(o, Vec3(1, 0, 0))));
  const Vec3 a(0.3, -1.2, 0.7), b(-0.5, 0.4, 2.0);
  CHECK(green(a, b) == green(b, a));
  CHECK_THROWS_AS(green(a, a), KernelError);
}

TEST_CASE("green gradient") {
  const Vec3 g = green_grad(Vec3::Zero(), Vec3(1, 0, 0));
  CHECK((g - Vec3(-1.0 / (4 * M_PI), 0, 0)).norm() < 1e-15);
  const Vec3 x(0.1, 0.2, -0.3), y(1.1, -0.4, 0.5);
  const Vec3 n = (y - x).cross(Vec3(0, 0, 1)).normalized();
  CHECK(std::abs(green_grad(x, y).dot(n)) < 1e-16);
  const double h = 1e-6;
  Vec3 fd;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = h;
    fd[k] = (green(x, y + e) - green(x, y - e)) / (2 * h);
  }
  CHECK((fd - green_grad(x, y)).norm() < 1e-8);
}

TEST_CASE("hypersingular kernel") {
  const Vec3 o = Vec3::Zero();
  CHECK((hypersingular_kernel(o, Vec3(1, 0, 0), Vec3(0, 0, 1)) - Vec3(0, 0, 1) / (4 * M_PI)).norm() < 1e-15);
  // Aligned normal: the Laplace Hessian gives (n - 3 n)/(4 pi) = -2 n/(4 pi).
  CHECK((hypersingular_kernel(o, Vec3(1, 0, 0), Vec3(1, 0, 0)) - Vec3(-2, 0, 0) / (4 * M_PI)).norm() < 1e-15);

  const Vec3 x(0.2, -0.1, 0.3), y(-0.7, 0.5, 1.1), n = Vec3(0.3, -0.8, 0.5).normalized();
  const double h = 1e-6;
  Vec3 fd;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = Vec3::Zero();
    e[k] = h;
    fd[k] = (green_grad(x + e, y).dot(n) - green_grad(x - e, y).dot(n)) / (2 * h);
  }
  const Vec3 k = hypersingular_kernel(x, y, n);
  CHECK((fd - k).norm() < 1e-6 * k.norm());
}

TEST_CASE("flow conditions validation") {
  FlowConditions f;
  CHECK_NOTHROW(f.validate());
  f.v_inf = 0.0;
  CHECK_THROWS_AS(f.validate(), DomainError);
  f = FlowConditions{};
  f.rho = -1.0;
  CHECK_THROWS_AS(f.validate(), DomainError);
}
