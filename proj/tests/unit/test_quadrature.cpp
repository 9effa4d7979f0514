//
// wingbem -- Quadrature tests.
//
#include "wingbem/kernels.hpp"
#include "wingbem/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace wingbem;

namespace {

template <class F>
double integrate(const QuadRule& q, F&& f) {
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) s += q.weights[k] * f(q.nodes[k]);
  return s;
}

CellMap square(double s, double stretch = 1.0) {
  return CellMap({Vec3(0, 0, 0), Vec3(s * stretch, 0, 0), Vec3(0, s, 0), Vec3(s * stretch, s, 0)}, 1);
}

}  // namespace

TEST_CASE("gauss tensor rules") {
  const auto q1 = gauss_tensor(1);
  REQUIRE(q1.size() == 1);
  CHECK((q1.nodes[0] - Vec2(0.5, 0.5)).norm() < 1e-15);
  CHECK(q1.weights[0] == doctest::Approx(1.0));

  const auto& g2 = gauss_legendre(2);
  CHECK(g2.nodes[0] == doctest::Approx(0.5 - 0.5 / std::sqrt(3.0)));
  CHECK(g2.nodes[1] == doctest::Approx(0.5 + 0.5 / std::sqrt(3.0)));
  CHECK(integrate(gauss_tensor(2), [](const Vec2& x) { return std::pow(x.x() * x.y(), 3); }) ==
        doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  for (int n = 1; n <= 30; ++n) {
    const auto q = gauss_tensor(n);
    CHECK(integrate(q, [](const Vec2&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-13));
    const int p = 2 * n - 1;
    CHECK(integrate(q, [p](const Vec2& x) { return std::pow(x.x(), p) * std::pow(x.y(), p); }) ==
          doctest::Approx(1.0 / ((p + 1.0) * (p + 1.0))).epsilon(1e-12));
  }
  CHECK_THROWS(gauss_tensor(0));
  CHECK_THROWS(gauss_tensor(31));
}

TEST_CASE("duffy corner singular integral") {
  const double exact = 2.0 * std::log(1.0 + std::sqrt(2.0));
  const auto q = duffy_singular(12, Vec2(0.0, 0.0));
  CHECK(std::abs((integrate(q, [](const Vec2& x) { return 1.0 / x.norm(); })) - (exact)) < 1e-6);
}

TEST_CASE("duffy centre singularity is four scaled corner integrals") {
  // Each quarter square of side 1/2 contributes (1/2) * 2 ln(1 + sqrt 2).
  const double exact = 4.0 * 0.5 * 2.0 * std::log(1.0 + std::sqrt(2.0));
  const auto q = duffy_singular(12, Vec2(0.5, 0.5));
  CHECK(integrate(q, [](const Vec2& x) { return 1.0 / (x - Vec2(0.5, 0.5)).norm(); }) ==
        doctest::Approx(exact).epsilon(1e-8));
}

TEST_CASE("duffy rules integrate smooth polynomials like gauss") {
  auto f = [](const Vec2& x) { return 1.0 + x.x() * x.x() * x.y() - 3.0 * std::pow(x.y(), 4) + x.x() * x.y(); };
  const double ref = integrate(gauss_tensor(6), f);
  for (const Vec2 xi0 : {Vec2(0.3, 0.7), Vec2(0.0, 0.5), Vec2(1.0, 1.0), Vec2(0.5, 0.5)})
    CHECK(integrate(duffy_singular(8, xi0), f) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("finite part on a flat square lamina") {
  // For a flat lamina with constant density the hypersingular kernel H(x, y, m)
  // integrates to the normal derivative of the solid angle; at the centre of a
  // square of side a, the finite part is -n * (perimeter line integral) / (4 pi).
  // Oracle: F = -(1/4pi) * oint (1/rho) dtheta around the square boundary,
  // = -(1/4pi) * 8 * ln(1 + sqrt 2) * 2 / a.
  const double a = 1.0;
  const auto map = square(a);
  const auto fp = finite_part_hypersingular(map, Vec2(0.5, 0.5), 16, 16);
  const Vec3 total = fp.value().rowwise().sum();
  // Independent oracle: Hadamard finite part over the plane of 1/(4 pi r^3)
  // minus the exterior of the square: -∫_{outside} 1/(4 pi r^3) dA.
  double outside = 0.0;
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    const double th = (k + 0.5) * 2.0 * M_PI / n;
    const double rho_edge = 0.5 * a / std::max(std::abs(std::cos(th)), std::abs(std::sin(th)));
    outside += (1.0 / rho_edge) * (2.0 * M_PI / n);
  }
  const double expected = -outside / (4.0 * M_PI);
  CHECK(std::abs(total.x()) < 1e-10);
  CHECK(std::abs(total.y()) < 1e-10);
  CHECK(total.z() == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("finite part scales as 1/s for constant density") {
  const Vec3 v1 = finite_part_hypersingular(square(1.0), Vec2(0.4, 0.55), 16, 16).value().rowwise().sum();
  const Vec3 v3 = finite_part_hypersingular(square(3.0), Vec2(0.4, 0.55), 16, 16).value().rowwise().sum();
  CHECK((v3 - v1 / 3.0).norm() < 1e-8 * v1.norm());
}

TEST_CASE("finite part of a density vanishing quadratically is an ordinary integral") {
  // Density w(y) = |y - x0|^2 on a flat square cancels the r^-3 singularity;
  // expand in the Q1 basis is impossible, so use a 2x2-stretched Q2 cell where
  // |y - x0|^2 is reproduced exactly by the biquadratic shape functions.
  std::vector<Vec3> sup;
  for (int b = 0; b <= 2; ++b)
    for (int a = 0; a <= 2; ++a) sup.emplace_back(0.5 * a, 0.5 * b, 0.0);
  const CellMap map(sup, 2);
  const Vec2 xi0(0.5, 0.5);
  const Vec3 x0 = map.position(xi0);
  const auto fp = finite_part_hypersingular(map, xi0, 24, 24);
  Vec3 val = Vec3::Zero();
  for (int j = 0; j < 9; ++j) val += fp.value().col(j) * (sup[j] - x0).squaredNorm();
  // Oracle: ∫ r^2 * n / (4 pi r^3) dA = n/(4 pi) ∫ 1/r dA = n/(4 pi) * 4 * 0.5 * 2 ln(1 + sqrt 2).
  const double ref = 4.0 * 0.5 * 2.0 * std::log(1.0 + std::sqrt(2.0)) / (4.0 * M_PI);
  CHECK(val.z() == doctest::Approx(ref).epsilon(1e-6));
  CHECK(std::abs(val.x()) < 1e-9);
}

TEST_CASE("finite part is invariant under a stretched parametrization") {
  // The same physical 2 x 1 rectangle parametrized directly.
  const auto map = square(1.0, 2.0);
  const Vec3 v = finite_part_hypersingular(map, Vec2(0.5, 0.5), 16, 16).value().rowwise().sum();
  double outside = 0.0;
  const int n = 8000;
  for (int k = 0; k < n; ++k) {
    const double th = (k + 0.5) * 2.0 * M_PI / n;
    const double rho = std::min(1.0 / std::max(std::abs(std::cos(th)), 1e-300), 0.5 / std::max(std::abs(std::sin(th)), 1e-300));
    outside += (1.0 / rho) * (2.0 * M_PI / n);
  }
  CHECK(v.z() == doctest::Approx(-outside / (4.0 * M_PI)).epsilon(1e-5));
}

TEST_CASE("cauchy single layer gradient of a flat lamina has no normal part at the centre") {
  const auto map = square(1.0);
  const Vec3 g = cauchy_single_layer(map, Vec2(0.5, 0.5), [](const Vec2&, const MapSample& s) { return s.jacobian; }, 16, 16);
  CHECK(g.norm() < 1e-10);
  // Linear density: in-plane principal value equals the oracle from the exterior line integral.
  const Vec3 gl = cauchy_single_layer(
      map, Vec2(0.5, 0.5), [](const Vec2&, const MapSample& s) { return s.position.x() * s.jacobian; }, 16, 16);
  double ref = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = (i + 0.5) / n - 0.5, y = (j + 0.5) / n - 0.5;
      ref += x * x / (4.0 * M_PI * std::pow(x * x + y * y, 1.5)) / (double(n) * n);
    }
  CHECK(gl.x() == doctest::Approx(ref).epsilon(2e-3));
}
