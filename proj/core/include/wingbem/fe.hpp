//
// wingbem -- Tensor-product Lagrange basis and isoparametric cell maps.
//
#pragma once

#include "wingbem/types.hpp"

#include <array>
#include <vector>

namespace wingbem {

/// Lagrange polynomials on equispaced nodes k/r of [0,1], r in {1,2,3}.
class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(int degree);
  int degree() const { return r_; }
  int size() const { return r_ + 1; }
  /// Values, first and second derivatives of all r+1 polynomials at t.
  void eval(double t, double* val, double* d1 = nullptr, double* d2 = nullptr) const;

 private:
  int r_;
  std::array<double, 4> nodes_{};
};

/// Local index of the tensor node (a along xi, b along eta).
inline int tensor_index(int a, int b, int degree) { return a + (degree + 1) * b; }

struct MapSample {
  Vec3 position;
  Vec3 a_xi, a_eta;
  /// a_xi x a_eta: unit normal times the surface Jacobian.
  Vec3 m;
  double jacobian;
  Vec3 unit_normal;
};

struct MapSecondDerivatives {
  Vec3 xx, xe, ee;
};

/**
 * Isoparametric map of a quadrilateral cell through its (r+1)^2 support
 * points, stored xi-fastest. The normal a_xi x a_eta is the cell orientation.
 */
class CellMap {
 public:
  CellMap(std::vector<Vec3> support, int degree);

  int degree() const { return basis_.degree(); }
  int n_local() const { return static_cast<int>(support_.size()); }
  const std::vector<Vec3>& support() const { return support_; }

  MapSample sample(const Vec2& xi) const;
  Vec3 position(const Vec2& xi) const;
  MapSecondDerivatives second_derivatives(const Vec2& xi) const;

  /// Shape function values (n_local) at xi.
  void shape_values(const Vec2& xi, double* out) const;
  /// Shape function values and reference gradients.
  void shape_gradients(const Vec2& xi, double* val, double* dxi, double* deta) const;

  /// Surface gradients of all shape functions at xi (3 x n_local, column per function).
  void surface_gradients(const Vec2& xi, const MapSample& s, Eigen::Matrix3Xd& out) const;

  Vec3 centroid() const;
  /// Largest distance between any two corner/support points.
  double diameter() const;

 private:
  std::vector<Vec3> support_;
  LagrangeBasis1D basis_;
};

}  // namespace wingbem
