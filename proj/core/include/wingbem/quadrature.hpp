//
// wingbem -- Reference-square quadrature: Gauss, Duffy and finite-part rules.
//
#pragma once

#include "wingbem/fe.hpp"
#include "wingbem/types.hpp"

#include <functional>
#include <vector>

namespace wingbem {

struct QuadRule {
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  std::size_t size() const { return weights.size(); }
};

struct GaussLegendre1D {
  std::vector<double> nodes;    // on [0,1]
  std::vector<double> weights;  // sum to 1
};

/// Cached Gauss-Legendre rule on [0,1], 1 <= n <= 64.
const GaussLegendre1D& gauss_legendre(int n);

/// Tensor Gauss rule with n points per direction on [0,1]^2, 1 <= n <= 30.
QuadRule gauss_tensor(int n);

/// Duffy rule for a point singularity at xi0 (closed square); at most 4 n^2 nodes.
QuadRule duffy_singular(int n, const Vec2& xi0);

/// Thread-safe cached Duffy rule (xi0 keyed to 1e-9).
const QuadRule& duffy_cached(int n, const Vec2& xi0);

/// Finite part split into the regularized double integral and the analytic line terms.
struct FinitePartResult {
  Eigen::Matrix3Xd regular;
  Eigen::Matrix3Xd correction;
  Eigen::Matrix3Xd value() const { return regular + correction; }
};

/**
 * Hadamard finite part of  ∫ ψ_j(ξ) H(x0, y(ξ), a_ξ × a_η) dξ  for every local
 * shape function ψ_j of the cell, with H the Laplace hypersingular kernel and
 * x0 = y(xi0) strictly inside the cell. The O(ρ^-2) and O(ρ^-1) polar terms
 * are subtracted and integrated analytically against a spherical exclusion.
 */
FinitePartResult finite_part_hypersingular(const CellMap& map, const Vec2& xi0, int n_theta,
                                           int n_rho);

/// Density for the strongly singular single-layer gradient; must include the Jacobian.
using SurfaceDensity = std::function<double(const Vec2& xi, const MapSample& s)>;

/// Cauchy principal value of  ∫ ∇_x G(x0, y(ξ)) w(ξ) dξ  with x0 = y(xi0) inside the cell.
Vec3 cauchy_single_layer(const CellMap& map, const Vec2& xi0, const SurfaceDensity& w,
                         int n_theta, int n_rho);

}  // namespace wingbem
