//
// wingbem -- Shared cell integration helpers (regular caches, near-field subdivision).
//
#pragma once

#include "wingbem/dofs.hpp"
#include "wingbem/quadrature.hpp"

#include <vector>

namespace wingbem::detail {

/// Regular-rule samples of one cell: position, m = a_xi x a_eta, weight.
struct CellSamples {
  std::vector<Vec3> y;
  std::vector<Vec3> m;
  std::vector<double> w;
  Vec3 centroid;
  double diameter = 0.0;
  double radius = 0.0;  // max distance from centroid to a support point
};

struct RegularTable {
  QuadRule rule;
  Eigen::MatrixXd shape;  // n_q x n_local
  std::vector<CellSamples> cells;
};

RegularTable build_regular_table(const DofLayout& dofs, int order);

/// Reference-lattice image of x when it coincides with a support point of the cell.
bool find_singular_point(const FeCell& cell, const CellSamples& cs, const Vec3& x, double tol, Vec2& xi0);

/**
 * Calls f(xi, sample, weight) over the cell with Gauss order n, recursively
 * splitting the reference square while the distance from x to a sub-cell is
 * below factor * sub-cell diameter (at most max_levels splits).
 */
template <class F>
void integrate_near(const CellMap& map, const Vec3& x, double factor, int max_levels, int n, F&& f) {
  const auto& g = gauss_legendre(n);
  struct Box {
    double x0, x1, y0, y1;
    int level;
  };
  std::vector<Box> stack{{0.0, 1.0, 0.0, 1.0, 0}};
  while (!stack.empty()) {
    const Box b = stack.back();
    stack.pop_back();
    bool split = false;
    if (b.level < max_levels) {
      double dmin = 1e300, diam = 0.0;
      Vec3 pts[9];
      int k = 0;
      for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c)
          pts[k++] = map.position(Vec2(b.x0 + 0.5 * a * (b.x1 - b.x0), b.y0 + 0.5 * c * (b.y1 - b.y0)));
      for (int i = 0; i < 9; ++i) {
        dmin = std::min(dmin, (pts[i] - x).norm());
        for (int j = i + 1; j < 9; ++j) diam = std::max(diam, (pts[i] - pts[j]).norm());
      }
      split = dmin < factor * diam;
    }
    if (split) {
      const double xm = 0.5 * (b.x0 + b.x1), ym = 0.5 * (b.y0 + b.y1);
      stack.push_back({b.x0, xm, b.y0, ym, b.level + 1});
      stack.push_back({xm, b.x1, b.y0, ym, b.level + 1});
      stack.push_back({b.x0, xm, ym, b.y1, b.level + 1});
      stack.push_back({xm, b.x1, ym, b.y1, b.level + 1});
      continue;
    }
    const double area = (b.x1 - b.x0) * (b.y1 - b.y0);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const Vec2 xi(b.x0 + (b.x1 - b.x0) * g.nodes[i], b.y0 + (b.y1 - b.y0) * g.nodes[j]);
        f(xi, map.sample(xi), area * g.weights[i] * g.weights[j]);
      }
    }
  }
}

/// True when x is close enough to the cell to need near-field treatment.
inline bool is_near(const CellSamples& cs, const Vec3& x, double factor) {
  const double d = (x - cs.centroid).norm() - cs.radius;
  return d < factor * cs.diameter;
}

}  // namespace wingbem::detail
