//
// wingbem -- Shared cell integration helpers.
//
#include "integration.hpp"

namespace wingbem::detail {

RegularTable build_regular_table(const DofLayout& dofs, int order) {
  RegularTable t;
  t.rule = gauss_tensor(order);
  const int nq = static_cast<int>(t.rule.size());
  const int nl = (dofs.degree + 1) * (dofs.degree + 1);
  t.shape.resize(nq, nl);
  const LagrangeBasis1D basis(dofs.degree);
  for (int q = 0; q < nq; ++q) {
    double vx[4], ve[4];
    basis.eval(t.rule.nodes[q].x(), vx);
    basis.eval(t.rule.nodes[q].y(), ve);
    for (int b = 0; b <= dofs.degree; ++b)
      for (int a = 0; a <= dofs.degree; ++a) t.shape(q, tensor_index(a, b, dofs.degree)) = vx[a] * ve[b];
  }
  t.cells.resize(dofs.cells.size());
  for (std::size_t c = 0; c < dofs.cells.size(); ++c) {
    const auto& map = dofs.cells[c].map;
    auto& cs = t.cells[c];
    cs.y.resize(nq);
    cs.m.resize(nq);
    cs.w.resize(nq);
    for (int q = 0; q < nq; ++q) {
      const auto s = map.sample(t.rule.nodes[q]);
      cs.y[q] = s.position;
      cs.m[q] = s.m;
      cs.w[q] = t.rule.weights[q];
    }
    cs.centroid = map.centroid();
    cs.diameter = map.diameter();
    cs.radius = 0.0;
    for (const auto& p : map.support()) cs.radius = std::max(cs.radius, (p - cs.centroid).norm());
  }
  return t;
}

bool find_singular_point(const FeCell& cell, const CellSamples& cs, const Vec3& x, double tol, Vec2& xi0) {
  if ((x - cs.centroid).norm() > cs.radius + tol) return false;
  const int r = cell.map.degree();
  const auto& sup = cell.map.support();
  for (int b = 0; b <= r; ++b) {
    for (int a = 0; a <= r; ++a) {
      if ((sup[tensor_index(a, b, r)] - x).norm() < tol) {
        xi0 = Vec2(static_cast<double>(a) / r, static_cast<double>(b) / r);
        return true;
      }
    }
  }
  return false;
}

}  // namespace wingbem::detail
