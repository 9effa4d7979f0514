//
// wingbem -- Tensor-product Lagrange basis and isoparametric cell maps.
//
#include "wingbem/fe.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace wingbem {

LagrangeBasis1D::LagrangeBasis1D(int degree) : r_(degree) {
  if (degree < 1 || degree > 3) throw DomainError("Lagrange degree must be 1, 2 or 3");
  for (int k = 0; k <= r_; ++k) nodes_[k] = static_cast<double>(k) / r_;
}

void LagrangeBasis1D::eval(double t, double* val, double* d1, double* d2) const {
  const int n = r_ + 1;
  for (int k = 0; k < n; ++k) {
    double denom = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != k) denom *= nodes_[k] - nodes_[m];
    double v = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != k) v *= t - nodes_[m];
    val[k] = v / denom;
    if (d1) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == k) continue;
        double p = 1.0;
        for (int l = 0; l < n; ++l)
          if (l != k && l != m) p *= t - nodes_[l];
        s += p;
      }
      d1[k] = s / denom;
    }
    if (d2) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == k) continue;
        for (int l = 0; l < n; ++l) {
          if (l == k || l == m) continue;
          double p = 1.0;
          for (int q = 0; q < n; ++q)
            if (q != k && q != m && q != l) p *= t - nodes_[q];
          s += p;
        }
      }
      d2[k] = s / denom;
    }
  }
}

CellMap::CellMap(std::vector<Vec3> support, int degree)
    : support_(std::move(support)), basis_(degree) {
  if (static_cast<int>(support_.size()) != (degree + 1) * (degree + 1)) {
    throw DomainError("CellMap: support point count does not match degree");
  }
}

MapSample CellMap::sample(const Vec2& xi) const {
  const int n = basis_.size();
  double vx[4], dx[4], ve[4], de[4];
  basis_.eval(xi.x(), vx, dx);
  basis_.eval(xi.y(), ve, de);
  MapSample s;
  s.position.setZero();
  s.a_xi.setZero();
  s.a_eta.setZero();
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const Vec3& X = support_[a + n * b];
      s.position += vx[a] * ve[b] * X;
      s.a_xi += dx[a] * ve[b] * X;
      s.a_eta += vx[a] * de[b] * X;
    }
  }
  s.m = s.a_xi.cross(s.a_eta);
  s.jacobian = s.m.norm();
  s.unit_normal = s.jacobian > 0.0 ? Vec3(s.m / s.jacobian) : Vec3::Zero();
  return s;
}

Vec3 CellMap::position(const Vec2& xi) const {
  const int n = basis_.size();
  double vx[4], ve[4];
  basis_.eval(xi.x(), vx);
  basis_.eval(xi.y(), ve);
  Vec3 p = Vec3::Zero();
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) p += vx[a] * ve[b] * support_[a + n * b];
  return p;
}

MapSecondDerivatives CellMap::second_derivatives(const Vec2& xi) const {
  const int n = basis_.size();
  double vx[4], dx[4], ddx[4], ve[4], de[4], dde[4];
  basis_.eval(xi.x(), vx, dx, ddx);
  basis_.eval(xi.y(), ve, de, dde);
  MapSecondDerivatives d{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const Vec3& X = support_[a + n * b];
      d.xx += ddx[a] * ve[b] * X;
      d.xe += dx[a] * de[b] * X;
      d.ee += vx[a] * dde[b] * X;
    }
  }
  return d;
}

void CellMap::shape_values(const Vec2& xi, double* out) const {
  const int n = basis_.size();
  double vx[4], ve[4];
  basis_.eval(xi.x(), vx);
  basis_.eval(xi.y(), ve);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) out[a + n * b] = vx[a] * ve[b];
}

void CellMap::shape_gradients(const Vec2& xi, double* val, double* dxi, double* deta) const {
  const int n = basis_.size();
  double vx[4], dx[4], ve[4], de[4];
  basis_.eval(xi.x(), vx, dx);
  basis_.eval(xi.y(), ve, de);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      val[a + n * b] = vx[a] * ve[b];
      dxi[a + n * b] = dx[a] * ve[b];
      deta[a + n * b] = vx[a] * de[b];
    }
  }
}

void CellMap::surface_gradients(const Vec2& xi, const MapSample& s, Eigen::Matrix3Xd& out) const {
  const int nl = n_local();
  double val[16], dxi[16], deta[16];
  shape_gradients(xi, val, dxi, deta);
  const double g11 = s.a_xi.dot(s.a_xi), g12 = s.a_xi.dot(s.a_eta), g22 = s.a_eta.dot(s.a_eta);
  const double det = g11 * g22 - g12 * g12;
  const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;
  // Contravariant base vectors.
  const Vec3 c1 = i11 * s.a_xi + i12 * s.a_eta;
  const Vec3 c2 = i12 * s.a_xi + i22 * s.a_eta;
  out.resize(3, nl);
  for (int k = 0; k < nl; ++k) out.col(k) = dxi[k] * c1 + deta[k] * c2;
}

Vec3 CellMap::centroid() const { return position(Vec2(0.5, 0.5)); }

double CellMap::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i)
    for (std::size_t j = i + 1; j < support_.size(); ++j)
      d = std::max(d, (support_[i] - support_[j]).norm());
  return d;
}

}  // namespace wingbem
