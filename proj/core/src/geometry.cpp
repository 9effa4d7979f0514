//
// wingbem -- Analytic NACA 0012 wing surface.
//
#include "wingbem/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wingbem {

namespace {

constexpr double kThicknessRatio = 0.12;
constexpr double kA0 = 0.2969, kA1 = -0.1260, kA2 = -0.3516, kA3 = 0.2843;
constexpr double kA4Open = -0.1015;

double last_coefficient(TeClosure closure) {
  return closure == TeClosure::closed ? -(kA0 + kA1 + kA2 + kA3) : kA4Open;
}

/// Signed section ordinate as a function of s = 2v - 1 (sign(s) * t(s^2)), and its s-derivative.
void section_ordinate(double s, TeClosure closure, double& z, double& dz) {
  const double a4 = last_coefficient(closure);
  const double as = std::abs(s);
  const double k = 5.0 * kThicknessRatio;
  const double s2 = s * s, as3 = as * s2, as5 = as3 * s2, as7 = as5 * s2;
  if (closure == TeClosure::closed && as == 1.0) {
    z = 0.0;
  } else {
    z = k * (kA0 * s + kA1 * s * as + kA2 * s * as3 + kA3 * s * as5 + a4 * s * as7);
  }
  dz = k * (kA0 + 2.0 * kA1 * as + 4.0 * kA2 * as3 + 6.0 * kA3 * as5 + 8.0 * a4 * as7);
}

}  // namespace

void WingSpec::validate() const {
  auto fail = [](const std::string& msg) { throw DomainError("WingSpec: " + msg); };
  if (!(chord > 0.0)) fail("chord must be positive");
  if (!(span > 0.0)) fail("span must be positive");
  if (!(std::abs(alpha_deg) < 90.0)) fail("|alpha_deg| must be below 90");
  if (!(std::abs(sweep_deg) < 90.0)) fail("|sweep_deg| must be below 90");
}

double naca_half_thickness(double xc, TeClosure closure) {
  if (!(xc >= 0.0 && xc <= 1.0)) {
    std::ostringstream os;
    os << "naca_half_thickness: xc=" << xc << " outside [0,1]";
    throw DomainError(os.str());
  }
  if (closure == TeClosure::closed && xc == 1.0) return 0.0;
  const double a4 = last_coefficient(closure);
  return 5.0 * kThicknessRatio *
         (kA0 * std::sqrt(xc) + xc * (kA1 + xc * (kA2 + xc * (kA3 + xc * a4))));
}

WingGeometry::WingGeometry(const WingSpec& spec) : spec_(spec) {
  spec_.validate();
  const double c = spec_.chord, b = spec_.span;
  const double tmax = 0.06 * c;
  if (spec_.tip_cap == TipCap::rounded) {
    const double arc = 0.5 * pi * tmax;
    cap_u_ = arc / (b + 2.0 * arc);
  } else {
    cap_u_ = tmax / (b + 2.0 * tmax);
  }
  const double a = spec_.alpha_deg * pi / 180.0;
  const double s = spec_.sweep_deg * pi / 180.0;
  Eigen::Matrix3d sweep;
  sweep << std::cos(s), std::sin(s), 0.0, -std::sin(s), std::cos(s), 0.0, 0.0, 0.0, 1.0;
  Eigen::Matrix3d pitch;
  pitch << std::cos(a), 0.0, std::sin(a), 0.0, 1.0, 0.0, -std::sin(a), 0.0, std::cos(a);
  rotation_ = pitch * sweep;
}

void WingGeometry::local_eval(const Vec2& uv, Vec3* p, Vec3* du, Vec3* dv) const {
  const double u = uv.x(), v = uv.y();
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << "surface parameter (" << u << ", " << v << ") outside [0,1]^2";
    throw DomainError(os.str());
  }
  const double c = spec_.chord, b = spec_.span, uc = cap_u_;
  const double s = 2.0 * v - 1.0;
  const double sigma = s >= 0.0 ? 1.0 : -1.0;
  double zt, dzt;
  section_ordinate(s, spec_.te_closure, zt, dzt);
  const double X = c * s * s, dX = 4.0 * c * s;
  const double Z = c * zt, dZ = 2.0 * c * dzt;
  const double R = sigma * Z, dR = sigma * dZ;

  Vec3 P, Pu, Pv;
  if (u < uc || u > 1.0 - uc) {
    const bool left = u < uc;
    if (spec_.tip_cap == TipCap::rounded) {
      const double th = left ? 0.5 * pi * (1.0 - u / uc) : 0.5 * pi * (u - (1.0 - uc)) / uc;
      const double dth = left ? -0.5 * pi / uc : 0.5 * pi / uc;
      const double sy = left ? -1.0 : 1.0;
      const double st = std::sin(th), ct = std::cos(th);
      P = Vec3(X, sy * (0.5 * b + R * st), Z * ct);
      Pu = Vec3(0.0, sy * R * ct * dth, -Z * st * dth);
      Pv = Vec3(dX, sy * dR * st, dZ * ct);
    } else {
      const double f = left ? u / uc : (1.0 - u) / uc;
      const double df = left ? 1.0 / uc : -1.0 / uc;
      P = Vec3(X, left ? -0.5 * b : 0.5 * b, Z * f);
      Pu = Vec3(0.0, 0.0, Z * df);
      Pv = Vec3(dX, 0.0, dZ * f);
    }
  } else {
    const double w = b / (1.0 - 2.0 * uc);
    P = Vec3(X, -0.5 * b + w * (u - uc), Z);
    Pu = Vec3(0.0, w, 0.0);
    Pv = Vec3(dX, 0.0, dZ);
  }
  if (p) *p = rotation_ * P;
  if (du) *du = rotation_ * Pu;
  if (dv) *dv = rotation_ * Pv;
}

Vec3 WingGeometry::position(const Vec2& uv) const {
  Vec3 p;
  local_eval(uv, &p, nullptr, nullptr);
  return p;
}

void WingGeometry::derivatives(const Vec2& uv, Vec3& du, Vec3& dv) const {
  local_eval(uv, nullptr, &du, &dv);
}

Vec3 WingGeometry::normal(const Vec2& uv) const {
  Vec3 du, dv;
  local_eval(uv, nullptr, &du, &dv);
  Vec3 n = dv.cross(du);
  const double scale = std::max(1e-300, du.norm() * dv.norm());
  if (n.norm() > 1e-10 * scale && scale > 1e-300) return n.normalized();
  // Degenerate point (collapsed cap edge): take the limit from inside the patch side.
  const Vec2 centre(0.5, uv.y() >= 0.5 ? 0.75 : 0.25);
  for (double eps = 1e-9; eps < 0.5; eps *= 10.0) {
    const Vec2 q = uv + eps * (centre - uv);
    local_eval(q, nullptr, &du, &dv);
    n = dv.cross(du);
    if (n.norm() > 1e-8 * du.norm() * dv.norm() && n.norm() > 0.0) return n.normalized();
  }
  throw DomainError("normal undefined at degenerate surface parameter");
}

SurfaceSample WingGeometry::sample(const Vec2& uv) const {
  return SurfaceSample{position(uv), normal(uv), uv};
}

SurfaceSample WingGeometry::project(const Vec3& p, const Vec2& hint) const {
  if (!(hint.x() >= 0.0 && hint.x() <= 1.0 && hint.y() >= 0.0 && hint.y() <= 1.0)) {
    throw DomainError("project_to_surface: hint outside [0,1]^2");
  }
  Vec2 lo(0.0, hint.y() >= 0.5 ? 0.5 : 0.0), hi(1.0, hint.y() >= 0.5 ? 1.0 : 0.5);
  if (spec_.tip_cap == TipCap::flat) {
    if (hint.x() < cap_u_) {
      hi.x() = cap_u_;
    } else if (hint.x() > 1.0 - cap_u_) {
      lo.x() = 1.0 - cap_u_;
    } else {
      lo.x() = cap_u_;
      hi.x() = 1.0 - cap_u_;
    }
  }
  // The end lines u = 0 and u = 1 are folded tip edges: points on them stay on them.
  if (hint.x() == 0.0 || hint.x() == 1.0) lo.x() = hi.x() = hint.x();
  const double tol = 1e-14 * std::max(1.0, spec_.chord * spec_.chord);
  const double accept = 1e-7 * std::max(1.0, spec_.chord * spec_.chord);
  auto clamp = [&](Vec2 x) {
    return Vec2(std::clamp(x.x(), lo.x(), hi.x()), std::clamp(x.y(), lo.y(), hi.y()));
  };

  Vec2 x = clamp(hint);
  double lambda = 0.0;
  double best_grad = 1e300;
  Vec2 best = x;
  for (int it = 0; it < 200; ++it) {
    Vec3 P, du, dv;
    local_eval(x, &P, &du, &dv);
    const Vec3 r = P - p;
    const double f = 0.5 * r.squaredNorm();
    Vec2 g(du.dot(r), dv.dot(r));
    Vec2 pg = g;
    for (int k = 0; k < 2; ++k) {
      if ((x[k] <= lo[k] && g[k] > 0.0) || (x[k] >= hi[k] && g[k] < 0.0)) pg[k] = 0.0;
    }
    const double gn = pg.lpNorm<Eigen::Infinity>();
    if (gn < best_grad) {
      best_grad = gn;
      best = x;
    }
    if (gn < tol) return SurfaceSample{P, normal(x), x};

    // Hessian: Gauss-Newton part plus curvature terms from differenced derivatives.
    Eigen::Matrix2d H;
    H << du.dot(du), du.dot(dv), dv.dot(du), dv.dot(dv);
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      if (lo[k] == hi[k]) continue;
      Vec2 xs = x;
      const double step = (x[k] + h <= hi[k]) ? h : -h;
      xs[k] += step;
      Vec3 du2, dv2;
      local_eval(xs, nullptr, &du2, &dv2);
      H(0, k) += r.dot((du2 - du) / step);
      H(1, k) += r.dot((dv2 - dv) / step);
    }
    H = 0.5 * (H + H.transpose()).eval();

    bool free_k[2];
    for (int k = 0; k < 2; ++k) free_k[k] = pg[k] != 0.0 || (x[k] > lo[k] && x[k] < hi[k]);
    const double hscale = std::max(1e-300, H.diagonal().cwiseAbs().maxCoeff());
    bool accepted = false;
    for (int trial = 0; trial < 40 && !accepted; ++trial) {
      Eigen::Matrix2d A = H;
      A.diagonal().array() += lambda * hscale;
      for (int k = 0; k < 2; ++k) {
        if (!free_k[k]) {
          A.row(k).setZero();
          A.col(k).setZero();
          A(k, k) = 1.0;
        }
      }
      Vec2 rhs = -g;
      for (int k = 0; k < 2; ++k)
        if (!free_k[k]) rhs[k] = 0.0;
      Eigen::LDLT<Eigen::Matrix2d> ldlt(A);
      Vec2 step = ldlt.solve(rhs);
      const bool pd = ldlt.info() == Eigen::Success && ldlt.isPositive() && step.allFinite() &&
                      step.dot(rhs) > 0.0;
      if (!pd) {
        lambda = std::max(lambda * 10.0, 1e-12);
        continue;
      }
      const Vec2 xn = clamp(x + step);
      Vec3 Pn;
      local_eval(xn, &Pn, nullptr, nullptr);
      const double fn = 0.5 * (Pn - p).squaredNorm();
      if (fn <= f) {
        const bool stalled = (xn - x).norm() < 1e-15;
        x = xn;
        lambda *= 0.1;
        if (lambda < 1e-14) lambda = 0.0;
        accepted = true;
        if (stalled && fn == f) {
          if (gn < accept) return sample(x);
          break;
        }
      } else {
        lambda = std::max(lambda * 10.0, 1e-12);
      }
    }
    if (!accepted) break;
  }
  Vec3 P;
  local_eval(best, &P, nullptr, nullptr);
  if (best_grad < accept) return SurfaceSample{P, normal(best), best};
  std::ostringstream os;
  os << "project_to_surface did not converge (gradient " << best_grad << ")";
  throw ProjectionError(os.str(), best, best_grad);
}

SurfaceSample surface_point(const WingSpec& spec, double u, double v) {
  return WingGeometry(spec).sample(Vec2(u, v));
}

SurfaceSample project_to_surface(const WingSpec& spec, const Vec3& p, const Vec2& hint) {
  return WingGeometry(spec).project(p, hint);
}

}  // namespace wingbem
