//
// wingbem -- Reference-square quadrature: Gauss, Duffy and finite-part rules.
//
#include "wingbem/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace wingbem {

namespace {

GaussLegendre1D make_gauss_legendre(int n) {
  GaussLegendre1D g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    // Map from [-1,1] to [0,1], ascending order.
    g.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    g.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

struct Side {
  Vec2 a, b;  // counter-clockwise endpoints
};

const Side kSides[4] = {{Vec2(0, 0), Vec2(1, 0)},
                        {Vec2(1, 0), Vec2(1, 1)},
                        {Vec2(1, 1), Vec2(0, 1)},
                        {Vec2(0, 1), Vec2(0, 0)}};

double cross2(const Vec2& p, const Vec2& q) { return p.x() * q.y() - p.y() * q.x(); }

/// Polar sectors around an interior point: for each side, the theta range and ρ̂(θ).
struct Sector {
  double theta0, theta1;
  double h;        // distance from xi0 to the side line
  double theta_n;  // direction of the side's outward normal
};

std::vector<Sector> polar_sectors(const Vec2& xi0) {
  const double margin = 1e-12;
  if (!(xi0.x() > margin && xi0.x() < 1.0 - margin && xi0.y() > margin && xi0.y() < 1.0 - margin)) {
    std::ostringstream os;
    os << "finite-part rule requires an interior point, got (" << xi0.x() << ", " << xi0.y() << ")";
    throw QuadratureError(os.str());
  }
  std::vector<Sector> out;
  const double normals[4] = {-0.5 * pi, 0.0, 0.5 * pi, pi};
  const double dist[4] = {xi0.y(), 1.0 - xi0.x(), 1.0 - xi0.y(), xi0.x()};
  for (int s = 0; s < 4; ++s) {
    const Vec2 pa = kSides[s].a - xi0, pb = kSides[s].b - xi0;
    double t0 = std::atan2(pa.y(), pa.x());
    double t1 = std::atan2(pb.y(), pb.x());
    while (t1 <= t0) t1 += 2.0 * pi;
    double tn = normals[s];
    while (tn < t0) tn += 2.0 * pi;
    while (tn > t1) tn -= 2.0 * pi;
    out.push_back({t0, t1, dist[s], tn});
  }
  return out;
}

constexpr double kInv4Pi = 1.0 / (4.0 * pi);

}  // namespace

const GaussLegendre1D& gauss_legendre(int n) {
  if (n < 1 || n > 64) throw QuadratureError("gauss_legendre: order must be in [1,64]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre1D>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre1D>(make_gauss_legendre(n));
  return *slot;
}

QuadRule gauss_tensor(int n) {
  if (n < 1 || n > 30) throw QuadratureError("gauss_tensor: order must be in [1,30]");
  const auto& g = gauss_legendre(n);
  QuadRule q;
  q.nodes.reserve(n * n);
  q.weights.reserve(n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      q.nodes.emplace_back(g.nodes[i], g.nodes[j]);
      q.weights.push_back(g.weights[i] * g.weights[j]);
    }
  }
  return q;
}

QuadRule duffy_singular(int n, const Vec2& xi0) {
  if (!(xi0.x() >= 0.0 && xi0.x() <= 1.0 && xi0.y() >= 0.0 && xi0.y() <= 1.0)) {
    throw QuadratureError("duffy_singular: singular point outside the reference square");
  }
  const auto& g = gauss_legendre(n);
  QuadRule q;
  for (const auto& side : kSides) {
    const Vec2 e1 = side.a - xi0, e2 = side.b - side.a;
    const double area2 = std::abs(cross2(e1, e2));
    if (area2 < 1e-14) continue;
    for (int i = 0; i < n; ++i) {
      const double s = g.nodes[i];
      for (int j = 0; j < n; ++j) {
        const double t = g.nodes[j];
        q.nodes.push_back(xi0 + s * (e1 + t * e2));
        q.weights.push_back(g.weights[i] * g.weights[j] * s * area2);
      }
    }
  }
  return q;
}

const QuadRule& duffy_cached(int n, const Vec2& xi0) {
  static std::mutex mutex;
  static std::map<std::tuple<int, long long, long long>, std::unique_ptr<QuadRule>> cache;
  const auto key = std::make_tuple(n, std::llround(xi0.x() * 1e9), std::llround(xi0.y() * 1e9));
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<QuadRule>(duffy_singular(n, xi0));
  return *slot;
}

FinitePartResult finite_part_hypersingular(const CellMap& map, const Vec2& xi0, int n_theta,
                                           int n_rho) {
  const auto sectors = polar_sectors(xi0);
  const int nl = map.n_local();
  FinitePartResult res;
  res.regular = Eigen::Matrix3Xd::Zero(3, nl);
  res.correction = Eigen::Matrix3Xd::Zero(3, nl);

  const MapSample s0 = map.sample(xi0);
  const MapSecondDerivatives d2 = map.second_derivatives(xi0);
  const Vec3 x0 = s0.position;
  const Vec3 m0 = s0.m;
  const Vec3 m_xi = d2.xx.cross(s0.a_eta) + s0.a_xi.cross(d2.xe);
  const Vec3 m_eta = d2.xe.cross(s0.a_eta) + s0.a_xi.cross(d2.ee);
  double psi0[16], dpsi_xi[16], dpsi_eta[16], psi[16];
  map.shape_gradients(xi0, psi0, dpsi_xi, dpsi_eta);

  const auto& gt = gauss_legendre(n_theta);
  const auto& gr = gauss_legendre(n_rho);
  Eigen::Matrix3Xd fm2(3, nl), fm1(3, nl);
  for (const auto& sec : sectors) {
    const double dth = sec.theta1 - sec.theta0;
    for (int it = 0; it < n_theta; ++it) {
      const double th = sec.theta0 + dth * gt.nodes[it];
      const double wt = dth * gt.weights[it];
      const double c = std::cos(th), sn = std::sin(th);
      const double rho_hat = sec.h / std::cos(th - sec.theta_n);
      const Vec3 A = c * s0.a_xi + sn * s0.a_eta;
      const Vec3 B = 0.5 * c * c * d2.xx + c * sn * d2.xe + 0.5 * sn * sn * d2.ee;
      const Vec3 m1 = c * m_xi + sn * m_eta;
      const double An = A.norm(), A2 = An * An, A3 = A2 * An;
      const double AB = A.dot(B);
      const double D2 = B.dot(m0) + A.dot(m1);
      const Vec3 core1 = m1 - 3.0 * D2 / A2 * A - 3.0 * AB / A2 * m0;
      for (int k = 0; k < nl; ++k) {
        const double p1 = dpsi_xi[k] * c + dpsi_eta[k] * sn;
        fm2.col(k) = kInv4Pi / A3 * psi0[k] * m0;
        fm1.col(k) = kInv4Pi / A3 * (psi0[k] * core1 + p1 * m0);
      }
      const double beta = 1.0 / An;
      const double gamma = -AB / (A2 * A2);
      // Analytic line terms.
      const double lnr = std::log(rho_hat / beta);
      const double k2 = gamma / (beta * beta) + 1.0 / rho_hat;
      res.correction += wt * (lnr * fm1 - k2 * fm2);
      // Regularized radial integral.
      for (int ir = 0; ir < n_rho; ++ir) {
        const double rho = rho_hat * gr.nodes[ir];
        const double wr = rho_hat * gr.weights[ir];
        const Vec2 xi = xi0 + rho * Vec2(c, sn);
        const MapSample s = map.sample(xi);
        map.shape_values(xi, psi);
        const Vec3 d = s.position - x0;
        const double r2 = d.squaredNorm();
        const double r = std::sqrt(r2);
        const Vec3 hk = kInv4Pi / (r2 * r) * (s.m - 3.0 * d.dot(s.m) / r2 * d);
        const double inv_r = 1.0 / rho, inv_r2 = inv_r * inv_r;
        for (int k = 0; k < nl; ++k) {
          res.regular.col(k) +=
              wt * wr * (psi[k] * rho * hk - fm2.col(k) * inv_r2 - fm1.col(k) * inv_r);
        }
      }
    }
  }
  return res;
}

Vec3 cauchy_single_layer(const CellMap& map, const Vec2& xi0, const SurfaceDensity& w,
                         int n_theta, int n_rho) {
  const auto sectors = polar_sectors(xi0);
  const MapSample s0 = map.sample(xi0);
  const double w0 = w(xi0, s0);
  const Vec3 x0 = s0.position;
  const auto& gt = gauss_legendre(n_theta);
  const auto& gr = gauss_legendre(n_rho);
  Vec3 total = Vec3::Zero();
  for (const auto& sec : sectors) {
    const double dth = sec.theta1 - sec.theta0;
    for (int it = 0; it < n_theta; ++it) {
      const double th = sec.theta0 + dth * gt.nodes[it];
      const double wt = dth * gt.weights[it];
      const double c = std::cos(th), sn = std::sin(th);
      const double rho_hat = sec.h / std::cos(th - sec.theta_n);
      const Vec3 A = c * s0.a_xi + sn * s0.a_eta;
      const double An = A.norm();
      const Vec3 fm1 = kInv4Pi * w0 / (An * An * An) * A;
      total += wt * std::log(rho_hat * An) * fm1;
      for (int ir = 0; ir < n_rho; ++ir) {
        const double rho = rho_hat * gr.nodes[ir];
        const double wr = rho_hat * gr.weights[ir];
        const Vec2 xi = xi0 + rho * Vec2(c, sn);
        const MapSample s = map.sample(xi);
        const Vec3 d = s.position - x0;
        const double r = d.norm();
        const Vec3 f = kInv4Pi * w(xi, s) * rho / (r * r * r) * d;
        total += wt * wr * (f - fm1 / rho);
      }
    }
  }
  return total;
}

}  // namespace wingbem
