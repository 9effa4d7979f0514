//
// wingbem -- Galerkin gradient and wake relaxation tests.
//
#include "wingbem/wake.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace wingbem;

namespace {

GradientProblem sphere_problem(const DofLayout& d) {
  GradientProblem pb;
  pb.density.resize(d.size());
  for (int i = 0; i < d.size(); ++i) pb.density[i] = 0.5 * d.position[i].x() / d.position[i].norm();
  pb.neumann = [](const FeCell&, const Vec2&, const MapSample& s) { return -s.unit_normal.x(); };
  pb.outer = CellSet::body;
  pb.free_factor = 2.0;
  return pb;
}

Vec3 sphere_gradient(const Vec3& p) {
  const Vec3 n = p.normalized();
  return Vec3(0.5, 0, 0) - 1.5 * n.x() * n;
}

std::vector<std::vector<Vec3>> straight_lines(int n_lines, int n_nodes, double d) {
  std::vector<std::vector<Vec3>> out(n_lines);
  for (int p = 0; p < n_lines; ++p)
    for (int k = 0; k < n_nodes; ++k) out[p].emplace_back(k * d, 0.3 * p, 0.0);
  return out;
}

std::vector<std::vector<Vec3>> uniform_velocity(const std::vector<std::vector<Vec3>>& nodes, const Vec3& v) {
  std::vector<std::vector<Vec3>> out;
  for (const auto& l : nodes) out.emplace_back(l.size(), v);
  return out;
}

}  // namespace

TEST_CASE("constant density has zero gradient") {
  const auto d = distribute_dofs(make_sphere_mesh(1.0, 12), 1);
  GradientProblem pb;
  pb.density = Eigen::VectorXd::Ones(d.size());
  pb.outer = CellSet::body;
  pb.free_factor = 2.0;
  const auto g = galerkin_gradient(d, pb);
  CHECK(g.u.cwiseAbs().maxCoeff() < 1e-3);
  CHECK(g.residual < 1e-10);
}

TEST_CASE("sphere surface gradient") {
  const auto d = distribute_dofs(make_sphere_mesh(1.0, 4), 2);
  const auto pb = sphere_problem(d);
  const auto g = galerkin_gradient(d, pb);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.dofs.size(); ++k) {
    const Vec3 p = d.position[g.dofs[k]];
    const Vec3 n = p.normalized();
    if (std::abs(n.x()) > 0.9) continue;
    const Vec3 ex = sphere_gradient(p);
    const Vec3 num = g.u.row(static_cast<Eigen::Index>(k)).transpose();
    const Vec3 ext = ex - ex.dot(n) * n, nut = num - num.dot(n) * n;
    worst = std::max(worst, (nut - ext).norm() / 1.5);
  }
  CHECK(worst < 0.05);

  GradientOptions hi;
  hi.outer_order = 10;
  hi.inner_order = 10;
  const auto g2 = galerkin_gradient(d, pb, hi);
  CHECK((g2.u - g.u).cwiseAbs().maxCoeff() < 0.01 * g.u.cwiseAbs().maxCoeff());
}

TEST_CASE("interior box reproduces the gradient of a linear field") {
  // Interior Dirichlet/Neumann data of φ = a·x on a closed flat-faceted box; σ = −1
  // selects the interior domain whose outward normal is the geometry normal.
  const auto d = distribute_dofs(make_box_mesh(Vec3(0, 0, 0), Vec3(1, 1, 1), 4), 1);
  const Vec3 a(0.4, -1.0, 0.7);
  GradientProblem pb;
  pb.density.resize(d.size());
  for (int i = 0; i < d.size(); ++i) pb.density[i] = a.dot(d.position[i]);
  pb.neumann = [a](const FeCell&, const Vec2&, const MapSample& s) { return a.dot(s.unit_normal); };
  pb.sigma = -1.0;
  pb.outer = CellSet::body;
  pb.free_factor = 2.0;
  for (int c = 0; c < d.n_body_cells; ++c) {
    const Vec3 g = hypersingular_bie_value(d, pb, c, Vec2(0.5, 0.5));
    CHECK((2.0 * g - a).norm() < 1e-3);
  }
}

TEST_CASE("relax step examples") {
  const double d = 0.15;
  const auto lines = straight_lines(3, 6, 0.2);
  const auto out = relax_step(lines, uniform_velocity(lines, Vec3(2, 0, 0)), d, 1.0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    CHECK((out[p][0] - lines[p][0]).norm() == 0.0);
    for (std::size_t k = 1; k < out[p].size(); ++k) {
      const Vec3 s = out[p][k] - out[p][k - 1];
      CHECK(s.norm() == doctest::Approx(d).epsilon(1e-13));
      CHECK(s.normalized().isApprox(Vec3(1, 0, 0), 1e-14));
    }
  }
  const double t = 10.0 * M_PI / 180.0;
  const auto tilted = relax_step(lines, uniform_velocity(lines, Vec3(std::cos(t), 0, std::sin(t))), d, 1.0);
  for (const auto& l : tilted)
    for (std::size_t k = 1; k < l.size(); ++k) {
      const Vec3 s = l[k] - l[k - 1];
      CHECK(std::abs(s.norm() - d) < 1e-12);
      CHECK(std::atan2(s.z(), s.x()) == doctest::Approx(t).epsilon(1e-12));
    }
  CHECK_THROWS_AS(relax_step(lines, uniform_velocity(lines, Vec3::Zero()), d, 1.0), WakeError);
}

TEST_CASE("relax step marches with the predecessor velocity") {
  const auto lines = straight_lines(1, 3, 1.0);
  std::vector<std::vector<Vec3>> v = {{Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0)}};
  const auto pred = relax_step(lines, v, 1.0, 1.0, MarchVelocity::predecessor);
  CHECK(pred[0][1].isApprox(Vec3(1, 0, 0)));
  CHECK(pred[0][2].isApprox(Vec3(1, 0, 1)));
  const auto own = relax_step(lines, v, 1.0, 1.0, MarchVelocity::own);
  CHECK(own[0][1].isApprox(Vec3(0, 0, 1)));
  CHECK(own[0][2].isApprox(Vec3(0, 1, 1)));
  CHECK(std::abs(max_alignment_angle_deg(pred, v)) < 1e-10);
}

TEST_CASE("pathline separation") {
  CHECK(min_pathline_separation(straight_lines(2, 4, 0.2)) == std::numeric_limits<double>::infinity());
  CHECK(min_pathline_separation(straight_lines(4, 4, 0.2)) == doctest::Approx(0.6));
}

TEST_CASE("symmetric wing keeps a planar wake") {
  WingSpec s;
  s.alpha_deg = 0.0;
  WakeSpec w;
  w.length = 2.0;
  w.cell_length = 0.5;
  RefinementPolicy p;
  p.n_uniform = 1;
  auto d = distribute_dofs(refine(build_initial_grid(s, w), p), 1);
  FlowConditions f;
  auto sys = assemble_system(d, f);
  const VelocityRecovery rec(d, f);
  RelaxOptions o;
  o.max_iterations = 4;
  const auto r = relaxation_loop(sys, d, rec, f, o);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  for (const auto& l : d.wake_geometry())
    for (const auto& x : l) CHECK(std::abs(x.z()) < 1e-6);
}
