//
// wingbem -- Mesh, cell map and DOF distribution tests.
//
#include "wingbem/dofs.hpp"
#include "wingbem/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace wingbem;

namespace {

SurfaceMesh baseline_grid(int uniform = 3) {
  WingSpec s;
  s.alpha_deg = 8.5;
  WakeSpec w;
  RefinementPolicy p;
  p.n_uniform = uniform;
  return refine(build_initial_grid(s, w), p);
}

}  // namespace

TEST_CASE("initial grids") {
  WingSpec s;
  WakeSpec w;
  const auto rounded = build_initial_grid(s, w);
  CHECK(rounded.cells.size() == 2);
  CHECK(rounded.lifting());
  s.tip_cap = TipCap::flat;
  const auto flat = build_initial_grid(s, w);
  CHECK(flat.cells.size() == 6);
  CHECK(std::count_if(flat.cells.begin(), flat.cells.end(), [](const Cell& c) { return c.region == Region::tip; }) == 4);
}

TEST_CASE("wake extends its length from the trailing edge") {
  WingSpec s;
  s.alpha_deg = 8.5;
  WakeSpec w;
  w.length = 4.0;
  w.cell_length = 0.5;
  const auto m = build_initial_grid(s, w);
  CHECK(m.wake_stream_cells() == 8);
  for (const auto& line : m.wake_pathlines()) {
    CHECK((line.back() - line.front()).norm() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK((line.back() - line.front()).normalized().isApprox(w.direction, 1e-12));
    for (std::size_t k = 1; k < line.size(); ++k) CHECK((line[k] - line[k - 1]).norm() == doctest::Approx(0.5));
  }
}

TEST_CASE("swept trailing edge is a straight line rotated about z") {
  WingSpec s;
  s.sweep_deg = 20.0;
  s.tip_cap = TipCap::flat;
  const auto m = refine(build_initial_grid(s, WakeSpec{}), RefinementPolicy{2.5, 2, 0, 0, 0.3});
  const auto te = m.trailing_edge();
  REQUIRE(te.size() >= 3);
  const Vec3 a = m.vertices[te.front()].position, b = m.vertices[te.back()].position;
  const Vec3 dir = (b - a).normalized();
  const WingGeometry g(s);
  CHECK(std::abs(std::abs(dir.dot(g.span_direction())) - 1.0) < 1e-12);
  const double beta = 20.0 * M_PI / 180.0;
  CHECK(std::abs(std::abs(dir.y()) - std::cos(beta)) < 1e-12);
  for (int v : te) CHECK((m.vertices[v].position - a).cross(dir).norm() < 1e-9);
}

TEST_CASE("baseline refinement reproduces the 384 cell grid") {
  const auto m = baseline_grid();
  CHECK(m.cells.size() + m.wake_cell_count() == 384);
  for (std::size_t c = 0; c < m.cells.size(); ++c) CHECK(cell_aspect_ratio(m, static_cast<int>(c)) <= 2.5 + 1e-9);
}

TEST_CASE("uniform refinement of a flat cell gives four equal quarters") {
  const auto m = make_flat_mesh({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 1, 0), Vec3(0, 1, 0)}, {{0, 1, 2, 3}});
  const auto r = refine(m, RefinementPolicy{10.0, 1, 0, 0, 0.3});
  REQUIRE(r.cells.size() == 4);
  CHECK(r.body_area() == doctest::Approx(2.0));
  for (const auto& c : r.cells) {
    const Vec3 p0 = r.vertices[c.vertices[0]].position, p2 = r.vertices[c.vertices[2]].position;
    CHECK((p2 - p0).cwiseAbs().isApprox(Vec3(1.0, 0.5, 0.0), 1e-14));
  }
}

TEST_CASE("curvature cycles flag the most curved cells") {
  WingSpec s;
  const auto base = baseline_grid(2);
  std::vector<double> curv;
  for (std::size_t c = 0; c < base.cells.size(); ++c) curv.push_back(cell_curvature_estimate(base, static_cast<int>(c)));
  // Independent estimate: angle between the corner normals from the geometry.
  const WingGeometry g(s);
  for (std::size_t c = 0; c < base.cells.size(); ++c) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const Vec3 ni = g.normal(base.vertices[base.cells[c].vertices[i]].param);
        const Vec3 nj = g.normal(base.vertices[base.cells[c].vertices[j]].param);
        worst = std::max(worst, std::acos(std::clamp(ni.dot(nj), -1.0, 1.0)));
      }
    if (base.wing->in_cap(base.vertices[base.cells[c].vertices[0]].param.x())) continue;
    CHECK(curv[c] == doctest::Approx(worst).epsilon(1e-3));
  }
  std::vector<double> sorted = curv;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto count = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(curv.size())));
  const double threshold = sorted[count - 1];
  const auto refined = refine(base, RefinementPolicy{2.5, 0, 1, 0, 0.3});
  std::set<int> split;
  for (const auto& c : refined.cells)
    if (c.parent >= 0) split.insert(c.parent);
  // Every top-quantile cell is split; extra splits come only from 2:1 balance.
  for (std::size_t c = 0; c < curv.size(); ++c)
    if (curv[c] > threshold) CHECK(split.count(static_cast<int>(c)) == 1);
  CHECK(split.size() >= count);
}

TEST_CASE("dof counts") {
  const auto m = make_flat_mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, {{0, 1, 2, 3}});
  CHECK(distribute_dofs(m, 1).size() == 4);
  CHECK(distribute_dofs(m, 2).size() == 9);
  CHECK(distribute_dofs(m, 3).size() == 16);

  const auto w = baseline_grid();
  for (int r = 1; r <= 3; ++r) {
    const auto d = distribute_dofs(w, r);
    const auto te = w.trailing_edge();
    CHECK(d.te_triples.size() == (te.size() - 1) * r + 1);
    std::set<int> seen;
    for (const auto& t : d.te_triples) {
      CHECK(d.kind[t.lw] == DofKind::te_leeward);
      CHECK(d.kind[t.ww] == DofKind::te_windward);
      CHECK(d.kind[t.wk] == DofKind::wake_te);
      CHECK((d.position[t.lw] - d.position[t.ww]).norm() < 1e-12);
      CHECK((d.position[t.lw] - d.position[t.wk]).norm() < 1e-12);
      seen.insert({t.lw, t.ww, t.wk});
    }
    CHECK(seen.size() == 3 * d.te_triples.size());
  }
  // 17 x 17 lattice nodes; on each folded tip edge the 7 windward/leeward pairs
  // off the TE and LE coincide. 17 TE pathlines carry 9 wake nodes each.
  CHECK(distribute_dofs(w, 1).size() == 17 * 17 - 2 * 7 + 17 * 9);
}

TEST_CASE("symmetric wing at zero incidence gives a mirror symmetric mesh") {
  WingSpec s;
  s.alpha_deg = 0.0;
  const auto m = refine(build_initial_grid(s, WakeSpec{}), RefinementPolicy{2.5, 2, 1, 1, 0.3});
  for (const auto& v : m.vertices) {
    const Vec3 mirror(v.position.x(), v.position.y(), -v.position.z());
    double best = 1e300;
    for (const auto& w : m.vertices) best = std::min(best, (w.position - mirror).norm());
    CHECK(best < 1e-9);
  }
}

TEST_CASE("quadratic elements on tip-refined rounded caps") {
  // TE cells straddling the cap band have a collapsed mid node; they shed no wake.
  WingSpec s;
  const auto m = refine(build_initial_grid(s, WakeSpec{}), RefinementPolicy{2.5, 3, 2, 0, 0.15});
  const auto d = distribute_dofs(m, 2);
  for (const auto& t : d.te_triples) CHECK((d.position[t.lw] - d.position[t.ww]).norm() < 1e-12);
  for (int i = 0; i < d.size(); ++i) {
    if (d.kind[i] != DofKind::te_windward) continue;
    bool in_triple = false;
    for (const auto& t : d.te_triples) in_triple = in_triple || t.ww == i;
    CHECK(in_triple);
  }
}

TEST_CASE("cell maps") {
  const CellMap unit({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}, 1);
  const auto s = unit.sample(Vec2(0.5, 0.5));
  CHECK(s.jacobian == doctest::Approx(1.0));
  CHECK((s.unit_normal - Vec3(0, 0, 1)).norm() < 1e-15);
  const CellMap stretched({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0), Vec3(2, 1, 0)}, 1);
  CHECK(stretched.sample(Vec2(0.3, 0.6)).jacobian == doctest::Approx(2.0));
}

TEST_CASE("high order support points lie on the surface") {
  const auto m = baseline_grid(2);
  const auto d = distribute_dofs(m, 2);
  for (int c = 0; c < d.n_body_cells; ++c) {
    const auto& cell = d.cells[c];
    if (cell.region == Region::tip) continue;
    const Vec3 mid = cell.map.position(Vec2(0.5, 0.5));
    Vec2 hint = Vec2::Zero();
    for (int v : m.cells[cell.body_cell].vertices) hint += 0.25 * m.vertices[v].param;
    const auto proj = m.wing->project(mid, hint);
    CHECK((proj.position - mid).norm() < 1e-10);
  }
}

TEST_CASE("wake geometry round trip") {
  auto d = distribute_dofs(baseline_grid(), 1);
  auto nodes = d.wake_geometry();
  REQUIRE(!nodes.empty());
  for (auto& line : nodes)
    for (std::size_t k = 1; k < line.size(); ++k) line[k].z() += 0.01 * static_cast<double>(k);
  d.set_wake_geometry(nodes);
  const auto back = d.wake_geometry();
  for (std::size_t p = 0; p < nodes.size(); ++p)
    for (std::size_t k = 0; k < nodes[p].size(); ++k) CHECK((back[p][k] - nodes[p][k]).norm() < 1e-15);
}
