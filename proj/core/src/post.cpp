//
// wingbem -- Pressure, sections, forces and export.
//
#include "wingbem/post.hpp"

#include "wingbem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace wingbem {

PressureField pressure_coefficient(const Eigen::MatrixX3d& velocity, const DofLayout& dofs,
                                   const FlowConditions& flow, bool include_gravity) {
  flow.validate();
  if (velocity.rows() != dofs.size()) throw DomainError("velocity rows do not match the DOF layout");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double v2 = flow.v_inf * flow.v_inf;
  const double q = 0.5 * flow.rho * v2;
  PressureField out;
  out.cp = Eigen::VectorXd::Constant(dofs.size(), nan);
  out.pressure = Eigen::VectorXd::Constant(dofs.size(), nan);
  for (int i = 0; i < dofs.size(); ++i) {
    if (!dofs.is_body(i)) continue;
    double cp = 1.0 - velocity.row(i).squaredNorm() / v2;
    if (include_gravity) cp -= 2.0 * flow.g * dofs.position[i].z() / v2;
    out.cp[i] = cp;
    out.pressure[i] = cp * q;
  }
  return out;
}

namespace {

double local_value(const FeCell& c, const Eigen::VectorXd& field, const Vec2& xi) {
  double psi[16];
  c.map.shape_values(xi, psi);
  double v = 0.0;
  for (int j = 0; j < c.n_local(); ++j)
    for (const auto& e : c.dofs(j)) v += psi[j] * e.weight * field[e.dof];
  return v;
}

FILE* open_or_throw(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot open output file", path.string());
  return f;
}

void close_or_throw(std::FILE* f, const std::filesystem::path& path) {
  if (std::ferror(f) != 0 || std::fclose(f) != 0) throw IoError("cannot write output file", path.string());
}

}  // namespace

Section section_cut(const DofLayout& dofs, const Eigen::VectorXd& field, const SectionPlane& plane,
                    const Vec3& chord_direction, int subdivision) {
  if (plane.axis < 0 || plane.axis > 2) throw DomainError("section axis must be 0, 1 or 2");
  if (subdivision < 1) throw DomainError("section subdivision must be positive");
  if (field.size() != dofs.size()) throw DomainError("field size does not match the DOF layout");
  const Vec3 t = chord_direction.normalized();
  const double tol = 1e-12 * dofs.length_scale;
  struct Raw {
    double proj, value;
    Vec3 p;
  };
  std::vector<Raw> lee, wind;
  for (const auto& c : dofs.cells) {
    if (c.region != Region::leeward && c.region != Region::windward) continue;
    auto& out = c.region == Region::leeward ? lee : wind;
    const int n = dofs.degree * subdivision;
    auto g = [&](const Vec2& xi) { return c.map.position(xi)[plane.axis] - plane.coordinate; };
    auto add = [&](const Vec2& xi) {
      const Vec3 p = c.map.position(xi);
      out.push_back({p.dot(t), local_value(c, field, xi), p});
    };
    for (int fam = 0; fam < 2; ++fam) {
      for (int k = 0; k <= n; ++k) {
        const double fixed = static_cast<double>(k) / n;
        auto at = [&](double s) { return fam == 0 ? Vec2(fixed, s) : Vec2(s, fixed); };
        double s0 = 0.0, g0 = g(at(0.0));
        if (std::abs(g0) <= tol) add(at(0.0));
        for (int j = 1; j <= n; ++j) {
          const double s1 = static_cast<double>(j) / n, g1 = g(at(s1));
          if (std::abs(g1) <= tol) {
            add(at(s1));
          } else if (std::abs(g0) > tol && (g0 < 0.0) != (g1 < 0.0)) {
            double a = s0, b = s1, ga = g0;
            for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
              const double m = 0.5 * (a + b), gm = g(at(m));
              if ((gm < 0.0) == (ga < 0.0)) {
                a = m;
                ga = gm;
              } else {
                b = m;
              }
            }
            add(at(0.5 * (a + b)));
          }
          s0 = s1;
          g0 = g1;
        }
      }
    }
  }
  Section sec;
  if (lee.empty() && wind.empty()) return sec;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto* v : {&lee, &wind})
    for (const auto& r : *v) {
      lo = std::min(lo, r.proj);
      hi = std::max(hi, r.proj);
    }
  sec.chord = hi - lo;
  const double chord = sec.chord > 0.0 ? sec.chord : 1.0;
  const double dedupe = 1e-9 * dofs.length_scale;
  auto finish = [&](std::vector<Raw>& raw, std::vector<SectionSample>& out) {
    std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.proj < b.proj; });
    for (const auto& r : raw) {
      const double xc = (r.proj - lo) / chord;
      if (!out.empty() && (xc <= out.back().x_over_c || (r.p - out.back().position).norm() < dedupe)) continue;
      out.push_back({xc, r.value, r.p});
    }
  };
  finish(lee, sec.leeward);
  finish(wind, sec.windward);
  return sec;
}

Forces integrate_forces(const Eigen::VectorXd& cp, const DofLayout& dofs, const FlowConditions& flow,
                        double reference_area, int order) {
  flow.validate();
  if (!(reference_area > 0.0)) throw DomainError("reference area must be positive");
  if (cp.size() != dofs.size()) throw DomainError("cp size does not match the DOF layout");
  const auto rule = gauss_tensor(order > 0 ? order : dofs.degree + 2);
  const double q = 0.5 * flow.rho * flow.v_inf * flow.v_inf;
  Vec3 sum = Vec3::Zero();
  for (const auto& c : dofs.cells) {
    if (c.is_wake()) continue;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const auto s = c.map.sample(rule.nodes[k]);
      sum -= local_value(c, cp, rule.nodes[k]) * s.m * rule.weights[k];
    }
  }
  Forces f;
  f.reference_area = reference_area;
  f.coefficient = sum / reference_area;
  f.force = sum * q;
  f.cl = f.coefficient.z();
  f.cdi = f.coefficient.x();
  return f;
}

void write_vtk(const std::filesystem::path& path, const DofLayout& dofs, bool wake, const Eigen::VectorXd& phi,
               const Eigen::VectorXd& cp, const Eigen::MatrixX3d& velocity) {
  if (phi.size() != dofs.size() || cp.size() != dofs.size() || velocity.rows() != dofs.size())
    throw DomainError("export fields do not match the DOF layout");
  const int r = dofs.degree;
  const int nl = (r + 1) * (r + 1);
  std::vector<const FeCell*> cells;
  for (const auto& c : dofs.cells)
    if (c.is_wake() == wake) cells.push_back(&c);
  std::FILE* f = open_or_throw(path);
  std::fprintf(f, "# vtk DataFile Version 3.0\nwingbem %s\nASCII\nDATASET POLYDATA\n", wake ? "wake" : "body");
  const std::size_t np = cells.size() * nl;
  std::fprintf(f, "POINTS %zu double\n", np);
  for (const auto* c : cells)
    for (const auto& p : c->map.support()) std::fprintf(f, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
  const std::size_t nq = cells.size() * r * r;
  std::fprintf(f, "POLYGONS %zu %zu\n", nq, nq * 5);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t base = k * nl;
    for (int b = 0; b < r; ++b)
      for (int a = 0; a < r; ++a)
        std::fprintf(f, "4 %zu %zu %zu %zu\n", base + tensor_index(a, b, r), base + tensor_index(a + 1, b, r),
                     base + tensor_index(a + 1, b + 1, r), base + tensor_index(a, b + 1, r));
  }
  auto nodal = [&](const FeCell& c, int j, auto&& get) {
    double v = 0.0;
    for (const auto& e : c.dofs(j)) v += e.weight * get(e.dof);
    return v;
  };
  std::fprintf(f, "POINT_DATA %zu\nSCALARS %s double 1\nLOOKUP_TABLE default\n", np, wake ? "delta_phi" : "phi");
  for (const auto* c : cells)
    for (int j = 0; j < nl; ++j) std::fprintf(f, "%.17g\n", nodal(*c, j, [&](int d) { return phi[d]; }));
  if (!wake) {
    std::fprintf(f, "SCALARS cp double 1\nLOOKUP_TABLE default\n");
    for (const auto* c : cells)
      for (int j = 0; j < nl; ++j) std::fprintf(f, "%.17g\n", nodal(*c, j, [&](int d) { return cp[d]; }));
  }
  std::fprintf(f, "VECTORS velocity double\n");
  for (const auto* c : cells)
    for (int j = 0; j < nl; ++j)
      std::fprintf(f, "%.17g %.17g %.17g\n", nodal(*c, j, [&](int d) { return velocity(d, 0); }),
                   nodal(*c, j, [&](int d) { return velocity(d, 1); }),
                   nodal(*c, j, [&](int d) { return velocity(d, 2); }));
  close_or_throw(f, path);
}

void write_section_csv(const std::filesystem::path& path, const Section& section) {
  std::FILE* f = open_or_throw(path);
  std::fprintf(f, "x_over_c,side,minus_cp\n");
  for (const auto& s : section.leeward) std::fprintf(f, "%.17g,leeward,%.17g\n", s.x_over_c, -s.value);
  for (const auto& s : section.windward) std::fprintf(f, "%.17g,windward,%.17g\n", s.x_over_c, -s.value);
  close_or_throw(f, path);
}

void write_te_jump_csv(const std::filesystem::path& path, const DofLayout& dofs, const Eigen::VectorXd& phi,
                       double chord) {
  if (!(chord > 0.0)) throw DomainError("chord must be positive");
  std::FILE* f = open_or_throw(path);
  std::fprintf(f, "y_over_c,delta_phi\n");
  for (const auto& t : dofs.te_triples)
    std::fprintf(f, "%.17g,%.17g\n", dofs.position[t.wk].y() / chord, phi[t.wk]);
  close_or_throw(f, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file", path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (first) {
      t.header = std::move(cols);
      first = false;
    } else {
      t.rows.push_back(std::move(cols));
    }
  }
  return t;
}

}  // namespace wingbem
