//
// wingbem -- Galerkin hypersingular velocity on the wake and wake relaxation.
//
#include "wingbem/wake.hpp"

#include "integration.hpp"
#include "wingbem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wingbem {

void GradientOptions::validate() const {
  if (outer_order < 0 || outer_order > 30 || inner_order < 0 || inner_order > 30)
    throw DomainError("gradient quadrature order out of range");
  if (fp_theta < 0 || fp_theta > 64 || fp_rho < 0 || fp_rho > 64)
    throw DomainError("finite-part quadrature order out of range");
  if (!(near_factor >= 0.0)) throw DomainError("near-field factor must be non-negative");
  if (near_levels < 0 || near_levels > 12) throw DomainError("near-field levels out of range");
}

int GradientField::row_of(int dof) const {
  const auto it = std::lower_bound(dofs.begin(), dofs.end(), dof);
  return it != dofs.end() && *it == dof ? static_cast<int>(it - dofs.begin()) : -1;
}

namespace {

constexpr double kInv4Pi = 0.25 / pi;

inline Vec3 h_kernel(const Vec3& d, double r2, const Vec3& m) {
  const double r = std::sqrt(r2);
  return (m - 3.0 * d.dot(m) / r2 * d) * (kInv4Pi / (r2 * r));
}

class GradientEvaluator {
 public:
  GradientEvaluator(const DofLayout& dofs, const GradientProblem& pb, const GradientOptions& opt)
      : dofs_(dofs), pb_(pb), opt_(opt) {
    const int r = dofs.degree;
    inner_ = opt.inner_order > 0 ? opt.inner_order : r + 3;
    fp_theta_ = opt.fp_theta > 0 ? opt.fp_theta : std::max(16, 2 * inner_);
    fp_rho_ = opt.fp_rho > 0 ? opt.fp_rho : std::max(16, 2 * inner_);
    table_ = detail::build_regular_table(dofs, inner_);
    const int nc = static_cast<int>(dofs.cells.size());
    local_.resize(nc);
    dens_.resize(nc);
    neu_.resize(nc);
    for (int c = 0; c < nc; ++c) {
      const auto& cell = dofs.cells[c];
      const int nl = cell.n_local();
      local_[c].assign(nl, 0.0);
      for (int j = 0; j < nl; ++j)
        for (const auto& e : cell.dofs(j)) local_[c][j] += e.weight * pb.density[e.dof];
      const int nq = static_cast<int>(table_.rule.size());
      dens_[c].assign(nq, 0.0);
      for (int q = 0; q < nq; ++q)
        for (int j = 0; j < nl; ++j) dens_[c][q] += table_.shape(q, j) * local_[c][j];
      if (has_neumann(cell)) {
        neu_[c].resize(nq);
        for (int q = 0; q < nq; ++q) {
          const auto s = cell.map.sample(table_.rule.nodes[q]);
          neu_[c][q] = pb.neumann(cell, table_.rule.nodes[q], s) * s.jacobian * table_.rule.weights[q];
        }
      }
    }
  }

  bool has_neumann(const FeCell& cell) const { return !cell.is_wake() && static_cast<bool>(pb_.neumann); }

  Vec3 value(int co, const Vec2& xi) const {
    const auto& outer = dofs_.cells[co];
    const Vec3 x = outer.map.position(xi);
    Vec3 sum = Vec3::Zero();
    double psi[16];
    for (std::size_t c = 0; c < dofs_.cells.size(); ++c) {
      const auto& cell = dofs_.cells[c];
      const auto& cs = table_.cells[c];
      const int nl = cell.n_local();
      const bool neu = has_neumann(cell);
      if (static_cast<int>(c) == co) {
        const auto fp = finite_part_hypersingular(cell.map, xi, fp_theta_, fp_rho_).value();
        for (int j = 0; j < nl; ++j) sum += fp.col(j) * local_[c][j];
        if (neu) {
          const SurfaceDensity w = [&](const Vec2& e, const MapSample& s) {
            return pb_.neumann(cell, e, s) * s.jacobian;
          };
          sum -= cauchy_single_layer(cell.map, xi, w, fp_theta_, fp_rho_);
        }
      } else if (detail::is_near(cs, x, opt_.near_factor)) {
        detail::integrate_near(cell.map, x, opt_.near_factor, opt_.near_levels, inner_,
                               [&](const Vec2& e, const MapSample& s, double w) {
                                 const Vec3 d = s.position - x;
                                 const double r2 = d.squaredNorm();
                                 cell.map.shape_values(e, psi);
                                 double phi = 0.0;
                                 for (int j = 0; j < nl; ++j) phi += psi[j] * local_[c][j];
                                 sum += phi * w * h_kernel(d, r2, s.m);
                                 if (neu) {
                                   const double r = std::sqrt(r2);
                                   sum -= pb_.neumann(cell, e, s) * s.jacobian * w * kInv4Pi / (r2 * r) * d;
                                 }
                               });
      } else {
        const int nq = static_cast<int>(cs.w.size());
        for (int q = 0; q < nq; ++q) {
          const Vec3 d = cs.y[q] - x;
          const double r2 = d.squaredNorm();
          sum += dens_[c][q] * cs.w[q] * h_kernel(d, r2, cs.m[q]);
          if (neu) {
            const double r = std::sqrt(r2);
            sum -= neu_[c][q] * kInv4Pi / (r2 * r) * d;
          }
        }
      }
    }
    return pb_.sigma * sum;
  }

 private:
  const DofLayout& dofs_;
  const GradientProblem& pb_;
  GradientOptions opt_;
  int inner_ = 4, fp_theta_ = 8, fp_rho_ = 8;
  detail::RegularTable table_;
  std::vector<std::vector<double>> local_, dens_, neu_;
};

void check_problem(const DofLayout& dofs, const GradientProblem& pb, const GradientOptions& opt) {
  opt.validate();
  if (pb.density.size() != dofs.size()) throw DomainError("density size does not match the DOF layout");
  if (pb.sigma != 1.0 && pb.sigma != -1.0) throw DomainError("sigma must be +1 or -1");
}

}  // namespace

Vec3 hypersingular_bie_value(const DofLayout& dofs, const GradientProblem& problem, int cell, const Vec2& xi,
                             const GradientOptions& opt) {
  check_problem(dofs, problem, opt);
  if (cell < 0 || cell >= static_cast<int>(dofs.cells.size())) throw DomainError("cell index out of range");
  const GradientEvaluator ev(dofs, problem, opt);
  return ev.value(cell, xi);
}

GradientField galerkin_gradient(const DofLayout& dofs, const GradientProblem& problem, const GradientOptions& opt) {
  check_problem(dofs, problem, opt);
  const int outer_order = opt.outer_order > 0 ? opt.outer_order : dofs.degree + 3;
  const MassMatrix mass = assemble_mass_matrix(dofs, problem.outer, outer_order);
  GradientField out;
  out.dofs = mass.global;
  out.u = Eigen::MatrixX3d::Zero(mass.size(), 3);
  if (mass.size() == 0) return out;

  const auto rule = gauss_tensor(outer_order);
  struct OuterPoint {
    int cell;
    int q;
  };
  std::vector<OuterPoint> pts;
  for (int c = 0; c < static_cast<int>(dofs.cells.size()); ++c) {
    if (!in_cell_set(dofs.cells[c], problem.outer)) continue;
    for (int q = 0; q < static_cast<int>(rule.size()); ++q) pts.push_back({c, q});
  }
  const GradientEvaluator ev(dofs, problem, opt);
  std::vector<Vec3> g(pts.size());
  parallel_for(pts.size(), opt.threads, [&](std::size_t k) { g[k] = ev.value(pts[k].cell, rule.nodes[pts[k].q]); });

  Eigen::MatrixX3d rhs = Eigen::MatrixX3d::Zero(mass.size(), 3);
  double psi[16];
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& cell = dofs.cells[pts[k].cell];
    const Vec2& xi = rule.nodes[pts[k].q];
    const auto s = cell.map.sample(xi);
    cell.map.shape_values(xi, psi);
    const Vec3 gw = problem.free_factor * g[k] * s.jacobian * rule.weights[pts[k].q];
    for (int j = 0; j < cell.n_local(); ++j)
      for (const auto& e : cell.dofs(j)) rhs.row(mass.local[e.dof]) += (psi[j] * e.weight) * gw.transpose();
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(mass.m);
  if (ldlt.info() != Eigen::Success) throw SolverError("gradient mass matrix factorization failed", -1);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd b = rhs.col(k);
    const Eigen::VectorXd x = ldlt.solve(b);
    const double res = (mass.m * x - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
    out.residual = std::max(out.residual, res);
    out.u.col(k) = x;
  }
  if (!(out.residual < 1e-10)) throw SolverError("gradient mass solve residual too large", -1);
  return out;
}

GradientField wake_velocity(const DofLayout& dofs, const Eigen::VectorXd& phi, const FlowConditions& flow,
                            const GradientOptions& opt) {
  GradientProblem pb;
  pb.density = phi;
  const Vec3 vinf = flow.velocity();
  pb.neumann = [vinf](const FeCell&, const Vec2&, const MapSample& s) { return -vinf.dot(s.unit_normal); };
  pb.sigma = 1.0;
  pb.outer = CellSet::wake;
  pb.free_factor = 1.0;
  return galerkin_gradient(dofs, pb, opt);
}

std::vector<std::vector<Vec3>> pathline_velocity(const DofLayout& dofs, const GradientField& u,
                                                 const FlowConditions& flow) {
  std::vector<std::vector<Vec3>> out(dofs.pathlines.size());
  for (std::size_t p = 0; p < dofs.pathlines.size(); ++p) {
    for (int d : dofs.pathlines[p]) {
      const int row = u.row_of(d);
      if (row < 0) throw DomainError("wake DOF " + std::to_string(d) + " missing from the gradient field");
      out[p].push_back(flow.velocity() + u.u.row(row).transpose());
    }
  }
  return out;
}

std::vector<std::vector<Vec3>> relax_step(const std::vector<std::vector<Vec3>>& nodes,
                                          const std::vector<std::vector<Vec3>>& velocity, double spacing,
                                          double v_ref, MarchVelocity mode) {
  if (!(spacing > 0.0)) throw DomainError("wake spacing must be positive");
  if (velocity.size() != nodes.size()) throw DomainError("velocity and node pathline counts differ");
  std::vector<std::vector<Vec3>> out(nodes.size());
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    if (velocity[p].size() != nodes[p].size()) throw DomainError("velocity and node counts differ");
    if (nodes[p].empty()) continue;
    out[p].resize(nodes[p].size());
    out[p][0] = nodes[p][0];
    for (std::size_t k = 1; k < nodes[p].size(); ++k) {
      const Vec3& v = mode == MarchVelocity::predecessor ? velocity[p][k - 1] : velocity[p][k];
      const double vn = v.norm();
      if (!(vn > 1e-8 * v_ref))
        throw WakeError("near-zero velocity at pathline " + std::to_string(p) + " node " + std::to_string(k), -1);
      out[p][k] = out[p][k - 1] + spacing / vn * v;
    }
  }
  return out;
}

namespace {

double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.norm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2), den = a * e - b * b;
      s = den > 0.0 ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (p0 + s * d1 - q0 - t * d2).norm();
}

}  // namespace

double min_pathline_separation(const std::vector<std::vector<Vec3>>& nodes) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    for (std::size_t q = p + 2; q < nodes.size(); ++q) {
      for (std::size_t i = 1; i < nodes[p].size(); ++i)
        for (std::size_t j = 1; j < nodes[q].size(); ++j)
          best = std::min(best, segment_distance(nodes[p][i - 1], nodes[p][i], nodes[q][j - 1], nodes[q][j]));
    }
  }
  return best;
}

double max_alignment_angle_deg(const std::vector<std::vector<Vec3>>& nodes,
                               const std::vector<std::vector<Vec3>>& velocity, MarchVelocity mode) {
  double worst = 0.0;
  for (std::size_t p = 0; p < nodes.size(); ++p) {
    for (std::size_t k = 1; k < nodes[p].size(); ++k) {
      const Vec3 seg = nodes[p][k] - nodes[p][k - 1];
      const Vec3& v = mode == MarchVelocity::predecessor ? velocity[p][k - 1] : velocity[p][k];
      const double c = seg.dot(v) / (seg.norm() * v.norm());
      worst = std::max(worst, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / pi);
    }
  }
  return worst;
}

RelaxResult relaxation_loop(BemSystem& sys, DofLayout& dofs, const VelocityRecovery& rec,
                            const FlowConditions& flow, const RelaxOptions& opt) {
  if (opt.max_iterations < 0) throw DomainError("negative relaxation iteration count");
  if (!(opt.geom_tol > 0.0) || !(opt.chord > 0.0)) throw DomainError("relaxation tolerance and chord must be positive");
  RelaxResult res;
  res.state = newton_solve(sys, dofs, rec, opt.newton, flow);
  if (opt.on_iteration) opt.on_iteration(0, dofs, res.state);
  const double cell_length = dofs.wake_spacing * dofs.degree;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const auto vel = pathline_velocity(dofs, wake_velocity(dofs, res.state.phi, flow, opt.gradient), flow);
    const auto nodes = dofs.wake_geometry();
    res.alignment_deg.push_back(max_alignment_angle_deg(nodes, vel, opt.march));
    const auto next = relax_step(nodes, vel, dofs.wake_spacing, flow.v_inf, opt.march);
    double disp = 0.0;
    for (std::size_t p = 0; p < next.size(); ++p)
      for (std::size_t k = 0; k < next[p].size(); ++k) disp = std::max(disp, (next[p][k] - nodes[p][k]).norm());
    const double sep = min_pathline_separation(next);
    if (sep < 0.1 * cell_length)
      throw WakeError("wake self-intersection (pathline separation " + std::to_string(sep) + ")", it);
    dofs.set_wake_geometry(next);
    update_wake_columns(sys, dofs, opt.quadrature, opt.gradient.threads);
    res.state = newton_solve(sys, dofs, rec, opt.newton, flow);
    res.displacement.push_back(disp);
    res.iterations = it;
    if (opt.log) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "relax %2d displacement=%.3e alignment=%.3f deg newton_iters=%d", it, disp,
                    res.alignment_deg.back(), res.state.iterations);
      opt.log(buf);
    }
    if (opt.on_iteration) opt.on_iteration(it, dofs, res.state);
    if (disp < opt.geom_tol * opt.chord) {
      res.converged = true;
      break;
    }
  }
  res.final_velocity = pathline_velocity(dofs, wake_velocity(dofs, res.state.phi, flow, opt.gradient), flow);
  return res;
}

}  // namespace wingbem
