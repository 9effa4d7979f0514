//
// wingbem -- Velocity recovery and Kutta Newton solve.
//
#include "wingbem/kutta.hpp"

#include "wingbem/quadrature.hpp"

#include <Eigen/LU>

#include <cmath>
#include <cstdio>

namespace wingbem {

bool in_cell_set(const FeCell& cell, CellSet set) {
  switch (set) {
    case CellSet::body: return !cell.is_wake();
    case CellSet::wake: return cell.is_wake();
    case CellSet::all: return true;
  }
  return false;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

MassMatrix make_space(const DofLayout& dofs, CellSet set) {
  MassMatrix out;
  out.local.assign(dofs.size(), -1);
  for (const auto& c : dofs.cells) {
    if (!in_cell_set(c, set)) continue;
    for (const auto& e : c.entries) out.local[e.dof] = 0;
  }
  for (int d = 0; d < dofs.size(); ++d) {
    if (out.local[d] < 0) continue;
    out.local[d] = static_cast<int>(out.global.size());
    out.global.push_back(d);
  }
  return out;
}

int resolved_order(const DofLayout& dofs, int order) {
  if (order < 0 || order > 30) throw DomainError("mass matrix quadrature order out of range");
  return order > 0 ? order : dofs.degree + 2;
}

}  // namespace

MassMatrix assemble_mass_matrix(const DofLayout& dofs, CellSet set, int order) {
  MassMatrix out = make_space(dofs, set);
  const auto rule = gauss_tensor(resolved_order(dofs, order));
  Triplets trip;
  double psi[16];
  Eigen::Matrix<double, 16, 16> loc;
  for (const auto& c : dofs.cells) {
    if (!in_cell_set(c, set)) continue;
    const int nl = c.n_local();
    loc.setZero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto s = c.map.sample(rule.nodes[q]);
      c.map.shape_values(rule.nodes[q], psi);
      const double jw = s.jacobian * rule.weights[q];
      for (int a = 0; a < nl; ++a)
        for (int b = 0; b < nl; ++b) loc(a, b) += psi[a] * psi[b] * jw;
    }
    for (int a = 0; a < nl; ++a)
      for (const auto& ea : c.dofs(a))
        for (int b = 0; b < nl; ++b)
          for (const auto& eb : c.dofs(b))
            trip.emplace_back(out.local[ea.dof], out.local[eb.dof], ea.weight * eb.weight * loc(a, b));
  }
  out.m.resize(out.size(), out.size());
  out.m.setFromTriplets(trip.begin(), trip.end());
  return out;
}

VelocityRecovery::VelocityRecovery(const DofLayout& dofs, const FlowConditions& flow, int order)
    : n_(dofs.size()), mass_(assemble_mass_matrix(dofs, CellSet::body, order)) {
  flow.validate();
  const auto rule = gauss_tensor(resolved_order(dofs, order));
  const Vec3 vinf = flow.velocity();
  std::array<Triplets, 3> trip;
  for (auto& c : c_) c = Eigen::VectorXd::Zero(mass_.size());
  double psi[16];
  Eigen::Matrix3Xd grad;
  for (const auto& cell : dofs.cells) {
    if (cell.is_wake()) continue;
    const int nl = cell.n_local();
    Eigen::Matrix<double, 16, 16> loc[3];
    for (auto& l : loc) l.setZero();
    double cloc[3][16] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2& xi = rule.nodes[q];
      const auto s = cell.map.sample(xi);
      cell.map.shape_values(xi, psi);
      cell.map.surface_gradients(xi, s, grad);
      const double jw = s.jacobian * rule.weights[q];
      const Vec3 t = vinf - vinf.dot(s.unit_normal) * s.unit_normal;
      for (int a = 0; a < nl; ++a) {
        for (int k = 0; k < 3; ++k) {
          cloc[k][a] += psi[a] * t[k] * jw;
          for (int b = 0; b < nl; ++b) loc[k](a, b) += psi[a] * grad(k, b) * jw;
        }
      }
    }
    for (int a = 0; a < nl; ++a) {
      for (const auto& ea : cell.dofs(a)) {
        const int i = mass_.local[ea.dof];
        for (int k = 0; k < 3; ++k) {
          c_[k][i] += ea.weight * cloc[k][a];
          for (int b = 0; b < nl; ++b)
            for (const auto& eb : cell.dofs(b)) trip[k].emplace_back(i, eb.dof, ea.weight * eb.weight * loc[k](a, b));
        }
      }
    }
  }
  for (int k = 0; k < 3; ++k) {
    b_[k].resize(mass_.size(), n_);
    b_[k].setFromTriplets(trip[k].begin(), trip[k].end());
  }
  ldlt_ = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(mass_.m);
  if (ldlt_->info() != Eigen::Success) throw SolverError("mass matrix factorization failed", -1);
  const auto& d = ldlt_->vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0)) throw SolverError("mass matrix is not positive definite", static_cast<long>(i));
}

Eigen::MatrixX3d VelocityRecovery::recover(const Eigen::VectorXd& phi) const {
  if (phi.size() != n_) throw DomainError("potential vector size does not match the DOF layout");
  Eigen::MatrixX3d out = Eigen::MatrixX3d::Zero(n_, 3);
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd rhs = b_[k] * phi + c_[k];
    const Eigen::VectorXd chi = ldlt_->solve(rhs);
    const double res = (mass_.m * chi - rhs).lpNorm<Eigen::Infinity>();
    const double scale = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
    if (!(res <= 1e-10 * scale)) throw SolverError("velocity recovery residual too large", -1);
    for (int i = 0; i < mass_.size(); ++i) out(mass_.global[i], k) = chi[i];
  }
  return out;
}

void VelocityRecovery::operator_row(int dof, int comp, Eigen::RowVectorXd& row, double& offset) const {
  if (dof < 0 || dof >= n_ || mass_.local[dof] < 0) throw DomainError("velocity requested off the body");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(mass_.size());
  e[mass_.local[dof]] = 1.0;
  const Eigen::VectorXd y = ldlt_->solve(e);
  row = y.transpose() * b_[comp];
  offset = y.dot(c_[comp]);
}

Vec3 VelocityRecovery::at(int dof, const Eigen::VectorXd& phi) const {
  Vec3 v;
  Eigen::RowVectorXd row;
  double off = 0.0;
  for (int k = 0; k < 3; ++k) {
    operator_row(dof, k, row, off);
    v[k] = row.dot(phi) + off;
  }
  return v;
}

Eigen::VectorXd kutta_residual(const Eigen::MatrixX3d& velocity, const std::vector<TeTriple>& triples) {
  Eigen::VectorXd r(triples.size());
  for (std::size_t t = 0; t < triples.size(); ++t)
    r[t] = velocity.row(triples[t].lw).squaredNorm() - velocity.row(triples[t].ww).squaredNorm();
  return r;
}

Eigen::VectorXd kutta_residual(const VelocityRecovery& rec, const Eigen::VectorXd& phi,
                               const std::vector<TeTriple>& triples) {
  return kutta_residual(rec.recover(phi), triples);
}

Eigen::MatrixXd kutta_jacobian(const VelocityRecovery& rec, const Eigen::VectorXd& phi,
                               const std::vector<TeTriple>& triples) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(triples.size(), rec.n_dofs());
  Eigen::RowVectorXd row;
  double off = 0.0;
  for (std::size_t t = 0; t < triples.size(); ++t) {
    for (int side = 0; side < 2; ++side) {
      const int d = side == 0 ? triples[t].lw : triples[t].ww;
      const double sign = side == 0 ? 2.0 : -2.0;
      for (int k = 0; k < 3; ++k) {
        rec.operator_row(d, k, row, off);
        jac.row(t) += sign * (row.dot(phi) + off) * row;
      }
    }
  }
  return jac;
}

Eigen::MatrixXd kutta_jacobian_fd(const VelocityRecovery& rec, const Eigen::VectorXd& phi,
                                  const std::vector<TeTriple>& triples, double eps) {
  Eigen::MatrixXd jac(triples.size(), rec.n_dofs());
  Eigen::VectorXd p = phi;
  for (int j = 0; j < rec.n_dofs(); ++j) {
    p[j] = phi[j] + eps;
    const Eigen::VectorXd rp = kutta_residual(rec, p, triples);
    p[j] = phi[j] - eps;
    const Eigen::VectorXd rm = kutta_residual(rec, p, triples);
    p[j] = phi[j];
    jac.col(j) = (rp - rm) / (2.0 * eps);
  }
  return jac;
}

namespace {

Vec3 te_stream_direction(const DofLayout& dofs, const TeTriple& tr) {
  const int p = dofs.pathline_of[tr.wk];
  if (p < 0 || dofs.pathlines[p].size() < 2) throw DomainError("TE wake DOF without a pathline");
  return (dofs.position[dofs.pathlines[p][1]] - dofs.position[tr.wk]).normalized();
}

}  // namespace

SolutionState newton_solve(const BemSystem& sys, const DofLayout& dofs, const VelocityRecovery& rec,
                           const NewtonOptions& opt, const FlowConditions& flow) {
  const int n = sys.size();
  if (n != dofs.size() || rec.n_dofs() != n) throw DomainError("system, DOF layout and recovery sizes differ");
  if (opt.max_iterations < 0 || opt.max_halvings < 0) throw DomainError("negative Newton iteration limits");
  const double tol = opt.tol_abs > 0.0 ? opt.tol_abs : 1e-10 * flow.v_inf * flow.v_inf;
  const auto& triples = dofs.te_triples;
  const int nt = static_cast<int>(triples.size());

  SolutionState st;
  if (nt == 0) {
    st.phi = solve_linear(sys.matrix, sys.rhs);
    st.velocity = rec.recover(st.phi);
    st.te_jump.resize(0);
    st.residual_norms.push_back(0.0);
    st.converged = true;
    return st;
  }

  Eigen::MatrixXd a0 = sys.matrix;
  Eigen::VectorXd b0 = sys.rhs;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, nt);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = triples[t];
    if (sys.row_kind[tr.ww] != RowKind::kutta) throw AssemblyError("triple windward DOF is not a Kutta row");
    a0.row(tr.ww).setZero();
    a0(tr.ww, tr.lw) = 1.0;
    a0(tr.ww, tr.ww) = -1.0;
    b0[tr.ww] = 0.0;
    e(tr.ww, t) = 1.0;
  }
  const LinearSolver lu(a0);
  const Eigen::VectorXd phi0 = lu.solve(b0);
  const Eigen::MatrixXd z = lu.solve(e);
  {
    const double res = (a0 * phi0 - b0).lpNorm<Eigen::Infinity>();
    if (!(res <= 1e-10 * std::max(b0.lpNorm<Eigen::Infinity>(), 1e-300)))
      throw SolverError("linear solve residual too large", -1);
  }

  // χ_c at each TE DOF as an affine function of s.
  struct Side {
    double a[3];
    Eigen::RowVectorXd b[3];
  };
  std::vector<Side> lw(nt), ww(nt);
  Eigen::RowVectorXd row;
  double off = 0.0;
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      rec.operator_row(triples[t].lw, k, row, off);
      lw[t].a[k] = row.dot(phi0) + off;
      lw[t].b[k] = row * z;
      rec.operator_row(triples[t].ww, k, row, off);
      ww[t].a[k] = row.dot(phi0) + off;
      ww[t].b[k] = row * z;
    }
  }
  auto residual = [&](const Eigen::VectorXd& s, Eigen::MatrixXd* jac) {
    Eigen::VectorXd r(nt);
    if (jac) jac->setZero(nt, nt);
    for (int t = 0; t < nt; ++t) {
      double rt = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double cl = lw[t].a[k] + lw[t].b[k].dot(s);
        const double cw = ww[t].a[k] + ww[t].b[k].dot(s);
        rt += cl * cl - cw * cw;
        if (jac) jac->row(t) += 2.0 * (cl * lw[t].b[k] - cw * ww[t].b[k]);
      }
      r[t] = rt;
    }
    return r;
  };
  auto log = [&](int it, double norm, double damping) {
    if (!opt.log) return;
    char buf[128];
    std::snprintf(buf, sizeof buf, "newton %2d |r|_inf=%.3e damping=%.4g", it, norm, damping);
    opt.log(buf);
  };

  Eigen::VectorXd s = Eigen::VectorXd::Zero(nt);
  if (opt.initial_guess == KuttaGuess::linear) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(nt, nt);
    Eigen::VectorXd rhs(nt);
    for (int t = 0; t < nt; ++t) {
      const Vec3 dir = te_stream_direction(dofs, triples[t]);
      rhs[t] = 0.0;
      for (int k = 0; k < 3; ++k) {
        l.row(t) += dir[k] * (lw[t].b[k] - ww[t].b[k]);
        rhs[t] -= dir[k] * (lw[t].a[k] - ww[t].a[k]);
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> llu(l);
    if (llu.isInvertible()) s = llu.solve(rhs);
  }
  Eigen::MatrixXd jac;
  Eigen::VectorXd r = residual(s, &jac);
  double norm = r.lpNorm<Eigen::Infinity>();
  st.residual_norms.push_back(norm);
  log(0, norm, 0.0);
  int it = 0;
  while (!(norm < tol)) {
    if (it == opt.max_iterations)
      throw ConvergenceError("Kutta Newton iteration did not converge", st.residual_norms);
    Eigen::FullPivLU<Eigen::MatrixXd> jlu(jac);
    if (!jlu.isInvertible()) throw SolverError("singular Kutta Jacobian", -1);
    const Eigen::VectorXd ds = -jlu.solve(r);
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
      const Eigen::VectorXd trial = s + lambda * ds;
      const Eigen::VectorXd rt = residual(trial, nullptr);
      const double nrm = rt.lpNorm<Eigen::Infinity>();
      if (nrm < norm) {
        s = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw ConvergenceError("Kutta line search failed", st.residual_norms);
    ++it;
    r = residual(s, &jac);
    norm = r.lpNorm<Eigen::Infinity>();
    st.residual_norms.push_back(norm);
    st.damping.push_back(lambda);
    log(it, norm, lambda);
  }

  st.phi = phi0 + z * s;
  st.te_jump = s;
  st.velocity = rec.recover(st.phi);
  st.iterations = it;
  st.converged = true;
  return st;
}

}  // namespace wingbem
