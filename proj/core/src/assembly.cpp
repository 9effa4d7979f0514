//
// wingbem -- Collocation BEM system assembly and dense solve.
//
#include "wingbem/assembly.hpp"

#include "integration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace wingbem {

const char* row_kind_name(RowKind k) {
  switch (k) {
    case RowKind::body_bie: return "body_bie";
    case RowKind::wake_convection: return "wake_convection";
    case RowKind::kutta: return "kutta";
    case RowKind::delta_phi_coupling: return "delta_phi_coupling";
  }
  return "unknown";
}

void QuadratureOptions::validate() const {
  if (regular_order < 0 || regular_order > 30) throw DomainError("regular quadrature order out of range");
  if (singular_order < 0 || singular_order > 64) throw DomainError("singular quadrature order out of range");
  if (!(near_factor >= 0.0)) throw DomainError("near-field factor must be non-negative");
  if (near_levels < 0 || near_levels > 12) throw DomainError("near-field levels out of range");
}

namespace {

constexpr double kInv4Pi = 0.25 / pi;

class RowIntegrator {
 public:
  RowIntegrator(const DofLayout& dofs, const QuadratureOptions& q, const Vec3& vinf)
      : dofs_(dofs), q_(q), vinf_(vinf), table_(detail::build_regular_table(dofs, q.regular(dofs.degree))),
        tol_(1e-9 * dofs.length_scale) {}

  /// Adds the double-layer row of cell c at x into n and, for body cells, the single layer into b.
  void cell(std::size_t c, const Vec3& x, double* n, double& b) const {
    const FeCell& fc = dofs_.cells[c];
    const auto& cs = table_.cells[c];
    const int nl = fc.n_local();
    const bool body = !fc.is_wake();
    double dl[16] = {};
    double sl = 0.0;
    double psi[16];
    auto point = [&](const Vec2& xi, const Vec3& y, const Vec3& m, double w) {
      const Vec3 d = y - x;
      const double r2 = d.squaredNorm();
      if (r2 == 0.0) return;
      const double r = std::sqrt(r2);
      const double k = d.dot(m) * kInv4Pi / (r2 * r) * w;
      fc.map.shape_values(xi, psi);
      for (int j = 0; j < nl; ++j) dl[j] += k * psi[j];
      if (body) sl += kInv4Pi / r * vinf_.dot(m) * w;
    };
    Vec2 xi0;
    if (detail::find_singular_point(fc, cs, x, tol_, xi0)) {
      const auto& rule = duffy_cached(q_.singular(dofs_.degree), xi0);
      for (std::size_t k = 0; k < rule.size(); ++k) {
        const auto s = fc.map.sample(rule.nodes[k]);
        point(rule.nodes[k], s.position, s.m, rule.weights[k]);
      }
    } else if (detail::is_near(cs, x, q_.near_factor)) {
      detail::integrate_near(fc.map, x, q_.near_factor, q_.near_levels, q_.regular(dofs_.degree),
                             [&](const Vec2& xi, const MapSample& s, double w) { point(xi, s.position, s.m, w); });
    } else {
      const int nq = static_cast<int>(cs.w.size());
      for (int k = 0; k < nq; ++k) {
        const Vec3 d = cs.y[k] - x;
        const double r2 = d.squaredNorm();
        const double r = std::sqrt(r2);
        const double kd = d.dot(cs.m[k]) * kInv4Pi / (r2 * r) * cs.w[k];
        for (int j = 0; j < nl; ++j) dl[j] += kd * table_.shape(k, j);
        if (body) sl += kInv4Pi / r * vinf_.dot(cs.m[k]) * cs.w[k];
      }
    }
    for (int j = 0; j < nl; ++j) {
      for (const auto& e : fc.dofs(j)) n[e.dof] += dl[j] * e.weight;
    }
    b += sl;
  }

  void row(const Vec3& x, double* n, double& b, bool body_cells, bool wake_cells) const {
    for (std::size_t c = 0; c < dofs_.cells.size(); ++c) {
      const bool wake = dofs_.cells[c].is_wake();
      if ((wake && wake_cells) || (!wake && body_cells)) cell(c, x, n, b);
    }
  }

 private:
  const DofLayout& dofs_;
  QuadratureOptions q_;
  Vec3 vinf_;
  detail::RegularTable table_;
  double tol_;
};

bool is_collocation_dof(DofKind k) { return k == DofKind::body || k == DofKind::te_leeward; }

}  // namespace

BodyRow assemble_body_row(int i, const DofLayout& dofs, const FlowConditions& flow, const QuadratureOptions& q) {
  if (i < 0 || i >= dofs.size()) throw AssemblyError("collocation DOF index out of range");
  if (!is_collocation_dof(dofs.kind[i]))
    throw AssemblyError("DOF " + std::to_string(i) + " of kind " + dof_kind_name(dofs.kind[i]) +
                        " does not carry a boundary integral row");
  q.validate();
  const RowIntegrator integ(dofs, q, flow.velocity());
  BodyRow out;
  out.n = Eigen::VectorXd::Zero(dofs.size());
  integ.row(dofs.position[i], out.n.data(), out.b, true, true);
  return out;
}

double te_lower_fraction(const DofLayout& dofs, const TeTriple& tr) {
  const Vec3 x = dofs.position[tr.lw];
  Vec3 dir[3] = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};  // leeward, windward, wake
  Vec3 edge = Vec3::Zero();
  const int r = dofs.degree;
  for (const auto& c : dofs.cells) {
    for (int k = 0; k < c.n_local(); ++k) {
      const auto ent = c.dofs(k);
      if (ent.size() != 1) continue;
      const int d = ent[0].dof;
      const int side = d == tr.lw ? 0 : d == tr.ww ? 1 : d == tr.wk ? 2 : -1;
      if (side < 0) continue;
      const Vec2 xi(static_cast<double>(k % (r + 1)) / r, static_cast<double>(k / (r + 1)) / r);
      const Vec2 inner = xi + 0.25 * (Vec2(0.5, 0.5) - xi);
      const Vec3 t = c.map.position(inner) - x;
      if (t.norm() > 0.0) dir[side] += t.normalized();
      if (side == 2) edge += c.map.sample(xi).a_eta;
    }
  }
  if (edge.norm() == 0.0 || dir[0].norm() == 0.0 || dir[1].norm() == 0.0 || dir[2].norm() == 0.0)
    throw AssemblyError("TE triple at DOF " + std::to_string(tr.lw) + " lacks adjacent cells");
  edge.normalize();
  for (auto& t : dir) {
    t -= t.dot(edge) * edge;
    if (t.norm() < 1e-12) throw AssemblyError("degenerate TE wedge at DOF " + std::to_string(tr.lw));
    t.normalize();
  }
  const double up = std::acos(std::clamp(dir[2].dot(dir[0]), -1.0, 1.0));
  const double low = std::acos(std::clamp(dir[2].dot(dir[1]), -1.0, 1.0));
  return low / (up + low);
}

namespace {

void apply_te_split(BemSystem& sys, const DofLayout& dofs) {
  if (sys.te_free_term == TeFreeTerm::leeward) return;
  for (std::size_t t = 0; t < dofs.te_triples.size(); ++t) {
    const auto& tr = dofs.te_triples[t];
    const double c = sys.solid_angle[tr.lw];
    const double old_cl = sys.te_lower_fraction[t] * c;
    const double f = te_lower_fraction(dofs, tr);
    const double cl = f * c;
    sys.te_lower_fraction[t] = f;
    sys.matrix(tr.lw, tr.lw) += old_cl - cl;
    sys.matrix(tr.lw, tr.ww) += cl - old_cl;
  }
}

}  // namespace

BemSystem assemble_system(const DofLayout& dofs, const FlowConditions& flow, const QuadratureOptions& q,
                          int threads, TeFreeTerm te) {
  flow.validate();
  q.validate();
  const int n = dofs.size();
  BemSystem sys;
  sys.matrix = Eigen::MatrixXd::Zero(n, n);
  sys.rhs = Eigen::VectorXd::Zero(n);
  sys.row_kind.assign(n, RowKind::body_bie);
  sys.solid_angle = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());

  std::vector<int> triple_of_ww(n, -1), triple_of_wk(n, -1);
  for (std::size_t t = 0; t < dofs.te_triples.size(); ++t) {
    const auto& tr = dofs.te_triples[t];
    if (triple_of_ww[tr.ww] >= 0 || triple_of_wk[tr.wk] >= 0) throw AssemblyError("TE DOF shared by two triples");
    triple_of_ww[tr.ww] = static_cast<int>(t);
    triple_of_wk[tr.wk] = static_cast<int>(t);
  }

  std::vector<int> body_rows;
  for (int i = 0; i < n; ++i) {
    switch (dofs.kind[i]) {
      case DofKind::body:
      case DofKind::te_leeward:
        body_rows.push_back(i);
        break;
      case DofKind::te_windward:
        if (triple_of_ww[i] < 0) throw AssemblyError("windward TE DOF " + std::to_string(i) + " has no triple");
        sys.row_kind[i] = RowKind::kutta;
        break;
      case DofKind::wake_te: {
        const int t = triple_of_wk[i];
        if (t < 0) throw AssemblyError("TE wake DOF " + std::to_string(i) + " has no triple");
        const auto& tr = dofs.te_triples[t];
        sys.row_kind[i] = RowKind::delta_phi_coupling;
        sys.matrix(i, tr.wk) += 1.0;
        sys.matrix(i, tr.lw) -= 1.0;
        sys.matrix(i, tr.ww) += 1.0;
        break;
      }
      case DofKind::wake: {
        const int p = dofs.predecessor[i];
        if (p < 0) throw AssemblyError("orphan wake DOF " + std::to_string(i));
        sys.row_kind[i] = RowKind::wake_convection;
        sys.matrix(i, i) = 1.0;
        sys.matrix(i, p) = -1.0;
        break;
      }
    }
  }

  const RowIntegrator integ(dofs, q, flow.velocity());
  std::vector<bool> body_col(n);
  for (int j = 0; j < n; ++j) body_col[j] = dofs.is_body(j);
  parallel_for(body_rows.size(), threads, [&](std::size_t k) {
    const int i = body_rows[k];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    double b = 0.0;
    integ.row(dofs.position[i], row.data(), b, true, true);
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
      if (body_col[j]) sum += row[j];
    const double c = 1.0 - sum;
    row[i] += c;
    sys.matrix.row(i) = row.transpose();
    sys.rhs[i] = b;
    sys.solid_angle[i] = c;
  });

  sys.te_free_term = te;
  sys.te_lower_fraction = Eigen::VectorXd::Zero(dofs.te_triples.size());
  apply_te_split(sys, dofs);
  return sys;
}

void update_wake_columns(BemSystem& sys, const DofLayout& dofs, const QuadratureOptions& q, int threads) {
  q.validate();
  const int n = dofs.size();
  if (sys.size() != n) throw AssemblyError("system size does not match the DOF layout");
  const RowIntegrator integ(dofs, q, Vec3::Zero());
  std::vector<int> body_rows;
  for (int i = 0; i < n; ++i)
    if (sys.row_kind[i] == RowKind::body_bie) body_rows.push_back(i);
  parallel_for(body_rows.size(), threads, [&](std::size_t k) {
    const int i = body_rows[k];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    double b = 0.0;
    integ.row(dofs.position[i], row.data(), b, false, true);
    for (int j = 0; j < n; ++j)
      if (dofs.is_wake(j)) sys.matrix(i, j) = row[j];
  });
  apply_te_split(sys, dofs);
}

LinearSolver::LinearSolver(const Eigen::MatrixXd& a) : a_(a) {
  if (a.rows() != a.cols()) throw SolverError("matrix is not square", -1);
  lu_.compute(a_);
  const auto& u = lu_.matrixLU();
  double umax = 0.0;
  for (Eigen::Index k = 0; k < u.rows(); ++k) umax = std::max(umax, std::abs(u(k, k)));
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    if (!(std::abs(u(k, k)) > 1e-14 * umax))
      throw SolverError("singular matrix at pivot " + std::to_string(k), static_cast<int>(k));
  }
}

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) const { return lu_.solve(b); }
Eigen::MatrixXd LinearSolver::solve(const Eigen::MatrixXd& b) const { return lu_.solve(b); }

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.size()) throw SolverError("rhs size does not match the matrix", -1);
  const LinearSolver solver(a);
  Eigen::VectorXd x = solver.solve(b);
  const double res = (a * x - b).lpNorm<Eigen::Infinity>();
  const double bn = b.lpNorm<Eigen::Infinity>();
  const double scale = bn > 0.0 ? bn : 1.0;
  if (!(res <= 1e-10 * scale)) throw SolverError("linear solve residual " + std::to_string(res / scale), -1);
  return x;
}

std::vector<double> evaluate_potential(const std::vector<Vec3>& x, const DofLayout& dofs, const Eigen::VectorXd& phi,
                                       const FlowConditions& flow, const QuadratureOptions& q) {
  if (phi.size() != dofs.size()) throw DomainError("potential vector size does not match the DOF layout");
  q.validate();
  const RowIntegrator integ(dofs, q, flow.velocity());
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& p : x) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dofs.size());
    double b = 0.0;
    integ.row(p, row.data(), b, true, true);
    out.push_back(b - row.dot(phi));
  }
  return out;
}

double evaluate_potential(const Vec3& x, const DofLayout& dofs, const Eigen::VectorXd& phi,
                          const FlowConditions& flow, const QuadratureOptions& q) {
  return evaluate_potential(std::vector<Vec3>{x}, dofs, phi, flow, q).front();
}

void write_system(const BemSystem& sys, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw IoError("cannot open matrix dump", path.string());
  const int n = sys.size();
  std::fprintf(f, "N_V %d\n", n);
  for (int i = 0; i < n; ++i) {
    std::fprintf(f, "%s %.17g", row_kind_name(sys.row_kind[i]), sys.rhs[i]);
    for (int j = 0; j < n; ++j) std::fprintf(f, " %.17g", sys.matrix(i, j));
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw IoError("cannot write matrix dump", path.string());
}

}  // namespace wingbem
