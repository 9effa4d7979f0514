//
// wingbem -- L2 velocity recovery and the Newton solve of the nonlinear
// pressure-equality Kutta condition.
//
#pragma once

#include "wingbem/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wingbem {

enum class CellSet : std::uint8_t { body, wake, all };

/// Sparse mass matrix on the DOFs touched by a cell set (compact numbering).
struct MassMatrix {
  std::vector<int> global;  // compact -> global DOF
  std::vector<int> local;   // global -> compact, -1 when untouched
  Eigen::SparseMatrix<double> m;
  int size() const { return static_cast<int>(global.size()); }
};

bool in_cell_set(const FeCell& cell, CellSet set);

/// m_ij = ∫ ψ_i ψ_j ds with hanging-node constraints applied; order 0 selects degree + 2.
MassMatrix assemble_mass_matrix(const DofLayout& dofs, CellSet set = CellSet::body, int order = 0);

/**
 * Nodal total velocity χ from  M χ_c = B_c φ + c_c, with
 * B_c φ = ∫ ψ_i ∂_c φ_h and c_c = ∫ ψ_i ((−V∞·n) n + V∞)_c over the body cells.
 */
class VelocityRecovery {
 public:
  VelocityRecovery(const DofLayout& dofs, const FlowConditions& flow, int order = 0);

  /// N_V x 3 nodal velocities; rows of DOFs outside the body are zero.
  Eigen::MatrixX3d recover(const Eigen::VectorXd& phi) const;
  /// Velocity at one body DOF.
  Vec3 at(int dof, const Eigen::VectorXd& phi) const;
  /// Linear map of χ_c at a DOF: χ_c(dof) = row · φ + offset.
  void operator_row(int dof, int comp, Eigen::RowVectorXd& row, double& offset) const;

  const MassMatrix& mass() const { return mass_; }
  int n_dofs() const { return n_; }

 private:
  int n_;
  MassMatrix mass_;
  std::array<Eigen::SparseMatrix<double, Eigen::RowMajor>, 3> b_;  // compact x N_V
  std::array<Eigen::VectorXd, 3> c_;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt_;
};

/// r_t = |χ(lw_t)|² − |χ(ww_t)|².
Eigen::VectorXd kutta_residual(const Eigen::MatrixX3d& velocity, const std::vector<TeTriple>& triples);
Eigen::VectorXd kutta_residual(const VelocityRecovery& rec, const Eigen::VectorXd& phi,
                               const std::vector<TeTriple>& triples);

/// ∂r/∂φ (T x N_V) from the velocity operator rows.
Eigen::MatrixXd kutta_jacobian(const VelocityRecovery& rec, const Eigen::VectorXd& phi,
                               const std::vector<TeTriple>& triples);
/// Central finite-difference ∂r/∂φ.
Eigen::MatrixXd kutta_jacobian_fd(const VelocityRecovery& rec, const Eigen::VectorXd& phi,
                                  const std::vector<TeTriple>& triples, double eps = 1e-6);

/// Newton start: zero jump, or the linear condition (χ_lw − χ_ww)·t = 0 along the wake direction t.
enum class KuttaGuess : std::uint8_t { zero, linear };

struct NewtonOptions {
  KuttaGuess initial_guess = KuttaGuess::linear;
  double tol_abs = -1.0;  // negative selects 1e-10 V∞²
  int max_iterations = 30;
  int max_halvings = 8;
  std::function<void(const std::string&)> log;
};

struct SolutionState {
  Eigen::VectorXd phi;       // body potential and wake potential jump, per global DOF
  Eigen::VectorXd te_jump;   // δφ at each TE triple (Newton unknowns)
  Eigen::MatrixX3d velocity;
  std::vector<double> residual_norms;
  std::vector<double> damping;
  int iterations = 0;
  bool converged = false;
};

/**
 * Newton iteration on the TE potential jumps s_t. Each iterate solves the
 * linear rows exactly with the Kutta rows replaced by φ_lw − φ_ww = s_t; the
 * Kutta residual is then driven to zero. Without triples this is one linear solve.
 */
SolutionState newton_solve(const BemSystem& sys, const DofLayout& dofs, const VelocityRecovery& rec,
                           const NewtonOptions& opt = {}, const FlowConditions& flow = {});

}  // namespace wingbem
