//
// wingbem -- Galerkin hypersingular velocity on the wake and wake relaxation.
//
#pragma once

#include "wingbem/kutta.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wingbem {

struct GradientOptions {
  int outer_order = 0;   // Gauss points per direction on outer cells; 0 selects degree + 3
  int inner_order = 0;   // regular inner rule; 0 selects degree + 3
  int fp_theta = 0;      // finite-part angular points per side; 0 selects max(16, 2 * inner)
  int fp_rho = 0;        // finite-part radial points; 0 selects max(16, 2 * inner)
  double near_factor = 0.5;
  int near_levels = 6;
  int threads = 1;
  void validate() const;
};

/// ∂φ/∂n along the geometry normal at a body quadrature point.
using NeumannData = std::function<double(const FeCell& cell, const Vec2& xi, const MapSample& s)>;

/**
 * Boundary-gradient problem. The collocated hypersingular BIE value is
 *   g(x) = σ ( −Σ_body ∫ ∇_x G ∂φ/∂n J  +  Σ_all ∫ φ_h H(x, y, a_ξ × a_η) dξ )
 * with finite parts on the cell containing x; u = free_factor · g is then
 * L2-projected onto the DOFs of the outer cells.
 */
struct GradientProblem {
  Eigen::VectorXd density;  // φ on body DOFs, δφ on wake DOFs
  NeumannData neumann;      // empty: no single-layer term
  double sigma = 1.0;       // +1 exterior flow domain, −1 interior domain
  CellSet outer = CellSet::wake;
  double free_factor = 1.0;  // 1 on the two-sided wake, 2 on smooth body points
};

struct GradientField {
  std::vector<int> dofs;  // global DOFs of the outer cells
  Eigen::MatrixX3d u;     // one row per entry of dofs
  double residual = 0.0;  // relative mass-solve residual
  /// Row of a global DOF, -1 if absent.
  int row_of(int dof) const;
};

GradientField galerkin_gradient(const DofLayout& dofs, const GradientProblem& problem,
                                const GradientOptions& opt = {});

/// Collocated g(x) at one point interior to cell `cell` at reference point xi.
Vec3 hypersingular_bie_value(const DofLayout& dofs, const GradientProblem& problem, int cell, const Vec2& xi,
                             const GradientOptions& opt = {});

/// Mean perturbation velocity on the wake for the exterior problem (Neumann −V∞·n on the body).
GradientField wake_velocity(const DofLayout& dofs, const Eigen::VectorXd& phi, const FlowConditions& flow,
                            const GradientOptions& opt = {});

enum class MarchVelocity : std::uint8_t { predecessor, own };

/**
 * x_k = x_{k−1} + spacing · v / |v| along each pathline, roots fixed, with v
 * the velocity of node k−1 (predecessor) or node k (own).
 */
std::vector<std::vector<Vec3>> relax_step(const std::vector<std::vector<Vec3>>& nodes,
                                          const std::vector<std::vector<Vec3>>& velocity, double spacing,
                                          double v_ref, MarchVelocity mode = MarchVelocity::predecessor);

/// Smallest distance between segments of pathlines at least two apart; +inf when none.
double min_pathline_separation(const std::vector<std::vector<Vec3>>& nodes);

/// Nodal total velocity V∞ + u on the pathlines.
std::vector<std::vector<Vec3>> pathline_velocity(const DofLayout& dofs, const GradientField& u,
                                                 const FlowConditions& flow);

struct RelaxOptions {
  int max_iterations = 10;
  double geom_tol = 1e-3;  // relative to chord
  double chord = 1.0;
  MarchVelocity march = MarchVelocity::predecessor;
  GradientOptions gradient;
  QuadratureOptions quadrature;
  NewtonOptions newton;
  std::function<void(const std::string&)> log;
  std::function<void(int iteration, const DofLayout& dofs, const SolutionState& state)> on_iteration;
};

struct RelaxResult {
  SolutionState state;
  std::vector<double> displacement;  // max node displacement per iteration
  std::vector<double> alignment_deg;  // max segment/velocity angle per iteration, before moving
  int iterations = 0;
  bool converged = false;
  /// Velocity on the final wake.
  std::vector<std::vector<Vec3>> final_velocity;
};

/**
 * Fixed point: solve, compute wake velocity, re-march the pathlines, update
 * the wake columns; stops when the displacement falls below geom_tol·chord.
 */
RelaxResult relaxation_loop(BemSystem& sys, DofLayout& dofs, const VelocityRecovery& rec,
                            const FlowConditions& flow, const RelaxOptions& opt);

/// Largest angle [deg] between each segment and the velocity used to march it.
double max_alignment_angle_deg(const std::vector<std::vector<Vec3>>& nodes,
                               const std::vector<std::vector<Vec3>>& velocity,
                               MarchVelocity mode = MarchVelocity::predecessor);

}  // namespace wingbem
