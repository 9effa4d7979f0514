//
// wingbem -- Collocation BEM system: body BIE rows, wake convection rows,
// trailing-edge coupling rows and the dense direct solve.
//
#pragma once

#include "wingbem/dofs.hpp"
#include "wingbem/kernels.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

namespace wingbem {

enum class RowKind : std::uint8_t { body_bie, wake_convection, kutta, delta_phi_coupling };
const char* row_kind_name(RowKind k);

struct QuadratureOptions {
  int regular_order = 0;   // Gauss points per direction; 0 selects degree + 3
  int singular_order = 0;  // Duffy points per direction and triangle; 0 selects 2 * regular
  double near_factor = 0.5;
  int near_levels = 8;
  int regular(int degree) const { return regular_order > 0 ? regular_order : degree + 3; }
  int singular(int degree) const { return singular_order > 0 ? singular_order : 2 * regular(degree); }
  void validate() const;
};

/**
 * Free term at a TE leeward collocation point. The fluid ball around the
 * point is cut by the wake: split weights c φ_lw by the upper/lower wedge
 * angles into c_u φ_lw + c_l φ_ww; leeward keeps c φ_lw.
 */
enum class TeFreeTerm : std::uint8_t { split, leeward };

/**
 * A (C+N) phi = b plus the linear trailing-edge rows. Kutta rows are left
 * zero with zero rhs; the Kutta solver owns them.
 */
struct BemSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<RowKind> row_kind;
  /// c_i on body rows, NaN elsewhere.
  Eigen::VectorXd solid_angle;
  /// Windward share c_l / c of the free term, per TE triple.
  Eigen::VectorXd te_lower_fraction;
  TeFreeTerm te_free_term = TeFreeTerm::split;
  int size() const { return static_cast<int>(rhs.size()); }
};

struct BodyRow {
  Eigen::VectorXd n;  // N_ij over all DOFs (body and wake columns)
  double b = 0.0;
};

/// Raw N row and b_i for a body or TE-leeward collocation DOF.
BodyRow assemble_body_row(int i, const DofLayout& dofs, const FlowConditions& flow,
                          const QuadratureOptions& q = {});

BemSystem assemble_system(const DofLayout& dofs, const FlowConditions& flow, const QuadratureOptions& q = {},
                          int threads = 1, TeFreeTerm te = TeFreeTerm::split);

/// c_l / c at a TE triple from the wedge angles between wake, leeward and windward surfaces.
double te_lower_fraction(const DofLayout& dofs, const TeTriple& tr);

/// Recomputes the wake columns of every body row and the TE free-term split after the wake moved.
void update_wake_columns(BemSystem& sys, const DofLayout& dofs, const QuadratureOptions& q = {},
                         int threads = 1);

/// LU factorization with a pivot check.
class LinearSolver {
 public:
  explicit LinearSolver(const Eigen::MatrixXd& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  int size() const { return static_cast<int>(a_.rows()); }

 private:
  Eigen::MatrixXd a_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Direct solve; throws SolverError on a singular matrix or a residual above 1e-10 relative.
Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Potential at a field point from the boundary values (body phi and wake delta phi).
double evaluate_potential(const Vec3& x, const DofLayout& dofs, const Eigen::VectorXd& phi,
                          const FlowConditions& flow, const QuadratureOptions& q = {});
std::vector<double> evaluate_potential(const std::vector<Vec3>& x, const DofLayout& dofs, const Eigen::VectorXd& phi,
                                       const FlowConditions& flow, const QuadratureOptions& q = {});

/**
 * Text dump: first line "N_V <n>", then n rows of "<kind> <rhs> <a_i0> ... <a_in-1>"
 * in row-major order, %.17g.
 */
void write_system(const BemSystem& sys, const std::filesystem::path& path);

}  // namespace wingbem
