//
// wingbem -- Pressure coefficient, section cuts, force integration and export.
//
#pragma once

#include "wingbem/dofs.hpp"
#include "wingbem/kernels.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wingbem {

struct PressureField {
  Eigen::VectorXd cp;        // per global DOF; NaN off the body
  Eigen::VectorXd pressure;  // p − p∞ [Pa], same layout
};

/// cp = 1 − |V|²/V∞² (minus 2gz/V∞² with gravity).
PressureField pressure_coefficient(const Eigen::MatrixX3d& velocity, const DofLayout& dofs,
                                   const FlowConditions& flow, bool include_gravity = false);

struct SectionPlane {
  int axis = 1;  // 0: x, 1: y, 2: z
  double coordinate = 0.0;
};

struct SectionSample {
  double x_over_c;
  double value;
  Vec3 position;
};

struct Section {
  std::vector<SectionSample> leeward, windward;
  double chord = 0.0;
  bool empty() const { return leeward.empty() && windward.empty(); }
};

/**
 * Intersection of the body with a coordinate plane. Samples come from
 * bisection along reference lines ξ, η = k/(r·subdivision) of every cell,
 * the field interpolated with the cell shape functions. x/c is measured
 * along `chord_direction` from the section's leading point.
 */
Section section_cut(const DofLayout& dofs, const Eigen::VectorXd& field, const SectionPlane& plane,
                    const Vec3& chord_direction, int subdivision = 4);

struct Forces {
  Vec3 force;             // dimensional [N]
  Vec3 coefficient;       // F / (q S)
  double cl = 0.0;        // along z
  double cdi = 0.0;       // along x
  double reference_area = 0.0;
};

/// F = −Σ cp q (a_ξ × a_η) w over body cells with cp interpolated from the nodes.
Forces integrate_forces(const Eigen::VectorXd& cp, const DofLayout& dofs, const FlowConditions& flow,
                        double reference_area, int order = 0);

/// Legacy ASCII VTK POLYDATA of the body (phi) or wake (delta_phi); high-order cells are split into bilinear quads.
void write_vtk(const std::filesystem::path& path, const DofLayout& dofs, bool wake, const Eigen::VectorXd& phi,
               const Eigen::VectorXd& cp, const Eigen::MatrixX3d& velocity);

/// Columns x_over_c,side,minus_cp.
void write_section_csv(const std::filesystem::path& path, const Section& section);
/// Columns y_over_c,delta_phi (one row per TE triple).
void write_te_jump_csv(const std::filesystem::path& path, const DofLayout& dofs, const Eigen::VectorXd& phi,
                       double chord);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace wingbem
