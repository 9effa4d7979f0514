//
// wingbem -- Run configuration: sectioned key=value files and presets.
//
#pragma once

#include "wingbem/assembly.hpp"
#include "wingbem/geometry.hpp"
#include "wingbem/kernels.hpp"
#include "wingbem/kutta.hpp"
#include "wingbem/mesh.hpp"
#include "wingbem/wake.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wingbem {

enum class BodyShape : std::uint8_t { wing, sphere };

struct RunConfig {
  BodyShape shape = BodyShape::wing;
  double sphere_radius = 1.0;
  int sphere_divisions = 16;

  WingSpec wing;
  FlowConditions flow;

  int fe_degree = 1;
  int quad_order = 0;
  int singular_quad_order = 0;
  KuttaGuess kutta_guess = KuttaGuess::linear;
  TeFreeTerm te_free_term = TeFreeTerm::split;

  double max_aspect_ratio = 2.5;
  int uniform_cycles = 3;
  int curvature_cycles = 0;
  int tip_cycles = 0;
  double curvature_fraction = 0.3;

  double wake_length_chords = 4.0;
  double wake_cell_length = 0.5;
  int relax_iters = 10;
  bool relax_enabled = false;
  double geom_tol = 1e-3;
  MarchVelocity march = MarchVelocity::predecessor;

  std::string output_dir;  // empty: WINGBEM_OUTPUT_DIR or "wingbem_out"
  bool write_vtk = true;
  bool write_csv = true;
  std::vector<double> section_planes;  // y coordinates of section cuts
  bool include_gravity = false;

  void validate() const;
};

/// Parses a config file; unknown sections or keys and malformed values throw ConfigError.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

/// Resolved configuration in the same key=value format.
std::string format_config(const RunConfig& cfg);

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

}  // namespace wingbem
