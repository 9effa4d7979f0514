//
// wingbem -- End-to-end run orchestration and run report.
//
#pragma once

#include "wingbem/config.hpp"
#include "wingbem/post.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace wingbem {

/// Thrown (with the original error nested) when a pipeline stage fails.
class StageError : public Error {
 public:
  explicit StageError(std::string stage) : Error("stage '" + stage + "' failed"), stage(std::move(stage)) {}
  std::string stage;
};

struct PipelineOptions {
  int threads = 1;
  bool dump_matrix = false;
  bool dump_wake_iters = false;
  bool write_outputs = true;
  std::function<void(const std::string&)> log;
};

struct StageTiming {
  std::string stage;
  double seconds;
};

struct RunResult {
  RunConfig config;
  std::filesystem::path output_dir;

  DofLayout dofs;
  int n_body_cells = 0;
  int n_wake_cells = 0;
  Eigen::VectorXd solid_angle;

  SolutionState state;
  PressureField pressure;
  Forces forces;
  std::vector<Section> sections;  // one per config.section_planes entry
  double mid_span_te_jump = 0.0;

  /// Newton residual history of every solve, in order (one for a flat wake).
  std::vector<std::vector<double>> newton_history;
  std::vector<std::string> log_lines;

  bool relaxed = false;
  std::vector<double> relax_displacement;
  std::vector<double> relax_alignment_deg;
  int relax_iterations = 0;
  bool relax_converged = false;
  std::vector<std::vector<Vec3>> wake_velocity;  // per pathline node, relaxed runs only
  /// Flat-wake solution preceding relaxation.
  PressureField flat_pressure;
  std::vector<Section> flat_sections;

  double sphere_max_phi_error = 0.0;  // max |φ − φ_exact| / max |φ_exact|
  double sphere_equator_cp = 0.0;

  std::vector<StageTiming> timings;
  std::vector<std::filesystem::path> outputs;
};

/// Directory used when the config leaves output.dir empty: $WINGBEM_OUTPUT_DIR or "wingbem_out".
std::filesystem::path default_output_dir();

/**
 * Runs build → refine → distribute → assemble → Newton → (relaxation) → post
 * and writes the outputs and report.json. A failing stage throws StageError
 * with the original exception nested.
 */
RunResult run_pipeline(const RunConfig& cfg, const PipelineOptions& opt = {});

/// Mid-span entry of the TE jump (triple closest to the span centre).
double mid_span_jump(const DofLayout& dofs, const Eigen::VectorXd& te_jump, const Vec3& span_direction);

}  // namespace wingbem
