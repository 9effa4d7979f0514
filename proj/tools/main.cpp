//
// wingbem -- Command line driver.
//
#include "wingbem/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int exit_code_for(const std::exception_ptr& ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const wingbem::ConfigError& e) {
    std::cerr << "config error: " << e.what();
    if (e.line > 0) std::cerr << " (line " << e.line << ")";
    std::cerr << "\n";
    return 2;
  } catch (const wingbem::WakeError& e) {
    std::cerr << "wake instability at iteration " << e.iteration << ": " << e.what() << "\n";
    return 4;
  } catch (const wingbem::IoError& e) {
    std::cerr << "i/o error: " << e.what() << " [" << e.path << "]\n";
    return 5;
  } catch (const wingbem::SolverError& e) {
    std::cerr << "solver error: " << e.what() << " (row " << e.row << ")\n";
    return 3;
  } catch (const wingbem::ConvergenceError& e) {
    std::cerr << "solver error: " << e.what() << " after " << e.residual_trace.size() << " residuals\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wingbem: potential flow past lifting surfaces"};
  std::string config_path, preset_name, out_dir;
  int threads = 1;
  bool dump_matrix = false, dump_wake = false, list_presets = false, print_config = false;
  app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset_name, "Built-in preset name");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--threads", threads, "Worker threads for assembly and gradient recovery")->check(CLI::PositiveNumber);
  app.add_flag("--dump-matrix", dump_matrix, "Write the assembled system to system.txt");
  app.add_flag("--dump-wake-iters", dump_wake, "Write the wake geometry of every relaxation iteration");
  app.add_flag("--list-presets", list_presets, "List presets and exit");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (list_presets) {
    for (const auto& n : wingbem::preset_names()) std::cout << n << "\n";
    return 0;
  }

  wingbem::RunConfig cfg;
  try {
    if (!config_path.empty() && !preset_name.empty()) throw wingbem::ConfigError("--config and --preset are exclusive");
    if (!preset_name.empty()) cfg = wingbem::preset(preset_name);
    else if (!config_path.empty()) cfg = wingbem::parse_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.validate();
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
  if (print_config) {
    std::cout << wingbem::format_config(cfg);
    return 0;
  }

  wingbem::PipelineOptions opt;
  opt.threads = threads;
  opt.dump_matrix = dump_matrix;
  opt.dump_wake_iters = dump_wake;
  opt.log = [](const std::string& line) { std::cout << line << std::endl; };
  try {
    const auto res = wingbem::run_pipeline(cfg, opt);
    std::cout << "dofs " << res.dofs.size() << "  CL " << res.forces.cl << "  CDi " << res.forces.cdi << "\n";
    if (cfg.shape == wingbem::BodyShape::wing) std::cout << "mid-span delta_phi " << res.mid_span_te_jump << "\n";
    std::cout << "outputs in " << res.output_dir.string() << "\n";
  } catch (const wingbem::StageError& e) {
    std::cerr << e.what() << ": ";
    try {
      std::rethrow_if_nested(e);
    } catch (...) {
      return exit_code_for(std::current_exception());
    }
    std::cerr << "\n";
    return 3;
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
  return 0;
}
