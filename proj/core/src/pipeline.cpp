//
// wingbem -- End-to-end run orchestration and run report.
//
#include "wingbem/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace wingbem {

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("WINGBEM_OUTPUT_DIR"); env && *env) return env;
  return "wingbem_out";
}

double mid_span_jump(const DofLayout& dofs, const Eigen::VectorXd& te_jump, const Vec3& span_direction) {
  if (dofs.te_triples.empty()) return 0.0;
  double centre = 0.0;
  for (const auto& t : dofs.te_triples) centre += span_direction.dot(dofs.position[t.wk]);
  centre /= static_cast<double>(dofs.te_triples.size());
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dofs.te_triples.size(); ++i) {
    const double d = std::abs(span_direction.dot(dofs.position[dofs.te_triples[i].wk]) - centre);
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  return te_jump[static_cast<Eigen::Index>(best)];
}

namespace {

using Clock = std::chrono::steady_clock;

class Stages {
 public:
  Stages(RunResult& res, const PipelineOptions& opt) : res_(res), opt_(opt) {}

  template <class F>
  auto run(const std::string& name, F&& f) {
    const auto t0 = Clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        record(name, t0);
      } else {
        auto out = f();
        record(name, t0);
        return out;
      }
    } catch (const StageError&) {
      throw;
    } catch (...) {
      std::throw_with_nested(StageError(name));
    }
  }

  void log(const std::string& line) {
    res_.log_lines.push_back(line);
    if (opt_.log) opt_.log(line);
  }

 private:
  void record(const std::string& name, Clock::time_point t0) {
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    res_.timings.push_back({name, s});
    char buf[96];
    std::snprintf(buf, sizeof buf, "stage %-10s %.3f s", name.c_str(), s);
    log(buf);
  }

  RunResult& res_;
  const PipelineOptions& opt_;
};

std::string plane_tag(double y) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", y);
  return buf;
}

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

void write_report(const RunResult& r, const std::filesystem::path& path) {
  nlohmann::json j;
  j["config"] = format_config(r.config);
  j["dofs"] = {{"total", r.dofs.size()},
               {"body", r.dofs.n_body_dofs()},
               {"wake", r.dofs.size() - r.dofs.n_body_dofs()},
               {"te_triples", r.dofs.te_triples.size()},
               {"degree", r.dofs.degree}};
  j["cells"] = {{"body", r.n_body_cells}, {"wake", r.n_wake_cells}};
  j["newton"] = {{"residual_history", r.newton_history},
                 {"iterations", r.state.iterations},
                 {"converged", r.state.converged}};
  if (r.config.shape == BodyShape::sphere) {
    j["sphere"] = {{"max_phi_relative_error", r.sphere_max_phi_error}, {"equator_cp", r.sphere_equator_cp}};
  } else {
    j["te_jump"] = std::vector<double>(r.state.te_jump.data(), r.state.te_jump.data() + r.state.te_jump.size());
    j["mid_span_te_jump"] = r.mid_span_te_jump;
  }
  j["forces"] = {{"force", vec_json(r.forces.force)},
                 {"coefficient", vec_json(r.forces.coefficient)},
                 {"cl", r.forces.cl},
                 {"cdi", r.forces.cdi},
                 {"reference_area", r.forces.reference_area}};
  if (r.relaxed) {
    j["relaxation"] = {{"iterations", r.relax_iterations},
                       {"converged", r.relax_converged},
                       {"displacement", r.relax_displacement},
                       {"alignment_deg", r.relax_alignment_deg}};
  }
  nlohmann::json t = nlohmann::json::object();
  for (const auto& s : r.timings) t[s.stage] = s.seconds;
  j["wall_time_s"] = t;
  std::vector<std::string> outs;
  for (const auto& p : r.outputs) outs.push_back(p.string());
  outs.push_back(path.string());
  j["outputs"] = outs;
  j["log"] = r.log_lines;
  std::ofstream f(path);
  if (!f) throw IoError("cannot write report", path.string());
  f << j.dump(2) << "\n";
  if (!f) throw IoError("write failed", path.string());
}

}  // namespace

RunResult run_pipeline(const RunConfig& cfg, const PipelineOptions& opt) {
  RunResult res;
  res.config = cfg;
  Stages st(res, opt);
  st.run("config", [&] { cfg.validate(); });
  res.output_dir = cfg.output_dir.empty() ? default_output_dir() : std::filesystem::path(cfg.output_dir);
  const bool wing = cfg.shape == BodyShape::wing;
  const double chord = wing ? cfg.wing.chord : 2.0 * cfg.sphere_radius;

  SurfaceMesh mesh = st.run("build", [&] {
    if (!wing) return make_sphere_mesh(cfg.sphere_radius, cfg.sphere_divisions);
    WakeSpec w;
    w.length = cfg.wake_length_chords * cfg.wing.chord;
    w.cell_length = cfg.wake_cell_length;
    return build_initial_grid(cfg.wing, w);
  });
  if (wing) {
    mesh = st.run("refine", [&] {
      RefinementPolicy p;
      p.max_aspect_ratio = cfg.max_aspect_ratio;
      p.n_uniform = cfg.uniform_cycles;
      p.n_curvature = cfg.curvature_cycles;
      p.n_tip = cfg.tip_cycles;
      p.curvature_fraction = cfg.curvature_fraction;
      return refine(mesh, p);
    });
  }
  res.n_body_cells = static_cast<int>(mesh.cells.size());
  res.n_wake_cells = mesh.wake_cell_count();
  res.dofs = st.run("distribute", [&] { return distribute_dofs(mesh, cfg.fe_degree); });
  DofLayout& dofs = res.dofs;
  {
    char buf[128];
    std::snprintf(buf, sizeof buf, "mesh body_cells=%d wake_cells=%d dofs=%d", res.n_body_cells, res.n_wake_cells,
                  dofs.size());
    st.log(buf);
  }

  QuadratureOptions quad;
  quad.regular_order = cfg.quad_order;
  quad.singular_order = cfg.singular_quad_order;
  BemSystem sys = st.run("assemble", [&] { return assemble_system(dofs, cfg.flow, quad, opt.threads, cfg.te_free_term); });
  res.solid_angle = sys.solid_angle;

  if (opt.write_outputs) st.run("output", [&] { std::filesystem::create_directories(res.output_dir); });
  if (opt.dump_matrix) {
    st.run("dump", [&] {
      const auto p = res.output_dir / "system.txt";
      write_system(sys, p);
      res.outputs.push_back(p);
    });
  }

  const VelocityRecovery rec = st.run("recovery", [&] { return VelocityRecovery(dofs, cfg.flow); });
  NewtonOptions newton;
  newton.initial_guess = cfg.kutta_guess;
  newton.log = [&](const std::string& l) { st.log(l); };

  const Vec3 chord_dir = wing ? mesh.wing->chord_direction() : Vec3::UnitX();
  const auto cut_sections = [&](const Eigen::VectorXd& cp) {
    std::vector<Section> out;
    for (double y : cfg.section_planes) out.push_back(section_cut(dofs, cp, SectionPlane{1, y}, chord_dir));
    return out;
  };

  const bool relax = wing && cfg.relax_enabled && cfg.relax_iters > 0;
  if (!relax) {
    res.state = st.run("newton", [&] { return newton_solve(sys, dofs, rec, newton, cfg.flow); });
    res.newton_history.push_back(res.state.residual_norms);
  } else {
    res.relaxed = true;
    RelaxOptions ro;
    ro.max_iterations = cfg.relax_iters;
    ro.geom_tol = cfg.geom_tol;
    ro.chord = cfg.wing.chord;
    ro.march = cfg.march;
    ro.gradient.threads = opt.threads;
    ro.quadrature = quad;
    ro.newton = newton;
    ro.log = [&](const std::string& l) { st.log(l); };
    ro.on_iteration = [&](int it, const DofLayout& d, const SolutionState& s) {
      res.newton_history.push_back(s.residual_norms);
      if (it == 0) {
        res.flat_pressure = pressure_coefficient(s.velocity, d, cfg.flow, cfg.include_gravity);
        res.flat_sections = cut_sections(res.flat_pressure.cp);
      }
      if (opt.dump_wake_iters && opt.write_outputs) {
        char name[48];
        std::snprintf(name, sizeof name, "wake_iter_%02d.vtk", it);
        const auto p = res.output_dir / name;
        write_vtk(p, d, true, s.phi, Eigen::VectorXd::Zero(d.size()), Eigen::MatrixX3d::Zero(d.size(), 3));
        res.outputs.push_back(p);
      }
    };
    auto rr = st.run("relax", [&] { return relaxation_loop(sys, dofs, rec, cfg.flow, ro); });
    res.state = std::move(rr.state);
    res.relax_displacement = std::move(rr.displacement);
    res.relax_alignment_deg = std::move(rr.alignment_deg);
    res.relax_iterations = rr.iterations;
    res.relax_converged = rr.converged;
    res.wake_velocity = std::move(rr.final_velocity);
  }

  st.run("post", [&] {
    res.pressure = pressure_coefficient(res.state.velocity, dofs, cfg.flow, cfg.include_gravity);
    const double area = wing ? cfg.wing.span * cfg.wing.chord : M_PI * cfg.sphere_radius * cfg.sphere_radius;
    res.forces = integrate_forces(res.pressure.cp, dofs, cfg.flow, area);
    res.sections = cut_sections(res.pressure.cp);
    if (wing) {
      res.mid_span_te_jump = mid_span_jump(dofs, res.state.te_jump, mesh.wing->span_direction());
    } else {
      const double r = cfg.sphere_radius;
      double err = 0.0, ref = 0.0, xmin = std::numeric_limits<double>::infinity();
      for (int i = 0; i < dofs.size(); ++i) {
        const double exact = 0.5 * cfg.flow.v_inf * dofs.position[i].x() * r / dofs.position[i].norm();
        err = std::max(err, std::abs(res.state.phi[i] - exact));
        ref = std::max(ref, std::abs(exact));
        xmin = std::min(xmin, std::abs(dofs.position[i].x()));
      }
      res.sphere_max_phi_error = err / ref;
      double sum = 0.0;
      int n = 0;
      for (int i = 0; i < dofs.size(); ++i)
        if (std::abs(dofs.position[i].x()) <= xmin + 1e-9 * r) {
          sum += res.pressure.cp[i];
          ++n;
        }
      res.sphere_equator_cp = sum / n;
      char buf[128];
      std::snprintf(buf, sizeof buf, "sphere max_phi_error=%.4e equator_cp=%.4f", res.sphere_max_phi_error,
                    res.sphere_equator_cp);
      st.log(buf);
    }
  });

  if (!opt.write_outputs) return res;
  st.run("export", [&] {
    const auto& out = res.output_dir;
    if (cfg.write_vtk) {
      write_vtk(out / "body.vtk", dofs, false, res.state.phi, res.pressure.cp, res.state.velocity);
      res.outputs.push_back(out / "body.vtk");
      if (!dofs.pathlines.empty()) {
        Eigen::MatrixX3d vel = Eigen::MatrixX3d::Zero(dofs.size(), 3);
        for (std::size_t p = 0; p < res.wake_velocity.size(); ++p)
          for (std::size_t k = 0; k < res.wake_velocity[p].size() && k < dofs.pathlines[p].size(); ++k)
            vel.row(dofs.pathlines[p][k]) = res.wake_velocity[p][k].transpose();
        write_vtk(out / "wake.vtk", dofs, true, res.state.phi, res.pressure.cp, vel);
        res.outputs.push_back(out / "wake.vtk");
      }
    }
    if (cfg.write_csv) {
      if (!dofs.te_triples.empty()) {
        write_te_jump_csv(out / "te_delta_phi.csv", dofs, res.state.phi, chord);
        res.outputs.push_back(out / "te_delta_phi.csv");
      }
      for (std::size_t i = 0; i < res.sections.size(); ++i) {
        const auto p = out / ("section_y" + plane_tag(cfg.section_planes[i]) + ".csv");
        write_section_csv(p, res.sections[i]);
        res.outputs.push_back(p);
      }
    }
    write_report(res, out / "report.json");
  });
  return res;
}

}  // namespace wingbem
