//
// wingbem -- Run configuration parsing, formatting and presets.
//
#include "wingbem/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wingbem {

void RunConfig::validate() const {
  if (shape == BodyShape::sphere) {
    if (!(sphere_radius > 0.0)) throw ConfigError("sphere_radius must be positive");
    if (sphere_divisions < 1) throw ConfigError("sphere_divisions must be at least 1");
  } else {
    try {
      wing.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  try {
    flow.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (fe_degree < 1 || fe_degree > 3) throw ConfigError("fe_degree must be 1, 2 or 3");
  if (quad_order < 0 || quad_order > 30) throw ConfigError("quad_order must be in [0, 30]");
  if (singular_quad_order < 0 || singular_quad_order > 64) throw ConfigError("singular_quad_order must be in [0, 64]");
  if (!(max_aspect_ratio >= 1.0)) throw ConfigError("max_aspect_ratio must be at least 1");
  if (uniform_cycles < 0) throw ConfigError("uniform_cycles must be non-negative");
  if (curvature_cycles < 0) throw ConfigError("curvature_cycles must be non-negative");
  if (tip_cycles < 0) throw ConfigError("tip_cycles must be non-negative");
  if (!(curvature_fraction > 0.0 && curvature_fraction <= 1.0)) throw ConfigError("curvature_fraction must be in (0, 1]");
  if (!(wake_length_chords > 0.0)) throw ConfigError("length_chords must be positive");
  if (!(wake_cell_length > 0.0)) throw ConfigError("cell_length_d must be positive");
  if (relax_iters < 0) throw ConfigError("relax_iters must be non-negative");
  if (!(geom_tol > 0.0)) throw ConfigError("geom_tol must be positive");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v, int line) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("invalid value for " + key + ": '" + v + "'", line);
  return out;
}

int to_int(const std::string& key, const std::string& v, int line) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("invalid value for " + key + ": '" + v + "'", line);
  return out;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid value for " + key + ": '" + v + "'", line);
}

template <class E>
E to_enum(const std::string& key, const std::string& v, int line, std::initializer_list<std::pair<const char*, E>> opts) {
  for (const auto& [name, e] : opts)
    if (v == name) return e;
  throw ConfigError("invalid value for " + key + ": '" + v + "'", line);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value, int line)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto dbl = [&t](const std::string& k, double RunConfig::*f) {
      t[k] = [f](RunConfig& c, const std::string& key, const std::string& v, int l) { c.*f = to_double(key, v, l); };
    };
    auto integer = [&t](const std::string& k, int RunConfig::*f) {
      t[k] = [f](RunConfig& c, const std::string& key, const std::string& v, int l) { c.*f = to_int(key, v, l); };
    };
    auto boolean = [&t](const std::string& k, bool RunConfig::*f) {
      t[k] = [f](RunConfig& c, const std::string& key, const std::string& v, int l) { c.*f = to_bool(key, v, l); };
    };
    t["body.shape"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.shape = to_enum<BodyShape>(k, v, l, {{"wing", BodyShape::wing}, {"sphere", BodyShape::sphere}});
    };
    dbl("body.sphere_radius", &RunConfig::sphere_radius);
    integer("body.sphere_divisions", &RunConfig::sphere_divisions);
    t["wing.chord"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) { c.wing.chord = to_double(k, v, l); };
    t["wing.span"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) { c.wing.span = to_double(k, v, l); };
    t["wing.alpha_deg"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.wing.alpha_deg = to_double(k, v, l);
    };
    t["wing.sweep_deg"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.wing.sweep_deg = to_double(k, v, l);
    };
    t["wing.tip_cap"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.wing.tip_cap = to_enum<TipCap>(k, v, l, {{"rounded", TipCap::rounded}, {"flat", TipCap::flat}});
    };
    t["wing.te_closure"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.wing.te_closure = to_enum<TeClosure>(k, v, l, {{"closed", TeClosure::closed}, {"open", TeClosure::open}});
    };
    t["flow.v_inf"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) { c.flow.v_inf = to_double(k, v, l); };
    t["flow.rho"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) { c.flow.rho = to_double(k, v, l); };
    t["flow.g"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) { c.flow.g = to_double(k, v, l); };
    integer("discretization.fe_degree", &RunConfig::fe_degree);
    integer("discretization.quad_order", &RunConfig::quad_order);
    integer("discretization.singular_quad_order", &RunConfig::singular_quad_order);
    t["discretization.kutta_guess"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.kutta_guess = to_enum<KuttaGuess>(k, v, l, {{"linear", KuttaGuess::linear}, {"zero", KuttaGuess::zero}});
    };
    t["discretization.te_free_term"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.te_free_term = to_enum<TeFreeTerm>(k, v, l, {{"split", TeFreeTerm::split}, {"leeward", TeFreeTerm::leeward}});
    };
    dbl("refinement.max_aspect_ratio", &RunConfig::max_aspect_ratio);
    integer("refinement.uniform_cycles", &RunConfig::uniform_cycles);
    integer("refinement.curvature_cycles", &RunConfig::curvature_cycles);
    integer("refinement.tip_cycles", &RunConfig::tip_cycles);
    dbl("refinement.curvature_fraction", &RunConfig::curvature_fraction);
    dbl("wake.length_chords", &RunConfig::wake_length_chords);
    dbl("wake.cell_length_d", &RunConfig::wake_cell_length);
    integer("wake.relax_iters", &RunConfig::relax_iters);
    boolean("wake.relax_enabled", &RunConfig::relax_enabled);
    dbl("wake.geom_tol", &RunConfig::geom_tol);
    t["wake.march"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.march = to_enum<MarchVelocity>(k, v, l, {{"predecessor", MarchVelocity::predecessor}, {"own", MarchVelocity::own}});
    };
    t["output.dir"] = [](RunConfig& c, const std::string&, const std::string& v, int) { c.output_dir = v; };
    t["output.formats"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.write_vtk = c.write_csv = false;
      for (const auto& f : split_list(v)) {
        if (f == "vtk") c.write_vtk = true;
        else if (f == "csv") c.write_csv = true;
        else throw ConfigError("invalid value for " + k + ": '" + f + "'", l);
      }
    };
    t["output.section_planes"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.section_planes.clear();
      for (const auto& s : split_list(v)) c.section_planes.push_back(to_double(k, s, l));
    };
    boolean("output.include_gravity", &RunConfig::include_gravity);
    return t;
  }();
  return table;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      static const char* known[] = {"body", "wing", "flow", "discretization", "refinement", "wake", "output"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    if (section.empty()) throw ConfigError("key outside of a section", line);
    const std::string key = section + "." + trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key " + key, line);
    it->second(cfg, key, value, line);
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file", path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[body]\nshape = " << (c.shape == BodyShape::wing ? "wing" : "sphere") << "\nsphere_radius = "
    << fmt(c.sphere_radius) << "\nsphere_divisions = " << c.sphere_divisions << "\n\n";
  o << "[wing]\nchord = " << fmt(c.wing.chord) << "\nspan = " << fmt(c.wing.span) << "\nalpha_deg = "
    << fmt(c.wing.alpha_deg) << "\nsweep_deg = " << fmt(c.wing.sweep_deg)
    << "\ntip_cap = " << (c.wing.tip_cap == TipCap::rounded ? "rounded" : "flat")
    << "\nte_closure = " << (c.wing.te_closure == TeClosure::closed ? "closed" : "open") << "\n\n";
  o << "[flow]\nv_inf = " << fmt(c.flow.v_inf) << "\nrho = " << fmt(c.flow.rho) << "\ng = " << fmt(c.flow.g) << "\n\n";
  o << "[discretization]\nfe_degree = " << c.fe_degree << "\nquad_order = " << c.quad_order
    << "\nsingular_quad_order = " << c.singular_quad_order
    << "\nkutta_guess = " << (c.kutta_guess == KuttaGuess::linear ? "linear" : "zero")
    << "\nte_free_term = " << (c.te_free_term == TeFreeTerm::split ? "split" : "leeward") << "\n\n";
  o << "[refinement]\nmax_aspect_ratio = " << fmt(c.max_aspect_ratio) << "\nuniform_cycles = " << c.uniform_cycles
    << "\ncurvature_cycles = " << c.curvature_cycles << "\ntip_cycles = " << c.tip_cycles
    << "\ncurvature_fraction = " << fmt(c.curvature_fraction) << "\n\n";
  o << "[wake]\nlength_chords = " << fmt(c.wake_length_chords) << "\ncell_length_d = " << fmt(c.wake_cell_length)
    << "\nrelax_iters = " << c.relax_iters << "\nrelax_enabled = " << (c.relax_enabled ? "true" : "false")
    << "\ngeom_tol = " << fmt(c.geom_tol)
    << "\nmarch = " << (c.march == MarchVelocity::predecessor ? "predecessor" : "own") << "\n\n";
  o << "[output]\n";
  if (!c.output_dir.empty()) o << "dir = " << c.output_dir << "\n";
  std::string formats;
  if (c.write_vtk) formats = "vtk";
  if (c.write_csv) formats += formats.empty() ? "csv" : ", csv";
  o << "formats = " << formats << "\nsection_planes = ";
  for (std::size_t i = 0; i < c.section_planes.size(); ++i) o << (i ? ", " : "") << fmt(c.section_planes[i]);
  o << "\ninclude_gravity = " << (c.include_gravity ? "true" : "false") << "\n";
  return o.str();
}

std::vector<std::string> preset_names() { return {"sphere_verify", "wing_a8.5_L4", "wing_rect_L5.9", "wing_swept_b20"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "sphere_verify") {
    c.shape = BodyShape::sphere;
    c.sphere_radius = 1.0;
    c.sphere_divisions = 16;
    c.section_planes = {0.0};
  } else if (name == "wing_a8.5_L4") {
    c.wing.alpha_deg = 8.5;
    c.wing.span = 4.0;
    c.uniform_cycles = 3;
    c.wake_length_chords = 4.0;
    c.wake_cell_length = 0.5;
    c.section_planes = {0.422, 1.222, 1.622};
  } else if (name == "wing_rect_L5.9") {
    c.wing.alpha_deg = 6.75;
    c.wing.span = 5.9;
    c.wing.tip_cap = TipCap::flat;
    c.max_aspect_ratio = 4.5;
    c.uniform_cycles = 3;
    c.curvature_cycles = 2;
    c.curvature_fraction = 0.15;
    c.wake_length_chords = 4.0;
    c.wake_cell_length = 0.25;
    c.relax_enabled = true;
    c.relax_iters = 10;
    c.section_planes = {0.2, 0.35, 0.61, 0.9};
  } else if (name == "wing_swept_b20") {
    c.wing.alpha_deg = 6.75;
    c.wing.span = 5.82;
    c.wing.sweep_deg = 20.0;
    c.wing.tip_cap = TipCap::flat;
    c.max_aspect_ratio = 4.5;
    c.uniform_cycles = 3;
    c.curvature_cycles = 2;
    c.curvature_fraction = 0.15;
    c.wake_length_chords = 4.0;
    c.wake_cell_length = 0.25;
    c.relax_enabled = true;
    c.relax_iters = 10;
    c.section_planes = {0.7566, 1.4841, 2.0661, 2.4444};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.validate();
  return c;
}

}  // namespace wingbem
