#include "embo/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "embo/io.hpp"
#include "embo/cli/manifest.hpp"
#include "json.hpp"

namespace embo::cli {
namespace {

using Json = nlohmann::json;

std::string type_name(const Json& j) { return j.type_name(); }

// A JSON object under validation. Every key read is recorded so that
// finish() can reject unknown keys with their full path.
class Node {
 public:
  Node(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("expected an object, found " + type_name(j_));
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError((path_.empty() ? "<root>" : path_) + ": " + msg); }
  [[noreturn]] static void fail_at(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  const Json& raw(const std::string& key) {
    if (!has(key)) fail_at(at(key), "required field is missing");
    return j_.at(key);
  }

  Node object(const std::string& key) { return Node(raw(key), at(key)); }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) fail_at(at(key), "expected a number, found " + type_name(v));
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail_at(at(key), "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key) {
    const double x = number(key);
    if (!(x > 0.0)) fail_at(at(key), "must be > 0");
    return x;
  }
  double positive(const std::string& key, double fallback) { return has(key) ? positive(key) : fallback; }

  double nonnegative(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const double x = number(key);
    if (x < 0.0) fail_at(at(key), "must be >= 0");
    return x;
  }

  long long integer(const std::string& key, long long lo, long long hi) {
    const Json& v = raw(key);
    if (!v.is_number_integer()) fail_at(at(key), "expected an integer, found " + type_name(v));
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      fail_at(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }
  long long integer(const std::string& key, long long lo, long long hi, long long fallback) {
    return has(key) ? integer(key, lo, hi) : fallback;
  }

  std::string string(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) fail_at(at(key), "expected a string, found " + type_name(v));
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    return has(key) ? string(key) : fallback;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) fail_at(at(key), "expected true or false, found " + type_name(v));
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) fail_at(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail_at(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
      if (!std::isfinite(out.back())) fail_at(at(key) + "[" + std::to_string(i) + "]", "must be finite");
    }
    return out;
  }

  const Json& array(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) fail_at(at(key), "expected an array, found " + type_name(v));
    return v;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) fail_at(at(k), "unknown field");
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// A PSD given either as a list (diagonal) or as a list of rows.
Matrix psd_matrix(const Json& v, const std::string& path, int size) {
  if (!v.is_array() || v.empty()) Node::fail_at(path, "expected a diagonal list or a square matrix");
  Matrix m = Matrix::Zero(size, size);
  if (v[0].is_array()) {
    if (static_cast<int>(v.size()) != size) {
      Node::fail_at(path, "expected " + std::to_string(size) + " rows");
    }
    for (int i = 0; i < size; ++i) {
      if (!v[i].is_array() || static_cast<int>(v[i].size()) != size) {
        Node::fail_at(path + "[" + std::to_string(i) + "]", "expected " + std::to_string(size) + " entries");
      }
      for (int c = 0; c < size; ++c) {
        if (!v[i][c].is_number()) Node::fail_at(path + "[" + std::to_string(i) + "]", "expected numbers");
        m(i, c) = v[i][c].get<double>();
      }
    }
  } else {
    if (static_cast<int>(v.size()) != size) {
      Node::fail_at(path, "expected " + std::to_string(size) + " diagonal entries");
    }
    for (int i = 0; i < size; ++i) {
      if (!v[i].is_number()) Node::fail_at(path + "[" + std::to_string(i) + "]", "expected a number");
      m(i, i) = v[i].get<double>();
    }
  }
  return m;
}

std::array<double, 2> pair(Node& n, const std::string& key) {
  const auto v = n.numbers(key);
  if (v.size() != 2) Node::fail_at(n.at(key), "expected two numbers");
  return {v[0], v[1]};
}

struct WallType {
  SawsParameters saws;
  WallDamageParams damage;
};

WallType parse_wall_type(Node t) {
  WallType out;
  Node s = t.object("saws");
  out.saws.f0 = s.number("F0_kN");
  out.saws.fi = s.number("FI_kN");
  out.saws.du = s.number("DU_mm");
  out.saws.s0 = s.number("S0_kN_per_mm");
  out.saws.r1 = s.number("R1");
  out.saws.r2 = s.number("R2");
  out.saws.r3 = s.number("R3");
  out.saws.r4 = s.number("R4");
  out.saws.alpha = s.number("alpha");
  out.saws.beta = s.number("beta");
  s.finish();
  try {
    out.saws.validate();
  } catch (const InputError& e) {
    s.fail(e.what());
  }
  Node d = t.object("damage");
  out.damage.delta_u = d.number("delta_u_mm");
  out.damage.f_ey = d.number("F_ey_kN");
  out.damage.x_ns = d.number("x_ns_in");
  out.damage.x_wh = d.number("x_wh");
  d.finish();
  try {
    out.damage.validate();
  } catch (const InputError& e) {
    d.fail(e.what());
  }
  t.finish();
  return out;
}

void parse_building(Node b, ExperimentConfig& cfg) {
  BuildingModel& m = cfg.building;
  const auto heights = b.numbers("story_heights_m");
  if (heights.empty()) Node::fail_at(b.at("story_heights_m"), "at least one story required");
  m.layout.n_stories = static_cast<int>(heights.size());
  m.layout.story_heights = heights;
  try {
    m.layout.validate();
  } catch (const InputError& e) {
    Node::fail_at(b.at("story_heights_m"), e.what());
  }

  const Json& floors = b.array("floors");
  if (static_cast<int>(floors.size()) != m.layout.n_stories) {
    Node::fail_at(b.at("floors"), "expected one entry per story (" + std::to_string(m.layout.n_stories) + ")");
  }
  std::vector<double> masses;
  std::vector<double> inertias;
  for (std::size_t i = 0; i < floors.size(); ++i) {
    Node f(floors[i], b.at("floors") + "[" + std::to_string(i) + "]");
    masses.push_back(f.positive("mass_t"));
    inertias.push_back(f.positive("rotational_inertia_t_m2"));
    f.finish();
  }
  m.mass = lumped_mass(masses, inertias);

  std::map<std::string, WallType> types;
  {
    Node t = b.object("wall_types");
    for (const auto& [name, v] : b.raw("wall_types").items()) {
      t.has(name);
      types.emplace(name, parse_wall_type(Node(v, t.at(name))));
    }
    t.finish();
  }

  const Json& walls = b.array("walls");
  if (walls.empty()) Node::fail_at(b.at("walls"), "at least one wall required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < walls.size(); ++i) {
    Node w(walls[i], b.at("walls") + "[" + std::to_string(i) + "]");
    WallPlacement p;
    p.wall_id = w.string("id");
    if (p.wall_id.empty()) Node::fail_at(w.at("id"), "must not be empty");
    if (!ids.insert(p.wall_id).second) Node::fail_at(w.at("id"), "duplicate wall id '" + p.wall_id + "'");
    p.story = static_cast<int>(w.integer("story", 1, m.layout.n_stories));
    const std::string type = w.string("type");
    const auto it = types.find(type);
    if (it == types.end()) Node::fail_at(w.at("type"), "unknown wall type '" + type + "'");
    p.origin = pair(w, "origin_m");
    p.direction = pair(w, "direction");
    const double norm = std::hypot(p.direction[0], p.direction[1]);
    if (std::abs(norm - 1.0) > 1e-9) Node::fail_at(w.at("direction"), "must be a unit vector");
    const double scale = w.positive("strength_scale", 1.0);
    p.params = it->second.saws;
    p.params.f0 *= scale;
    p.params.fi *= scale;
    p.params.s0 *= scale;
    p.damage = it->second.damage;
    p.damage.f_ey *= scale;
    w.finish();
    m.walls.push_back(p);
  }

  m.b1 = horizontal_influence(m.layout);
  const std::string pn = b.string("process_noise", "ground");
  if (pn == "ground") {
    m.b2 = m.mass * m.b1;
  } else if (pn == "identity") {
    m.b2 = Matrix::Identity(m.n_dofs(), m.n_dofs());
  } else {
    Node::fail_at(b.at("process_noise"), "expected 'ground' or 'identity'");
  }

  const Matrix k0 = linear_stiffness(m);
  const auto loose = unrestrained_dofs(k0);
  if (!loose.empty()) {
    Node::fail_at(b.at("walls"), "no wall restrains DoF " + io::dof_label(loose.front()));
  }
  {
    Node d = b.object("damping");
    Node r = d.object("rayleigh");
    const double z1 = r.nonnegative("zeta_1", 0.0);
    const double z2 = r.nonnegative("zeta_2", 0.0);
    const int n = m.n_dofs();
    const int m1 = static_cast<int>(r.integer("mode_1", 1, n));
    const int m2 = static_cast<int>(r.integer("mode_2", 1, n));
    r.finish();
    d.finish();
    const Vector w = natural_frequencies(m.mass, k0);
    try {
      m.damping = rayleigh_damping(m.mass, k0, z1, w[m1 - 1], z2, w[m2 - 1]);
    } catch (const InputError& e) {
      r.fail(e.what());
    }
  }
  try {
    m.validate();
  } catch (const InputError& e) {
    b.fail(e.what());
  }
  b.finish();
}

}  // namespace

std::vector<int> ExperimentConfig::measured_dofs() const {
  std::vector<int> out;
  for (const auto& c : channels) out.push_back(c.dof);
  return out;
}

BuildingModel ExperimentConfig::observer_model() const {
  if (observer_stiffness_scale == 1.0) return building;
  BuildingModel m = building;
  for (auto& w : m.walls) w.params.s0 *= observer_stiffness_scale;
  return m;
}

int parse_dof_label(const std::string& label, int n_floors) {
  // F<floor>_<ux|uy|rz>
  const auto bar = label.find('_');
  if (label.size() < 4 || label[0] != 'F' || bar == std::string::npos || bar < 2) {
    throw ConfigError(label + ": expected a DoF label such as F3_ux");
  }
  int floor = 0;
  for (std::size_t i = 1; i < bar; ++i) {
    if (label[i] < '0' || label[i] > '9') throw ConfigError(label + ": bad floor number");
    floor = floor * 10 + (label[i] - '0');
  }
  const std::string comp = label.substr(bar + 1);
  int c = -1;
  if (comp == "ux") c = 0;
  if (comp == "uy") c = 1;
  if (comp == "rz") c = 2;
  if (c < 0) throw ConfigError(label + ": component must be ux, uy or rz");
  if (floor < 1 || floor > n_floors) throw ConfigError(label + ": floor out of range");
  return FloorLayout::dof(floor, c);
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(text, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("<root>: not valid JSON: ") + e.what());
  }
  if (root.is_null()) throw ConfigError("<root>: empty configuration");
  Node r(root, "");
  if (root.empty()) r.fail("empty configuration; 'schema_version' and 'building' are required");

  ExperimentConfig cfg;
  cfg.sha256 = sha256_hex(text);
  const auto version = r.integer("schema_version", 1, 1000);
  if (version != kConfigSchemaVersion) {
    Node::fail_at("schema_version", "unsupported version " + std::to_string(version));
  }
  cfg.seed = static_cast<std::uint64_t>(r.integer("seed", 0, (1LL << 62), 1));

  parse_building(r.object("building"), cfg);
  if (r.has("observer")) {
    Node o = r.object("observer");
    cfg.observer_stiffness_scale = o.positive("wall_stiffness_scale", 1.0);
    o.finish();
  }

  {
    Node g = r.object("ground_motion");
    cfg.ground_motion.file = g.string("file");
    if (cfg.ground_motion.file.is_relative()) cfg.ground_motion.file = base_dir / cfg.ground_motion.file;
    cfg.ground_motion.channel_x = g.string("x_channel", "");
    cfg.ground_motion.channel_y = g.string("y_channel", "");
    if (cfg.ground_motion.channel_x.empty() && cfg.ground_motion.channel_y.empty()) {
      g.fail("at least one of x_channel, y_channel is required");
    }
    cfg.ground_motion.scale = g.number("scale", 1.0);
    g.finish();
    if (!std::filesystem::is_regular_file(cfg.ground_motion.file)) {
      Node::fail_at("ground_motion.file", "cannot find " + cfg.ground_motion.file.string());
    }
  }

  {
    Node ins = r.object("instrumentation");
    const Json& chans = ins.array("channels");
    std::set<int> seen;
    for (std::size_t i = 0; i < chans.size(); ++i) {
      Node c(chans[i], "instrumentation.channels[" + std::to_string(i) + "]");
      InstrumentChannel ch;
      try {
        ch.dof = parse_dof_label(c.string("dof"), cfg.building.layout.n_stories);
      } catch (const ConfigError& e) {
        Node::fail_at(c.at("dof"), e.what());
      }
      if (!seen.insert(ch.dof).second) Node::fail_at(c.at("dof"), "DoF measured twice");
      ch.noise_intensity = c.nonnegative("noise_psd_m2_s3", 0.0);
      c.finish();
      cfg.channels.push_back(ch);
    }
    ins.finish();
  }
  const int m = static_cast<int>(cfg.channels.size());

  {
    Node g = r.object("gain");
    if (g.has("explicit_E")) {
      const auto e = g.numbers("explicit_E");
      if (static_cast<int>(e.size()) != m) {
        Node::fail_at(g.at("explicit_E"), "expected one entry per instrumentation channel (" + std::to_string(m) + ")");
      }
      for (double x : e) {
        if (x < 0.0) Node::fail_at(g.at("explicit_E"), "entries must be >= 0");
      }
      cfg.gain.explicit_gain = Eigen::Map<const Vector>(e.data(), m);
    }
    if (g.has("noise_model")) {
      Node nm = g.object("noise_model");
      cfg.gain.noise.s_ww = psd_matrix(nm.raw("S_ww"), nm.at("S_ww"), static_cast<int>(cfg.building.b2.cols()));
      cfg.gain.noise.s_vv = psd_matrix(nm.raw("S_vv"), nm.at("S_vv"), m);
      nm.finish();
      try {
        cfg.gain.noise.validate(static_cast<int>(cfg.building.b2.cols()), m);
      } catch (const InputError& e) {
        nm.fail(e.what());
      }
      cfg.gain.has_noise_model = true;
    } else if (!cfg.gain.explicit_gain) {
      Node::fail_at(g.at("noise_model"), "required unless explicit_E is given");
    }
    if (g.has("optimizer")) {
      Node o = g.object("optimizer");
      GainSettings& s = cfg.gain.settings;
      s.starts = static_cast<int>(o.integer("starts", 1, 100, s.starts));
      s.start_span_decades = o.nonnegative("start_span_decades", s.start_span_decades);
      s.search_span_decades = o.positive("search_span_decades", s.search_span_decades);
      s.simplex.initial_step = o.positive("initial_step_decades", s.simplex.initial_step);
      s.simplex.x_tolerance = o.positive("x_tolerance_decades", s.simplex.x_tolerance);
      s.simplex.f_tolerance = o.positive("f_tolerance", s.simplex.f_tolerance);
      s.simplex.max_evaluations = static_cast<int>(o.integer("max_evaluations", 10, 10000000, s.simplex.max_evaluations));
      o.finish();
    }
    if (g.has("grid")) {
      Node o = g.object("grid");
      GridSettings& s = cfg.gain.grid;
      s.log_points = static_cast<int>(o.integer("log_points", 2, 1000000, s.log_points));
      s.lower_ratio = o.positive("lower_ratio", s.lower_ratio);
      s.upper_factor = o.positive("upper_factor", s.upper_factor);
      s.peak_points = static_cast<int>(o.integer("peak_points", 0, 100000, s.peak_points));
      s.peak_half_width = o.positive("peak_half_width", s.peak_half_width);
      o.finish();
      if (s.lower_ratio >= 1.0) Node::fail_at(o.at("lower_ratio"), "must be < 1");
    }
    g.finish();
  }

  if (r.has("integrator")) {
    Node o = r.object("integrator");
    IntegratorSettings& s = cfg.integrator;
    s.dt = o.positive("dt_s", s.dt);
    s.beta = o.nonnegative("newmark_beta", s.beta);
    s.gamma = o.positive("newmark_gamma", s.gamma);
    s.newton_tol = o.positive("newton_tol_kN", s.newton_tol);
    s.newton_max_iter = static_cast<int>(o.integer("newton_max_iter", 1, 10000, s.newton_max_iter));
    s.max_bisections = static_cast<int>(o.integer("max_bisections", 0, 20, s.max_bisections));
    o.finish();
    try {
      s.validate();
    } catch (const InputError& e) {
      o.fail(e.what());
    }
  }

  if (r.has("signal")) {
    Node o = r.object("signal");
    cfg.highpass.corner_hz = o.positive("highpass_corner_hz", cfg.highpass.corner_hz);
    cfg.highpass.order = static_cast<int>(o.integer("highpass_order", 1, 16, cfg.highpass.order));
    o.finish();
  }
  if (cfg.highpass.corner_hz >= 0.4 / cfg.integrator.dt) {
    Node::fail_at("signal.highpass_corner_hz", "must be below 0.4/dt");
  }

  if (r.has("damage")) {
    Node o = r.object("damage");
    if (o.has("psi_coefficients")) {
      const auto b = o.numbers("psi_coefficients");
      if (b.size() != 3) Node::fail_at(o.at("psi_coefficients"), "expected three coefficients");
      cfg.psi = {b[0], b[1], b[2]};
    }
    o.finish();
  }

  if (r.has("verification")) {
    Node o = r.object("verification");
    cfg.thresholds.peak_drift_error = o.positive("max_peak_drift_error", cfg.thresholds.peak_drift_error);
    cfg.thresholds.wall_energy_error = o.positive("max_wall_energy_error", cfg.thresholds.wall_energy_error);
    cfg.thresholds.energy_balance_error =
        o.positive("max_energy_balance_error", cfg.thresholds.energy_balance_error);
    o.finish();
  }

  if (r.has("outputs")) {
    Node o = r.object("outputs");
    cfg.output_dir = o.string("directory", cfg.output_dir.string());
    cfg.history_csv = o.boolean("history_csv", cfg.history_csv);
    cfg.plots = o.boolean("plots", cfg.plots);
    o.finish();
  }
  if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
  r.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError(path.string() + ": config file not found");
  ExperimentConfig cfg = parse_config(io::read_text(path), path.parent_path());
  cfg.source = path;
  return cfg;
}

}  // namespace embo::cli
