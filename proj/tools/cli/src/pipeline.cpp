#include "embo/cli/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "embo/cli/svg.hpp"
#include "embo/io.hpp"
#include "json.hpp"

namespace embo::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt(double v) { return io::format_double(v); }

// Runs one stage, recording its status and timing and tagging errors with
// the stage name while keeping their exit-code class.
template <typename F>
auto stage(RunManifest& man, const std::string& name, F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  auto seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    auto out = fn();
    man.stages.push_back({name, "ok", seconds(), ""});
    return out;
  } catch (const NumericalError& e) {
    man.stages.push_back({name, "failed", seconds(), e.what()});
    throw NumericalError("stage " + name + ": " + e.what());
  } catch (const ConfigError& e) {
    man.stages.push_back({name, "failed", seconds(), e.what()});
    throw ConfigError("stage " + name + ": " + e.what());
  } catch (const InputError& e) {
    man.stages.push_back({name, "failed", seconds(), e.what()});
    throw InputError("stage " + name + ": " + e.what());
  }
}

void write_file(RunManifest& man, const fs::path& dir, const std::string& name, const std::string& text) {
  io::write_text(dir / name, text);
  man.add_output(name);
}

void write_history(RunManifest& man, const ExperimentConfig& cfg, const fs::path& dir,
                   const std::string& stem, const ResponseHistory& h, const BuildingModel& model) {
  io::write_history_binary(dir / (stem + ".bin"), h);
  man.add_output(stem + ".bin");
  if (cfg.history_csv) {
    io::write_history_csv(dir / stem, h, model);
    man.add_output(stem + "_dofs.csv");
    man.add_output(stem + "_walls.csv");
  }
}

ResponseHistory read_history(const fs::path& path, const char* what) {
  if (!fs::exists(path)) {
    throw InputError(std::string("missing ") + what + " history " + path.string());
  }
  return io::read_history_binary(path);
}

bool floor_measured(const std::vector<int>& dofs, int floor) {
  return std::any_of(dofs.begin(), dofs.end(),
                     [&](int d) { return d / FloorLayout::kDofPerFloor == floor - 1; });
}

double peak_abs(const Eigen::Ref<const Eigen::RowVectorXd>& r) {
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

double relative(double est, double truth) {
  if (truth == 0.0) return est == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(est - truth) / std::abs(truth);
}

Json gain_json(const GainOutcome& g, int n_grid) {
  Json j;
  j["schema_version"] = 1;
  j["source"] = g.explicit_gain ? "explicit" : "optimized";
  j["measured_dofs"] = Json::array();
  for (int d : g.measured_dofs) j["measured_dofs"].push_back(io::dof_label(d));
  j["E_diagonal"] = std::vector<double>(g.gain.data(), g.gain.data() + g.gain.size());
  if (g.result) {
    const GainResult& r = *g.result;
    j["J_at_optimum"] = r.j_optimum;
    j["J_zero_gain"] = r.j_zero;
    j["J_initial"] = r.j_initial;
    j["reference_gain"] = std::vector<double>(r.reference_gain.data(), r.reference_gain.data() + r.reference_gain.size());
    j["diagnostics"] = {{"iterations", r.iterations},
                        {"evaluations", r.evaluations},
                        {"simplex_size_decades", r.simplex_size},
                        {"converged", r.converged},
                        {"stagnated", r.stagnated},
                        {"grid_points", n_grid}};
  }
  return j;
}

GainOutcome read_gain(const ExperimentConfig& cfg, const fs::path& dir) {
  GainOutcome g;
  g.measured_dofs = cfg.measured_dofs();
  if (cfg.gain.explicit_gain) {
    g.gain = *cfg.gain.explicit_gain;
    g.explicit_gain = true;
    return g;
  }
  const fs::path path = dir / kGainRecord;
  if (!fs::exists(path)) throw InputError("no explicit_E in the config and no " + path.string() + "; run 'gain' first");
  const auto j = nlohmann::json::parse(io::read_text(path));
  const auto labels = j.at("measured_dofs").get<std::vector<std::string>>();
  const auto e = j.at("E_diagonal").get<std::vector<double>>();
  if (labels.size() != g.measured_dofs.size() || e.size() != labels.size()) {
    throw InputError(path.string() + ": channel count does not match the instrumentation");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != io::dof_label(g.measured_dofs[i])) {
      throw InputError(path.string() + ": channel " + labels[i] + " does not match instrumentation " +
                       io::dof_label(g.measured_dofs[i]));
    }
  }
  g.gain = Eigen::Map<const Vector>(e.data(), static_cast<Eigen::Index>(e.size()));
  return g;
}

std::string story_table(const Comparison& c) {
  std::ostringstream s;
  s << "story,direction,measured,peak_true_mm,peak_est_mm,peak_error,rms_error\n";
  for (const auto& e : c.stories) {
    s << e.story << ',' << e.direction << ',' << (e.measured ? 1 : 0) << ',' << fmt(e.peak_true) << ','
      << fmt(e.peak_est) << ',' << fmt(e.peak_error) << ',' << fmt(e.rms_error) << '\n';
  }
  return s.str();
}

std::string floor_table(const Comparison& c) {
  std::ostringstream s;
  s << "dof,measured,peak_true,peak_est,peak_error\n";
  for (const auto& e : c.floors) {
    s << io::dof_label(e.dof) << ',' << (e.measured ? 1 : 0) << ',' << fmt(e.peak_true) << ','
      << fmt(e.peak_est) << ',' << fmt(e.peak_error) << '\n';
  }
  return s.str();
}

std::string wall_table(const Comparison& c) {
  std::ostringstream s;
  s << "wall_id,energy_true_kN_mm,energy_est_kN_mm,energy_error,peak_drift_true_mm,peak_drift_est_mm\n";
  for (const auto& e : c.walls) {
    s << e.wall_id << ',' << fmt(e.energy_true) << ',' << fmt(e.energy_est) << ',' << fmt(e.energy_error) << ','
      << fmt(e.peak_drift_true) << ',' << fmt(e.peak_drift_est) << '\n';
  }
  return s.str();
}

std::string overlay_table(const ResponseHistory& truth, const ResponseHistory& est, const BuildingModel& model) {
  std::ostringstream s;
  s << "time";
  for (const auto& w : model.walls) {
    s << ",drift_true_" << w.wall_id << ",force_true_" << w.wall_id << ",drift_est_" << w.wall_id << ",force_est_"
      << w.wall_id;
  }
  s << '\n';
  for (int k = 0; k < truth.steps(); ++k) {
    s << fmt(truth.t[k]);
    for (int w = 0; w < model.n_walls(); ++w) {
      s << ',' << fmt(truth.wall_drift(w, k)) << ',' << fmt(truth.wall_force(w, k)) << ','
        << fmt(est.wall_drift(w, k)) << ',' << fmt(est.wall_force(w, k));
    }
    s << '\n';
  }
  return s.str();
}

std::vector<double> row(const Matrix& m, Eigen::Index r, double scale = 1.0) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.cols(); ++k) out[static_cast<std::size_t>(k)] = scale * m(r, k);
  return out;
}

std::vector<double> times(const ResponseHistory& h) { return {h.t.data(), h.t.data() + h.t.size()}; }

}  // namespace

RunOptions default_options(const ExperimentConfig& cfg) {
  RunOptions o;
  o.out_dir = cfg.output_dir;
  o.seed = cfg.seed;
  return o;
}

Matrix load_ground_motion(const ExperimentConfig& cfg, double dt) {
  Record rec = io::read_record(cfg.ground_motion.file);
  for (const auto* name : {&cfg.ground_motion.channel_x, &cfg.ground_motion.channel_y}) {
    if (name->empty()) continue;
    const Channel& c = rec.channel(*name);
    if (c.unit != kAccelerationUnit) {
      throw InputError(cfg.ground_motion.file.string() + ": channel " + *name + " must be in " + kAccelerationUnit);
    }
  }
  if (std::abs(rec.dt - dt) > 1e-9 * dt) rec = resample(rec, dt);
  const auto n = static_cast<Eigen::Index>(rec.samples());
  Matrix ug = Matrix::Zero(2, n);
  if (!cfg.ground_motion.channel_x.empty()) {
    const auto& s = rec.channel(cfg.ground_motion.channel_x).samples;
    ug.row(0) = cfg.ground_motion.scale * Eigen::Map<const Eigen::RowVectorXd>(s.data(), n);
  }
  if (!cfg.ground_motion.channel_y.empty()) {
    const auto& s = rec.channel(cfg.ground_motion.channel_y).samples;
    ug.row(1) = cfg.ground_motion.scale * Eigen::Map<const Eigen::RowVectorXd>(s.data(), n);
  }
  return ug;
}

Record synthesize_measurements(const ExperimentConfig& cfg, const ResponseHistory& truth,
                               const Matrix& ug, std::uint64_t seed) {
  const BuildingModel& m = cfg.building;
  Record rec;
  rec.t0 = 0.0;
  rec.dt = cfg.integrator.dt;
  std::vector<double> intensity;
  for (const auto& ch : cfg.channels) {
    Channel c{io::dof_label(ch.dof), kAccelerationUnit, {}};
    c.samples.resize(static_cast<std::size_t>(truth.steps()));
    for (int k = 0; k < truth.steps(); ++k) {
      c.samples[static_cast<std::size_t>(k)] = truth.ddq(ch.dof, k) + m.b1.row(ch.dof).dot(ug.col(k));
    }
    rec.channels.push_back(std::move(c));
    intensity.push_back(ch.noise_intensity);
  }
  rec = add_noise(rec, intensity, seed);
  rec.meta["kind"] = "absolute acceleration";
  return rec;
}

Matrix feedback_velocity(const ExperimentConfig& cfg, const Record& measured, const Matrix& ug) {
  const BuildingModel& m = cfg.building;
  const auto dofs = cfg.measured_dofs();
  if (measured.channels.size() != dofs.size()) {
    throw InputError("measurements carry " + std::to_string(measured.channels.size()) +
                     " channels, instrumentation declares " + std::to_string(dofs.size()));
  }
  Record rel = measured;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const std::string label = io::dof_label(dofs[i]);
    if (rel.channels[i].name != label) {
      throw InputError("measurement channel " + std::to_string(i + 1) + " is '" + rel.channels[i].name +
                       "', instrumentation expects '" + label + "'");
    }
    if (rel.channels[i].unit != kAccelerationUnit) {
      throw InputError("measurement channel " + label + " must be in " + kAccelerationUnit);
    }
  }
  if (std::abs(rel.dt - cfg.integrator.dt) > 1e-9 * cfg.integrator.dt) rel = resample(rel, cfg.integrator.dt);
  const auto n = static_cast<Eigen::Index>(rel.samples());
  if (ug.cols() < n) throw InputError("ground motion record is shorter than the measurements");
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    auto& s = rel.channels[i].samples;
    for (Eigen::Index k = 0; k < n; ++k) s[static_cast<std::size_t>(k)] -= m.b1.row(dofs[i]).dot(ug.col(k));
  }
  const Record vel = accel_to_velocity(rel, cfg.highpass);
  Matrix y(static_cast<Eigen::Index>(dofs.size()), n);
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    y.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(vel.channels[i].samples.data(), n);
  }
  return y;
}

Comparison compare(const ResponseHistory& truth, const ResponseHistory& estimate,
                   const BuildingModel& model, const std::vector<int>& measured_dofs) {
  if (truth.steps() != estimate.steps() || truth.q.rows() != estimate.q.rows() ||
      truth.wall_energy.rows() != estimate.wall_energy.rows()) {
    throw InputError("truth and estimate histories do not share a grid");
  }
  Comparison c;
  const Matrix dt = story_drifts(truth, model.layout) * kMillimetresPerMetre;
  const Matrix de = story_drifts(estimate, model.layout) * kMillimetresPerMetre;
  for (int s = 1; s <= model.layout.n_stories; ++s) {
    for (int dir = 0; dir < 2; ++dir) {
      const Eigen::Index r = 2 * (s - 1) + dir;
      StoryError e;
      e.story = s;
      e.direction = dir == 0 ? 'x' : 'y';
      e.measured = floor_measured(measured_dofs, s);
      e.peak_true = peak_abs(dt.row(r));
      e.peak_est = peak_abs(de.row(r));
      e.peak_error = relative(e.peak_est, e.peak_true);
      const double rms_t = dt.row(r).norm();
      e.rms_error = rms_t > 0.0 ? (de.row(r) - dt.row(r)).norm() / rms_t : 0.0;
      if (!e.measured) c.max_unmeasured_peak_drift_error = std::max(c.max_unmeasured_peak_drift_error, e.peak_error);
      c.stories.push_back(e);
    }
  }
  for (int d = 0; d < model.n_dofs(); ++d) {
    FloorError e;
    e.dof = d;
    e.measured = std::find(measured_dofs.begin(), measured_dofs.end(), d) != measured_dofs.end();
    e.peak_true = peak_abs(truth.q.row(d));
    e.peak_est = peak_abs(estimate.q.row(d));
    e.peak_error = relative(e.peak_est, e.peak_true);
    const bool translation = d % FloorLayout::kDofPerFloor != 2;
    if (translation && !floor_measured(measured_dofs, d / FloorLayout::kDofPerFloor + 1)) {
      c.max_unmeasured_floor_peak_error = std::max(c.max_unmeasured_floor_peak_error, e.peak_error);
    }
    c.floors.push_back(e);
  }
  const int last = truth.steps() - 1;
  for (int w = 0; w < model.n_walls(); ++w) {
    WallError e;
    e.wall_id = model.walls[w].wall_id;
    e.energy_true = last >= 0 ? truth.wall_energy(w, last) : 0.0;
    e.energy_est = last >= 0 ? estimate.wall_energy(w, last) : 0.0;
    e.energy_error = relative(e.energy_est, e.energy_true);
    e.peak_drift_true = peak_abs(truth.wall_drift.row(w));
    e.peak_drift_est = peak_abs(estimate.wall_drift.row(w));
    c.max_wall_energy_error = std::max(c.max_wall_energy_error, e.energy_error);
    c.walls.push_back(e);
  }
  const double norm = truth.q.norm();
  c.displacement_rms_error = norm > 0.0 ? (estimate.q - truth.q).norm() / norm : 0.0;
  return c;
}

std::vector<DamageIndexResult> wall_damage(const ResponseHistory& h, const BuildingModel& model,
                                           const PsiCoefficients& psi) {
  std::vector<DamageIndexResult> out;
  for (int w = 0; w < model.n_walls(); ++w) {
    const auto& wall = model.walls[w];
    const std::vector<double> drift = row(h.wall_drift, w);
    const std::vector<double> force = row(h.wall_force, w);
    DamageIndexResult r = damage_index(drift, force, wall.damage, psi, wall.params.unloading_stiffness());
    r.wall_id = wall.wall_id;
    r.story = wall.story;
    out.push_back(r);
  }
  return out;
}

SimulateOutcome run_simulate(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man) {
  return stage(man, "simulate", [&] {
    SimulateOutcome out;
    const BuildingModel& m = cfg.building;
    out.ug = load_ground_motion(cfg, cfg.integrator.dt);
    out.truth = simulate(m, out.ug, cfg.integrator);
    const Matrix loads = ground_loads(m, out.ug);
    const EnergyBalance eb = energy_balance(out.truth, m, m.damping, loads);
    out.max_energy_error = eb.max_relative_error;
    out.measurements = synthesize_measurements(cfg, out.truth, out.ug, opt.seed);

    const fs::path& dir = opt.out_dir;
    write_history(man, cfg, dir, "truth", out.truth, m);
    io::write_record(dir / kMeasurements, out.measurements);
    man.add_output(kMeasurements);
    man.add_output(std::string(kMeasurements) + ".meta.json");

    std::ostringstream e;
    e << "time,input_kN_m,kinetic_kN_m,viscous_kN_m,wall_kN_m,relative_error\n";
    for (int k = 0; k < out.truth.steps(); ++k) {
      e << fmt(out.truth.t[k]) << ',' << fmt(eb.input[k]) << ',' << fmt(eb.kinetic[k]) << ',' << fmt(eb.viscous[k])
        << ',' << fmt(eb.wall[k]) << ',' << fmt(eb.relative_error[k]) << '\n';
    }
    write_file(man, dir, "energy_balance.csv", e.str());

    Json summary;
    summary["steps"] = out.truth.steps();
    summary["dt_s"] = cfg.integrator.dt;
    summary["bisected_steps"] = out.truth.bisected_steps;
    summary["max_energy_balance_error"] = out.max_energy_error;
    const Matrix sd = story_drifts(out.truth, m.layout) * kMillimetresPerMetre;
    summary["peak_story_drift_mm"] = Json::array();
    for (int s = 1; s <= m.layout.n_stories; ++s) {
      summary["peak_story_drift_mm"].push_back(
          {{"story", s}, {"x", peak_abs(sd.row(2 * (s - 1)))}, {"y", peak_abs(sd.row(2 * (s - 1) + 1))}});
    }
    write_file(man, dir, "simulate_summary.json", summary.dump(2) + "\n");

    if (cfg.plots) {
      std::vector<double> stored(static_cast<std::size_t>(out.truth.steps()));
      for (int k = 0; k < out.truth.steps(); ++k) {
        stored[static_cast<std::size_t>(k)] = eb.kinetic[k] + eb.viscous[k] + eb.wall[k];
      }
      write_file(man, dir, "energy_balance.svg",
                 svg::line_plot("Energy balance", "time (s)", "energy (kN m)",
                                {{"input", times(out.truth), {eb.input.data(), eb.input.data() + eb.input.size()}},
                                 {"kinetic + viscous + walls", times(out.truth), stored}}));
    }
    return out;
  });
}

GainOutcome run_gain(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man) {
  GainOutcome out;
  if (cfg.gain.explicit_gain) {
    out.measured_dofs = cfg.measured_dofs();
    out.gain = *cfg.gain.explicit_gain;
    out.explicit_gain = true;
    write_file(man, opt.out_dir, kGainRecord, gain_json(out, 0).dump(2) + "\n");
    man.stages.push_back({"gain", "skipped", 0.0, "explicit E echoed from the config"});
    return out;
  }
  out = stage(man, "gain", [&] {
    GainOutcome g;
    g.measured_dofs = cfg.measured_dofs();
    const LinearizedModel lin = LinearizedModel::from(cfg.observer_model());
    const FrequencyGrid grid = FrequencyGrid::for_model(lin.mass, lin.stiffness, cfg.gain.grid);
    GainSettings settings = cfg.gain.settings;
    settings.threads = opt.threads;
    GainResult r = optimize_gain(lin, g.measured_dofs, cfg.gain.noise, grid, settings);
    g.gain = r.gain;
    g.result = r;
    write_file(man, opt.out_dir, kGainRecord, gain_json(g, static_cast<int>(grid.omegas.size())).dump(2) + "\n");
    return g;
  });
  if (out.result && out.result->stagnated) {
    man.stages.back().status = "warning";
    man.stages.back().message = "optimizer hit its evaluation limit; best-found gain written";
  }
  return out;
}

ObserveOutcome run_observe(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man) {
  return stage(man, "observe", [&] {
    ObserveOutcome out;
    const fs::path& dir = opt.out_dir;
    const GainOutcome g = read_gain(cfg, dir);
    const fs::path meas_path = opt.measurements.value_or(dir / kMeasurements);
    if (!fs::exists(meas_path)) throw InputError("missing measurements " + meas_path.string() + "; run 'simulate' first");
    const Record measured = io::read_record(meas_path);
    const Matrix ug = load_ground_motion(cfg, cfg.integrator.dt);
    const Matrix y = feedback_velocity(cfg, measured, ug);

    const BuildingModel model = cfg.observer_model();
    const ObserverConfig obs{g.measured_dofs, g.gain};
    out.estimate = observe(model, obs, y, cfg.integrator);
    write_history(man, cfg, dir, "estimate", out.estimate, model);

    {
      Record fb;
      fb.dt = cfg.integrator.dt;
      for (Eigen::Index i = 0; i < y.rows(); ++i) {
        fb.channels.push_back({io::dof_label(g.measured_dofs[static_cast<std::size_t>(i)]), kVelocityUnit, row(y, i)});
      }
      fb.meta["kind"] = "relative velocity feedback";
      io::write_record(dir / "feedback_velocity.csv", fb);
      man.add_output("feedback_velocity.csv");
      man.add_output("feedback_velocity.csv.meta.json");
    }

    const fs::path truth_path = dir / kTruthHistory;
    if (fs::exists(truth_path)) {
      const ResponseHistory truth = io::read_history_binary(truth_path);
      if (truth.steps() == out.estimate.steps()) {
        const Comparison c = compare(truth, out.estimate, model, g.measured_dofs);
        write_file(man, dir, "errors_story.csv", story_table(c));
        write_file(man, dir, "errors_dof.csv", floor_table(c));
        write_file(man, dir, "errors_walls.csv", wall_table(c));
        write_file(man, dir, "hysteresis_overlay.csv", overlay_table(truth, out.estimate, model));
        if (cfg.plots) {
          const auto worst_story = std::max_element(c.stories.begin(), c.stories.end(), [](const auto& a, const auto& b) {
            return a.peak_error < b.peak_error;
          });
          const Eigen::Index r = 2 * (worst_story->story - 1) + (worst_story->direction == 'x' ? 0 : 1);
          const Matrix st = story_drifts(truth, model.layout);
          const Matrix se = story_drifts(out.estimate, model.layout);
          const std::string tag = "story" + std::to_string(worst_story->story) + "_" + worst_story->direction;
          write_file(man, dir, "drift_" + tag + ".svg",
                     svg::line_plot("Inter-story drift, story " + std::to_string(worst_story->story) + " " +
                                        worst_story->direction,
                                    "time (s)", "drift (mm)",
                                    {{"truth", times(truth), row(st, r, kMillimetresPerMetre)},
                                     {"observer", times(out.estimate), row(se, r, kMillimetresPerMetre)}}));
          const auto worst_wall = std::max_element(c.walls.begin(), c.walls.end(), [](const auto& a, const auto& b) {
            return a.energy_error < b.energy_error;
          });
          const auto w = static_cast<Eigen::Index>(worst_wall - c.walls.begin());
          write_file(man, dir, "hysteresis_" + worst_wall->wall_id + ".svg",
                     svg::line_plot("Hysteresis, wall " + worst_wall->wall_id, "drift (mm)", "force (kN)",
                                    {{"truth", row(truth.wall_drift, w), row(truth.wall_force, w)},
                                     {"observer", row(out.estimate.wall_drift, w), row(out.estimate.wall_force, w)}}));
        }
        out.comparison = c;
      }
    }
    return out;
  });
}

DamageReport run_damage(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man) {
  return stage(man, "damage", [&] {
    const fs::path& dir = opt.out_dir;
    const bool use_truth = opt.damage_from_truth;
    const BuildingModel model = use_truth ? cfg.building : cfg.observer_model();
    const ResponseHistory h =
        read_history(dir / (use_truth ? kTruthHistory : kEstimateHistory), use_truth ? "truth" : "estimate");
    if (h.wall_drift.rows() != model.n_walls()) throw InputError("history wall count does not match the config");
    auto results = wall_damage(h, model, cfg.psi);

    std::vector<double> di_truth;
    const fs::path truth_path = dir / kTruthHistory;
    if (!use_truth && fs::exists(truth_path)) {
      const ResponseHistory truth = io::read_history_binary(truth_path);
      if (truth.wall_drift.rows() == model.n_walls()) {
        for (const auto& r : wall_damage(truth, cfg.building, cfg.psi)) di_truth.push_back(r.di);
      }
    }

    std::vector<std::string> ids;
    std::vector<double> dis;
    for (const auto& r : results) {
      ids.push_back(r.wall_id);
      dis.push_back(r.di);
    }
    std::map<std::string, double> truth_by_id;
    for (std::size_t i = 0; i < di_truth.size(); ++i) truth_by_id[results[i].wall_id] = di_truth[i];

    DamageReport rep = damage_report(results, model.layout);

    Json j;
    j["schema_version"] = 1;
    j["source"] = use_truth ? "truth" : "estimate";
    j["psi_coefficients"] = {cfg.psi[0], cfg.psi[1], cfg.psi[2]};
    j["building"] = {{"max_di", rep.building_max_di}, {"mean_di", rep.building_mean_di}};
    j["stories"] = Json::array();
    for (const auto& s : rep.stories) {
      j["stories"].push_back({{"story", s.story},
                              {"walls", s.walls},
                              {"max_di", s.max_di},
                              {"mean_di", s.mean_di},
                              {"worst_wall", s.worst_wall}});
    }
    j["walls"] = Json::array();
    std::ostringstream wt;
    wt << "wall_id,story,delta_m_mm,e_hyst_kN_mm,psi,di,collapse_range" << (truth_by_id.empty() ? "" : ",di_truth")
       << '\n';
    for (const auto& r : rep.walls) {
      Json w{{"wall_id", r.wall_id},         {"story", r.story}, {"delta_m_mm", r.delta_m},
             {"e_hyst_kN_mm", r.e_hyst_total}, {"psi", r.psi},     {"di", r.di},
             {"collapse_range", r.collapse_range}};
      wt << r.wall_id << ',' << r.story << ',' << fmt(r.delta_m) << ',' << fmt(r.e_hyst_total) << ',' << fmt(r.psi)
         << ',' << fmt(r.di) << ',' << (r.collapse_range ? 1 : 0);
      if (!truth_by_id.empty()) {
        w["di_truth"] = truth_by_id.at(r.wall_id);
        wt << ',' << fmt(truth_by_id.at(r.wall_id));
      }
      wt << '\n';
      j["walls"].push_back(w);
    }
    write_file(man, dir, "damage_report.json", j.dump(2) + "\n");
    write_file(man, dir, "damage_walls.csv", wt.str());

    std::ostringstream st;
    st << "story,walls,max_di,mean_di,worst_wall\n";
    for (const auto& s : rep.stories) {
      st << s.story << ',' << s.walls << ',' << fmt(s.max_di) << ',' << fmt(s.mean_di) << ',' << s.worst_wall << '\n';
    }
    write_file(man, dir, "damage_stories.csv", st.str());

    std::ostringstream bars;
    bars << "wall_id,di\n";
    for (std::size_t i = 0; i < ids.size(); ++i) bars << ids[i] << ',' << fmt(dis[i]) << '\n';
    write_file(man, dir, "damage_bars.csv", bars.str());
    if (cfg.plots) {
      write_file(man, dir, "damage_bars.svg",
                 svg::bar_chart("Park-Ang damage index per wall", "DI", ids, dis, 1.0));
    }
    return rep;
  });
}

VerifyOutcome run_verify(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest& man) {
  const SimulateOutcome sim = run_simulate(cfg, opt, man);
  run_gain(cfg, opt, man);
  const ObserveOutcome obs = run_observe(cfg, opt, man);
  run_damage(cfg, opt, man);

  VerifyOutcome v;
  v.checks.push_back({"energy_balance_error", sim.max_energy_error, cfg.thresholds.energy_balance_error,
                      sim.max_energy_error <= cfg.thresholds.energy_balance_error});
  if (!obs.comparison) throw InputError("verify: observer output could not be compared with the truth run");
  const Comparison& c = *obs.comparison;
  v.checks.push_back({"unmeasured_story_peak_drift_error", c.max_unmeasured_peak_drift_error,
                      cfg.thresholds.peak_drift_error,
                      c.max_unmeasured_peak_drift_error < cfg.thresholds.peak_drift_error});
  v.checks.push_back({"wall_energy_error", c.max_wall_energy_error, cfg.thresholds.wall_energy_error,
                      c.max_wall_energy_error <= cfg.thresholds.wall_energy_error});
  v.passed = std::all_of(v.checks.begin(), v.checks.end(), [](const auto& k) { return k.passed; });

  Json j;
  j["passed"] = v.passed;
  j["checks"] = Json::array();
  for (const auto& k : v.checks) {
    j["checks"].push_back({{"name", k.name}, {"value", k.value}, {"threshold", k.threshold}, {"passed", k.passed}});
  }
  j["displacement_rms_error"] = c.displacement_rms_error;
  j["max_unmeasured_floor_peak_error"] = c.max_unmeasured_floor_peak_error;
  write_file(man, opt.out_dir, "verification.json", j.dump(2) + "\n");
  man.stages.push_back({"verify", v.passed ? "ok" : "failed", 0.0, v.passed ? "" : "threshold check failed"});
  return v;
}

}  // namespace embo::cli
