#include "embo/cli/app.hpp"

#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "embo/cli/config.hpp"
#include "embo/cli/manifest.hpp"
#include "embo/cli/pipeline.hpp"

namespace embo::cli {
namespace {

namespace fs = std::filesystem;

struct Args {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string measurements;
  std::string source = "estimate";
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("--config", a.config, "experiment configuration (JSON)")->required();
  sub->add_option("--out", a.out, "output directory (default: outputs.directory from the config)");
  sub->add_option("--seed", a.seed, "seed for measurement noise (default: config seed)");
  sub->add_option("--threads", a.threads, "worker threads for the gain search (0 = hardware)")
      ->check(CLI::NonNegativeNumber);
}

void finish(RunManifest& man, const fs::path& dir) {
  try {
    man.write(dir);
  } catch (const std::exception& e) {
    std::cerr << "warning: manifest not written: " << e.what() << '\n';
  }
}

int execute(const std::string& verb, const Args& a) {
  const ExperimentConfig cfg = load_config(a.config);
  RunOptions opt = default_options(cfg);
  if (!a.out.empty()) opt.out_dir = a.out;
  if (a.seed) opt.seed = *a.seed;
  opt.threads = a.threads == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : a.threads;
  if (!a.measurements.empty()) opt.measurements = fs::path(a.measurements);
  opt.damage_from_truth = a.source == "truth";
  fs::create_directories(opt.out_dir);

  RunManifest man;
  man.command = verb;
  man.config_sha256 = cfg.sha256;
  man.seed = opt.seed;
  man.threads = opt.threads;

  int code = kExitOk;
  try {
    if (verb == "simulate") {
      const auto r = run_simulate(cfg, opt, man);
      std::cout << "simulate: " << r.truth.steps() << " steps, energy balance error "
                << r.max_energy_error << '\n';
    } else if (verb == "gain") {
      const auto r = run_gain(cfg, opt, man);
      std::cout << "gain: E =";
      for (Eigen::Index i = 0; i < r.gain.size(); ++i) std::cout << ' ' << r.gain[i];
      if (r.result) std::cout << ", J = " << r.result->j_optimum;
      std::cout << '\n';
    } else if (verb == "observe") {
      const auto r = run_observe(cfg, opt, man);
      std::cout << "observe: " << r.estimate.steps() << " steps";
      if (r.comparison) {
        std::cout << ", max unmeasured-story peak drift error " << r.comparison->max_unmeasured_peak_drift_error
                  << ", max wall energy error " << r.comparison->max_wall_energy_error;
      }
      std::cout << '\n';
    } else if (verb == "damage") {
      const auto r = run_damage(cfg, opt, man);
      std::cout << "damage: building max DI " << r.building_max_di << ", mean DI " << r.building_mean_di << '\n';
    } else {
      const auto r = run_verify(cfg, opt, man);
      for (const auto& c : r.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (threshold " << c.threshold
                  << ")\n";
      }
      if (!r.passed) code = kExitVerification;
    }
  } catch (...) {
    finish(man, opt.out_dir);
    throw;
  }
  finish(man, opt.out_dir);
  return code;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Energy-based model observer for hysteretic shear buildings", "embo"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1, 1);
  Args a;
  const std::pair<const char*, const char*> verbs[] = {
      {"simulate", "run the forward model and synthesize noisy floor accelerations"},
      {"gain", "design the observer feedback gain by minimizing the error covariance trace"},
      {"observe", "run the observer on recorded accelerations"},
      {"damage", "Park-Ang damage indices from an estimated (or true) response"},
      {"verify", "run every stage and check the estimate against the forward run"},
  };
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, a);
    if (std::string(name) == "observe") {
      sub->add_option("--measurements", a.measurements, "measured absolute accelerations (record CSV)");
    }
    if (std::string(name) == "damage") {
      sub->add_option("--source", a.source, "history to assess")
          ->check(CLI::IsMember({"estimate", "truth"}));
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    return execute(verb, a);
  } catch (const NumericalError& e) {
    std::cerr << "embo " << verb << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InputError& e) {
    std::cerr << "embo " << verb << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "embo " << verb << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "embo " << verb << ": " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace embo::cli
