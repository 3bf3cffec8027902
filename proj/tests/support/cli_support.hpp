#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "embo/cli/app.hpp"
#include "embo/io.hpp"
#include "fixtures.hpp"
#include "json.hpp"

namespace embo::testing {

using Json = nlohmann::ordered_json;

/// Bundled fixture config with its ground-motion path made absolute, so the
/// copy can live anywhere.
inline Json fixture_config(const std::string& name) {
  Json j = Json::parse(io::read_text(fixtures_dir() / name), nullptr, true, true);
  j["ground_motion"]["file"] = (fixtures_dir() / j["ground_motion"]["file"].get<std::string>()).string();
  return j;
}

inline std::filesystem::path write_config(const std::filesystem::path& dir, const Json& j,
                                          const std::string& name = "config.json") {
  std::filesystem::create_directories(dir);
  io::write_text(dir / name, j.dump(2));
  return dir / name;
}

inline int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "embo");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

/// Two-channel all-zero ground motion record.
inline std::filesystem::path zero_motion(const std::filesystem::path& dir, int samples = 501) {
  Record r;
  r.dt = 0.01;
  r.channels = {{"ug_x", kAccelerationUnit, std::vector<double>(static_cast<std::size_t>(samples), 0.0)},
                {"ug_y", kAccelerationUnit, std::vector<double>(static_cast<std::size_t>(samples), 0.0)}};
  io::write_record(dir / "zero.csv", r);
  return dir / "zero.csv";
}

}  // namespace embo::testing
