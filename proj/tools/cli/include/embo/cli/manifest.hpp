#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace embo::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct StageRecord {
  std::string name;
  std::string status;  ///< "ok", "warning", "skipped", "failed"
  double seconds = 0.0;
  std::string message;
};

/// Per-invocation record. Timings live only here, so data files stay
/// byte-identical across reruns.
struct RunManifest {
  std::string command;
  std::string config_sha256;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<StageRecord> stages;
  std::vector<std::filesystem::path> outputs;  ///< relative to the output directory

  void add_output(const std::filesystem::path& relative);
  /// Writes manifest_<command>.json into dir with size and SHA-256 of every output.
  std::filesystem::path write(const std::filesystem::path& dir) const;
};

std::string tool_version();

}  // namespace embo::cli
