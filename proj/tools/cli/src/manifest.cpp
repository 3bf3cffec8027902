#include "embo/cli/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "embo/io.hpp"
#include "json.hpp"

#ifndef EMBO_VERSION
#define EMBO_VERSION "0.0.0"
#endif

namespace embo::cli {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialisation failed");
    }
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw std::runtime_error("SHA-256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw std::runtime_error("SHA-256 final failed");
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kDigits[md[i] >> 4]);
      out.push_back(kDigits[md[i] & 0xF]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot hash " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string tool_version() { return EMBO_VERSION; }

void RunManifest::add_output(const std::filesystem::path& relative) {
  if (std::find(outputs.begin(), outputs.end(), relative) == outputs.end()) outputs.push_back(relative);
}

std::filesystem::path RunManifest::write(const std::filesystem::path& dir) const {
  nlohmann::ordered_json j;
  j["tool"] = "embo";
  j["version"] = tool_version();
  j["command"] = command;
  j["config_sha256"] = config_sha256;
  j["seeds"] = {{"measurement_noise", seed}};
  j["threads"] = threads;
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : stages) {
    j["stages"].push_back({{"name", s.name}, {"status", s.status}, {"seconds", s.seconds}, {"message", s.message}});
  }
  j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& rel : outputs) {
    const auto full = dir / rel;
    if (!std::filesystem::exists(full)) continue;
    j["outputs"].push_back({{"path", rel.generic_string()},
                            {"bytes", std::filesystem::file_size(full)},
                            {"sha256", sha256_file(full)}});
  }
  const auto path = dir / ("manifest_" + command + ".json");
  io::write_text(path, j.dump(2) + "\n");
  return path;
}

}  // namespace embo::cli
