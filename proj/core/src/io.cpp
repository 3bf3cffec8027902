#include "embo/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace embo::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary history format assumes a little-endian host");

constexpr std::array<char, 8> kMagic{'E', 'M', 'B', 'O', 'H', 'I', 'S', 'T'};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const std::string t = trim(s);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw InputError(path.string() + ":" + std::to_string(line) + ": not a number: '" + t + "'");
  }
  return v;
}

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw InputError("truncated binary history");
  return v;
}

void put_matrix(std::ofstream& out, const Matrix& m) {
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix get_matrix(std::ifstream& in, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!in) throw InputError("truncated binary history");
  return m;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0 into 0
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_record(const std::filesystem::path& path, const Record& rec) {
  rec.validate();
  auto out = open_out(path);
  out << "time";
  for (const auto& c : rec.channels) out << ',' << c.name;
  out << "\ns";
  for (const auto& c : rec.channels) out << ',' << c.unit;
  out << '\n';
  for (std::size_t k = 0; k < rec.samples(); ++k) {
    out << format_double(rec.t0 + rec.dt * static_cast<double>(k));
    for (const auto& c : rec.channels) out << ',' << format_double(c.samples[k]);
    out << '\n';
  }

  nlohmann::ordered_json meta;
  meta["t0_s"] = rec.t0;
  meta["dt_s"] = rec.dt;
  meta["meta"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rec.meta) meta["meta"][k] = v;
  write_text(path.string() + ".meta.json", meta.dump(2) + "\n");
}

Record read_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read record " + path.string());
  std::string names_line;
  std::string units_line;
  if (!std::getline(in, names_line) || !std::getline(in, units_line)) {
    throw InputError(path.string() + ": record needs a names line and a units line");
  }
  const auto names = split(trim(names_line));
  const auto units = split(trim(units_line));
  if (names.size() < 2 || names.size() != units.size() || trim(names[0]) != "time") {
    throw InputError(path.string() + ": header must be 'time,<channels>' with one unit per column");
  }

  Record rec;
  for (std::size_t c = 1; c < names.size(); ++c) {
    rec.channels.push_back({trim(names[c]), trim(units[c]), {}});
  }
  std::vector<double> times;
  std::string line;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line));
    if (cells.size() != names.size()) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
    }
    times.push_back(parse_double(cells[0], path, lineno));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      rec.channels[c - 1].samples.push_back(parse_double(cells[c], path, lineno));
    }
  }
  if (times.size() < 2) throw InputError(path.string() + ": record needs at least two samples");
  rec.t0 = times.front();
  rec.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - times[k - 1] - rec.dt) > 1e-6 * rec.dt) {
      throw InputError(path.string() + ": time column is not uniformly sampled");
    }
  }

  const std::filesystem::path sidecar = path.string() + ".meta.json";
  if (std::filesystem::exists(sidecar)) {
    const auto meta = nlohmann::json::parse(read_text(sidecar));
    if (meta.contains("dt_s")) rec.dt = meta.at("dt_s").get<double>();
    if (meta.contains("t0_s")) rec.t0 = meta.at("t0_s").get<double>();
    if (meta.contains("meta")) {
      for (const auto& [k, v] : meta.at("meta").items()) {
        rec.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
  }
  rec.validate();
  return rec;
}

std::string dof_label(int dof) {
  static constexpr std::array<const char*, 3> kComponents{"ux", "uy", "rz"};
  return "F" + std::to_string(dof / FloorLayout::kDofPerFloor + 1) + "_" +
         kComponents[dof % FloorLayout::kDofPerFloor];
}

void write_history_csv(const std::filesystem::path& stem, const ResponseHistory& h,
                       const BuildingModel& model) {
  const int n = static_cast<int>(h.q.rows());
  {
    auto out = open_out(stem.string() + "_dofs.csv");
    out << "time";
    for (const char* kind : {"q", "dq", "ddq"}) {
      for (int i = 0; i < n; ++i) out << ',' << kind << '_' << dof_label(i);
    }
    out << "\ns";
    for (const char* units : {"m|rad", "m/s|rad/s", "m/s^2|rad/s^2"}) {
      for (int i = 0; i < n; ++i) {
        const std::string u(units);
        const auto bar = u.find('|');
        out << ',' << (i % 3 == 2 ? u.substr(bar + 1) : u.substr(0, bar));
      }
    }
    out << '\n';
    for (int k = 0; k < h.steps(); ++k) {
      out << format_double(h.t[k]);
      for (const Matrix* m : {&h.q, &h.dq, &h.ddq}) {
        for (int i = 0; i < n; ++i) out << ',' << format_double((*m)(i, k));
      }
      out << '\n';
    }
  }
  {
    auto out = open_out(stem.string() + "_walls.csv");
    const int walls = static_cast<int>(h.wall_drift.rows());
    auto id = [&](int w) {
      return w < model.n_walls() ? model.walls[w].wall_id : "W" + std::to_string(w);
    };
    out << "time";
    for (const char* kind : {"drift", "force", "energy"}) {
      for (int w = 0; w < walls; ++w) out << ',' << kind << '_' << id(w);
    }
    out << "\ns";
    for (const char* unit : {"mm", "kN", "kN*mm"}) {
      for (int w = 0; w < walls; ++w) out << ',' << unit;
    }
    out << '\n';
    for (int k = 0; k < h.steps(); ++k) {
      out << format_double(h.t[k]);
      for (const Matrix* m : {&h.wall_drift, &h.wall_force, &h.wall_energy}) {
        for (int w = 0; w < walls; ++w) out << ',' << format_double((*m)(w, k));
      }
      out << '\n';
    }
  }
}

void write_history_binary(const std::filesystem::path& path, const ResponseHistory& h) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kHistoryFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.q.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(h.wall_drift.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(h.steps()));
  put<double>(out, h.steps() > 1 ? h.t[1] - h.t[0] : 0.0);
  out.write(reinterpret_cast<const char*>(h.t.data()),
            static_cast<std::streamsize>(h.t.size() * sizeof(double)));
  for (const Matrix* m : {&h.q, &h.dq, &h.ddq, &h.wall_drift, &h.wall_force, &h.wall_energy,
                          &h.wall_work}) {
    put_matrix(out, *m);
  }
}

ResponseHistory read_history_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read history " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InputError(path.string() + ": not an EMBOHIST file");
  const auto version = get<std::uint32_t>(in);
  if (version != kHistoryFormatVersion) {
    throw InputError(path.string() + ": unsupported history version " + std::to_string(version));
  }
  const auto n = static_cast<Eigen::Index>(get<std::uint32_t>(in));
  const auto walls = static_cast<Eigen::Index>(get<std::uint32_t>(in));
  const auto steps = static_cast<Eigen::Index>(get<std::uint64_t>(in));
  (void)get<double>(in);
  ResponseHistory h;
  h.t = get_matrix(in, steps, 1);
  h.q = get_matrix(in, n, steps);
  h.dq = get_matrix(in, n, steps);
  h.ddq = get_matrix(in, n, steps);
  h.wall_drift = get_matrix(in, walls, steps);
  h.wall_force = get_matrix(in, walls, steps);
  h.wall_energy = get_matrix(in, walls, steps);
  h.wall_work = get_matrix(in, walls, steps);
  return h;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace embo::io
