#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "embo/common.hpp"
#include "embo/dynamics.hpp"
#include "embo/signal.hpp"
#include "embo/structure.hpp"

namespace embo::io {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double v);

/// Record CSV: line 1 "time,<names>", line 2 "s,<units>", then one row per
/// sample. Sidecar "<path>.meta.json" holds {t0, dt, meta}.
void write_record(const std::filesystem::path& path, const Record& rec);
Record read_record(const std::filesystem::path& path);

/// DoF label such as "F3_ux", "F3_uy", "F3_rz".
std::string dof_label(int dof);

/// "<stem>_dofs.csv" (q, dq, ddq per DoF) and "<stem>_walls.csv" (drift,
/// force, energy per wall), both with the two-line header convention.
void write_history_csv(const std::filesystem::path& stem, const ResponseHistory& h,
                       const BuildingModel& model);

/// Binary history: "EMBOHIST", u32 version, u32 dofs, u32 walls, u64 steps,
/// f64 dt, then t and the q, dq, ddq, drift, force, energy, work arrays in
/// column-major order, all little-endian.
inline constexpr std::uint32_t kHistoryFormatVersion = 1;
void write_history_binary(const std::filesystem::path& path, const ResponseHistory& h);
ResponseHistory read_history_binary(const std::filesystem::path& path);

/// Dense matrix as CSV without header.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Writes text exactly as given.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace embo::io
