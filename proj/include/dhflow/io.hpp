#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dhflow/records.hpp"
#include "dhflow/state.hpp"

namespace dhflow {

// Binary checkpoint: "DHFLOW01", then little-endian 64-bit header values
//   int64 Nx, Ny, delta1, delta2, q, target kind (0 sphere, 1 flat torus)
//   f64   Lx, Ly, eps, t
// then u (q values per point) and psi (q x 2 complex values per point, real
// then imaginary), points in row-major order, all binary64 little-endian.
void write_checkpoint(const FlowState& s, const std::filesystem::path& path);
FlowState read_checkpoint(const std::filesystem::path& path);

std::vector<unsigned char> encode_checkpoint(const FlowState& s);
FlowState decode_checkpoint(std::span<const unsigned char> bytes);

// run.csv: header row then one row per record, values with 17 significant digits.
std::string csv_header(std::size_t n_radii);
std::string csv_row(const MonitorRecord& r);
void write_run_csv(const std::filesystem::path& path, std::span<const MonitorRecord> records,
                   std::size_t n_radii);

std::string format_double(double v);

std::string events_json(std::span<const SingularityEvent> events);
void write_text(const std::filesystem::path& path, const std::string& text);

// Sign and Clifford conventions plus code version and kernel variant.
std::string conventions_json();

extern const char* const kVersion;

}  // namespace dhflow
