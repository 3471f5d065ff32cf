#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uqeval/tensor.hpp"

namespace uqeval {

// NPY v1.0 reader/writer. Layout: "\x93NUMPY", major, minor, little-endian
// header length (uint16 for v1, uint32 for v2/v3), a Python dict literal with
// 'descr', 'fortran_order' and 'shape', space padding and '\n' so the payload
// starts on a 64-byte boundary, then the raw C-order payload.
// Versions 2.0 and 3.0 are accepted on read; writes are always 1.0.

enum class NpyKind { Float, SignedInt, UnsignedInt, Bool };

struct NpyHeader {
  std::string descr;  // e.g. "<f8"
  NpyKind kind = NpyKind::Float;
  std::size_t item_size = 8;
  bool big_endian = false;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
  std::size_t data_offset = 0;

  std::size_t count() const noexcept;
};

/// Parses the preamble only; the payload is not read.
NpyHeader read_npy_header(const std::filesystem::path& path);

/// Float payloads (f4/f8) converted to double.
std::vector<double> read_npy_floats(const std::filesystem::path& path, NpyHeader* header = nullptr);
/// Integer or bool payloads converted to int64.
std::vector<std::int64_t> read_npy_ints(const std::filesystem::path& path, NpyHeader* header = nullptr);

void write_npy(const std::filesystem::path& path, std::span<const double> values, std::span<const std::size_t> shape,
               bool float32 = false);
void write_npy(const std::filesystem::path& path, std::span<const std::int32_t> values,
               std::span<const std::size_t> shape);

/// Rank-5 [M][N][C][H][W] float array. Validation errors from SampleGrid
/// (e.g. NonFiniteData with coordinates) propagate with the path prepended.
SampleGrid read_grid(const std::filesystem::path& path);
void write_grid(const SampleGrid& grid, const std::filesystem::path& path, bool float32 = false);

/// Rank-2 [H][W] integer array.
LabelMap read_label_map(const std::filesystem::path& path);
void write_label_map(const LabelMap& labels, const std::filesystem::path& path);

/// [3][H][W] float64 array holding AU, EU, TU in that order.
void write_uncertainty_maps(const UncertaintyMaps& maps, const std::filesystem::path& path);
UncertaintyMaps read_uncertainty_maps(const std::filesystem::path& path);

}  // namespace uqeval
