#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bogolib/grid.hpp"

namespace bogolib {

inline constexpr const char* kLibraryVersion = "1.0.0";

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

// 17 significant digits; used for every float written as text.
std::string format_double(double x);

// Grid field container: L (f64), n (i64), then n f64 values, all little-endian.
void write_field(const std::filesystem::path& path, const Grid& grid, const Vector& u);
struct FieldFile {
  double box_length;
  Index n_points;
  Vector values;
};
FieldFile read_field(const std::filesystem::path& path);

// Dense matrix: u64 header length, JSON header {rows, cols, labels, model_hash},
// then rows*cols f64 in row-major order.
void write_dense(const std::filesystem::path& path, const Matrix& a, const std::string& label,
                 const std::string& model_hash);
Matrix read_dense(const std::filesystem::path& path);

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};
// Coordinate list: u64 dimension, u64 count, then (i64, i64, f64) triplets.
void write_coo(const std::filesystem::path& path, std::int64_t dim, const std::vector<Triplet>& t);
std::vector<Triplet> read_coo(const std::filesystem::path& path, std::int64_t* dim = nullptr);

// Serializes with every float rendered by format_double; key order preserved.
std::string dump_json(const nlohmann::ordered_json& j, int indent = 2);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace bogolib
