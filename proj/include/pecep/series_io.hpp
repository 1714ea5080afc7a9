#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "pecep/linalg.hpp"

namespace pecep {

// Raw matrix blob: row-major little-endian float64, no header. Shape and
// provenance travel in a JSON sidecar next to the blob.
void write_matrix_f64(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_f64(const std::filesystem::path& path, std::int64_t rows, std::int64_t cols);

// Writes base.f64 plus base.json. The sidecar always carries rows/cols and
// whatever extra fields the caller adds (d, N, seed, sigma2, p, ...).
void write_matrix_with_sidecar(const std::filesystem::path& base, const Mat& m,
                               nlohmann::ordered_json extra = {});

struct MatrixFile {
  Mat data;
  nlohmann::json sidecar;
};
// Reads base.f64 using the shape recorded in base.json.
MatrixFile read_matrix_with_sidecar(const std::filesystem::path& base);

}  // namespace pecep
