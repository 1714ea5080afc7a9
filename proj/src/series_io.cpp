#include "pecep/series_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace pecep {

namespace {

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) {
    r = (r << 8) | (v & 0xff);
    v >>= 8;
  }
  return r;
}

void to_little_endian(std::vector<double>& buf) {
  if constexpr (std::endian::native == std::endian::big) {
    for (double& x : buf) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, 8);
      bits = byteswap64(bits);
      std::memcpy(&x, &bits, 8);
    }
  }
}

}  // namespace

void write_matrix_f64(const std::filesystem::path& path, const Mat& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("write_matrix_f64: cannot open " + path.string());
  }
  const Eigen::Index rows = m.rows(), cols = m.cols();
  std::vector<double> buf(static_cast<std::size_t>(rows) * cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      buf[static_cast<std::size_t>(i) * cols + j] = m(i, j);
    }
  }
  to_little_endian(buf);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!out) {
    throw IoError("write_matrix_f64: write failed for " + path.string());
  }
}

Mat read_matrix_f64(const std::filesystem::path& path, std::int64_t rows, std::int64_t cols) {
  if (rows < 0 || cols < 0) {
    throw InvalidInputError("read_matrix_f64: negative shape");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("read_matrix_f64: cannot open " + path.string());
  }
  std::vector<double> buf(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(double))) {
    throw IoError("read_matrix_f64: file shorter than rows*cols for " + path.string());
  }
  to_little_endian(buf);  // symmetric swap
  Mat m(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i) {
    for (std::int64_t j = 0; j < cols; ++j) {
      m(i, j) = buf[static_cast<std::size_t>(i) * cols + j];
    }
  }
  return m;
}

void write_matrix_with_sidecar(const std::filesystem::path& base, const Mat& m,
                               nlohmann::ordered_json extra) {
  std::filesystem::path bin = base;
  bin += ".f64";
  std::filesystem::path meta = base;
  meta += ".json";
  write_matrix_f64(bin, m);
  nlohmann::ordered_json j;
  j["rows"] = static_cast<std::int64_t>(m.rows());
  j["cols"] = static_cast<std::int64_t>(m.cols());
  j["dtype"] = "float64_le";
  j["layout"] = "row_major";
  for (auto& [k, v] : extra.items()) {
    j[k] = v;
  }
  std::ofstream out(meta, std::ios::trunc);
  if (!out) {
    throw IoError("write_matrix_with_sidecar: cannot open " + meta.string());
  }
  out << j.dump(2) << "\n";
}

MatrixFile read_matrix_with_sidecar(const std::filesystem::path& base) {
  std::filesystem::path bin = base;
  bin += ".f64";
  std::filesystem::path meta = base;
  meta += ".json";
  std::ifstream in(meta);
  if (!in) {
    throw IoError("read_matrix_with_sidecar: cannot open " + meta.string());
  }
  nlohmann::json j = nlohmann::json::parse(in);
  const std::int64_t rows = j.contains("rows") ? j["rows"].get<std::int64_t>()
                                               : j.at("N").get<std::int64_t>();
  const std::int64_t cols = j.contains("cols") ? j["cols"].get<std::int64_t>()
                                               : j.at("d").get<std::int64_t>();
  return MatrixFile{read_matrix_f64(bin, rows, cols), std::move(j)};
}

}  // namespace pecep
