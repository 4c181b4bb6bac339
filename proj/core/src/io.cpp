#include "wienerlab/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace wienerlab {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

CsvWriter& CsvWriter::field(const std::string& s) {
  if (row_started_) os_ << ',';
  row_started_ = true;
  const bool needs_quotes = s.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) {
    os_ << s;
    return *this;
  }
  os_ << '"';
  for (char c : s) {
    if (c == '"') os_ << '"';
    os_ << c;
  }
  os_ << '"';
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }

CsvWriter& CsvWriter::field(std::uint64_t v) { return field(std::to_string(v)); }

void CsvWriter::end_row() {
  os_ << "\r\n";
  row_started_ = false;
}

namespace {

void write_path_rows(std::ostream& os, const TimeGrid& grid, int dim, const double* values) {
  CsvWriter csv(os);
  csv.field(std::string("t"));
  for (int c = 1; c <= dim; ++c) csv.field("W_" + std::to_string(c));
  csv.end_row();
  const std::size_t d = static_cast<std::size_t>(dim);
  for (std::size_t k = 0; k < grid.points().size(); ++k) {
    csv.field(grid.t(k));
    for (std::size_t c = 0; c < d; ++c) csv.field(values[k * d + c]);
    csv.end_row();
  }
}

}  // namespace

void write_paths_csv(std::ostream& os, const SamplePath& path) {
  write_path_rows(os, *path.grid, path.dim, path.values.data());
}

void write_paths_csv(std::ostream& os, const PathEnsemble& ensemble, std::size_t path_index) {
  if (path_index >= ensemble.count) {
    throw std::out_of_range("write_paths_csv: path index out of range");
  }
  write_path_rows(os, *ensemble.grid, ensemble.dim,
                  ensemble.path_values(path_index).data());
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = (v >> (8 * i)) & 0xFF;
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  if (!is) throw std::runtime_error("binary batch: truncated header");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

void put_doubles(std::ostream& os, const std::vector<double>& values) {
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(os, bits);
  }
}

void get_doubles(std::istream& is, std::vector<double>& values) {
  for (double& v : values) {
    const std::uint64_t bits = get_u64(is);
    std::memcpy(&v, &bits, 8);
  }
}

GridPtr grid_from_points(std::istream& is, std::size_t n) {
  std::vector<double> pts(n + 1);
  get_doubles(is, pts);
  return make_explicit_grid(std::move(pts));
}

}  // namespace

void write_path_batch(std::ostream& os, const PathEnsemble& ensemble) {
  put_u64(os, ensemble.grid->steps());
  put_u64(os, static_cast<std::uint64_t>(ensemble.dim));
  put_u64(os, ensemble.count);
  put_u64(os, ensemble.seed);
  put_doubles(os, ensemble.grid->points());
  put_doubles(os, ensemble.values);
}

PathEnsemble read_path_batch(std::istream& is) {
  PathEnsemble e;
  const std::size_t n = get_u64(is);
  e.dim = static_cast<int>(get_u64(is));
  e.count = get_u64(is);
  e.seed = get_u64(is);
  e.grid = grid_from_points(is, n);
  e.values.resize(e.count * (n + 1) * static_cast<std::size_t>(e.dim));
  get_doubles(is, e.values);
  if (!is) throw std::runtime_error("binary batch: truncated payload");
  return e;
}

void write_filtered_batch(std::ostream& os, const FilteredEnsemble& filtered,
                          std::uint64_t seed) {
  put_u64(os, filtered.grid->steps());
  put_u64(os, 1);  // dim
  put_u64(os, filtered.count);
  put_u64(os, seed);
  put_u64(os, filtered.tag == EstimatorTag::TreeExact ? 0 : 1);
  put_doubles(os, filtered.grid->points());
  put_doubles(os, filtered.values);
}

FilteredBatch read_filtered_batch(std::istream& is) {
  FilteredBatch out;
  const std::size_t n = get_u64(is);
  const std::uint64_t dim = get_u64(is);
  if (dim != 1) throw std::runtime_error("filtered batch: only dim 1 supported");
  out.filtered.count = get_u64(is);
  out.seed = get_u64(is);
  out.filtered.tag = get_u64(is) == 0 ? EstimatorTag::TreeExact : EstimatorTag::Particle;
  out.filtered.grid = grid_from_points(is, n);
  out.filtered.values.resize(out.filtered.count * n);
  get_doubles(is, out.filtered.values);
  if (!is) throw std::runtime_error("filtered batch: truncated payload");
  return out;
}

}  // namespace wienerlab
