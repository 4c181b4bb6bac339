#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wienerlab/filtering.hpp"
#include "wienerlab/sample_path.hpp"

namespace wienerlab {

/// Shortest decimal string that round-trips to the same double
/// (std::to_chars); '.' decimal separator, no locale.
[[nodiscard]] std::string format_double(double v);

/// RFC-4180 CSV writer: CRLF line endings, quoting only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& field(const std::string& s);
  CsvWriter& field(double v);
  CsvWriter& field(std::uint64_t v);
  void end_row();

 private:
  std::ostream& os_;
  bool row_started_ = false;
};

/// Path table: header t,W_1..W_d then one row per grid point.
void write_paths_csv(std::ostream& os, const SamplePath& path);
void write_paths_csv(std::ostream& os, const PathEnsemble& ensemble, std::size_t path_index);

// ---------------------------------------------------------------------------
// Binary batch format
//
// Header (little-endian u64): n, dim, count, seed, then count*(n+1)*dim
// values as little-endian IEEE-754 doubles. The filtered-drift variant
// carries one extra header field (estimator tag) and n values per path.
// ---------------------------------------------------------------------------

void write_path_batch(std::ostream& os, const PathEnsemble& ensemble);
[[nodiscard]] PathEnsemble read_path_batch(std::istream& is);

void write_filtered_batch(std::ostream& os, const FilteredEnsemble& filtered,
                          std::uint64_t seed);
struct FilteredBatch {
  FilteredEnsemble filtered;
  std::uint64_t seed = 0;
};
[[nodiscard]] FilteredBatch read_filtered_batch(std::istream& is);

}  // namespace wienerlab
