#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clrsim/types.hpp"

namespace clrsim {

// One line of a CPU trace: `<bubbles> <hex address> [W]`. bubble_count
// non-memory instructions execute before the access.
struct TraceRecord {
  int64_t bubble_count = 0;
  uint64_t phys_addr = 0;
  bool is_write = false;

  bool operator==(const TraceRecord&) const = default;
};

std::vector<TraceRecord> parse_trace(std::istream& in);
std::vector<TraceRecord> load_trace(const std::string& path);
void write_trace(const std::string& path, const std::vector<TraceRecord>& recs);

struct TraceGenConfig {
  uint64_t seed = 1;
  int64_t n_records = 100000;
  int64_t footprint_bytes = 64 << 20;
  // bubbles drawn uniformly from [0, 2*bubble_mean]
  int64_t bubble_mean = 4;
  double write_fraction = 0.0;
  int64_t line_bytes = 64;
  // zipf only
  double zipf_theta = 0.8;
  int64_t page_size = 4096;
};

// Uniform accesses over the footprint: very limited row locality.
std::vector<TraceRecord> gen_random(const TraceGenConfig& cfg);
// Contiguous cacheline walk, wrapping at the footprint: high row locality.
std::vector<TraceRecord> gen_stream(const TraceGenConfig& cfg);
// Zipf-skewed page popularity with uniform offsets inside a page; exercises
// sub-linear coverage scaling (beyond the random/stream pair).
std::vector<TraceRecord> gen_zipf(const TraceGenConfig& cfg);

}  // namespace clrsim
