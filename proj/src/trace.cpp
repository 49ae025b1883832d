#include "clrsim/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace clrsim {

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments and blank lines
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string bubbles, addr, flag;
    if (!(ss >> bubbles)) continue;
    if (!(ss >> addr))
      throw SimError("trace parse error at line " + std::to_string(lineno) +
                     ": missing address");
    TraceRecord rec;
    try {
      size_t used = 0;
      rec.bubble_count = std::stoll(bubbles, &used, 10);
      if (used != bubbles.size()) throw std::invalid_argument(bubbles);
      rec.phys_addr = std::stoull(addr, &used, 16);
      if (used != addr.size()) throw std::invalid_argument(addr);
    } catch (const std::exception&) {
      throw SimError("trace parse error at line " + std::to_string(lineno) +
                     ": '" + line + "'");
    }
    if (rec.bubble_count < 0)
      throw SimError("trace parse error at line " + std::to_string(lineno) +
                     ": negative bubble count");
    if (ss >> flag) {
      if (flag == "W" || flag == "w")
        rec.is_write = true;
      else if (flag != "R" && flag != "r")
        throw SimError("trace parse error at line " + std::to_string(lineno) +
                       ": unexpected token '" + flag + "'");
    }
    out.push_back(rec);
  }
  return out;
}

std::vector<TraceRecord> load_trace(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError("cannot open trace file " + path);
  return parse_trace(f);
}

void write_trace(const std::string& path,
                 const std::vector<TraceRecord>& recs) {
  std::ofstream f(path);
  if (!f) throw SimError("cannot write trace file " + path);
  char buf[64];
  for (const auto& r : recs) {
    std::snprintf(buf, sizeof buf, "%lld 0x%llx%s\n",
                  static_cast<long long>(r.bubble_count),
                  static_cast<unsigned long long>(r.phys_addr),
                  r.is_write ? " W" : "");
    f << buf;
  }
}

namespace {

int64_t draw_bubbles(std::mt19937_64& rng, int64_t mean) {
  if (mean <= 0) return 0;
  return int64_t(rng() % uint64_t(2 * mean + 1));
}

void check(const TraceGenConfig& cfg) {
  if (cfg.footprint_bytes < cfg.page_size)
    throw SimError("trace footprint smaller than one page");
  if (cfg.n_records <= 0) throw SimError("trace must have at least one record");
}

}  // namespace

std::vector<TraceRecord> gen_random(const TraceGenConfig& cfg) {
  check(cfg);
  std::mt19937_64 rng(cfg.seed);
  int64_t lines = cfg.footprint_bytes / cfg.line_bytes;
  std::vector<TraceRecord> out;
  out.reserve(size_t(cfg.n_records));
  for (int64_t i = 0; i < cfg.n_records; ++i) {
    TraceRecord rec;
    rec.bubble_count = draw_bubbles(rng, cfg.bubble_mean);
    rec.phys_addr = uint64_t(rng() % uint64_t(lines)) * cfg.line_bytes;
    rec.is_write = cfg.write_fraction > 0.0 &&
                   double(rng() % 1000000) < cfg.write_fraction * 1e6;
    out.push_back(rec);
  }
  return out;
}

std::vector<TraceRecord> gen_stream(const TraceGenConfig& cfg) {
  check(cfg);
  std::mt19937_64 rng(cfg.seed);
  int64_t lines = cfg.footprint_bytes / cfg.line_bytes;
  std::vector<TraceRecord> out;
  out.reserve(size_t(cfg.n_records));
  for (int64_t i = 0; i < cfg.n_records; ++i) {
    TraceRecord rec;
    rec.bubble_count = draw_bubbles(rng, cfg.bubble_mean);
    rec.phys_addr = uint64_t(i % lines) * cfg.line_bytes;
    rec.is_write = cfg.write_fraction > 0.0 &&
                   double(rng() % 1000000) < cfg.write_fraction * 1e6;
    out.push_back(rec);
  }
  return out;
}

std::vector<TraceRecord> gen_zipf(const TraceGenConfig& cfg) {
  check(cfg);
  std::mt19937_64 rng(cfg.seed);
  int64_t pages = cfg.footprint_bytes / cfg.page_size;
  int64_t lines_per_page = cfg.page_size / cfg.line_bytes;

  // rank-k weight 1/k^theta; hot ranks scattered over the footprint so the
  // skew is not an artifact of low addresses
  size_t npages = size_t(pages);
  std::vector<double> cdf(npages);
  double acc = 0.0;
  for (int64_t k = 0; k < pages; ++k) {
    acc += 1.0 / std::pow(double(k + 1), cfg.zipf_theta);
    cdf[size_t(k)] = acc;
  }
  std::vector<int64_t> perm(npages);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<TraceRecord> out;
  out.reserve(size_t(cfg.n_records));
  for (int64_t i = 0; i < cfg.n_records; ++i) {
    TraceRecord rec;
    rec.bubble_count = draw_bubbles(rng, cfg.bubble_mean);
    double u = double(rng() % (uint64_t(1) << 53)) / double(uint64_t(1) << 53);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u * acc);
    int64_t rank = it == cdf.end() ? pages - 1 : it - cdf.begin();
    int64_t page = perm[size_t(rank)];
    int64_t line = int64_t(rng() % uint64_t(lines_per_page));
    rec.phys_addr = uint64_t(page) * cfg.page_size + uint64_t(line) * cfg.line_bytes;
    rec.is_write = cfg.write_fraction > 0.0 &&
                   double(rng() % 1000000) < cfg.write_fraction * 1e6;
    out.push_back(rec);
  }
  return out;
}

}  // namespace clrsim
