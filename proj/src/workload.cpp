#include "clrsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace clrsim {

namespace {
int log2_exact(int64_t v) {
  int b = 0;
  while (v > 1) {
    v >>= 1;
    ++b;
  }
  return b;
}
}  // namespace

PageProfile profile_pages(const std::vector<TraceRecord>& trace,
                          int64_t page_size) {
  PageProfile p;
  p.page_size = page_size;
  for (const auto& r : trace) {
    ++p.counts[r.phys_addr / uint64_t(page_size)];
    ++p.total_accesses;
  }
  return p;
}

PageProfile profile_pages(const std::vector<std::vector<TraceRecord>>& traces,
                          int64_t page_size) {
  PageProfile p;
  p.page_size = page_size;
  for (const auto& t : traces)
    for (const auto& r : t) {
      ++p.counts[r.phys_addr / uint64_t(page_size)];
      ++p.total_accesses;
    }
  return p;
}

std::vector<uint64_t> select_hot_pages(const PageProfile& profile,
                                       int fraction_pct) {
  if (fraction_pct < 0 || fraction_pct > 100)
    throw SimError("placement fraction must be within [0, 100]");
  std::vector<std::pair<uint64_t, int64_t>> pages(profile.counts.begin(),
                                                  profile.counts.end());
  std::sort(pages.begin(), pages.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  size_t take = size_t(
      std::ceil(double(fraction_pct) / 100.0 * double(pages.size()) - 1e-9));
  take = std::min(take, pages.size());
  std::vector<uint64_t> hot;
  hot.reserve(take);
  for (size_t i = 0; i < take; ++i) hot.push_back(pages[i].first);
  return hot;
}

void configure_hp_rows(RowModeTable& table, int fraction_pct) {
  if (fraction_pct < 0 || fraction_pct > 100)
    throw SimError("hp row fraction must be within [0, 100]");
  const auto& topo = table.topology();
  int64_t groups_per_bank = topo.rows_per_bank() / table.rows_per_group();
  int64_t hp_per_bank =
      int64_t(std::llround(double(groups_per_bank) * fraction_pct / 100.0));
  int64_t banks = int64_t(topo.channels) * topo.ranks_per_channel *
                  topo.banks_per_rank();
  for (int64_t b = 0; b < banks; ++b)
    for (int64_t g = 0; g < hp_per_bank; ++g)
      table.set_group_mode(b * groups_per_bank + g, RowMode::HighPerformance);
}

PlacementPlan::PlacementPlan(const AddressMap& map, const RowModeTable& table,
                             int64_t page_size, int fraction_pct)
    : map_(map),
      table_(table),
      page_size_(page_size),
      fraction_pct_(fraction_pct),
      offset_bits_(log2_exact(page_size)) {
  if ((page_size & (page_size - 1)) != 0 || page_size <= 0)
    throw SimError("page size must be a power of two");
  // rejects X=0 maps up front
  reconfig_granularity(map_, page_size_);
  if (page_size_ % map_.topology().bytes_per_column != 0)
    throw SimError("page size must be a whole number of columns");
}

// Scans forward through physical frames, sorting each one into the HP or MC
// free list (or discarding it: the upper column half of an HP row stores
// nothing). Returns false once the address space is exhausted.
bool PlacementPlan::scan_one_frame() {
  uint64_t space = map_.address_space();
  while (next_scan_addr_ + uint64_t(page_size_) <= space) {
    uint64_t base = next_scan_addr_;
    next_scan_addr_ += uint64_t(page_size_);
    uint64_t frame = base >> offset_bits_;
    if (used_.count(frame)) continue;

    int64_t half_cols = map_.topology().columns_per_row / 2;
    int64_t step = map_.topology().bytes_per_column;
    bool any_hp = false, any_mc = false, upper_half = false;
    for (uint64_t a = base; a < base + uint64_t(page_size_);
         a += uint64_t(step)) {
      DramCoord c = map_.decode(a);
      if (table_.mode_of(c) == RowMode::HighPerformance) {
        any_hp = true;
        if (c.column >= half_cols) upper_half = true;
      } else {
        any_mc = true;
      }
    }
    if (any_hp && !any_mc && !upper_half) {
      free_hp_.push_back(frame);
      return true;
    }
    if (any_mc && !any_hp) {
      free_mc_.push_back(frame);
      return true;
    }
    // dead or mode-straddling frame, skip
  }
  return false;
}

int64_t PlacementPlan::hp_frames_total() const {
  return table_.hp_rows() * (table_.topology().row_bytes() / 2) / page_size_;
}

int64_t PlacementPlan::mc_frames_total() const {
  return (table_.total_rows() - table_.hp_rows()) *
         table_.topology().row_bytes() / page_size_;
}

uint64_t PlacementPlan::take_frame(bool hp, uint64_t page) {
  auto& pool = hp ? free_hp_ : free_mc_;
  auto& cursor = hp ? next_hp_ : next_mc_;
  while (cursor >= pool.size()) {
    if (!scan_one_frame())
      throw SimError("placement ran out of physical frames");
  }
  uint64_t frame = pool[cursor++];
  used_.insert(frame);
  frame_of_.emplace(page, frame);
  return frame;
}

void PlacementPlan::assign(const PageProfile& profile) {
  if (profile.page_size != page_size_)
    throw SimError("profile and plan disagree on page size");
  hp_pages_ = select_hot_pages(profile, fraction_pct_);

  int64_t need_hp = int64_t(hp_pages_.size()) * page_size_;
  int64_t have_hp = hp_frames_total() * page_size_;
  if (need_hp > have_hp)
    throw SimError("high-performance capacity overflow: placement needs " +
                   std::to_string(need_hp) + " bytes but only " +
                   std::to_string(have_hp) + " are available");
  int64_t cold_pages = int64_t(profile.counts.size() - hp_pages_.size());
  int64_t have_mc = mc_frames_total() * page_size_;
  if (cold_pages * page_size_ > have_mc)
    throw SimError("max-capacity overflow: placement needs " +
                   std::to_string(cold_pages * page_size_) +
                   " bytes but only " + std::to_string(have_mc) +
                   " are available");

  for (uint64_t page : hp_pages_) take_frame(true, page);
  std::sort(hp_pages_.begin(), hp_pages_.end());

  std::vector<uint64_t> cold;
  cold.reserve(size_t(cold_pages));
  for (const auto& [page, cnt] : profile.counts) {
    (void)cnt;
    if (!frame_of_.count(page)) cold.push_back(page);
  }
  std::sort(cold.begin(), cold.end());
  for (uint64_t page : cold) take_frame(false, page);
}

uint64_t PlacementPlan::remap(uint64_t addr) {
  uint64_t page = addr >> offset_bits_;
  uint64_t offset = addr & ((uint64_t(1) << offset_bits_) - 1);
  auto it = frame_of_.find(page);
  uint64_t frame;
  if (it != frame_of_.end()) {
    frame = it->second;
  } else {
    // page not in the profile: give it a max-capacity frame on first touch
    frame = take_frame(false, page);
  }
  return (frame << offset_bits_) | offset;
}

bool PlacementPlan::is_hp_page(uint64_t page) const {
  return std::binary_search(hp_pages_.begin(), hp_pages_.end(), page);
}

int64_t PlacementPlan::row_group_of_page(uint64_t page) const {
  auto it = frame_of_.find(page);
  if (it == frame_of_.end()) throw SimError("page has no assigned frame");
  return table_.group_of(map_.decode(it->second << offset_bits_));
}

void PlacementPlan::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw SimError("cannot write placement plan " + path);
  f << "page,mode,row_group,frame\n";
  std::vector<uint64_t> pages;
  pages.reserve(frame_of_.size());
  for (const auto& [page, frame] : frame_of_) {
    (void)frame;
    pages.push_back(page);
  }
  std::sort(pages.begin(), pages.end());
  for (uint64_t page : pages) {
    uint64_t frame = frame_of_.at(page);
    DramCoord c = map_.decode(frame << offset_bits_);
    f << page << "," << to_string(table_.mode_of(c)) << ","
      << table_.group_of(c) << "," << frame << "\n";
  }
}

PlacementPlan PlacementPlan::load_csv(const std::string& path,
                                      const AddressMap& map,
                                      RowModeTable& table, int64_t page_size) {
  std::ifstream f(path);
  if (!f) throw SimError("cannot open placement plan " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("page,", 0) != 0)
    throw SimError("placement plan missing header: " + path);

  struct Entry {
    uint64_t page, frame;
    bool hp;
  };
  std::vector<Entry> entries;
  int64_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string page, mode, group, frame;
    if (!std::getline(ss, page, ',') || !std::getline(ss, mode, ',') ||
        !std::getline(ss, group, ',') || !std::getline(ss, frame, ','))
      throw SimError("placement plan parse error at line " +
                     std::to_string(lineno));
    entries.push_back({std::stoull(page), std::stoull(frame),
                       mode == "high_performance"});
  }

  // replay the group modes listed in the file onto the table first, then
  // record the assignments
  PlacementPlan plan(map, table, page_size, 0);
  for (const auto& e : entries) {
    DramCoord c = map.decode(e.frame << plan.offset_bits_);
    table.set_group_mode(table.group_of(c), e.hp ? RowMode::HighPerformance
                                                 : RowMode::MaxCapacity);
  }
  for (const auto& e : entries) {
    plan.frame_of_.emplace(e.page, e.frame);
    plan.used_.insert(e.frame);
    if (e.hp) plan.hp_pages_.push_back(e.page);
  }
  std::sort(plan.hp_pages_.begin(), plan.hp_pages_.end());
  return plan;
}

}  // namespace clrsim
