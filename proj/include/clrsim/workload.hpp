#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "clrsim/address_map.hpp"
#include "clrsim/clr_control.hpp"
#include "clrsim/trace.hpp"

namespace clrsim {

struct PageProfile {
  std::unordered_map<uint64_t, int64_t> counts;
  int64_t total_accesses = 0;
  int64_t page_size = 4096;
};

PageProfile profile_pages(const std::vector<TraceRecord>& trace,
                          int64_t page_size);
// Multi-core mixes rank pages by the combined access counts of all traces.
PageProfile profile_pages(const std::vector<std::vector<TraceRecord>>& traces,
                          int64_t page_size);

// Selection half of placement: pages sorted by access count descending
// (ties by ascending page number), top ceil(X% of touched pages).
std::vector<uint64_t> select_hot_pages(const PageProfile& profile,
                                       int fraction_pct);

// Switches the leading X% of row groups of every bank to high-performance
// mode. Percentages that divide the group count evenly (0/25/50/75/100 with
// power-of-two group counts) give an exact hp-row fraction.
void configure_hp_rows(RowModeTable& table, int fraction_pct);

// Maps trace pages onto physical frames so that the top X% most-accessed
// pages live in high-performance rows (which expose only the low half of
// their column space) and everything else lives in max-capacity rows.
//
// Pages first seen during simulation get max-capacity frames on demand, in
// deterministic frame order.
class PlacementPlan {
 public:
  PlacementPlan(const AddressMap& map, const RowModeTable& table,
                int64_t page_size, int fraction_pct);

  int fraction_pct() const { return fraction_pct_; }
  int64_t page_size() const { return page_size_; }
  const std::vector<uint64_t>& hp_pages() const { return hp_pages_; }

  // Assigns frames for every page of the profile. Throws SimError with the
  // required vs available byte counts when the selected pages cannot fit.
  void assign(const PageProfile& profile);

  // Physical address after placement.
  uint64_t remap(uint64_t addr);

  bool is_hp_page(uint64_t page) const;
  int64_t row_group_of_page(uint64_t page) const;

  void save_csv(const std::string& path) const;
  // Restores page->frame assignments and replays the stored group modes onto
  // the given table (which must come from the same topology).
  static PlacementPlan load_csv(const std::string& path, const AddressMap& map,
                                RowModeTable& table, int64_t page_size = 4096);

  int64_t hp_frames_total() const;
  int64_t mc_frames_total() const;
  int64_t assigned_pages() const { return int64_t(frame_of_.size()); }

 private:
  bool scan_one_frame();
  uint64_t take_frame(bool hp, uint64_t page);

  const AddressMap& map_;
  const RowModeTable& table_;
  int64_t page_size_;
  int fraction_pct_;
  int offset_bits_;

  uint64_t next_scan_addr_ = 0;
  std::vector<uint64_t> free_hp_;
  std::vector<uint64_t> free_mc_;
  size_t next_hp_ = 0;
  size_t next_mc_ = 0;
  std::unordered_set<uint64_t> used_;
  std::vector<uint64_t> hp_pages_;  // sorted by page number after assign()
  std::unordered_map<uint64_t, uint64_t> frame_of_;
};

}  // namespace clrsim
