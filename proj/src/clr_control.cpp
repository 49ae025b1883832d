#include "clrsim/clr_control.hpp"

namespace clrsim {

IsoAssignment iso_signals(SubarrayParity parity, RowMode mode) {
  if (mode == RowMode::MaxCapacity) return {true, false};
  // High-performance: odd subarrays assert both signals, even subarrays
  // deassert both; either way all mode select transistors in the subarray
  // conduct while the neighbors' bitlines are cut off.
  return parity == SubarrayParity::Odd ? IsoAssignment{true, true}
                                       : IsoAssignment{false, false};
}

ReconfigGranularity reconfig_granularity(const AddressMap& map,
                                         int64_t page_size) {
  int x = map.pages_per_row_log2(page_size);
  int y = map.rows_per_page_log2(page_size);
  if (x == 0)
    throw SimError(
        "address map gives X=0 (a page covers less than half a row in "
        "high-performance mode); pick a map with at least one column bit "
        "above the page offset");
  return {(int64_t(1) << x) / 2, int64_t(1) << y};
}

RowModeTable::RowModeTable(const DramTopology& topo, int y_bits)
    : topo_(topo), y_bits_(y_bits) {
  topo_.validate();
  if (y_bits_ < 0) throw SimError("negative group width");
  if ((int64_t(1) << y_bits_) > topo_.rows_per_bank())
    throw SimError("reconfiguration group larger than a bank");
  groups_per_bank_ = topo_.rows_per_bank() >> y_bits_;
  int64_t banks = int64_t(topo_.channels) * topo_.ranks_per_channel *
                  topo_.banks_per_rank();
  modes_.assign(size_t(banks * groups_per_bank_),
                uint8_t(RowMode::MaxCapacity));
}

DramCoord RowModeTable::first_row_of_group(int64_t group_id) const {
  DramCoord c;
  int64_t group_in_bank = group_id % groups_per_bank_;
  int64_t bank_flat = group_id / groups_per_bank_;
  c.row = group_in_bank << y_bits_;
  c.bank = int32_t(bank_flat % topo_.banks_per_bankgroup);
  bank_flat /= topo_.banks_per_bankgroup;
  c.bankgroup = int32_t(bank_flat % topo_.bankgroups_per_rank);
  bank_flat /= topo_.bankgroups_per_rank;
  c.rank = int32_t(bank_flat % topo_.ranks_per_channel);
  c.channel = int32_t(bank_flat / topo_.ranks_per_channel);
  return c;
}

std::vector<DramCoord> RowModeTable::set_group_mode(int64_t group_id,
                                                    RowMode mode,
                                                    const OpenRowFn& open_row) {
  if (group_id < 0 || group_id >= total_groups())
    throw SimError("group id out of range");

  DramCoord base = first_row_of_group(group_id);
  int64_t span = rows_per_group();
  if (open_row) {
    auto open = open_row(base.channel, base.rank, base.bankgroup, base.bank);
    if (open && *open >= base.row && *open < base.row + span)
      throw SimFault("mode switch requested while row " +
                     std::to_string(*open) + " of the group is open");
  }

  RowMode prev = RowMode(modes_[size_t(group_id)]);
  std::vector<DramCoord> rows;
  rows.reserve(size_t(span));
  for (int64_t i = 0; i < span; ++i) {
    DramCoord c = base;
    c.row = base.row + i;
    rows.push_back(c);
  }
  if (prev != mode) {
    modes_[size_t(group_id)] = uint8_t(mode);
    hp_rows_ += (mode == RowMode::HighPerformance) ? span : -span;
  }
  return rows;
}

}  // namespace clrsim
