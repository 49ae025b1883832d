#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "clrsim/address_map.hpp"
#include "clrsim/topology.hpp"
#include "clrsim/types.hpp"

namespace clrsim {

enum class SubarrayParity : uint8_t { Even = 0, Odd = 1 };

// Levels of the two per-bank control signals driving the bitline mode select
// transistors. Even and odd subarrays receive complemented assignments, so
// the same target mode needs different signal levels depending on parity.
struct IsoAssignment {
  bool iso1 = false;
  bool iso2 = false;
  bool operator==(const IsoAssignment&) const = default;
};

IsoAssignment iso_signals(SubarrayParity parity, RowMode mode);

// Pages that become low-latency and rows that change mode when the system
// requests one low-latency page under the given address interleaving.
struct ReconfigGranularity {
  int64_t low_latency_pages = 0;
  int64_t rows_switched = 0;
};

// Throws SimError when a page covers less than half a row (X = 0): such maps
// cannot express page-granular high-performance placement.
ReconfigGranularity reconfig_granularity(const AddressMap& map,
                                         int64_t page_size);

// Per-row operating modes, kept at reconfiguration-group granularity
// (2^Y consecutive rows of one bank switch together).
class RowModeTable {
 public:
  // Callback giving the currently open row of a bank, if any.
  using OpenRowFn =
      std::function<std::optional<int64_t>(int ch, int rk, int bg, int bk)>;

  RowModeTable(const DramTopology& topo, int y_bits);

  RowMode mode_of(const DramCoord& coord) const {
    return RowMode(modes_[size_t(group_of(coord))]);
  }
  RowMode group_mode(int64_t group_id) const {
    return RowMode(modes_[size_t(group_id)]);
  }

  int64_t group_of(const DramCoord& coord) const {
    int64_t bank_flat =
        ((int64_t(coord.channel) * topo_.ranks_per_channel + coord.rank) *
             topo_.bankgroups_per_rank +
         coord.bankgroup) *
            topo_.banks_per_bankgroup +
        coord.bank;
    return bank_flat * groups_per_bank_ + (coord.row >> y_bits_);
  }

  // Switches one group. Every row of the group must be closed; a switch with
  // an open row in the group throws SimFault. Returns the affected rows so
  // the caller can migrate displaced pages.
  std::vector<DramCoord> set_group_mode(int64_t group_id, RowMode mode,
                                        const OpenRowFn& open_row = nullptr);

  int64_t total_rows() const { return topo_.total_rows(); }
  int64_t hp_rows() const { return hp_rows_; }
  int64_t total_groups() const { return int64_t(modes_.size()); }
  int64_t rows_per_group() const { return int64_t(1) << y_bits_; }

  // total - hp_rows/2 * row_bytes: a high-performance row keeps half its
  // max-capacity byte count.
  int64_t capacity_bytes() const {
    return topo_.capacity_bytes() - hp_rows_ * (topo_.row_bytes() / 2);
  }
  double capacity_fraction() const {
    return double(capacity_bytes()) / double(topo_.capacity_bytes());
  }

  const DramTopology& topology() const { return topo_; }

  // Rebuilds the coordinate of each row in a group (for switching callers).
  DramCoord first_row_of_group(int64_t group_id) const;

 private:
  DramTopology topo_;
  int y_bits_;
  int64_t groups_per_bank_;
  int64_t hp_rows_ = 0;
  std::vector<uint8_t> modes_;
};

}  // namespace clrsim
