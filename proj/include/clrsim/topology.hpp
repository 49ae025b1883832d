#pragma once

#include <cstdint>

#include "clrsim/types.hpp"

namespace clrsim {

struct DramTopology {
  int32_t channels = 1;
  int32_t ranks_per_channel = 1;
  int32_t bankgroups_per_rank = 4;
  int32_t banks_per_bankgroup = 4;
  int32_t subarrays_per_bank = 128;
  int64_t rows_per_subarray = 1024;
  int32_t columns_per_row = 128;
  int32_t bytes_per_column = 64;
  double bus_mhz = 1200.0;
  int32_t chips_per_rank = 8;

  int64_t rows_per_bank() const {
    return int64_t(subarrays_per_bank) * rows_per_subarray;
  }
  int32_t banks_per_rank() const {
    return bankgroups_per_rank * banks_per_bankgroup;
  }
  int64_t rows_per_rank() const { return rows_per_bank() * banks_per_rank(); }
  int64_t total_rows() const {
    return rows_per_rank() * ranks_per_channel * channels;
  }
  int64_t row_bytes() const {
    return int64_t(columns_per_row) * bytes_per_column;
  }
  int64_t capacity_bytes() const { return total_rows() * row_bytes(); }
  int32_t subarray_of_row(int64_t row) const {
    return int32_t(row / rows_per_subarray);
  }

  bool contains(const DramCoord& c) const {
    return c.channel >= 0 && c.channel < channels && c.rank >= 0 &&
           c.rank < ranks_per_channel && c.bankgroup >= 0 &&
           c.bankgroup < bankgroups_per_rank && c.bank >= 0 &&
           c.bank < banks_per_bankgroup && c.row >= 0 &&
           c.row < rows_per_bank() && c.column >= 0 &&
           c.column < columns_per_row && c.byte >= 0 &&
           c.byte < bytes_per_column;
  }

  // All counts must be >= 1 and powers of two (bit-sliced address mapping).
  void validate() const;
};

}  // namespace clrsim
