#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clrsim/topology.hpp"
#include "clrsim/types.hpp"

namespace clrsim {

enum class AddrField : uint8_t {
  Channel,
  Rank,
  BankGroup,
  Bank,
  Row,
  Column,
  ByteInColumn
};

const char* to_string(AddrField f);

// Bit-sliced physical-address <-> DRAM-coordinate mapping. Slices are listed
// LSB first; a field may appear in several slices. The per-field bit totals
// must match the topology dimensions exactly, which makes the map bijective
// over [0, 2^width).
class AddressMap {
 public:
  struct Slice {
    AddrField field;
    int bit_count;
  };

  AddressMap(std::vector<Slice> slices, const DramTopology& topo);

  // Parses the config syntax, e.g.
  //   "byte:6, column:7, bankgroup:2, bank:2, rank:0, channel:0, row:*"
  // where `*` takes all bits the topology still needs for that field.
  static AddressMap parse(const std::string& text, const DramTopology& topo);

  static AddressMap default_map(const DramTopology& topo);

  DramCoord decode(uint64_t phys_addr) const;
  uint64_t encode(const DramCoord& coord) const;

  int address_bits() const { return address_bits_; }
  uint64_t address_space() const { return uint64_t(1) << address_bits_; }
  const std::vector<Slice>& slices() const { return slices_; }
  const DramTopology& topology() const { return topo_; }

  // X: bits above the page offset that select position within a row
  // (column or byte). 2^X pages share one row.
  int pages_per_row_log2(int64_t page_size) const;
  // Y: page-offset bits consumed by the row address. A page is striped
  // across 2^Y rows.
  int rows_per_page_log2(int64_t page_size) const;

  int64_t pages_per_row(int64_t page_size) const {
    return int64_t(1) << pages_per_row_log2(page_size);
  }
  int64_t rows_per_page(int64_t page_size) const {
    return int64_t(1) << rows_per_page_log2(page_size);
  }

  std::string to_config_string() const;

 private:
  std::vector<Slice> slices_;
  DramTopology topo_;
  int address_bits_ = 0;
};

}  // namespace clrsim
