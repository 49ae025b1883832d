#include <doctest.h>

#include <random>
#include <set>
#include <tuple>

#include "clrsim/address_map.hpp"

using namespace clrsim;

namespace {

// 2^20-address device: 64B columns, 16 columns/row, 4 banks, 4 groups,
// 64 rows per bank
DramTopology small_topo() {
  DramTopology t;
  t.channels = 1;
  t.ranks_per_channel = 1;
  t.bankgroups_per_rank = 4;
  t.banks_per_bankgroup = 4;
  t.subarrays_per_bank = 2;
  t.rows_per_subarray = 32;
  t.columns_per_row = 16;
  t.bytes_per_column = 64;
  return t;
}

DramTopology default_topo() { return DramTopology{}; }

}  // namespace

TEST_CASE("address zero decodes to the zero coordinate") {
  AddressMap map = AddressMap::default_map(small_topo());
  DramCoord c = map.decode(0);
  CHECK(c == DramCoord{});
  CHECK(map.encode(DramCoord{}) == 0);
}

TEST_CASE("single-bit placement follows the slice list") {
  AddressMap map = AddressMap::parse(
      "byte:6, column:4, bank:2, bankgroup:2, row:*", small_topo());
  DramCoord c = map.decode(uint64_t(1) << 6);
  CHECK(c.column == 1);
  CHECK(c.byte == 0);
  CHECK(c.bank == 0);
  CHECK(c.bankgroup == 0);
  CHECK(c.row == 0);

  c = map.decode(uint64_t(1) << 10);
  CHECK(c.bank == 1);
  c = map.decode(uint64_t(1) << 12);
  CHECK(c.bankgroup == 1);
  c = map.decode(uint64_t(1) << 14);
  CHECK(c.row == 1);
}

TEST_CASE("exhaustive round trip over the full 2^20 address space") {
  AddressMap map = AddressMap::default_map(small_topo());
  REQUIRE(map.address_bits() == 20);
  for (uint64_t a = 0; a < (uint64_t(1) << 20); ++a) {
    if (map.encode(map.decode(a)) != a) {
      REQUIRE(map.encode(map.decode(a)) == a);  // report the first mismatch
    }
  }
}

TEST_CASE("random coordinate round trip and injectivity on the full device") {
  DramTopology topo = default_topo();
  AddressMap map = AddressMap::default_map(topo);
  std::mt19937_64 rng(7);
  std::set<uint64_t> seen;
  int64_t dup_addr = 0, dup_coord = 0;
  std::set<std::tuple<int, int, int64_t, int, int>> coords;
  for (int i = 0; i < 100000; ++i) {
    DramCoord c;
    c.bankgroup = int32_t(rng() % uint64_t(topo.bankgroups_per_rank));
    c.bank = int32_t(rng() % uint64_t(topo.banks_per_bankgroup));
    c.row = int64_t(rng() % uint64_t(topo.rows_per_bank()));
    c.column = int32_t(rng() % uint64_t(topo.columns_per_row));
    c.byte = int32_t(rng() % uint64_t(topo.bytes_per_column));
    uint64_t a = map.encode(c);
    CHECK(map.decode(a) == c);
    if (!seen.insert(a).second) ++dup_addr;
    if (!coords.insert({c.bankgroup, c.bank, c.row, c.column, c.byte}).second)
      ++dup_coord;
  }
  // distinct coordinates map to distinct addresses
  CHECK(dup_addr == dup_coord);
}

TEST_CASE("out-of-range address and coordinate are rejected") {
  AddressMap map = AddressMap::default_map(small_topo());
  CHECK_THROWS_AS(map.decode(uint64_t(1) << 20), SimError);
  DramCoord c;
  c.row = small_topo().rows_per_bank();
  CHECK_THROWS_AS(map.encode(c), SimError);
}

TEST_CASE("maps must cover the topology exactly") {
  CHECK_THROWS_AS(
      AddressMap::parse("byte:6, column:4, bank:2, bankgroup:2, row:5",
                        small_topo()),
      SimError);
  CHECK_THROWS_AS(
      AddressMap::parse("byte:6, column:5, bank:2, bankgroup:2, row:*",
                        small_topo()),
      SimError);
  CHECK_THROWS_AS(AddressMap::parse("byte:6, column:*, row:*", small_topo()),
                  SimError);
}

TEST_CASE("pages per row and rows per page from the bit layout") {
  DramTopology topo = default_topo();  // 128 columns -> 8 KB rows
  AddressMap map = AddressMap::default_map(topo);
  // one column bit above a 4 KB page offset, no row bits below it
  CHECK(map.pages_per_row_log2(4096) == 1);
  CHECK(map.rows_per_page_log2(4096) == 0);
  CHECK(map.pages_per_row(4096) == 2);
  CHECK(map.rows_per_page(4096) == 1);

  // split row field: one row bit inside the page offset
  AddressMap split = AddressMap::parse(
      "byte:6, column:4, row:1, column:3, bankgroup:2, bank:2, row:*", topo);
  CHECK(split.pages_per_row_log2(4096) == 2);   // column bits 11..13, two >= 12
  CHECK(split.rows_per_page_log2(4096) == 1);   // row bit 10
  CHECK(split.pages_per_row(4096) == 4);
  CHECK(split.rows_per_page(4096) == 2);

  // no page-offset bits in the row field -> a page never straddles rows
  CHECK(map.rows_per_page(65536) == 1);
}

TEST_CASE("no address space is lost by the page striping") {
  DramTopology topo = default_topo();
  AddressMap map = AddressMap::default_map(topo);
  int64_t page = 4096;
  int64_t row_bytes = topo.row_bytes();
  CHECK(map.pages_per_row(page) * page == row_bytes * map.rows_per_page(page));
}
