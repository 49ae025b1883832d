#include <doctest.h>

#include <optional>
#include <random>

#include "clrsim/clr_control.hpp"

using namespace clrsim;

namespace {
DramTopology small_topo() {
  DramTopology t;
  t.bankgroups_per_rank = 4;
  t.banks_per_bankgroup = 4;
  t.subarrays_per_bank = 2;
  t.rows_per_subarray = 32;
  t.columns_per_row = 16;
  t.bytes_per_column = 64;
  return t;
}
}  // namespace

TEST_CASE("iso signal truth table") {
  CHECK(iso_signals(SubarrayParity::Odd, RowMode::MaxCapacity) ==
        IsoAssignment{true, false});
  CHECK(iso_signals(SubarrayParity::Even, RowMode::MaxCapacity) ==
        IsoAssignment{true, false});
  CHECK(iso_signals(SubarrayParity::Odd, RowMode::HighPerformance) ==
        IsoAssignment{true, true});
  CHECK(iso_signals(SubarrayParity::Even, RowMode::HighPerformance) ==
        IsoAssignment{false, false});
}

TEST_CASE("iso signals are total and deterministic") {
  for (auto parity : {SubarrayParity::Even, SubarrayParity::Odd})
    for (auto mode : {RowMode::MaxCapacity, RowMode::HighPerformance})
      CHECK(iso_signals(parity, mode) == iso_signals(parity, mode));
}

TEST_CASE("reconfiguration granularity from the address map") {
  DramTopology topo = small_topo();
  // X=3 (three column bits above the 4 KB offset), Y=1 (one row bit below)
  topo.columns_per_row = 64;
  AddressMap map = AddressMap::parse(
      "byte:6, column:3, row:1, bank:2, column:3, bankgroup:2, row:*", topo);
  auto g = reconfig_granularity(map, 4096);
  CHECK(g.low_latency_pages == 4);
  CHECK(g.rows_switched == 2);

  // smallest usable case: X=1, Y=0
  DramTopology topo2 = small_topo();
  topo2.columns_per_row = 128;
  AddressMap map2 = AddressMap::default_map(topo2);
  auto g2 = reconfig_granularity(map2, 4096);
  CHECK(g2.low_latency_pages == 1);
  CHECK(g2.rows_switched == 1);
}

TEST_CASE("maps where a page covers less than half a row are rejected") {
  DramTopology topo = small_topo();  // 16 cols * 64 B = 1 KB rows
  AddressMap map = AddressMap::default_map(topo);
  // a 4 KB page swallows the whole row: X = 0
  CHECK_THROWS_AS(reconfig_granularity(map, 4096), SimError);
}

TEST_CASE("group mode switching updates row counts and capacity") {
  DramTopology topo = small_topo();
  RowModeTable table(topo, 0);
  CHECK(table.hp_rows() == 0);
  CHECK(table.capacity_fraction() == doctest::Approx(1.0));

  auto rows = table.set_group_mode(0, RowMode::HighPerformance);
  CHECK(rows.size() == 1);
  CHECK(table.hp_rows() == 1);
  CHECK(table.mode_of(rows[0]) == RowMode::HighPerformance);

  // switching a quarter of all groups halves a quarter of the capacity
  int64_t quarter = table.total_groups() / 4;
  for (int64_t g = 0; g < quarter; ++g)
    table.set_group_mode(g, RowMode::HighPerformance);
  CHECK(table.capacity_fraction() == doctest::Approx(0.875));
}

TEST_CASE("switching a group with an open row is a simulation fault") {
  RowModeTable table(small_topo(), 1);  // two rows per group
  auto open_row = [](int, int, int, int) -> std::optional<int64_t> {
    return 1;  // row 1 is open in every bank
  };
  CHECK_THROWS_AS(table.set_group_mode(0, RowMode::HighPerformance, open_row),
                  SimFault);
  // group 1 covers rows 2..3 of bank 0; row 1 being open does not block it
  CHECK_NOTHROW(table.set_group_mode(1, RowMode::HighPerformance, open_row));
}

TEST_CASE("capacity loss is exactly half the high-performance row share") {
  DramTopology topo = small_topo();
  RowModeTable table(topo, 0);
  std::mt19937_64 rng(3);
  for (int step = 0; step < 200; ++step) {
    int64_t g = int64_t(rng() % uint64_t(table.total_groups()));
    RowMode m = (rng() & 1) ? RowMode::HighPerformance : RowMode::MaxCapacity;
    table.set_group_mode(g, m);
    double hp_share = double(table.hp_rows()) / double(table.total_rows());
    CHECK(table.capacity_fraction() == doctest::Approx(1.0 - hp_share / 2));
  }
}

TEST_CASE("all rows of a group always share one mode") {
  DramTopology topo = small_topo();
  RowModeTable table(topo, 2);  // four rows per group
  std::mt19937_64 rng(4);
  for (int step = 0; step < 100; ++step) {
    int64_t g = int64_t(rng() % uint64_t(table.total_groups()));
    RowMode m = (rng() & 1) ? RowMode::HighPerformance : RowMode::MaxCapacity;
    auto rows = table.set_group_mode(g, m);
    CHECK(rows.size() == 4);
    for (const auto& r : rows) CHECK(table.mode_of(r) == m);
  }
}
