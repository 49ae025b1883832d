#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "clrsim/workload.hpp"

using namespace clrsim;

namespace {
DramTopology test_topo() {
  DramTopology t;
  t.bankgroups_per_rank = 4;
  t.banks_per_bankgroup = 4;
  t.subarrays_per_bank = 4;
  t.rows_per_subarray = 64;
  t.columns_per_row = 128;  // 8 KB rows, two 4 KB pages each
  t.bytes_per_column = 64;
  return t;
}
}  // namespace

TEST_CASE("trace parsing accepts the two- and three-token forms") {
  std::istringstream in("3 0x1000\n0 0x2040 W\n");
  auto recs = parse_trace(in);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0] == TraceRecord{3, 0x1000, false});
  CHECK(recs[1] == TraceRecord{0, 0x2040, true});
}

TEST_CASE("malformed trace lines report the line number") {
  std::istringstream in("x y\n");
  try {
    parse_trace(in);
    FAIL("expected a parse error");
  } catch (const SimError& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  std::istringstream in2("1 0x10\n5 zz\n");
  try {
    parse_trace(in2);
    FAIL("expected a parse error");
  } catch (const SimError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("trace files round-trip through write and load") {
  TraceGenConfig cfg;
  cfg.n_records = 500;
  cfg.footprint_bytes = 1 << 20;
  cfg.write_fraction = 0.3;
  auto recs = gen_random(cfg);
  auto path = std::filesystem::temp_directory_path() / "clrsim_trace_rt.txt";
  write_trace(path.string(), recs);
  CHECK(load_trace(path.string()) == recs);
  std::filesystem::remove(path);
}

TEST_CASE("generators are deterministic in the seed") {
  TraceGenConfig cfg;
  cfg.seed = 7;
  cfg.n_records = 2000;
  cfg.footprint_bytes = 4 << 20;
  CHECK(gen_random(cfg) == gen_random(cfg));
  CHECK(gen_zipf(cfg) == gen_zipf(cfg));
  cfg.seed = 8;
  CHECK(gen_random(cfg) != gen_random(TraceGenConfig{}));
}

TEST_CASE("stream traces walk contiguous cachelines") {
  TraceGenConfig cfg;
  cfg.n_records = 100;
  cfg.footprint_bytes = 1 << 20;
  auto recs = gen_stream(cfg);
  for (int64_t i = 0; i < 100; ++i)
    CHECK(recs[size_t(i)].phys_addr == uint64_t(i) * 64);
}

TEST_CASE("random traces with a one-page footprint stay on that page") {
  TraceGenConfig cfg;
  cfg.n_records = 300;
  cfg.footprint_bytes = 4096;
  auto recs = gen_random(cfg);
  for (const auto& r : recs) CHECK(r.phys_addr < 4096);
}

TEST_CASE("zero footprint is rejected") {
  TraceGenConfig cfg;
  cfg.footprint_bytes = 0;
  CHECK_THROWS_AS(gen_random(cfg), SimError);
}

TEST_CASE("page profiling counts every access") {
  std::vector<TraceRecord> trace = {
      {0, 1 * 4096, false}, {0, 1 * 4096 + 64, false}, {0, 2 * 4096, true}};
  PageProfile p = profile_pages(trace, 4096);
  CHECK(p.counts.at(1) == 2);
  CHECK(p.counts.at(2) == 1);
  CHECK(p.total_accesses == 3);

  PageProfile empty = profile_pages(std::vector<TraceRecord>{}, 4096);
  CHECK(empty.counts.empty());
  CHECK(empty.total_accesses == 0);
}

TEST_CASE("profile counts sum to the trace length") {
  TraceGenConfig cfg;
  cfg.n_records = 5000;
  cfg.footprint_bytes = 2 << 20;
  auto recs = gen_zipf(cfg);
  PageProfile p = profile_pages(recs, 4096);
  int64_t sum = 0;
  for (const auto& [page, n] : p.counts) {
    (void)page;
    sum += n;
  }
  CHECK(sum == int64_t(recs.size()));
  CHECK(sum == p.total_accesses);
}

TEST_CASE("hot page selection sorts by count with page-number tie-break") {
  PageProfile p;
  p.page_size = 4096;
  p.counts = {{1, 10}, {2, 5}, {3, 5}, {4, 1}};
  p.total_accesses = 21;

  CHECK(select_hot_pages(p, 0).empty());
  auto half = select_hot_pages(p, 50);
  REQUIRE(half.size() == 2);
  CHECK(half[0] == 1);
  CHECK(half[1] == 2);  // tie between pages 2 and 3 broken by page number
  CHECK(select_hot_pages(p, 100).size() == 4);
  CHECK_THROWS_AS(select_hot_pages(p, 101), SimError);
}

TEST_CASE("placement maps hot pages into high-performance frames") {
  DramTopology topo = test_topo();
  AddressMap map = AddressMap::default_map(topo);
  RowModeTable table(topo, 0);
  configure_hp_rows(table, 50);

  TraceGenConfig cfg;
  cfg.n_records = 20000;
  cfg.footprint_bytes = 1 << 20;
  auto recs = gen_zipf(cfg);
  PageProfile profile = profile_pages(recs, 4096);

  PlacementPlan plan(map, table, 4096, 50);
  plan.assign(profile);

  int64_t half_cols = topo.columns_per_row / 2;
  for (const auto& r : recs) {
    uint64_t page = r.phys_addr / 4096;
    uint64_t remapped = plan.remap(r.phys_addr);
    DramCoord c = map.decode(remapped);
    if (plan.is_hp_page(page)) {
      CHECK(table.mode_of(c) == RowMode::HighPerformance);
      CHECK(c.column < half_cols);
    } else {
      CHECK(table.mode_of(c) == RowMode::MaxCapacity);
    }
    // offset within the page is preserved
    CHECK(remapped % 4096 == r.phys_addr % 4096);
  }
}

TEST_CASE("placement is deterministic") {
  DramTopology topo = test_topo();
  AddressMap map = AddressMap::default_map(topo);

  auto build = [&]() {
    RowModeTable table(topo, 0);
    configure_hp_rows(table, 25);
    TraceGenConfig cfg;
    cfg.n_records = 10000;
    cfg.footprint_bytes = 1 << 20;
    auto recs = gen_random(cfg);
    PageProfile profile = profile_pages(recs, 4096);
    PlacementPlan plan(map, table, 4096, 25);
    plan.assign(profile);
    std::vector<uint64_t> mapping;
    for (const auto& r : recs) mapping.push_back(plan.remap(r.phys_addr));
    return mapping;
  };
  CHECK(build() == build());
}

TEST_CASE("capacity overflow reports required and available bytes") {
  DramTopology topo = test_topo();  // 16 banks * 256 rows * 8 KB = 32 MB
  AddressMap map = AddressMap::default_map(topo);
  RowModeTable table(topo, 0);
  configure_hp_rows(table, 100);

  // footprint over half the device: cannot fit when every row is halved
  TraceGenConfig cfg;
  cfg.n_records = 40000;
  cfg.footprint_bytes = 24 << 20;
  auto recs = gen_stream(cfg);
  // touch every page to make the footprint real
  for (int64_t pg = 0; pg < (24 << 20) / 4096; ++pg)
    recs.push_back({0, uint64_t(pg) * 4096, false});
  PageProfile profile = profile_pages(recs, 4096);

  PlacementPlan plan(map, table, 4096, 100);
  try {
    plan.assign(profile);
    FAIL("expected capacity overflow");
  } catch (const SimError& e) {
    std::string msg = e.what();
    CHECK(msg.find("overflow") != std::string::npos);
    CHECK(msg.find("bytes") != std::string::npos);
  }
}

TEST_CASE("access coverage grows at least as fast as page coverage on skew") {
  TraceGenConfig cfg;
  cfg.n_records = 50000;
  cfg.footprint_bytes = 4 << 20;
  cfg.zipf_theta = 0.9;
  auto recs = gen_zipf(cfg);
  PageProfile profile = profile_pages(recs, 4096);

  double prev_cov = -1.0;
  for (int frac : {0, 25, 50, 75, 100}) {
    auto hot = select_hot_pages(profile, frac);
    int64_t covered = 0;
    for (uint64_t pg : hot) covered += profile.counts.at(pg);
    double cov = double(covered) / double(profile.total_accesses);
    CHECK(cov >= prev_cov);  // monotone in the fraction
    // skewed traces concentrate accesses in the hottest pages
    if (frac > 0 && frac < 100)
      CHECK(cov >= double(frac) / 100.0);
    prev_cov = cov;
  }
}

TEST_CASE("placement honors striping when a page spans two rows") {
  DramTopology topo = test_topo();
  // one page-offset bit feeds the row address: every page covers two rows
  AddressMap map = AddressMap::parse(
      "byte:6, column:4, row:1, column:3, bankgroup:2, bank:2, row:*", topo);
  REQUIRE(map.rows_per_page_log2(4096) == 1);

  RowModeTable table(topo, map.rows_per_page_log2(4096));
  configure_hp_rows(table, 50);

  TraceGenConfig cfg;
  cfg.n_records = 8000;
  cfg.footprint_bytes = 1 << 20;
  auto recs = gen_zipf(cfg);
  PageProfile profile = profile_pages(recs, 4096);
  PlacementPlan plan(map, table, 4096, 50);
  plan.assign(profile);

  int64_t half_cols = topo.columns_per_row / 2;
  for (const auto& r : recs) {
    uint64_t page = r.phys_addr / 4096;
    DramCoord c = map.decode(plan.remap(r.phys_addr));
    // both rows a page touches sit in one reconfiguration group, so the
    // mode seen by any offset within the page is uniform
    if (plan.is_hp_page(page)) {
      CHECK(table.mode_of(c) == RowMode::HighPerformance);
      CHECK(c.column < half_cols);
    } else {
      CHECK(table.mode_of(c) == RowMode::MaxCapacity);
    }
  }
}

TEST_CASE("placement plan csv round-trips through save and load") {
  DramTopology topo = test_topo();
  AddressMap map = AddressMap::default_map(topo);
  RowModeTable table(topo, 0);
  configure_hp_rows(table, 25);

  TraceGenConfig cfg;
  cfg.n_records = 3000;
  cfg.footprint_bytes = 512 << 10;
  auto recs = gen_random(cfg);
  PageProfile profile = profile_pages(recs, 4096);
  PlacementPlan plan(map, table, 4096, 25);
  plan.assign(profile);

  auto path = std::filesystem::temp_directory_path() / "clrsim_plan.csv";
  plan.save_csv(path.string());

  RowModeTable table2(topo, 0);
  PlacementPlan loaded = PlacementPlan::load_csv(path.string(), map, table2);
  for (const auto& r : recs)
    CHECK(loaded.remap(r.phys_addr) == plan.remap(r.phys_addr));
  // the group modes named in the file were replayed onto the fresh table
  for (uint64_t pg : plan.hp_pages()) {
    DramCoord c = map.decode(loaded.remap(pg * 4096));
    CHECK(table2.mode_of(c) == RowMode::HighPerformance);
  }
  std::filesystem::remove(path);
}
