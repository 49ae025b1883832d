#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "clrsim/cpu.hpp"

using namespace clrsim;

namespace {

CoreConfig quick_cfg(int64_t quota, int64_t warmup = 0) {
  CoreConfig c;
  c.instruction_quota = quota;
  c.warmup_instructions = warmup;
  c.replay_trace = true;
  return c;
}

}  // namespace

TEST_CASE("pure bubbles retire at the full issue width") {
  // one record carrying N-1 bubbles plus one LLC-hitting access
  int64_t n = 1000;
  LlcModel llc(8 << 20, 8, 64);
  std::vector<TraceRecord> trace = {{n, 0, false}};
  Core core(0, quick_cfg(n), std::move(trace), &llc,
            [](bool, uint64_t, int) { return true; });
  while (!core.reached_quota()) core.tick();
  CHECK(core.cycles() == (n + 3) / 4);
  CHECK(core.ipc() == doctest::Approx(4.0));
}

TEST_CASE("LLC hits never reach memory") {
  LlcModel llc(8 << 20, 8, 64);
  int64_t sends = 0;
  std::vector<TraceRecord> trace;
  for (int i = 0; i < 64; ++i)
    trace.push_back({1, uint64_t(i % 4) * 64, false});
  // prime the four lines
  llc.access_read(0);
  llc.access_read(64);
  llc.access_read(128);
  llc.access_read(192);
  Core core(0, quick_cfg(100), std::move(trace), &llc,
            [&](bool, uint64_t, int) {
              ++sends;
              return true;
            });
  for (int i = 0; i < 2000 && !core.reached_quota(); ++i) core.tick();
  CHECK(core.reached_quota());
  CHECK(sends == 0);
}

TEST_CASE("the ninth concurrent miss stalls on the MSHRs") {
  LlcModel llc(8 << 20, 8, 64);
  std::vector<uint64_t> outstanding;
  std::vector<TraceRecord> trace;
  for (int i = 0; i < 16; ++i)
    trace.push_back({0, uint64_t(i) * 4096, false});  // all distinct lines

  Core core(0, quick_cfg(16), std::move(trace), &llc,
            [&](bool, uint64_t line, int) {
              outstanding.push_back(line);
              return true;
            });
  for (int i = 0; i < 100; ++i) core.tick();
  // 8 MSHRs: exactly eight requests escaped, the ninth is stalled
  CHECK(outstanding.size() == 8);
  CHECK(core.outstanding_misses() == 8);

  // completing one miss lets the next one through
  core.on_read_complete(outstanding[0]);
  core.tick();
  CHECK(outstanding.size() == 9);
}

TEST_CASE("in-order retirement blocks on the oldest incomplete load") {
  LlcModel llc(8 << 20, 8, 64);
  std::vector<uint64_t> outstanding;
  std::vector<TraceRecord> trace = {{0, 0x0, false}, {100, 0x1000, false}};
  Core core(0, quick_cfg(50), std::move(trace), &llc,
            [&](bool, uint64_t line, int) {
              outstanding.push_back(line);
              return true;
            });
  for (int i = 0; i < 40; ++i) core.tick();
  // the first load is still outstanding: nothing retired yet
  CHECK(core.retired() == 0);
  core.on_read_complete(0x0);
  for (int i = 0; i < 40 && !core.reached_quota(); ++i) core.tick();
  CHECK(core.retired() >= 50);
}

TEST_CASE("back-pressure stalls dispatch without losing the access") {
  LlcModel llc(8 << 20, 8, 64);
  int64_t attempts = 0;
  bool accept = false;
  std::vector<TraceRecord> trace = {{0, 0x4000, false}, {8, 0x8000, false}};
  Core core(0, quick_cfg(10), std::move(trace), &llc,
            [&](bool, uint64_t, int) {
              ++attempts;
              return accept;
            });
  for (int i = 0; i < 10; ++i) core.tick();
  CHECK(attempts == 10);  // retried every cycle
  CHECK(core.outstanding_misses() == 0);
  accept = true;
  core.tick();
  CHECK(core.outstanding_misses() == 1);
}

TEST_CASE("IPC never exceeds the issue width") {
  LlcModel llc(1 << 16, 8, 64);
  std::vector<TraceRecord> trace;
  std::mt19937_64 rng(21);
  for (int i = 0; i < 500; ++i)
    trace.push_back({int64_t(rng() % 7), (rng() % 4096) * 64, (rng() & 1) != 0});
  Core core(0, quick_cfg(2000), std::move(trace), &llc,
            [](bool, uint64_t, int) { return true; });
  // complete misses instantly via a self-loop
  for (int i = 0; i < 20000 && !core.reached_quota(); ++i) {
    core.tick();
    for (int k = 0; k < 4096; ++k) core.on_read_complete(uint64_t(k) * 64);
  }
  CHECK(core.reached_quota());
  CHECK(core.ipc() <= 4.0 + 1e-9);
}

TEST_CASE("warm-up instructions are excluded from IPC") {
  // slow first record (an uncompleted miss would stall forever), then bubbles
  LlcModel llc(8 << 20, 8, 64);
  std::vector<TraceRecord> trace = {{0, 0x0, false}, {4000, 0x0, false}};
  Core core(0, quick_cfg(4000, 100), std::move(trace), &llc,
            [](bool, uint64_t, int) { return true; });
  // stall 300 cycles before completing the first load
  for (int i = 0; i < 300; ++i) core.tick();
  core.on_read_complete(0x0);
  while (!core.reached_quota()) core.tick();
  // warm-up swallowed the 300-cycle stall: measured IPC is near full width
  CHECK(core.ipc() > 3.5);
}

TEST_CASE("weighted speedup identities") {
  CHECK(weighted_speedup({2.0}, {2.0}) == doctest::Approx(1.0));
  CHECK(weighted_speedup({1.0, 1.0, 1.0, 1.0}, {2.0, 2.0, 2.0, 2.0}) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(weighted_speedup({1.0}, {0.0}), SimError);
  CHECK_THROWS_AS(weighted_speedup({1.0, 2.0}, {1.0}), SimError);
}

TEST_CASE("geometric mean matches an independent recomputation") {
  std::vector<double> vals = {1.2, 0.8, 2.5, 1.0, 3.3};
  double logsum = 0.0;
  for (double v : vals) logsum += std::log(v);
  CHECK(geomean(vals) == doctest::Approx(std::exp(logsum / 5.0)));
  CHECK_THROWS_AS(geomean({}), SimError);
  CHECK_THROWS_AS(geomean({1.0, -2.0}), SimError);
}

TEST_CASE("LLC is LRU within a set") {
  // line 64 B, 2-way, 2 sets -> capacity 4 lines
  LlcModel llc(256, 2, 64);
  CHECK_FALSE(llc.access_read(0));     // set 0
  CHECK_FALSE(llc.access_read(128));   // set 0
  CHECK(llc.access_read(0));           // hit, 0 becomes MRU
  CHECK_FALSE(llc.access_read(256));   // set 0, evicts 128
  CHECK(llc.access_read(0));
  CHECK_FALSE(llc.access_read(128));   // was evicted
  CHECK(llc.misses() == 4);
  CHECK(llc.hits() == 2);
}
