#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "clrsim/trace.hpp"
#include "clrsim/types.hpp"

namespace clrsim {

// Shared last-level cache, LRU, allocate-on-read-miss, no-allocate writes.
class LlcModel {
 public:
  LlcModel(int64_t capacity_bytes, int associativity, int line_bytes);

  // true = hit; a read miss allocates the line immediately (the wait is
  // modeled by the caller's MSHR).
  bool access_read(uint64_t addr);
  bool access_write(uint64_t addr);
  // lookup with no side effects, for stall-and-retry paths
  bool probe(uint64_t addr) const;

  int64_t lookups() const { return hits_ + misses_; }
  int64_t hits() const { return hits_; }
  int64_t misses() const { return misses_; }
  int line_bytes() const { return line_bytes_; }

 private:
  struct Way {
    uint64_t tag = 0;
    int64_t stamp = -1;  // -1 = invalid
  };
  size_t set_of(uint64_t addr) const;
  bool touch(uint64_t addr, bool allocate);

  int line_bytes_;
  int assoc_;
  size_t sets_;
  std::vector<Way> ways_;
  int64_t clock_ = 0;
  int64_t hits_ = 0, misses_ = 0;
};

struct CoreConfig {
  int issue_width = 4;
  int window_size = 128;
  int mshrs = 8;
  int llc_hit_latency = 20;  // core cycles
  int64_t instruction_quota = 2000000;
  int64_t warmup_instructions = 100000;
  bool replay_trace = true;
};

// In-order trace-driven core: dispatches up to issue_width instructions per
// cycle into the window, retires completed ones in order, and stalls on a
// full window, exhausted MSHRs, or memory-controller back-pressure.
class Core {
 public:
  // send(is_write, line_addr, core_id) -> accepted?
  using SendFn = std::function<bool(bool, uint64_t, int)>;

  Core(int id, const CoreConfig& cfg, std::vector<TraceRecord> trace,
       LlcModel* llc, SendFn send);

  void tick();
  void on_read_complete(uint64_t line_addr);

  bool reached_quota() const { return quota_done_; }
  int id() const { return id_; }
  int64_t cycles() const { return cycles_; }
  int64_t retired() const { return retired_; }
  int64_t llc_misses() const { return llc_misses_; }
  int outstanding_misses() const { return int(mshr_.size()); }

  // instructions per cycle between the warm-up point and the quota point
  double ipc() const;
  double mpki() const;

 private:
  bool dispatch_one();

  int id_;
  CoreConfig cfg_;
  std::vector<TraceRecord> trace_;
  LlcModel* llc_;
  SendFn send_;

  size_t cursor_ = 0;
  int64_t bubbles_left_ = 0;
  bool record_pending_ = false;  // current record's memory op not yet issued
  bool trace_done_ = false;

  struct Slot {
    int64_t id;
    bool done;
  };
  std::deque<Slot> window_;
  int64_t next_id_ = 0;

  std::unordered_map<uint64_t, std::vector<int64_t>> mshr_;  // line -> slots
  struct HitEvent {
    int64_t cycle;
    int64_t slot_id;
    bool operator>(const HitEvent& o) const {
      return cycle != o.cycle ? cycle > o.cycle : slot_id > o.slot_id;
    }
  };
  std::priority_queue<HitEvent, std::vector<HitEvent>, std::greater<>>
      hit_events_;

  int64_t cycles_ = 0;
  int64_t retired_ = 0;
  int64_t llc_misses_ = 0;

  bool warmup_done_ = false, quota_done_ = false;
  int64_t warm_cycles_ = 0, warm_retired_ = 0, warm_misses_ = 0;
  int64_t quota_cycles_ = 0, quota_retired_ = 0, quota_misses_ = 0;

  void mark_done(int64_t slot_id);
};

// weighted speedup = sum_i shared_ipc[i] / alone_ipc[i]
double weighted_speedup(const std::vector<double>& shared_ipcs,
                        const std::vector<double>& alone_ipcs);
double geomean(const std::vector<double>& values);

}  // namespace clrsim
