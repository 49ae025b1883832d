#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "clrsim/dram.hpp"
#include "clrsim/types.hpp"

namespace clrsim {

enum class ReqKind : uint8_t { Read, Write };
enum class RowResult : uint8_t { None, Hit, Miss, Conflict };

struct MemRequest {
  ReqKind kind = ReqKind::Read;
  uint64_t phys_addr = 0;  // post-placement address
  uint64_t orig_addr = 0;  // as issued by the core
  DramCoord coord;
  int core_id = 0;
  Cycle arrival_cycle = 0;
  Cycle completion_cycle = -1;
  RowResult row_result = RowResult::None;
};

struct SchedulerConfig {
  // FR-FCFS-Cap: consecutive prioritized row hits before the open row yields
  int cap = 16;
  double row_timeout_ns = 120.0;
  int read_queue_size = 64;
  int write_queue_size = 64;
  // write drain starts at hi occupancy (or when reads run dry) and stops at lo
  double drain_hi = 0.75;
  double drain_lo = 0.25;
};

// Deadline-driven refresh state for one (rank, row-mode) pool.
//
// The rank's row space is cut into up to 8192 global bins (a REF covers one
// bin's row range across every bank, the DDR4 convention); a pool owns the
// bins whose rows run in its mode, refreshing each once per its own tREFW.
// A bin becomes urgent one bin-slot before its deadline and must be
// refreshed by the deadline.
struct RefreshPool {
  RowMode mode = RowMode::MaxCapacity;
  int rank = 0;
  int64_t rows = 0;                // rows covered, for reporting
  std::vector<int32_t> bins;       // owned global bin indices, ascending
  int n_bins = 0;
  int64_t refi = 0;  // global bin slot width (pool tREFW / total bins)
  int64_t refw = 0;  // refresh window in cycles
  std::vector<Cycle> last_ref;     // per owned bin
  std::vector<int32_t> real_refs;  // per owned bin, for coverage accounting
  int next_bin = 0;                // index into bins/last_ref
  int64_t refs_issued = 0;
  int64_t max_observed_spacing = 0;  // between real refreshes of one bin

  Cycle deadline() const { return last_ref[size_t(next_bin)] + refw; }
  bool urgent(Cycle now) const {
    return n_bins > 0 && now >= deadline() - refi;
  }
};

struct ControllerStats {
  int64_t reads_enqueued = 0, writes_enqueued = 0;
  int64_t row_hits = 0, row_misses = 0, row_conflicts = 0;
  int64_t cmds[5] = {0, 0, 0, 0, 0};
  int64_t read_latency_cycles = 0;  // summed over completed reads
  int64_t reads_completed = 0;
  int64_t backpressure = 0;
};

struct CompletedRead {
  int core_id = 0;
  uint64_t orig_addr = 0;
  Cycle finish_cycle = 0;
};

// One controller per channel, advancing strictly with the bus clock and
// issuing at most one command per cycle.
class MemoryController {
 public:
  MemoryController(int channel, DramDevice* device,
                   const SchedulerConfig& cfg);

  bool can_accept(ReqKind kind) const;
  // False means back-pressure: the queue is full and the caller must retry.
  bool enqueue(const MemRequest& req, Cycle now);

  void tick(Cycle now);

  // Reads whose data burst finished by now; caller drains every cycle.
  std::vector<CompletedRead>& completed_reads() { return completed_; }

  const ControllerStats& stats() const { return stats_; }
  const std::vector<DramCommand>& command_log() const { return log_; }
  const std::vector<RefreshPool>& refresh_pools() const { return pools_; }
  size_t read_queue_depth() const { return readq_.size(); }
  size_t write_queue_depth() const { return writeq_.size(); }
  bool idle() const;
  // earliest cycle at which the controller has anything scheduled; used to
  // fast-forward quiet stretches of refresh-only simulations
  Cycle next_event_not_before(Cycle now) const;

  void dump_commands_csv(const std::string& path) const;

 private:
  std::optional<DramCommand> schedule(Cycle now);
  std::optional<DramCommand> refresh_tick(Cycle now,
                                          std::vector<bool>& rank_blocked);
  void issue_for_request(std::vector<MemRequest>& queue, size_t index,
                         const DramCommand& cmd, Cycle now);
  bool row_has_waiter(const DramCoord& bank_coord, int64_t row) const;

  int channel_;
  DramDevice* dev_;
  SchedulerConfig cfg_;
  int64_t timeout_cycles_;
  int64_t cap_;

  std::vector<MemRequest> readq_;
  std::vector<MemRequest> writeq_;
  bool draining_ = false;

  std::vector<RefreshPool> pools_;

  // (finish_cycle, enqueue order) -> completed read, min-heap
  struct DataEvent {
    Cycle finish;
    int64_t seq;
    CompletedRead read;
    bool operator>(const DataEvent& o) const {
      return finish != o.finish ? finish > o.finish : seq > o.seq;
    }
  };
  std::priority_queue<DataEvent, std::vector<DataEvent>, std::greater<>>
      data_events_;
  int64_t seq_ = 0;

  std::vector<CompletedRead> completed_;
  std::vector<DramCommand> log_;
  ControllerStats stats_;
};

}  // namespace clrsim
