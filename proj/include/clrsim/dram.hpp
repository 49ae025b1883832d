#pragma once

#include <array>
#include <optional>
#include <vector>

#include "clrsim/clr_control.hpp"
#include "clrsim/timing.hpp"
#include "clrsim/topology.hpp"
#include "clrsim/types.hpp"

namespace clrsim {

enum class BankPhase : uint8_t { Idle, Activating, Active, Precharging, Refreshing };

const char* to_string(BankPhase p);

struct BankState {
  std::optional<int64_t> open_row;
  RowMode open_mode = RowMode::MaxCapacity;
  BankPhase phase = BankPhase::Idle;

  Cycle act_cycle = kNever;
  Cycle pre_cycle = kNever;
  Cycle ref_end = kNever;
  Cycle last_rd = kNever;
  Cycle last_wr = kNever;
  Cycle wr_data_end = kNever;
  // last ACT or column command, for the timeout row policy
  Cycle last_use = kNever;

  // constraint cycles snapshotted from the open row's mode at ACT time, and
  // from the closing row's mode at PRE time
  int64_t cur_rcd = 0, cur_ras = 0, cur_wr = 0;
  int64_t pre_rp = 0;

  // consecutive prioritized row hits served since the last non-hit (FR-FCFS cap)
  int hit_streak = 0;

  BankPhase phase_at(Cycle cycle) const;
};

struct RankState {
  // last 4 ACT issue cycles, oldest first (tFAW)
  std::array<Cycle, 4> act_history = {kNever, kNever, kNever, kNever};
  std::vector<Cycle> last_act_per_bg;
  std::vector<Cycle> last_col_per_bg;
  Cycle ref_busy_until = kNever;
};

// Device-side model: per-bank state machines plus rank/channel constraints.
// Timing legality is centralized in min_cycle_for; can_issue is the same
// computation compared against the probe cycle.
class DramDevice {
 public:
  DramDevice(const DramTopology& topo, const TimingParams& max_capacity,
             const TimingParams& high_performance, const RowModeTable* modes);

  // Smallest cycle >= from at which cmd could issue given current state, or
  // nullopt when no such cycle exists without an intervening state change
  // (e.g. a column command to a row that is not open).
  std::optional<Cycle> min_cycle_for(const DramCommand& cmd, Cycle from) const;

  bool can_issue(const DramCommand& cmd, Cycle cycle) const;

  // Applies cmd at cycle. Issuing an illegal command is a simulation bug and
  // throws SimFault.
  void issue(const DramCommand& cmd, Cycle cycle);

  const BankState& bank(const DramCoord& c) const {
    return banks_[bank_index(c)];
  }
  BankState& bank_mut(const DramCoord& c) { return banks_[bank_index(c)]; }
  const RankState& rank(int ch, int rk) const {
    return ranks_[size_t(ch) * topo_.ranks_per_channel + rk];
  }

  const TimingParams& params(RowMode m) const {
    return mode_params_[size_t(m)];
  }
  // secondary timings are mode-independent; any set works for them
  const TimingParams& common() const { return mode_params_[0]; }

  const DramTopology& topology() const { return topo_; }
  const RowModeTable* mode_table() const { return modes_; }
  RowMode row_mode(const DramCoord& c) const {
    return modes_ ? modes_->mode_of(c) : RowMode::MaxCapacity;
  }

  int64_t open_bank_count() const { return open_banks_; }

  // For iteration by the scheduler.
  size_t bank_index(const DramCoord& c) const {
    return ((size_t(c.channel) * topo_.ranks_per_channel + c.rank) *
                topo_.bankgroups_per_rank +
            c.bankgroup) *
               topo_.banks_per_bankgroup +
           c.bank;
  }
  size_t bank_count() const { return banks_.size(); }
  const BankState& bank_at(size_t i) const { return banks_[i]; }
  DramCoord coord_of_bank(size_t i) const;

 private:
  std::optional<Cycle> min_cycle_act(const DramCommand& cmd, Cycle from) const;
  std::optional<Cycle> min_cycle_pre(const DramCommand& cmd) const;
  std::optional<Cycle> min_cycle_col(const DramCommand& cmd, Cycle from) const;
  std::optional<Cycle> min_cycle_ref(const DramCommand& cmd) const;

  DramTopology topo_;
  TimingParams mode_params_[2];
  const RowModeTable* modes_;
  std::vector<BankState> banks_;
  std::vector<RankState> ranks_;
  // data-bus reservation per channel: next cycle the bus is free
  std::vector<Cycle> bus_free_;
  int64_t open_banks_ = 0;
};

}  // namespace clrsim
