#include "clrsim/controller.hpp"

#include <algorithm>
#include <fstream>

#include "clrsim/timing.hpp"

namespace clrsim {

MemoryController::MemoryController(int channel, DramDevice* device,
                                   const SchedulerConfig& cfg)
    : channel_(channel), dev_(device), cfg_(cfg) {
  const auto& topo = dev_->topology();
  timeout_cycles_ = ns_to_cycles(cfg_.row_timeout_ns, topo.bus_mhz);
  cap_ = cfg_.cap;
  if (cap_ < 1) throw SimError("scheduler cap must be >= 1");
  if (cfg_.row_timeout_ns <= 0) throw SimError("row timeout must be > 0");

  // The rank's rows are cut into up to 8192 global bins over the bank row
  // index (a REF covers one bin across all banks). A (rank, mode) pool owns
  // every bin containing at least one row of its mode; without a mode table
  // the device is a plain DDR4 rank, all bins in the max-capacity pool.
  const RowModeTable* table = dev_->mode_table();
  int64_t total_bins = std::min<int64_t>(8192, topo.rows_per_bank());
  int64_t rows_per_bin = topo.rows_per_bank() / total_bins;
  for (int rk = 0; rk < topo.ranks_per_channel; ++rk) {
    std::vector<int32_t> owned[2];
    int64_t rows[2] = {0, 0};
    for (int64_t bin = 0; bin < total_bins; ++bin) {
      bool has[2] = {false, false};
      if (table) {
        for (int bg = 0; bg < topo.bankgroups_per_rank; ++bg)
          for (int bk = 0; bk < topo.banks_per_bankgroup; ++bk) {
            DramCoord c;
            c.channel = channel_;
            c.rank = rk;
            c.bankgroup = bg;
            c.bank = bk;
            // groups never straddle bins smaller than a group, so stepping
            // by group size sees every mode in the range
            int64_t step = std::min(rows_per_bin, table->rows_per_group());
            for (int64_t r = bin * rows_per_bin;
                 r < (bin + 1) * rows_per_bin; r += step) {
              c.row = r;
              has[size_t(table->mode_of(c))] = true;
            }
          }
      } else {
        has[size_t(RowMode::MaxCapacity)] = true;
      }
      for (int m = 0; m < 2; ++m)
        if (has[m]) {
          owned[m].push_back(int32_t(bin));
          rows[m] += rows_per_bin * topo.banks_per_rank();
        }
    }

    for (RowMode mode : {RowMode::MaxCapacity, RowMode::HighPerformance}) {
      RefreshPool pool;
      pool.mode = mode;
      pool.rank = rk;
      pool.rows = rows[size_t(mode)];
      pool.bins = std::move(owned[size_t(mode)]);
      pool.n_bins = int(pool.bins.size());
      if (pool.n_bins > 0) {
        const auto& p = dev_->params(mode);
        pool.refw = p.cyc.refw;
        // urgency lead stays one global bin slot regardless of pool size
        pool.refi = pool.refw / total_bins;
        // owned bins are spread evenly over the pool's own window; the two
        // pools are offset by half a slot so their deadlines never start
        // out colliding
        int64_t spacing = pool.refw / pool.n_bins;
        int64_t phase =
            mode == RowMode::HighPerformance ? pool.refi / 2 : 0;
        pool.last_ref.resize(size_t(pool.n_bins));
        pool.real_refs.assign(size_t(pool.n_bins), 0);
        for (int i = 0; i < pool.n_bins; ++i)
          pool.last_ref[size_t(i)] =
              int64_t(i + 1) * spacing - pool.refw + phase;
      }
      pools_.push_back(std::move(pool));
    }
  }
}

bool MemoryController::can_accept(ReqKind kind) const {
  return kind == ReqKind::Read
             ? readq_.size() < size_t(cfg_.read_queue_size)
             : writeq_.size() < size_t(cfg_.write_queue_size);
}

bool MemoryController::enqueue(const MemRequest& req, Cycle now) {
  if (!can_accept(req.kind)) {
    ++stats_.backpressure;
    return false;
  }
  MemRequest r = req;
  r.arrival_cycle = now;
  if (r.kind == ReqKind::Read) {
    readq_.push_back(r);
    ++stats_.reads_enqueued;
  } else {
    writeq_.push_back(r);
    ++stats_.writes_enqueued;
  }
  return true;
}

bool MemoryController::row_has_waiter(const DramCoord& bank_coord,
                                      int64_t row) const {
  auto match = [&](const MemRequest& r) {
    return r.coord.rank == bank_coord.rank &&
           r.coord.bankgroup == bank_coord.bankgroup &&
           r.coord.bank == bank_coord.bank && r.coord.row == row;
  };
  return std::any_of(readq_.begin(), readq_.end(), match) ||
         std::any_of(writeq_.begin(), writeq_.end(), match);
}

void MemoryController::issue_for_request(std::vector<MemRequest>& queue,
                                         size_t index, const DramCommand& cmd,
                                         Cycle now) {
  dev_->issue(cmd, now);
  log_.push_back(cmd);
  ++stats_.cmds[size_t(cmd.kind)];

  MemRequest& req = queue[index];
  const auto& t = dev_->common().cyc;
  if (cmd.kind == CommandKind::RD) {
    Cycle finish = now + t.cl + t.bl;
    req.completion_cycle = finish;
    stats_.read_latency_cycles += finish - req.arrival_cycle;
    ++stats_.reads_completed;
    data_events_.push(
        DataEvent{finish, seq_++, {req.core_id, req.orig_addr, finish}});
  } else {
    req.completion_cycle = now + t.cwl + t.bl;
  }
  queue.erase(queue.begin() + long(index));
}

std::optional<DramCommand> MemoryController::refresh_tick(
    Cycle now, std::vector<bool>& rank_blocked) {
  // most urgent pool first
  int best = -1;
  Cycle best_deadline = 0;
  for (size_t i = 0; i < pools_.size(); ++i) {
    RefreshPool& p = pools_[i];
    if (!p.urgent(now)) continue;
    rank_blocked[size_t(p.rank)] = true;
    if (best < 0 || p.deadline() < best_deadline) {
      best = int(i);
      best_deadline = p.deadline();
    }
  }
  if (best < 0) return std::nullopt;

  RefreshPool& p = pools_[size_t(best)];
  DramCommand ref;
  ref.kind = CommandKind::REF;
  ref.coord.channel = channel_;
  ref.coord.rank = p.rank;
  ref.ref_pool = p.mode;
  ref.ref_bin = p.bins[size_t(p.next_bin)];
  if (dev_->can_issue(ref, now)) {
    dev_->issue(ref, now);
    ref.issue_cycle = now;
    log_.push_back(ref);
    ++stats_.cmds[size_t(CommandKind::REF)];
    auto& last = p.last_ref[size_t(p.next_bin)];
    if (p.real_refs[size_t(p.next_bin)] > 0)
      p.max_observed_spacing =
          std::max<int64_t>(p.max_observed_spacing, now - last);
    ++p.real_refs[size_t(p.next_bin)];
    last = now;
    ++p.refs_issued;
    p.next_bin = (p.next_bin + 1) % p.n_bins;
    return ref;
  }

  // cannot refresh while banks are open: precharge them as they become legal
  const auto& topo = dev_->topology();
  for (int bg = 0; bg < topo.bankgroups_per_rank; ++bg)
    for (int bk = 0; bk < topo.banks_per_bankgroup; ++bk) {
      DramCoord c;
      c.channel = channel_;
      c.rank = p.rank;
      c.bankgroup = bg;
      c.bank = bk;
      const BankState& b = dev_->bank(c);
      if (!b.open_row) continue;
      DramCommand pre;
      pre.kind = CommandKind::PRE;
      pre.coord = c;
      pre.coord.row = *b.open_row;
      if (dev_->can_issue(pre, now)) {
        dev_->issue(pre, now);
        pre.issue_cycle = now;
        log_.push_back(pre);
        ++stats_.cmds[size_t(CommandKind::PRE)];
        return pre;
      }
    }
  return std::nullopt;
}

std::optional<DramCommand> MemoryController::schedule(Cycle now) {
  const auto& topo = dev_->topology();
  std::vector<bool> rank_blocked(size_t(topo.ranks_per_channel), false);

  // (1) refresh with a deadline within one tREFI
  if (auto cmd = refresh_tick(now, rank_blocked)) return cmd;

  // write drain hysteresis
  size_t wq_hi = size_t(cfg_.drain_hi * cfg_.write_queue_size);
  size_t wq_lo = size_t(cfg_.drain_lo * cfg_.write_queue_size);
  if (!draining_) {
    if (!writeq_.empty() && (writeq_.size() >= wq_hi || readq_.empty()))
      draining_ = true;
  } else {
    if (writeq_.empty() || (writeq_.size() <= wq_lo && !readq_.empty()))
      draining_ = false;
  }
  std::vector<MemRequest>& active = draining_ ? writeq_ : readq_;
  CommandKind col_kind = draining_ ? CommandKind::WR : CommandKind::RD;

  // (2) oldest row-hit stream per bank, unless capped while older work waits
  {
    std::vector<int8_t> hit_seen(dev_->bank_count(), 0);
    for (size_t i = 0; i < active.size(); ++i) {
      const MemRequest& req = active[i];
      if (rank_blocked[size_t(req.coord.rank)]) continue;
      size_t b = dev_->bank_index(req.coord);
      if (hit_seen[b]) continue;
      const BankState& bs = dev_->bank_at(b);
      if (!bs.open_row || *bs.open_row != req.coord.row) continue;
      hit_seen[b] = 1;
      bool bypasses_older = i != 0;
      if (bs.hit_streak >= cap_ && bypasses_older) continue;
      DramCommand cmd;
      cmd.kind = col_kind;
      cmd.coord = req.coord;
      if (!dev_->can_issue(cmd, now)) continue;
      cmd.issue_cycle = now;
      if (active[i].row_result == RowResult::None) {
        active[i].row_result = RowResult::Hit;
        ++stats_.row_hits;
      }
      BankState& bm = dev_->bank_mut(req.coord);
      bm.hit_streak = bypasses_older ? bm.hit_streak + 1 : 0;
      issue_for_request(active, i, cmd, now);
      return cmd;
    }
  }

  // (3) first-ready in age order: PRE a conflicting row, ACT, then column
  for (size_t i = 0; i < active.size(); ++i) {
    MemRequest& req = active[i];
    if (rank_blocked[size_t(req.coord.rank)]) continue;
    const BankState& bs = dev_->bank(req.coord);

    DramCommand cmd;
    cmd.coord = req.coord;
    if (bs.open_row && *bs.open_row == req.coord.row) {
      if (bs.hit_streak >= cap_ && i != 0) continue;
      cmd.kind = col_kind;
      if (!dev_->can_issue(cmd, now)) continue;
      cmd.issue_cycle = now;
      if (req.row_result == RowResult::None) {
        req.row_result = RowResult::Hit;
        ++stats_.row_hits;
      }
      BankState& bm = dev_->bank_mut(req.coord);
      bm.hit_streak = (i != 0) ? bm.hit_streak + 1 : 0;
      issue_for_request(active, i, cmd, now);
      return cmd;
    }
    if (bs.open_row) {
      cmd.kind = CommandKind::PRE;
      cmd.coord.row = *bs.open_row;
      if (!dev_->can_issue(cmd, now)) continue;
      if (req.row_result == RowResult::None) {
        req.row_result = RowResult::Conflict;
        ++stats_.row_conflicts;
      }
    } else {
      cmd.kind = CommandKind::ACT;
      if (!dev_->can_issue(cmd, now)) continue;
      if (req.row_result == RowResult::None) {
        req.row_result = RowResult::Miss;
        ++stats_.row_misses;
      }
    }
    cmd.issue_cycle = now;
    dev_->issue(cmd, now);
    log_.push_back(cmd);
    ++stats_.cmds[size_t(cmd.kind)];
    return cmd;
  }

  // (4) timeout policy: close rows idle past the threshold with no waiters
  for (size_t b = 0; b < dev_->bank_count(); ++b) {
    const BankState& bs = dev_->bank_at(b);
    if (!bs.open_row) continue;
    DramCoord c = dev_->coord_of_bank(b);
    if (c.channel != channel_) continue;
    if (rank_blocked[size_t(c.rank)]) continue;
    if (now - bs.last_use < timeout_cycles_) continue;
    if (row_has_waiter(c, *bs.open_row)) continue;
    DramCommand cmd;
    cmd.kind = CommandKind::PRE;
    cmd.coord = c;
    cmd.coord.row = *bs.open_row;
    if (!dev_->can_issue(cmd, now)) continue;
    cmd.issue_cycle = now;
    dev_->issue(cmd, now);
    log_.push_back(cmd);
    ++stats_.cmds[size_t(cmd.kind)];
    return cmd;
  }

  return std::nullopt;
}

void MemoryController::tick(Cycle now) {
  while (!data_events_.empty() && data_events_.top().finish <= now) {
    completed_.push_back(data_events_.top().read);
    data_events_.pop();
  }

  for (const RefreshPool& p : pools_)
    if (p.n_bins > 0 && now > p.deadline())
      throw SimFault("refresh deadline missed for " +
                     std::string(to_string(p.mode)) + " pool bin " +
                     std::to_string(p.next_bin) + " at cycle " +
                     std::to_string(now));

  schedule(now);
}

bool MemoryController::idle() const {
  return readq_.empty() && writeq_.empty() && data_events_.empty();
}

Cycle MemoryController::next_event_not_before(Cycle now) const {
  Cycle next = now + (int64_t(1) << 40);
  for (const RefreshPool& p : pools_) {
    if (p.n_bins == 0) continue;
    next = std::min(next, p.deadline() - p.refi);
  }
  if (!data_events_.empty()) next = std::min(next, data_events_.top().finish);
  return std::max(now, next);
}

void MemoryController::dump_commands_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw SimError("cannot write command log " + path);
  f << "cycle,kind,channel,rank,bankgroup,bank,row,column\n";
  char buf[160];
  for (const auto& c : log_) {
    // REF carries its pool in the row column and its bin in the column field
    long long row = c.kind == CommandKind::REF ? (long long)c.ref_pool
                                               : (long long)c.coord.row;
    long long col = c.kind == CommandKind::REF ? (long long)c.ref_bin
                                               : (long long)c.coord.column;
    std::snprintf(buf, sizeof buf, "%lld,%s,%d,%d,%d,%d,%lld,%lld\n",
                  (long long)c.issue_cycle, to_string(c.kind), c.coord.channel,
                  c.coord.rank, c.coord.bankgroup, c.coord.bank, row, col);
    f << buf;
  }
}

}  // namespace clrsim
