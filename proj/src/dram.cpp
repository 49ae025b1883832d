#include "clrsim/dram.hpp"

#include <algorithm>
#include <string>

namespace clrsim {

const char* to_string(BankPhase p) {
  switch (p) {
    case BankPhase::Idle: return "Idle";
    case BankPhase::Activating: return "Activating";
    case BankPhase::Active: return "Active";
    case BankPhase::Precharging: return "Precharging";
    case BankPhase::Refreshing: return "Refreshing";
  }
  return "?";
}

BankPhase BankState::phase_at(Cycle cycle) const {
  switch (phase) {
    case BankPhase::Activating:
      return cycle >= act_cycle + cur_rcd ? BankPhase::Active
                                          : BankPhase::Activating;
    case BankPhase::Precharging:
      return cycle >= pre_cycle + pre_rp ? BankPhase::Idle
                                         : BankPhase::Precharging;
    case BankPhase::Refreshing:
      return cycle >= ref_end ? BankPhase::Idle : BankPhase::Refreshing;
    default:
      return phase;
  }
}

DramDevice::DramDevice(const DramTopology& topo,
                       const TimingParams& max_capacity,
                       const TimingParams& high_performance,
                       const RowModeTable* modes)
    : topo_(topo), modes_(modes) {
  topo_.validate();
  mode_params_[size_t(RowMode::MaxCapacity)] = max_capacity;
  mode_params_[size_t(RowMode::HighPerformance)] = high_performance;
  size_t nbanks = size_t(topo_.channels) * topo_.ranks_per_channel *
                  topo_.bankgroups_per_rank * topo_.banks_per_bankgroup;
  banks_.assign(nbanks, BankState{});
  size_t nranks = size_t(topo_.channels) * topo_.ranks_per_channel;
  ranks_.assign(nranks, RankState{});
  for (auto& r : ranks_) {
    r.last_act_per_bg.assign(size_t(topo_.bankgroups_per_rank), kNever);
    r.last_col_per_bg.assign(size_t(topo_.bankgroups_per_rank), kNever);
  }
  bus_free_.assign(size_t(topo_.channels), 0);
}

DramCoord DramDevice::coord_of_bank(size_t i) const {
  DramCoord c;
  c.bank = int32_t(i % topo_.banks_per_bankgroup);
  i /= topo_.banks_per_bankgroup;
  c.bankgroup = int32_t(i % topo_.bankgroups_per_rank);
  i /= topo_.bankgroups_per_rank;
  c.rank = int32_t(i % topo_.ranks_per_channel);
  c.channel = int32_t(i / topo_.ranks_per_channel);
  return c;
}

namespace {
inline Cycle bound(Cycle origin, int64_t gap) {
  return origin == kNever ? 0 : origin + gap;
}
}  // namespace

std::optional<Cycle> DramDevice::min_cycle_act(const DramCommand& cmd,
                                               Cycle from) const {
  const BankState& b = bank(cmd.coord);
  const RankState& r = rank(cmd.coord.channel, cmd.coord.rank);
  const auto& t = common().cyc;

  // an ACT needs the bank closed; someone must precharge an open row first
  if (b.phase == BankPhase::Activating || b.phase == BankPhase::Active)
    return std::nullopt;

  Cycle c = from;
  if (b.phase == BankPhase::Precharging) c = std::max(c, b.pre_cycle + b.pre_rp);
  if (b.phase == BankPhase::Refreshing) c = std::max(c, b.ref_end);
  c = std::max(c, bound(r.ref_busy_until, 0));
  for (int g = 0; g < topo_.bankgroups_per_rank; ++g) {
    Cycle last = r.last_act_per_bg[size_t(g)];
    if (last == kNever) continue;
    c = std::max(c, last + (g == cmd.coord.bankgroup ? t.rrd_l : t.rrd_s));
  }
  if (r.act_history[0] != kNever)
    c = std::max(c, r.act_history[0] + t.faw);
  return c;
}

std::optional<Cycle> DramDevice::min_cycle_pre(const DramCommand& cmd) const {
  const BankState& b = bank(cmd.coord);
  const RankState& r = rank(cmd.coord.channel, cmd.coord.rank);
  const auto& t = common().cyc;

  if (b.phase != BankPhase::Activating && b.phase != BankPhase::Active)
    return std::nullopt;  // nothing open to precharge
  if (!b.open_row || *b.open_row != cmd.coord.row)
    return std::nullopt;  // PRE must name the row it closes

  Cycle c = b.act_cycle + b.cur_ras;
  if (b.last_rd != kNever) c = std::max(c, b.last_rd + t.rtp);
  if (b.wr_data_end != kNever) c = std::max(c, b.wr_data_end + b.cur_wr);
  c = std::max(c, bound(r.ref_busy_until, 0));
  return c;
}

std::optional<Cycle> DramDevice::min_cycle_col(const DramCommand& cmd,
                                               Cycle from) const {
  const BankState& b = bank(cmd.coord);
  const RankState& r = rank(cmd.coord.channel, cmd.coord.rank);
  const auto& t = common().cyc;

  if (b.phase != BankPhase::Activating && b.phase != BankPhase::Active)
    return std::nullopt;
  if (!b.open_row || *b.open_row != cmd.coord.row) return std::nullopt;

  Cycle c = std::max(from, b.act_cycle + b.cur_rcd);
  for (int g = 0; g < topo_.bankgroups_per_rank; ++g) {
    Cycle last = r.last_col_per_bg[size_t(g)];
    if (last == kNever) continue;
    c = std::max(c, last + (g == cmd.coord.bankgroup ? t.ccd_l : t.ccd_s));
  }
  c = std::max(c, bound(r.ref_busy_until, 0));
  // data burst must not overlap an earlier reservation
  int64_t lat = cmd.kind == CommandKind::RD ? t.cl : t.cwl;
  Cycle bus_free = bus_free_[size_t(cmd.coord.channel)];
  if (c + lat < bus_free) c = bus_free - lat;
  return c;
}

std::optional<Cycle> DramDevice::min_cycle_ref(const DramCommand& cmd) const {
  const RankState& r = rank(cmd.coord.channel, cmd.coord.rank);
  Cycle c = bound(r.ref_busy_until, 0);
  // every bank of the rank must be precharged
  for (int bg = 0; bg < topo_.bankgroups_per_rank; ++bg) {
    for (int bk = 0; bk < topo_.banks_per_bankgroup; ++bk) {
      DramCoord bc = cmd.coord;
      bc.bankgroup = bg;
      bc.bank = bk;
      const BankState& b = bank(bc);
      switch (b.phase) {
        case BankPhase::Idle:
          break;
        case BankPhase::Precharging:
          c = std::max(c, b.pre_cycle + b.pre_rp);
          break;
        case BankPhase::Refreshing:
          c = std::max(c, b.ref_end);
          break;
        default:
          return std::nullopt;  // open bank: needs a PRE first
      }
    }
  }
  return c;
}

std::optional<Cycle> DramDevice::min_cycle_for(const DramCommand& cmd,
                                               Cycle from) const {
  if (cmd.kind != CommandKind::REF && !topo_.contains(cmd.coord))
    throw SimError("command coordinate outside topology");
  std::optional<Cycle> c;
  switch (cmd.kind) {
    case CommandKind::ACT: c = min_cycle_act(cmd, from); break;
    case CommandKind::PRE: c = min_cycle_pre(cmd); break;
    case CommandKind::RD:
    case CommandKind::WR: c = min_cycle_col(cmd, from); break;
    case CommandKind::REF: c = min_cycle_ref(cmd); break;
  }
  if (c && *c < from) c = from;
  return c;
}

bool DramDevice::can_issue(const DramCommand& cmd, Cycle cycle) const {
  auto c = min_cycle_for(cmd, cycle);
  return c && *c <= cycle;
}

void DramDevice::issue(const DramCommand& cmd, Cycle cycle) {
  if (!can_issue(cmd, cycle))
    throw SimFault(std::string("illegal ") + to_string(cmd.kind) +
                   " at cycle " + std::to_string(cycle) + " (bank phase " +
                   to_string(bank(cmd.coord).phase_at(cycle)) + ")");

  RankState& r = ranks_[size_t(cmd.coord.channel) * topo_.ranks_per_channel +
                        cmd.coord.rank];
  const auto& t = common().cyc;

  if (cmd.kind == CommandKind::REF) {
    int64_t rfc = params(cmd.ref_pool).cyc.rfc;
    r.ref_busy_until = cycle + rfc;
    for (int bg = 0; bg < topo_.bankgroups_per_rank; ++bg)
      for (int bk = 0; bk < topo_.banks_per_bankgroup; ++bk) {
        DramCoord bc = cmd.coord;
        bc.bankgroup = bg;
        bc.bank = bk;
        BankState& b = banks_[bank_index(bc)];
        b.phase = BankPhase::Refreshing;
        b.ref_end = cycle + rfc;
      }
    return;
  }

  BankState& b = banks_[bank_index(cmd.coord)];
  b.phase = b.phase_at(cycle);

  switch (cmd.kind) {
    case CommandKind::ACT: {
      RowMode m = row_mode(cmd.coord);
      const auto& mp = params(m).cyc;
      b.phase = BankPhase::Activating;
      b.open_row = cmd.coord.row;
      b.open_mode = m;
      b.act_cycle = cycle;
      b.cur_rcd = mp.rcd;
      b.cur_ras = mp.ras;
      b.cur_wr = mp.wr;
      b.last_rd = b.last_wr = b.wr_data_end = kNever;
      b.last_use = cycle;
      b.hit_streak = 0;
      std::copy(r.act_history.begin() + 1, r.act_history.end(),
                r.act_history.begin());
      r.act_history.back() = cycle;
      r.last_act_per_bg[size_t(cmd.coord.bankgroup)] = cycle;
      ++open_banks_;
      break;
    }
    case CommandKind::PRE: {
      b.phase = BankPhase::Precharging;
      b.pre_cycle = cycle;
      b.pre_rp = params(b.open_mode).cyc.rp;
      b.open_row.reset();
      --open_banks_;
      break;
    }
    case CommandKind::RD: {
      b.last_rd = cycle;
      b.last_use = cycle;
      r.last_col_per_bg[size_t(cmd.coord.bankgroup)] = cycle;
      bus_free_[size_t(cmd.coord.channel)] = cycle + t.cl + t.bl;
      break;
    }
    case CommandKind::WR: {
      b.last_wr = cycle;
      b.wr_data_end = cycle + t.cwl + t.bl;
      b.last_use = cycle;
      r.last_col_per_bg[size_t(cmd.coord.bankgroup)] = cycle;
      bus_free_[size_t(cmd.coord.channel)] = cycle + t.cwl + t.bl;
      break;
    }
    default:
      break;
  }
}

}  // namespace clrsim
