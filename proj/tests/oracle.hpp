// Brute-force DRAM command-legality checker, independent of the simulator's
// incremental state machines. Every constraint is re-evaluated against the
// raw command history: per-bank structural facts (which row is open, when it
// was opened) are replayed from the log itself, and all inter-command gaps
// (tRRD, tFAW, tCCD, tRFC, the data-bus window) are found by scanning the
// history backwards. Used by unit tests and the acceptance suite.
#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "clrsim/timing.hpp"
#include "clrsim/topology.hpp"
#include "clrsim/types.hpp"

namespace clrsim::testing {

class LegalityOracle {
 public:
  using ModeFn = std::function<RowMode(const DramCoord&)>;

  LegalityOracle(const DramTopology& topo, const TimingParams& mc,
                 const TimingParams& hp, ModeFn mode_of)
      : topo_(topo), mode_of_(std::move(mode_of)) {
    params_[0] = mc;
    params_[1] = hp;
    size_t nbanks = size_t(topo.channels) * topo.ranks_per_channel *
                    topo.bankgroups_per_rank * topo.banks_per_bankgroup;
    banks_.assign(nbanks, Bank{});
    const auto& c = params_[0].cyc;
    const auto& h = params_[1].cyc;
    horizon_ = std::max<int64_t>(
        {c.rfc, h.rfc, c.faw, c.rrd_l, c.rrd_s, c.ccd_l, c.ccd_s,
         c.cl + c.bl + c.ccd_l, c.cwl + c.bl + std::max(c.wr, h.wr), c.rp,
         h.rp, c.rtp});
    horizon_ += 2;
  }

  // Violations found when appending cmd to the history. Empty = legal.
  std::vector<std::string> check(const DramCommand& cmd) const {
    std::vector<std::string> v;
    switch (cmd.kind) {
      case CommandKind::ACT: check_act(cmd, v); break;
      case CommandKind::PRE: check_pre(cmd, v); break;
      case CommandKind::RD:
      case CommandKind::WR: check_col(cmd, v); break;
      case CommandKind::REF: check_ref(cmd, v); break;
    }
    return v;
  }

  bool legal(const DramCommand& cmd) const { return check(cmd).empty(); }

  // Appends cmd (assumed checked) to the history.
  void apply(const DramCommand& cmd) {
    history_.push_back(cmd);
    Bank& b = bank(cmd.coord);
    switch (cmd.kind) {
      case CommandKind::ACT:
        b.open_row = cmd.coord.row;
        b.open_mode = mode_of_(cmd.coord);
        b.act_cycle = cmd.issue_cycle;
        b.last_rd = b.last_wr = kNever;
        break;
      case CommandKind::PRE:
        b.open_row.reset();
        b.pre_cycle = cmd.issue_cycle;
        b.pre_mode = b.open_mode;
        break;
      case CommandKind::RD:
        b.last_rd = cmd.issue_cycle;
        break;
      case CommandKind::WR:
        b.last_wr = cmd.issue_cycle;
        break;
      case CommandKind::REF:
        break;
    }
  }

  // Replays a full log; returns all violations with command indices.
  std::vector<std::string> replay(const std::vector<DramCommand>& log) {
    std::vector<std::string> all;
    for (size_t i = 0; i < log.size(); ++i) {
      if (i > 0 && log[i].issue_cycle < log[i - 1].issue_cycle)
        all.push_back("command " + std::to_string(i) + ": log out of order");
      for (auto& v : check(log[i]))
        all.push_back("command " + std::to_string(i) + " (" +
                      to_string(log[i].kind) + " @" +
                      std::to_string(log[i].issue_cycle) + "): " + v);
      apply(log[i]);
    }
    return all;
  }

 private:
  struct Bank {
    std::optional<int64_t> open_row;
    RowMode open_mode = RowMode::MaxCapacity;
    RowMode pre_mode = RowMode::MaxCapacity;
    Cycle act_cycle = kNever;
    Cycle pre_cycle = kNever;
    Cycle last_rd = kNever;
    Cycle last_wr = kNever;
  };

  const Bank& bank(const DramCoord& c) const {
    return banks_[((size_t(c.channel) * topo_.ranks_per_channel + c.rank) *
                       topo_.bankgroups_per_rank +
                   c.bankgroup) *
                      topo_.banks_per_bankgroup +
                  c.bank];
  }
  Bank& bank(const DramCoord& c) {
    return const_cast<Bank&>(static_cast<const LegalityOracle*>(this)->bank(c));
  }

  bool same_rank(const DramCommand& a, const DramCoord& c) const {
    return a.coord.channel == c.channel && a.coord.rank == c.rank;
  }
  bool same_bank(const DramCommand& a, const DramCoord& c) const {
    return same_rank(a, c) && a.coord.bankgroup == c.bankgroup &&
           a.coord.bank == c.bank;
  }

  const TimingParams::CycleCounts& cyc(RowMode m) const {
    return params_[size_t(m)].cyc;
  }
  const TimingParams::CycleCounts& common() const { return params_[0].cyc; }

  template <typename Fn>
  void scan_back(Cycle now, Fn&& fn) const {
    for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
      if (now - it->issue_cycle > horizon_) break;
      fn(*it);
    }
  }

  void require(bool ok, const char* what, std::vector<std::string>& v) const {
    if (!ok) v.push_back(what);
  }

  void check_act(const DramCommand& cmd, std::vector<std::string>& v) const {
    const Bank& b = bank(cmd.coord);
    Cycle t = cmd.issue_cycle;
    require(!b.open_row.has_value(), "ACT to a bank with an open row", v);
    if (b.pre_cycle != kNever)
      require(t >= b.pre_cycle + cyc(b.pre_mode).rp, "tRP violated", v);

    int acts_in_faw = 1;
    scan_back(t, [&](const DramCommand& h) {
      if (h.kind == CommandKind::REF && same_rank(h, cmd.coord)) {
        if (t < h.issue_cycle + cyc(h.ref_pool).rfc)
          v.push_back("ACT during tRFC");
      }
      if (h.kind != CommandKind::ACT || !same_rank(h, cmd.coord)) return;
      int64_t rrd = h.coord.bankgroup == cmd.coord.bankgroup
                        ? common().rrd_l
                        : common().rrd_s;
      if (t < h.issue_cycle + rrd) v.push_back("tRRD violated");
      if (t - h.issue_cycle < common().faw) ++acts_in_faw;
    });
    require(acts_in_faw <= 4, "tFAW violated (5th ACT in the window)", v);
  }

  void check_pre(const DramCommand& cmd, std::vector<std::string>& v) const {
    const Bank& b = bank(cmd.coord);
    Cycle t = cmd.issue_cycle;
    if (!b.open_row.has_value()) {
      v.push_back("PRE with no open row");
      return;
    }
    require(*b.open_row == cmd.coord.row, "PRE names the wrong row", v);
    require(t >= b.act_cycle + cyc(b.open_mode).ras, "tRAS violated", v);
    if (b.last_rd != kNever)
      require(t >= b.last_rd + common().rtp, "tRTP violated", v);
    if (b.last_wr != kNever)
      require(t >= b.last_wr + common().cwl + common().bl + cyc(b.open_mode).wr,
              "tWR violated", v);
    scan_back(t, [&](const DramCommand& h) {
      if (h.kind == CommandKind::REF && same_rank(h, cmd.coord) &&
          t < h.issue_cycle + cyc(h.ref_pool).rfc)
        v.push_back("PRE during tRFC");
    });
  }

  void check_col(const DramCommand& cmd, std::vector<std::string>& v) const {
    const Bank& b = bank(cmd.coord);
    Cycle t = cmd.issue_cycle;
    if (!b.open_row.has_value()) {
      v.push_back("column command to a closed bank");
      return;
    }
    require(*b.open_row == cmd.coord.row, "column command to the wrong row", v);
    require(t >= b.act_cycle + cyc(b.open_mode).rcd, "tRCD violated", v);

    int64_t lat =
        cmd.kind == CommandKind::RD ? common().cl : common().cwl;
    scan_back(t, [&](const DramCommand& h) {
      if (h.kind == CommandKind::REF && same_rank(h, cmd.coord) &&
          t < h.issue_cycle + cyc(h.ref_pool).rfc)
        v.push_back("column command during tRFC");
      if (h.kind != CommandKind::RD && h.kind != CommandKind::WR) return;
      if (same_rank(h, cmd.coord)) {
        int64_t ccd = h.coord.bankgroup == cmd.coord.bankgroup
                          ? common().ccd_l
                          : common().ccd_s;
        if (t < h.issue_cycle + ccd) v.push_back("tCCD violated");
      }
      if (h.coord.channel == cmd.coord.channel) {
        int64_t h_lat =
            h.kind == CommandKind::RD ? common().cl : common().cwl;
        // data bursts on one channel may not overlap
        if (t + lat < h.issue_cycle + h_lat + common().bl)
          v.push_back("data bus conflict");
      }
    });
  }

  void check_ref(const DramCommand& cmd, std::vector<std::string>& v) const {
    Cycle t = cmd.issue_cycle;
    for (int bg = 0; bg < topo_.bankgroups_per_rank; ++bg)
      for (int bk = 0; bk < topo_.banks_per_bankgroup; ++bk) {
        DramCoord c = cmd.coord;
        c.bankgroup = bg;
        c.bank = bk;
        const Bank& b = bank(c);
        if (b.open_row.has_value()) {
          v.push_back("REF with an open bank");
          continue;
        }
        if (b.pre_cycle != kNever && t < b.pre_cycle + cyc(b.pre_mode).rp)
          v.push_back("REF before precharge completed");
      }
    scan_back(t, [&](const DramCommand& h) {
      if (h.kind == CommandKind::REF && same_rank(h, cmd.coord) &&
          t < h.issue_cycle + cyc(h.ref_pool).rfc)
        v.push_back("REF during tRFC");
    });
  }

  DramTopology topo_;
  TimingParams params_[2];
  ModeFn mode_of_;
  std::vector<Bank> banks_;
  std::vector<DramCommand> history_;
  int64_t horizon_ = 0;
};

}  // namespace clrsim::testing
