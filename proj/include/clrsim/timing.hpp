#pragma once

#include <cstdint>

#include "clrsim/types.hpp"

namespace clrsim {

// Converts a nanosecond constraint to integer bus cycles, rounding up so a
// rounded value never undercuts the analog constraint. A tiny slack absorbs
// binary-float noise like 15.0 * 1.2 -> 18.000000000000004.
int64_t ns_to_cycles(double ns, double bus_mhz);

// One full set of DRAM timing constraints. Nanosecond values are the source
// of truth (kept for reporting and ratio checks); the integer bus-cycle
// counts derived from them are what the state machines enforce.
struct TimingParams {
  // ns
  double tRCD = 13.8;
  double tRAS = 39.4;
  double tRP = 15.5;
  double tWR = 12.5;
  double tRFC = 350.0;
  double tRRD_S = 5.3;
  double tRRD_L = 6.4;
  double tFAW = 30.0;
  double tCCD_S = 3.333;
  double tCCD_L = 5.0;
  double tRTP = 7.5;
  double CL = 13.32;
  double CWL = 10.0;
  double tBL = 3.333;
  // refresh window (ms) and the derived average refresh interval (us)
  double tREFW_ms = 64.0;
  double tREFI_us = 7.8125;

  double tRC() const { return tRAS + tRP; }

  // bus cycles
  struct CycleCounts {
    int64_t rcd = 0, ras = 0, rp = 0, wr = 0, rfc = 0;
    int64_t rrd_s = 0, rrd_l = 0, faw = 0, ccd_s = 0, ccd_l = 0, rtp = 0;
    int64_t cl = 0, cwl = 0, bl = 0;
    int64_t refi = 0, refw = 0;
  };
  CycleCounts cyc;

  // Validates invariants and fills `cyc` for the given bus frequency.
  void finalize(double bus_mhz);
};

// Table of per-mode cell-array timings plus the refresh-window sensitivity
// anchors. All values overridable from the configuration file.
struct ClrTimingTable {
  TimingParams base;  // conventional DDR4 device

  // max-capacity mode (full density, mode select transistors in the path)
  double mc_tRCD = 13.2;
  double mc_tRAS = 40.3;
  double mc_tWR = 13.3;

  // high-performance mode, with and without early termination of restoration
  double hp_tRCD_et = 5.5;
  double hp_tRAS_et = 14.1;
  double hp_tWR_et = 8.1;
  double hp_tRCD_noet = 5.4;
  double hp_tRAS_noet = 20.3;
  double hp_tWR_noet = 12.5;

  // precharge reduction applies to both modes
  double clr_tRP = 8.3;

  // tRCD/tRAS increase when the high-performance refresh window is extended,
  // linear between the 64 ms and 194 ms endpoints
  double trefw_anchor_lo_ms = 64.0;
  double trefw_anchor_hi_ms = 194.0;
  double trcd_increase_at_hi = 3.24;
  double tras_increase_at_hi = 3.04;

  // Refresh latency scale for high-performance rows: one minus the mean of
  // the tRAS and tRP reductions (early-termination values), ~0.447.
  double hp_trfc_factor() const;
};

// Builds the timing set for one row mode. For HighPerformance with
// tREFW > 64 ms, tRCD and tRAS grow by linear interpolation between the
// anchor points; tRFC is scaled by hp_trfc_factor(). MaxCapacity ignores
// early_termination and always keeps the 64 ms window.
// Throws SimError when trefw_ms falls outside the swept [64, 194] range.
TimingParams timing_for(RowMode mode, bool early_termination, double trefw_ms,
                        const ClrTimingTable& table);

}  // namespace clrsim
