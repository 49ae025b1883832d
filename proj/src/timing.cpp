#include "clrsim/timing.hpp"

#include <cmath>

namespace clrsim {

int64_t ns_to_cycles(double ns, double bus_mhz) {
  double cycles = ns * bus_mhz / 1000.0;
  return static_cast<int64_t>(std::ceil(cycles - 1e-9));
}

void TimingParams::finalize(double bus_mhz) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw SimError(std::string("timing parameter ") + name + " must be > 0");
  };
  positive(tRCD, "tRCD");
  positive(tRAS, "tRAS");
  positive(tRP, "tRP");
  positive(tWR, "tWR");
  positive(tRFC, "tRFC");
  positive(tRRD_S, "tRRD_S");
  positive(tRRD_L, "tRRD_L");
  positive(tFAW, "tFAW");
  positive(tCCD_S, "tCCD_S");
  positive(tCCD_L, "tCCD_L");
  positive(tRTP, "tRTP");
  positive(CL, "CL");
  positive(CWL, "CWL");
  positive(tBL, "tBL");
  positive(tREFW_ms, "tREFW");
  if (tRAS < tRCD) throw SimError("tRAS must be >= tRCD");

  tREFI_us = tREFW_ms * 1000.0 / 8192.0;

  cyc.rcd = ns_to_cycles(tRCD, bus_mhz);
  cyc.ras = ns_to_cycles(tRAS, bus_mhz);
  cyc.rp = ns_to_cycles(tRP, bus_mhz);
  cyc.wr = ns_to_cycles(tWR, bus_mhz);
  cyc.rfc = ns_to_cycles(tRFC, bus_mhz);
  cyc.rrd_s = ns_to_cycles(tRRD_S, bus_mhz);
  cyc.rrd_l = ns_to_cycles(tRRD_L, bus_mhz);
  cyc.faw = ns_to_cycles(tFAW, bus_mhz);
  cyc.ccd_s = ns_to_cycles(tCCD_S, bus_mhz);
  cyc.ccd_l = ns_to_cycles(tCCD_L, bus_mhz);
  cyc.rtp = ns_to_cycles(tRTP, bus_mhz);
  cyc.cl = ns_to_cycles(CL, bus_mhz);
  cyc.cwl = ns_to_cycles(CWL, bus_mhz);
  cyc.bl = ns_to_cycles(tBL, bus_mhz);
  cyc.refi = ns_to_cycles(tREFI_us * 1000.0, bus_mhz);
  cyc.refw = ns_to_cycles(tREFW_ms * 1e6, bus_mhz);
}

double ClrTimingTable::hp_trfc_factor() const {
  double ras_reduction = 1.0 - hp_tRAS_et / base.tRAS;
  double rp_reduction = 1.0 - clr_tRP / base.tRP;
  return 1.0 - 0.5 * (ras_reduction + rp_reduction);
}

TimingParams timing_for(RowMode mode, bool early_termination, double trefw_ms,
                        const ClrTimingTable& table) {
  if (trefw_ms < table.trefw_anchor_lo_ms - 1e-9 ||
      trefw_ms > table.trefw_anchor_hi_ms + 1e-9)
    throw SimError("tREFW " + std::to_string(trefw_ms) +
                   " ms outside the supported [64, 194] ms range");

  TimingParams p = table.base;
  if (mode == RowMode::MaxCapacity) {
    p.tRCD = table.mc_tRCD;
    p.tRAS = table.mc_tRAS;
    p.tWR = table.mc_tWR;
    p.tRP = table.clr_tRP;
    p.tREFW_ms = table.base.tREFW_ms;  // max-capacity cannot extend tREFW
    return p;
  }

  p.tRCD = early_termination ? table.hp_tRCD_et : table.hp_tRCD_noet;
  p.tRAS = early_termination ? table.hp_tRAS_et : table.hp_tRAS_noet;
  p.tWR = early_termination ? table.hp_tWR_et : table.hp_tWR_noet;
  p.tRP = table.clr_tRP;
  p.tRFC = table.base.tRFC * table.hp_trfc_factor();
  p.tREFW_ms = trefw_ms;

  double span = table.trefw_anchor_hi_ms - table.trefw_anchor_lo_ms;
  double frac = (trefw_ms - table.trefw_anchor_lo_ms) / span;
  p.tRCD += frac * table.trcd_increase_at_hi;
  p.tRAS += frac * table.tras_increase_at_hi;
  return p;
}

}  // namespace clrsim
