#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clrsim/config.hpp"
#include "clrsim/energy.hpp"

namespace clrsim {

struct StatsReport {
  std::string label;
  std::string echo;

  double capacity_pct = 100.0;
  std::vector<double> core_ipc;
  std::vector<double> core_mpki;
  double ipc_gmean = 0.0;        // geometric mean over cores
  double weighted_speedup = 0.0; // 0 when not computed
  std::string mix_class;         // L / M / H by per-core MPKI > 2

  int64_t bus_cycles = 0;
  double sim_seconds = 0.0;

  int64_t row_hits = 0, row_misses = 0, row_conflicts = 0;
  int64_t acts = 0, pres = 0, rds = 0, wrs = 0, refs = 0;
  int64_t reads_done = 0;
  int64_t open_rows_at_end = 0;
  double avg_read_latency_ns = 0.0;
  double row_hit_rate = 0.0;

  EnergyLedger energy;

  // constructed timing echo (ns) and conventions metadata
  double mc_trcd_ns = 0, mc_tras_ns = 0, mc_trp_ns = 0, mc_twr_ns = 0;
  double hp_trcd_ns = 0, hp_tras_ns = 0, hp_trp_ns = 0, hp_twr_ns = 0;
  double hp_trfc_ns = 0, base_trfc_ns = 0;
  bool interpolated_timings = false;
  std::string notes;

  // worst observed spacing between refreshes of one bin, per pool (cycles);
  // -1 when a pool never issued two refreshes to the same bin
  int64_t refresh_spacing_mc = -1;
  int64_t refresh_spacing_hp = -1;
  int64_t refresh_window_mc = 0;
  int64_t refresh_window_hp = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

// One deterministic simulation. Writes stats/energy/command files when
// cfg.out_dir is set.
StatsReport run(const SimConfig& cfg);

// Shared trace and seed across points; jobs > 1 runs points concurrently
// (each simulation instance owns all of its state).
std::vector<StatsReport> sweep_fraction(const SimConfig& cfg,
                                        const std::vector<int>& fractions,
                                        int jobs = 1);
std::vector<StatsReport> sweep_refresh(const SimConfig& cfg,
                                       const std::vector<double>& trefws,
                                       int jobs = 1);

void write_stats_csv(const std::string& path,
                     const std::vector<StatsReport>& reports);

}  // namespace clrsim
