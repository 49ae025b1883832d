#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clrsim/controller.hpp"
#include "clrsim/cpu.hpp"
#include "clrsim/energy.hpp"
#include "clrsim/timing.hpp"
#include "clrsim/topology.hpp"
#include "clrsim/trace.hpp"

namespace clrsim {

// Whole-simulation configuration. Every field has a default matching the
// evaluated system; the config file overrides them with `key = value` lines
// (# comments). See configs/default.cfg for the full key list.
struct SimConfig {
  DramTopology topology;
  ClrTimingTable timing;
  SchedulerConfig scheduler;
  std::string address_map;  // empty -> default interleaving

  bool clr_enabled = true;  // false -> plain DDR4 baseline device
  int hp_fraction = 0;      // % of rows (and of hottest pages) switched to HP
  bool early_termination = true;
  double trefw_ms = 64.0;  // refresh window of the high-performance pool
  int64_t page_size = 4096;

  int cores = 1;
  double core_mhz = 4000.0;
  CoreConfig core;
  int64_t llc_capacity = 8 << 20;
  int llc_assoc = 8;
  int llc_line = 64;

  std::vector<std::string> trace_files;
  // synthetic workload used when no trace files are given
  std::string synth_kind = "random";  // random|stream|zipf
  TraceGenConfig synth;

  uint64_t seed = 1;
  double duration_ms = 0.0;  // > 0: run for fixed simulated time, no quota

  PowerParams power;

  std::string out_dir;
  std::string run_label = "run";
  bool dump_commands = false;
  bool compute_weighted_speedup = false;

  void validate() const;
};

SimConfig load_config(const std::string& path);
void apply_config_line(SimConfig& cfg, const std::string& key,
                       const std::string& value);

// key=value echo of the fields that determine simulation behavior, in fixed
// order, for reproducibility checks and the stats csv.
std::string config_echo(const SimConfig& cfg);

}  // namespace clrsim
