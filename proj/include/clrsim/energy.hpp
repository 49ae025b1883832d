#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clrsim/dram.hpp"
#include "clrsim/types.hpp"

namespace clrsim {

struct PowerParams {
  double vdd = 1.2;  // volts
  // milliamps
  double idd0 = 60.0;
  double idd2n = 40.0;
  double idd3n = 52.0;
  double idd4r = 150.0;
  double idd4w = 150.0;
  double idd5b = 220.0;
  int chips_per_rank = 8;

  void validate() const;
};

struct EnergyLedger {
  double act_pre_energy = 0.0;  // joules
  double read_energy = 0.0;
  double write_energy = 0.0;
  double refresh_energy = 0.0;
  double background_energy = 0.0;
  double elapsed_seconds = 0.0;

  double total() const {
    return act_pre_energy + read_energy + write_energy + refresh_energy +
           background_energy;
  }
};

struct EnergyReport {
  double total_energy = 0.0;
  double avg_power = 0.0;
  double refresh_energy = 0.0;
  EnergyLedger breakdown;
};

// Streaming fold over one channel's command log. ACT and PRE are charged
// jointly when the PRE arrives, with the closed row's mode-specific
// tRAS/tRP/tRC; background accrues at IDD3N while any bank of a rank is open
// and IDD2N otherwise.
class EnergyAccumulator {
 public:
  EnergyAccumulator(const DramTopology& topo, const TimingParams& max_capacity,
                    const TimingParams& high_performance,
                    const PowerParams& power);

  // Commands must arrive in issue order; regressing cycles are an error.
  void account(const DramCommand& cmd, RowMode act_row_mode);

  // Closes background accounting at end_cycle and returns the ledger.
  EnergyLedger finish(Cycle end_cycle);

 private:
  void accrue_background(Cycle until);

  DramTopology topo_;
  TimingParams params_[2];
  PowerParams power_;
  EnergyLedger ledger_;
  Cycle last_cycle_ = 0;
  bool finished_ = false;
  std::vector<int> open_banks_per_rank_;
  std::vector<RowMode> bank_open_mode_;
  double ns_per_cycle_;
};

// Convenience wrapper: folds a device's command log. Row modes for ACT/PRE
// pairs come from the device's mode table (max-capacity when absent).
EnergyLedger compute_energy(const DramDevice& device,
                            const std::vector<DramCommand>& log,
                            const PowerParams& power, Cycle end_cycle);

// report(): avg_power = total/elapsed; zero elapsed is an error.
EnergyReport energy_report(const EnergyLedger& ledger);

// commands.csv reader (REF rows carry pool in `row`, bin in `column`).
std::vector<DramCommand> load_commands_csv(const std::string& path);

void write_energy_csv(const std::string& path, const EnergyLedger& ledger);

}  // namespace clrsim
