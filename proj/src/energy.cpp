#include "clrsim/energy.hpp"

#include <fstream>
#include <sstream>

namespace clrsim {

namespace {
// mA * ns * V -> joules
constexpr double kMilliNano = 1e-12;
}  // namespace

void PowerParams::validate() const {
  if (!(idd0 > idd3n && idd3n > idd2n))
    throw SimError("power parameters must satisfy IDD0 > IDD3N > IDD2N");
  for (double v : {vdd, idd0, idd2n, idd3n, idd4r, idd4w, idd5b})
    if (v <= 0.0) throw SimError("power parameters must be positive");
  if (chips_per_rank < 1) throw SimError("chips_per_rank must be >= 1");
}

EnergyAccumulator::EnergyAccumulator(const DramTopology& topo,
                                     const TimingParams& max_capacity,
                                     const TimingParams& high_performance,
                                     const PowerParams& power)
    : topo_(topo), power_(power) {
  power_.validate();
  params_[size_t(RowMode::MaxCapacity)] = max_capacity;
  params_[size_t(RowMode::HighPerformance)] = high_performance;
  open_banks_per_rank_.assign(
      size_t(topo_.channels) * topo_.ranks_per_channel, 0);
  bank_open_mode_.assign(size_t(topo_.channels) * topo_.ranks_per_channel *
                             topo_.banks_per_rank(),
                         RowMode::MaxCapacity);
  ns_per_cycle_ = 1000.0 / topo_.bus_mhz;
}

void EnergyAccumulator::accrue_background(Cycle until) {
  if (until < last_cycle_)
    throw SimError("energy accounting: command log out of order");
  double dt_ns = double(until - last_cycle_) * ns_per_cycle_;
  for (int r : open_banks_per_rank_) {
    double idd = r > 0 ? power_.idd3n : power_.idd2n;
    ledger_.background_energy +=
        idd * power_.vdd * dt_ns * power_.chips_per_rank * kMilliNano;
  }
  last_cycle_ = until;
}

void EnergyAccumulator::account(const DramCommand& cmd, RowMode act_row_mode) {
  if (finished_) throw SimError("energy accounting after finish()");
  accrue_background(cmd.issue_cycle);

  size_t rank_idx =
      size_t(cmd.coord.channel) * topo_.ranks_per_channel + cmd.coord.rank;
  size_t bank_idx =
      rank_idx * size_t(topo_.banks_per_rank()) +
      size_t(cmd.coord.bankgroup) * topo_.banks_per_bankgroup + cmd.coord.bank;

  const double chips = power_.chips_per_rank;
  switch (cmd.kind) {
    case CommandKind::ACT:
      bank_open_mode_[bank_idx] = act_row_mode;
      ++open_banks_per_rank_[rank_idx];
      break;
    case CommandKind::PRE: {
      const TimingParams& p = params_[size_t(bank_open_mode_[bank_idx])];
      double e = (power_.idd0 * p.tRC() - power_.idd3n * p.tRAS -
                  power_.idd2n * p.tRP) *
                 power_.vdd * chips * kMilliNano;
      ledger_.act_pre_energy += e;
      if (open_banks_per_rank_[rank_idx] > 0) --open_banks_per_rank_[rank_idx];
      break;
    }
    case CommandKind::RD:
      ledger_.read_energy += (power_.idd4r - power_.idd3n) * power_.vdd *
                             params_[0].tBL * chips * kMilliNano;
      break;
    case CommandKind::WR:
      ledger_.write_energy += (power_.idd4w - power_.idd3n) * power_.vdd *
                              params_[0].tBL * chips * kMilliNano;
      break;
    case CommandKind::REF: {
      const TimingParams& p = params_[size_t(cmd.ref_pool)];
      ledger_.refresh_energy += (power_.idd5b - power_.idd3n) * power_.vdd *
                                p.tRFC * chips * kMilliNano;
      break;
    }
  }
}

EnergyLedger EnergyAccumulator::finish(Cycle end_cycle) {
  accrue_background(end_cycle);
  ledger_.elapsed_seconds = double(end_cycle) * ns_per_cycle_ * 1e-9;
  finished_ = true;
  return ledger_;
}

EnergyLedger compute_energy(const DramDevice& device,
                            const std::vector<DramCommand>& log,
                            const PowerParams& power, Cycle end_cycle) {
  EnergyAccumulator acc(device.topology(),
                        device.params(RowMode::MaxCapacity),
                        device.params(RowMode::HighPerformance), power);
  for (const auto& cmd : log) {
    RowMode m = cmd.kind == CommandKind::ACT ? device.row_mode(cmd.coord)
                                             : RowMode::MaxCapacity;
    acc.account(cmd, m);
  }
  return acc.finish(end_cycle);
}

EnergyReport energy_report(const EnergyLedger& ledger) {
  if (ledger.elapsed_seconds <= 0.0)
    throw SimError("energy report over zero elapsed time");
  EnergyReport r;
  r.total_energy = ledger.total();
  r.avg_power = r.total_energy / ledger.elapsed_seconds;
  r.refresh_energy = ledger.refresh_energy;
  r.breakdown = ledger;
  return r;
}

std::vector<DramCommand> load_commands_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError("cannot open command log " + path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("cycle,", 0) != 0)
    throw SimError("command log missing header: " + path);
  std::vector<DramCommand> out;
  int64_t lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw SimError("command log parse error at line " +
                     std::to_string(lineno));
    DramCommand c;
    c.issue_cycle = std::stoll(fields[0]);
    const std::string& k = fields[1];
    if (k == "ACT") c.kind = CommandKind::ACT;
    else if (k == "PRE") c.kind = CommandKind::PRE;
    else if (k == "RD") c.kind = CommandKind::RD;
    else if (k == "WR") c.kind = CommandKind::WR;
    else if (k == "REF") c.kind = CommandKind::REF;
    else throw SimError("unknown command kind '" + k + "' at line " +
                        std::to_string(lineno));
    c.coord.channel = std::stoi(fields[2]);
    c.coord.rank = std::stoi(fields[3]);
    c.coord.bankgroup = std::stoi(fields[4]);
    c.coord.bank = std::stoi(fields[5]);
    if (c.kind == CommandKind::REF) {
      c.ref_pool = RowMode(std::stoi(fields[6]));
      c.ref_bin = std::stoi(fields[7]);
    } else {
      c.coord.row = std::stoll(fields[6]);
      c.coord.column = std::stoi(fields[7]);
    }
    out.push_back(c);
  }
  return out;
}

void write_energy_csv(const std::string& path, const EnergyLedger& ledger) {
  std::ofstream f(path);
  if (!f) throw SimError("cannot write energy csv " + path);
  f << "category,joules\n";
  char buf[96];
  auto row = [&](const char* name, double v) {
    std::snprintf(buf, sizeof buf, "%s,%.9e\n", name, v);
    f << buf;
  };
  row("act_pre", ledger.act_pre_energy);
  row("read", ledger.read_energy);
  row("write", ledger.write_energy);
  row("refresh", ledger.refresh_energy);
  row("background", ledger.background_energy);
  row("total", ledger.total());
  std::snprintf(buf, sizeof buf, "elapsed_seconds,%.9e\n",
                ledger.elapsed_seconds);
  f << buf;
}

}  // namespace clrsim
