#include "clrsim/config.hpp"

#include <fstream>
#include <sstream>

namespace clrsim {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

int64_t to_i64(const std::string& v) { return std::stoll(v, nullptr, 0); }
double to_f64(const std::string& v) { return std::stod(v); }
bool to_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw SimError("bad boolean '" + v + "'");
}

}  // namespace

void apply_config_line(SimConfig& cfg, const std::string& key,
                       const std::string& value) {
  // topology
  if (key == "channels") cfg.topology.channels = int(to_i64(value));
  else if (key == "ranks") cfg.topology.ranks_per_channel = int(to_i64(value));
  else if (key == "bankgroups") cfg.topology.bankgroups_per_rank = int(to_i64(value));
  else if (key == "banks_per_group") cfg.topology.banks_per_bankgroup = int(to_i64(value));
  else if (key == "subarrays_per_bank") cfg.topology.subarrays_per_bank = int(to_i64(value));
  else if (key == "rows_per_subarray") cfg.topology.rows_per_subarray = to_i64(value);
  else if (key == "columns_per_row") cfg.topology.columns_per_row = int(to_i64(value));
  else if (key == "bytes_per_column") cfg.topology.bytes_per_column = int(to_i64(value));
  else if (key == "bus_mhz") cfg.topology.bus_mhz = to_f64(value);
  else if (key == "chips_per_rank") {
    cfg.topology.chips_per_rank = int(to_i64(value));
    cfg.power.chips_per_rank = int(to_i64(value));
  }
  // baseline timing (ns unless noted)
  else if (key == "trcd") cfg.timing.base.tRCD = to_f64(value);
  else if (key == "tras") cfg.timing.base.tRAS = to_f64(value);
  else if (key == "trp") cfg.timing.base.tRP = to_f64(value);
  else if (key == "twr") cfg.timing.base.tWR = to_f64(value);
  else if (key == "trfc") cfg.timing.base.tRFC = to_f64(value);
  else if (key == "trrd_s") cfg.timing.base.tRRD_S = to_f64(value);
  else if (key == "trrd_l") cfg.timing.base.tRRD_L = to_f64(value);
  else if (key == "tfaw") cfg.timing.base.tFAW = to_f64(value);
  else if (key == "tccd_s") cfg.timing.base.tCCD_S = to_f64(value);
  else if (key == "tccd_l") cfg.timing.base.tCCD_L = to_f64(value);
  else if (key == "trtp") cfg.timing.base.tRTP = to_f64(value);
  else if (key == "cl") cfg.timing.base.CL = to_f64(value);
  else if (key == "cwl") cfg.timing.base.CWL = to_f64(value);
  else if (key == "tbl") cfg.timing.base.tBL = to_f64(value);
  else if (key == "trefw_base_ms") cfg.timing.base.tREFW_ms = to_f64(value);
  // per-mode cell timings
  else if (key == "mc_trcd") cfg.timing.mc_tRCD = to_f64(value);
  else if (key == "mc_tras") cfg.timing.mc_tRAS = to_f64(value);
  else if (key == "mc_twr") cfg.timing.mc_tWR = to_f64(value);
  else if (key == "hp_trcd_et") cfg.timing.hp_tRCD_et = to_f64(value);
  else if (key == "hp_tras_et") cfg.timing.hp_tRAS_et = to_f64(value);
  else if (key == "hp_twr_et") cfg.timing.hp_tWR_et = to_f64(value);
  else if (key == "hp_trcd_noet") cfg.timing.hp_tRCD_noet = to_f64(value);
  else if (key == "hp_tras_noet") cfg.timing.hp_tRAS_noet = to_f64(value);
  else if (key == "hp_twr_noet") cfg.timing.hp_tWR_noet = to_f64(value);
  else if (key == "clr_trp") cfg.timing.clr_tRP = to_f64(value);
  else if (key == "trcd_increase_at_194") cfg.timing.trcd_increase_at_hi = to_f64(value);
  else if (key == "tras_increase_at_194") cfg.timing.tras_increase_at_hi = to_f64(value);
  // scheduler
  else if (key == "cap") cfg.scheduler.cap = int(to_i64(value));
  else if (key == "row_timeout_ns") cfg.scheduler.row_timeout_ns = to_f64(value);
  else if (key == "read_queue_size") cfg.scheduler.read_queue_size = int(to_i64(value));
  else if (key == "write_queue_size") cfg.scheduler.write_queue_size = int(to_i64(value));
  else if (key == "drain_hi") cfg.scheduler.drain_hi = to_f64(value);
  else if (key == "drain_lo") cfg.scheduler.drain_lo = to_f64(value);
  // mode / placement
  else if (key == "address_map") cfg.address_map = value;
  else if (key == "clr_enabled") cfg.clr_enabled = to_bool(value);
  else if (key == "hp_fraction") cfg.hp_fraction = int(to_i64(value));
  else if (key == "early_termination") cfg.early_termination = to_bool(value);
  else if (key == "trefw_ms") cfg.trefw_ms = to_f64(value);
  else if (key == "page_size") cfg.page_size = to_i64(value);
  // cpu
  else if (key == "cores") cfg.cores = int(to_i64(value));
  else if (key == "core_mhz") cfg.core_mhz = to_f64(value);
  else if (key == "issue_width") cfg.core.issue_width = int(to_i64(value));
  else if (key == "window_size") cfg.core.window_size = int(to_i64(value));
  else if (key == "mshrs") cfg.core.mshrs = int(to_i64(value));
  else if (key == "llc_hit_latency") cfg.core.llc_hit_latency = int(to_i64(value));
  else if (key == "instruction_quota") cfg.core.instruction_quota = to_i64(value);
  else if (key == "warmup_instructions") cfg.core.warmup_instructions = to_i64(value);
  else if (key == "replay_trace") cfg.core.replay_trace = to_bool(value);
  else if (key == "llc_capacity") cfg.llc_capacity = to_i64(value);
  else if (key == "llc_assoc") cfg.llc_assoc = int(to_i64(value));
  else if (key == "llc_line") cfg.llc_line = int(to_i64(value));
  // workload
  else if (key == "trace") cfg.trace_files.push_back(value);
  else if (key == "synth_kind") cfg.synth_kind = value;
  else if (key == "synth_records") cfg.synth.n_records = to_i64(value);
  else if (key == "synth_footprint") cfg.synth.footprint_bytes = to_i64(value);
  else if (key == "synth_bubbles") cfg.synth.bubble_mean = to_i64(value);
  else if (key == "synth_write_fraction") cfg.synth.write_fraction = to_f64(value);
  else if (key == "synth_zipf_theta") cfg.synth.zipf_theta = to_f64(value);
  // run control
  else if (key == "seed") cfg.seed = uint64_t(to_i64(value));
  else if (key == "duration_ms") cfg.duration_ms = to_f64(value);
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "run_label") cfg.run_label = value;
  else if (key == "dump_commands") cfg.dump_commands = to_bool(value);
  else if (key == "weighted_speedup") cfg.compute_weighted_speedup = to_bool(value);
  // power
  else if (key == "vdd") cfg.power.vdd = to_f64(value);
  else if (key == "idd0") cfg.power.idd0 = to_f64(value);
  else if (key == "idd2n") cfg.power.idd2n = to_f64(value);
  else if (key == "idd3n") cfg.power.idd3n = to_f64(value);
  else if (key == "idd4r") cfg.power.idd4r = to_f64(value);
  else if (key == "idd4w") cfg.power.idd4w = to_f64(value);
  else if (key == "idd5b") cfg.power.idd5b = to_f64(value);
  else
    throw SimError("unknown config key '" + key + "'");
}

SimConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SimError("cannot open config file " + path);
  SimConfig cfg;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[' && t.back() == ']') continue;  // section headers
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw SimError(path + ":" + std::to_string(lineno) +
                     ": expected key = value");
    try {
      apply_config_line(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const SimError& e) {
      throw SimError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void SimConfig::validate() const {
  topology.validate();
  if (hp_fraction < 0 || hp_fraction > 100)
    throw SimError("hp_fraction must be within [0, 100]");
  if (cores < 0) throw SimError("cores must be >= 0");
  if (cores == 0 && duration_ms <= 0)
    throw SimError("a run without cores needs duration_ms");
  if (synth_kind != "random" && synth_kind != "stream" && synth_kind != "zipf")
    throw SimError("synth_kind must be random, stream or zipf");
  if (core_mhz < topology.bus_mhz)
    throw SimError("core clock must be at least the bus clock");
  if (scheduler.drain_lo >= scheduler.drain_hi)
    throw SimError("drain_lo must be below drain_hi");
}

std::string config_echo(const SimConfig& cfg) {
  std::ostringstream ss;
  ss << "clr=" << (cfg.clr_enabled ? 1 : 0)
     << ";hp_fraction=" << cfg.hp_fraction
     << ";early_termination=" << (cfg.early_termination ? 1 : 0)
     << ";trefw_ms=" << cfg.trefw_ms << ";seed=" << cfg.seed
     << ";cores=" << cfg.cores << ";quota=" << cfg.core.instruction_quota
     << ";warmup=" << cfg.core.warmup_instructions
     << ";duration_ms=" << cfg.duration_ms << ";synth=" << cfg.synth_kind
     << ";records=" << cfg.synth.n_records
     << ";footprint=" << cfg.synth.footprint_bytes
     << ";bubbles=" << cfg.synth.bubble_mean
     << ";wfrac=" << cfg.synth.write_fraction << ";cap=" << cfg.scheduler.cap
     << ";timeout_ns=" << cfg.scheduler.row_timeout_ns
     << ";trfc=" << cfg.timing.base.tRFC << ";bus_mhz=" << cfg.topology.bus_mhz
     << ";banks=" << cfg.topology.banks_per_rank()
     << ";traces=" << cfg.trace_files.size();
  return ss.str();
}

}  // namespace clrsim
