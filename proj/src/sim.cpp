#include "clrsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "clrsim/workload.hpp"

namespace clrsim {

namespace {

std::vector<TraceRecord> make_core_trace(const SimConfig& cfg, int core_id) {
  if (!cfg.trace_files.empty()) {
    const std::string& path =
        cfg.trace_files[size_t(core_id) % cfg.trace_files.size()];
    return load_trace(path);
  }
  TraceGenConfig g = cfg.synth;
  g.seed = cfg.seed + uint64_t(core_id);
  g.page_size = cfg.page_size;
  if (cfg.synth_kind == "random") return gen_random(g);
  if (cfg.synth_kind == "stream") return gen_stream(g);
  return gen_zipf(g);
}

struct MergedLog {
  std::vector<const DramCommand*> cmds;
};

MergedLog merge_logs(const std::vector<MemoryController>& mcs) {
  MergedLog out;
  size_t total = 0;
  for (const auto& mc : mcs) total += mc.command_log().size();
  out.cmds.reserve(total);
  std::vector<size_t> idx(mcs.size(), 0);
  while (true) {
    int best = -1;
    Cycle best_cycle = 0;
    for (size_t c = 0; c < mcs.size(); ++c) {
      const auto& log = mcs[c].command_log();
      if (idx[c] >= log.size()) continue;
      Cycle cyc = log[idx[c]].issue_cycle;
      if (best < 0 || cyc < best_cycle) {
        best = int(c);
        best_cycle = cyc;
      }
    }
    if (best < 0) break;
    out.cmds.push_back(&mcs[size_t(best)].command_log()[idx[size_t(best)]]);
    ++idx[size_t(best)];
  }
  return out;
}

}  // namespace

StatsReport run(const SimConfig& cfg) {
  cfg.validate();
  const DramTopology& topo = cfg.topology;
  AddressMap map = cfg.address_map.empty()
                       ? AddressMap::default_map(topo)
                       : AddressMap::parse(cfg.address_map, topo);

  // timing sets
  TimingParams mc_params, hp_params;
  if (cfg.clr_enabled) {
    mc_params = timing_for(RowMode::MaxCapacity, cfg.early_termination,
                           cfg.timing.trefw_anchor_lo_ms, cfg.timing);
    hp_params = timing_for(RowMode::HighPerformance, cfg.early_termination,
                           cfg.trefw_ms, cfg.timing);
  } else {
    mc_params = cfg.timing.base;
    hp_params = cfg.timing.base;
  }
  mc_params.finalize(topo.bus_mhz);
  hp_params.finalize(topo.bus_mhz);

  // row modes and placement
  int y_bits = map.rows_per_page_log2(cfg.page_size);
  RowModeTable table(topo, y_bits);
  int fraction = cfg.clr_enabled ? cfg.hp_fraction : 0;
  if (fraction > 0) configure_hp_rows(table, fraction);

  std::vector<std::vector<TraceRecord>> traces;
  for (int c = 0; c < cfg.cores; ++c) traces.push_back(make_core_trace(cfg, c));

  PlacementPlan plan(map, table, cfg.page_size, fraction);
  if (!traces.empty()) {
    PageProfile profile = profile_pages(traces, cfg.page_size);
    plan.assign(profile);
  }

  DramDevice device(topo, mc_params, hp_params, &table);
  std::vector<MemoryController> mcs;
  mcs.reserve(size_t(topo.channels));
  for (int ch = 0; ch < topo.channels; ++ch)
    mcs.emplace_back(ch, &device, cfg.scheduler);

  LlcModel llc(cfg.llc_capacity, cfg.llc_assoc, cfg.llc_line);
  Cycle bus_now = 0;

  auto send = [&](bool is_write, uint64_t line, int core_id) -> bool {
    MemRequest r;
    r.kind = is_write ? ReqKind::Write : ReqKind::Read;
    r.orig_addr = line;
    r.phys_addr = plan.remap(line);
    r.coord = map.decode(r.phys_addr);
    r.core_id = core_id;
    return mcs[size_t(r.coord.channel)].enqueue(r, bus_now);
  };

  CoreConfig core_cfg = cfg.core;
  std::vector<Core> cores;
  cores.reserve(size_t(cfg.cores));
  for (int c = 0; c < cfg.cores; ++c)
    cores.emplace_back(c, core_cfg, std::move(traces[size_t(c)]), &llc, send);

  // clock-domain crossing: cores run core_mhz/bus_mhz ticks per bus cycle,
  // exactly, via an integer accumulator
  int64_t clk_num = int64_t(std::llround(cfg.core_mhz * 1e6));
  int64_t clk_den = int64_t(std::llround(topo.bus_mhz * 1e6));
  int64_t clk_acc = 0;

  Cycle end_cycle = cfg.duration_ms > 0
                        ? ns_to_cycles(cfg.duration_ms * 1e6, topo.bus_mhz)
                        : (int64_t(1) << 62);

  while (true) {
    for (auto& mc : mcs) mc.tick(bus_now);
    for (auto& mc : mcs) {
      for (const auto& cr : mc.completed_reads())
        cores[size_t(cr.core_id)].on_read_complete(cr.orig_addr);
      mc.completed_reads().clear();
    }

    if (!cores.empty()) {
      clk_acc += clk_num;
      while (clk_acc >= clk_den) {
        for (auto& core : cores) core.tick();
        clk_acc -= clk_den;
      }
    }

    if (cfg.duration_ms > 0) {
      if (bus_now + 1 >= end_cycle) {
        ++bus_now;
        break;
      }
    } else {
      bool all_done = true;
      for (const auto& core : cores)
        if (!core.reached_quota()) {
          all_done = false;
          break;
        }
      if (all_done) {
        ++bus_now;
        break;
      }
    }

    if (cores.empty()) {
      // refresh-only run: jump to the next scheduled event
      Cycle next = end_cycle - 1;
      for (const auto& mc : mcs)
        next = std::min(next, mc.next_event_not_before(bus_now + 1));
      bus_now = std::max(bus_now + 1, next);
    } else {
      ++bus_now;
    }
  }

  // assemble the report
  StatsReport rep;
  rep.label = cfg.run_label;
  rep.echo = config_echo(cfg);
  rep.capacity_pct = 100.0 * table.capacity_fraction();
  rep.bus_cycles = bus_now;
  rep.sim_seconds = double(bus_now) / (topo.bus_mhz * 1e6);

  for (const auto& core : cores) {
    rep.core_ipc.push_back(core.ipc());
    rep.core_mpki.push_back(core.mpki());
  }
  if (!rep.core_ipc.empty()) rep.ipc_gmean = geomean(rep.core_ipc);
  if (!rep.core_mpki.empty()) {
    int intensive = int(std::count_if(rep.core_mpki.begin(),
                                      rep.core_mpki.end(),
                                      [](double m) { return m > 2.0; }));
    rep.mix_class = intensive == int(rep.core_mpki.size()) ? "H"
                    : intensive == 0                       ? "L"
                                                           : "M";
  }

  int64_t lat_cycles = 0;
  for (const auto& mc : mcs) {
    const auto& s = mc.stats();
    rep.row_hits += s.row_hits;
    rep.row_misses += s.row_misses;
    rep.row_conflicts += s.row_conflicts;
    rep.acts += s.cmds[size_t(CommandKind::ACT)];
    rep.pres += s.cmds[size_t(CommandKind::PRE)];
    rep.rds += s.cmds[size_t(CommandKind::RD)];
    rep.wrs += s.cmds[size_t(CommandKind::WR)];
    rep.refs += s.cmds[size_t(CommandKind::REF)];
    rep.reads_done += s.reads_completed;
    lat_cycles += s.read_latency_cycles;
    for (const auto& pool : mc.refresh_pools()) {
      if (pool.n_bins == 0) continue;
      if (pool.mode == RowMode::MaxCapacity) {
        rep.refresh_window_mc = pool.refw;
        rep.refresh_spacing_mc = pool.max_observed_spacing > 0
                                     ? std::max(rep.refresh_spacing_mc,
                                                pool.max_observed_spacing)
                                     : rep.refresh_spacing_mc;
      } else {
        rep.refresh_window_hp = pool.refw;
        rep.refresh_spacing_hp = pool.max_observed_spacing > 0
                                     ? std::max(rep.refresh_spacing_hp,
                                                pool.max_observed_spacing)
                                     : rep.refresh_spacing_hp;
      }
    }
  }
  rep.open_rows_at_end = device.open_bank_count();
  if (rep.acts != rep.pres + rep.open_rows_at_end)
    throw SimFault("ACT/PRE pairing out of balance: " +
                   std::to_string(rep.acts) + " ACT vs " +
                   std::to_string(rep.pres) + " PRE with " +
                   std::to_string(rep.open_rows_at_end) + " open rows");
  if (rep.reads_done > 0)
    rep.avg_read_latency_ns =
        double(lat_cycles) / double(rep.reads_done) * 1000.0 / topo.bus_mhz;
  int64_t classified = rep.row_hits + rep.row_misses + rep.row_conflicts;
  if (classified > 0)
    rep.row_hit_rate = double(rep.row_hits) / double(classified);

  // energy over the merged command log
  {
    EnergyAccumulator acc(topo, mc_params, hp_params, cfg.power);
    MergedLog merged = merge_logs(mcs);
    for (const DramCommand* cmd : merged.cmds) {
      RowMode m = cmd->kind == CommandKind::ACT ? device.row_mode(cmd->coord)
                                                : RowMode::MaxCapacity;
      acc.account(*cmd, m);
    }
    rep.energy = acc.finish(bus_now);
  }

  rep.mc_trcd_ns = mc_params.tRCD;
  rep.mc_tras_ns = mc_params.tRAS;
  rep.mc_trp_ns = mc_params.tRP;
  rep.mc_twr_ns = mc_params.tWR;
  rep.hp_trcd_ns = hp_params.tRCD;
  rep.hp_tras_ns = hp_params.tRAS;
  rep.hp_trp_ns = hp_params.tRP;
  rep.hp_twr_ns = hp_params.tWR;
  rep.hp_trfc_ns = hp_params.tRFC;
  rep.base_trfc_ns = cfg.timing.base.tRFC;
  rep.interpolated_timings =
      cfg.clr_enabled && cfg.trefw_ms > cfg.timing.trefw_anchor_lo_ms;
  {
    std::ostringstream notes;
    notes << "split_rw_queues;quota_replay;ceil_cycle_rounding";
    if (rep.interpolated_timings) notes << ";trefw_interpolated";
    rep.notes = notes.str();
  }

  // weighted speedup via per-core solo runs under the identical config
  if (cfg.compute_weighted_speedup && cfg.cores > 1) {
    std::vector<double> alone;
    for (int c = 0; c < cfg.cores; ++c) {
      SimConfig solo = cfg;
      solo.cores = 1;
      solo.compute_weighted_speedup = false;
      solo.out_dir.clear();
      if (!cfg.trace_files.empty())
        solo.trace_files = {
            cfg.trace_files[size_t(c) % cfg.trace_files.size()]};
      else
        solo.seed = cfg.seed + uint64_t(c);
      StatsReport r = run(solo);
      alone.push_back(r.core_ipc.at(0));
    }
    rep.weighted_speedup = clrsim::weighted_speedup(rep.core_ipc, alone);
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_stats_csv(cfg.out_dir + "/stats.csv", {rep});
    write_energy_csv(cfg.out_dir + "/energy.csv", rep.energy);
    plan.save_csv(cfg.out_dir + "/placement.csv");
    if (cfg.dump_commands)
      for (size_t ch = 0; ch < mcs.size(); ++ch)
        mcs[ch].dump_commands_csv(cfg.out_dir + "/commands" +
                                  (mcs.size() > 1 ? "_ch" + std::to_string(ch)
                                                  : std::string()) +
                                  ".csv");
  }
  return rep;
}

namespace {

template <typename Point, typename MakeCfg>
std::vector<StatsReport> run_points(const std::vector<Point>& points,
                                    MakeCfg make_cfg, int jobs) {
  std::vector<StatsReport> out(points.size());
  if (jobs <= 1) {
    for (size_t i = 0; i < points.size(); ++i) out[i] = run(make_cfg(points[i]));
    return out;
  }
  std::vector<std::thread> workers;
  std::atomic<size_t> next{0};
  for (int j = 0; j < jobs; ++j)
    workers.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= points.size()) return;
        out[i] = run(make_cfg(points[i]));
      }
    });
  for (auto& w : workers) w.join();
  return out;
}

}  // namespace

std::vector<StatsReport> sweep_fraction(const SimConfig& cfg,
                                        const std::vector<int>& fractions,
                                        int jobs) {
  return run_points(
      fractions,
      [&](int f) {
        SimConfig c = cfg;
        c.clr_enabled = true;
        c.hp_fraction = f;
        c.run_label = "hp" + std::to_string(f);
        if (!cfg.out_dir.empty()) c.out_dir = cfg.out_dir + "/" + c.run_label;
        return c;
      },
      jobs);
}

std::vector<StatsReport> sweep_refresh(const SimConfig& cfg,
                                       const std::vector<double>& trefws,
                                       int jobs) {
  return run_points(
      trefws,
      [&](double t) {
        SimConfig c = cfg;
        c.clr_enabled = true;
        c.hp_fraction = 100;  // max-capacity rows cannot extend tREFW
        c.trefw_ms = t;
        c.run_label = "trefw" + std::to_string(int(t));
        if (!cfg.out_dir.empty()) c.out_dir = cfg.out_dir + "/" + c.run_label;
        return c;
      },
      jobs);
}

std::string StatsReport::csv_header() {
  return "label,capacity_pct,ipc_gmean,weighted_speedup,mix,ipc_per_core,"
         "mpki_per_core,bus_cycles,sim_seconds,row_hits,row_misses,"
         "row_conflicts,row_hit_rate,acts,pres,rds,wrs,refs,"
         "avg_read_latency_ns,act_pre_j,read_j,write_j,refresh_j,"
         "background_j,total_j,avg_power_w,mc_trcd,mc_tras,mc_trp,mc_twr,"
         "hp_trcd,hp_tras,hp_trp,hp_twr,hp_trfc,base_trfc,"
         "refresh_spacing_mc,refresh_window_mc,refresh_spacing_hp,"
         "refresh_window_hp,interpolated,notes,config";
}

std::string StatsReport::csv_row() const {
  std::ostringstream ss;
  char buf[64];
  auto f = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  auto e = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return std::string(buf);
  };
  auto join = [&](const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += "|";
      s += f(v[i]);
    }
    return s;
  };
  double avg_power = energy.elapsed_seconds > 0
                         ? energy.total() / energy.elapsed_seconds
                         : 0.0;
  ss << label << ',' << f(capacity_pct) << ',' << f(ipc_gmean) << ','
     << f(weighted_speedup) << ',' << mix_class << ',' << join(core_ipc) << ','
     << join(core_mpki) << ',' << bus_cycles << ',' << f(sim_seconds) << ','
     << row_hits << ',' << row_misses << ',' << row_conflicts << ','
     << f(row_hit_rate) << ',' << acts << ',' << pres << ',' << rds << ','
     << wrs << ',' << refs << ',' << f(avg_read_latency_ns) << ','
     << e(energy.act_pre_energy) << ',' << e(energy.read_energy) << ','
     << e(energy.write_energy) << ',' << e(energy.refresh_energy) << ','
     << e(energy.background_energy) << ',' << e(energy.total()) << ','
     << f(avg_power) << ',' << f(mc_trcd_ns) << ',' << f(mc_tras_ns) << ','
     << f(mc_trp_ns) << ',' << f(mc_twr_ns) << ',' << f(hp_trcd_ns) << ','
     << f(hp_tras_ns) << ',' << f(hp_trp_ns) << ',' << f(hp_twr_ns) << ','
     << f(hp_trfc_ns) << ',' << f(base_trfc_ns) << ','
     << refresh_spacing_mc << ',' << refresh_window_mc << ','
     << refresh_spacing_hp << ',' << refresh_window_hp << ','
     << (interpolated_timings ? 1 : 0) << ',' << notes << ',' << echo;
  return ss.str();
}

void write_stats_csv(const std::string& path,
                     const std::vector<StatsReport>& reports) {
  std::ofstream f(path);
  if (!f) throw SimError("cannot write stats csv " + path);
  f << StatsReport::csv_header() << "\n";
  for (const auto& r : reports) f << r.csv_row() << "\n";
}

}  // namespace clrsim
