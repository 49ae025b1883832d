#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clrsim/sim.hpp"
#include "clrsim/trace.hpp"

using namespace clrsim;

namespace {

struct CommonOpts {
  std::string config_file;
  std::vector<std::string> traces;
  std::vector<std::string> overrides;
  int hp_fraction = -1;
  double trefw = -1.0;
  int64_t seed = -1;
  std::string out_dir;
  std::string label;
  int cores = -1;
  bool baseline = false;
  bool log_commands = false;
  double duration_ms = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_file, "configuration file (key = value)");
  cmd->add_option("--trace", o.traces, "CPU trace file, one per core");
  cmd->add_option("--hp-fraction", o.hp_fraction,
                  "percent of rows (and hottest pages) in high-performance mode");
  cmd->add_option("--trefw", o.trefw, "high-performance refresh window, ms");
  cmd->add_option("--seed", o.seed, "RNG seed for synthetic workloads");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--label", o.label, "run label in stats.csv");
  cmd->add_option("--cores", o.cores, "number of cores");
  cmd->add_flag("--baseline", o.baseline, "simulate the unmodified DDR4 device");
  cmd->add_flag("--log-commands", o.log_commands, "write commands.csv");
  cmd->add_option("--duration-ms", o.duration_ms,
                  "run for fixed simulated time instead of an instruction quota");
  cmd->add_option("--set", o.overrides, "extra key=value config override")
      ->expected(-1);
}

SimConfig build_config(const CommonOpts& o) {
  SimConfig cfg;
  if (!o.config_file.empty()) cfg = load_config(o.config_file);
  for (const auto& kv : o.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw SimError("--set expects key=value, got '" + kv + "'");
    apply_config_line(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.traces.empty()) cfg.trace_files = o.traces;
  if (o.hp_fraction >= 0) cfg.hp_fraction = o.hp_fraction;
  if (o.trefw >= 0) cfg.trefw_ms = o.trefw;
  if (o.seed >= 0) cfg.seed = uint64_t(o.seed);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (!o.label.empty()) cfg.run_label = o.label;
  if (o.cores >= 0) cfg.cores = o.cores;
  if (o.baseline) cfg.clr_enabled = false;
  if (o.log_commands) cfg.dump_commands = true;
  if (o.duration_ms >= 0) cfg.duration_ms = o.duration_ms;
  return cfg;
}

void print_summary(const StatsReport& r) {
  std::printf("%-12s capacity %6.1f%%  ipc %7.4f", r.label.c_str(),
              r.capacity_pct, r.ipc_gmean);
  if (r.weighted_speedup > 0)
    std::printf("  ws %7.4f", r.weighted_speedup);
  std::printf("  hit-rate %5.1f%%  refs %lld  refresh %.3e J\n",
              100.0 * r.row_hit_rate, (long long)r.refs,
              r.energy.refresh_energy);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoi(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stod(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clr-sim: trace-driven DRAM simulator with per-row "
               "capacity-latency reconfiguration"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  auto* cmd_run = app.add_subcommand("run", "single simulation");
  add_common(cmd_run, run_opts);

  CommonOpts frac_opts;
  std::string fractions = "0,25,50,75,100";
  int frac_jobs = 1;
  auto* cmd_frac = app.add_subcommand(
      "sweep-fraction", "run every high-performance row fraction");
  add_common(cmd_frac, frac_opts);
  cmd_frac->add_option("--fractions", fractions, "comma-separated percents");
  cmd_frac->add_option("--jobs", frac_jobs, "concurrent simulations");

  CommonOpts ref_opts;
  std::string trefws = "64,114,124,184,194";
  int ref_jobs = 1;
  auto* cmd_ref = app.add_subcommand(
      "sweep-refresh", "sweep the high-performance refresh window at 100% HP");
  add_common(cmd_ref, ref_opts);
  cmd_ref->add_option("--trefws", trefws, "comma-separated windows in ms");
  cmd_ref->add_option("--jobs", ref_jobs, "concurrent simulations");

  auto* cmd_gen = app.add_subcommand("gen-trace", "write a synthetic trace");
  std::string gen_kind = "random", gen_out;
  TraceGenConfig gen;
  cmd_gen->add_option("--kind", gen_kind, "random|stream|zipf")->required();
  cmd_gen->add_option("--out", gen_out, "output trace file")->required();
  cmd_gen->add_option("--records", gen.n_records, "number of accesses");
  cmd_gen->add_option("--footprint", gen.footprint_bytes, "bytes touched");
  cmd_gen->add_option("--bubbles", gen.bubble_mean,
                      "mean non-memory instructions between accesses");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("--write-frac", gen.write_fraction, "fraction of writes");
  cmd_gen->add_option("--zipf-theta", gen.zipf_theta, "zipf skew parameter");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      StatsReport r = run(build_config(run_opts));
      print_summary(r);
      if (run_opts.out_dir.empty())
        std::printf("%s\n%s\n", StatsReport::csv_header().c_str(),
                    r.csv_row().c_str());
    } else if (cmd_frac->parsed()) {
      SimConfig cfg = build_config(frac_opts);
      auto reports = sweep_fraction(cfg, parse_int_list(fractions), frac_jobs);
      for (const auto& r : reports) print_summary(r);
      if (!cfg.out_dir.empty())
        write_stats_csv(cfg.out_dir + "/stats.csv", reports);
    } else if (cmd_ref->parsed()) {
      SimConfig cfg = build_config(ref_opts);
      auto reports = sweep_refresh(cfg, parse_double_list(trefws), ref_jobs);
      for (const auto& r : reports) print_summary(r);
      if (!cfg.out_dir.empty())
        write_stats_csv(cfg.out_dir + "/stats.csv", reports);
    } else if (cmd_gen->parsed()) {
      std::vector<TraceRecord> recs;
      if (gen_kind == "random") recs = gen_random(gen);
      else if (gen_kind == "stream") recs = gen_stream(gen);
      else if (gen_kind == "zipf") recs = gen_zipf(gen);
      else throw SimError("unknown trace kind '" + gen_kind + "'");
      write_trace(gen_out, recs);
      std::printf("wrote %zu records to %s\n", recs.size(), gen_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
