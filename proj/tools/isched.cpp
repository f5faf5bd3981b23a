// Command line front end: trace replay (`run`), workload generation
// (`gen`), and Monte-Carlo experiments for the random machine partition
// (`mc`). See the README for the trace and report formats.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "isched/harness.hpp"
#include "isched/trace.hpp"

namespace {

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return &std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  return &file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"approximate interval scheduling engines and harness"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "replay a trace against an engine");
  std::string algo, trace_path, report_path, probe_log_path, dump_cells_path;
  std::string epsilon_str = "1/2", wcap_str = "64";
  isched::RunOptions opts;
  int oracle_every = 0;
  run->add_option("--algo", algo, "engine id")
      ->required()
      ->check(CLI::IsMember(
          {"dyn1", "lca", "wdyn", "mdyn", "wmdyn", "part-u", "part-w"}));
  run->add_option("--epsilon", epsilon_str, "approximation parameter (rational)");
  run->add_option("--machines", opts.machines, "machine count M");
  run->add_option("--horizon", opts.horizon, "time horizon N");
  run->add_option("--trace", trace_path, "trace file")->required();
  run->add_flag("--oracle-check{10}", oracle_every,
                "recompute the exact oracle every k-th op (default k=10)");
  run->add_option("--seed", opts.seed, "seed for randomized engines");
  run->add_option("--offsets", opts.offsets,
                  "offset instances for the weighted engine");
  run->add_option("--wcap", wcap_str, "weight cap (wmdyn)");
  run->add_option("--report", report_path, "write the report here");
  run->add_option("--probe-log", probe_log_path,
                  "write `probe <x> -> <job id|none>` lines (lca)");
  run->add_option("--dump-cells", dump_cells_path,
                  "dump per-cell diagnostics after the run (wdyn)");

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a deterministic trace");
  isched::GenParams gp;
  std::string gen_out;
  gen->add_option("--kind", gp.kind, "workload kind")
      ->required()
      ->check(CLI::IsMember(
          {"uniform", "tight_chain", "nested_heavy", "clustered"}));
  gen->add_option("--n", gp.n, "ops (uniform/clustered) or jobs/groups");
  gen->add_option("--horizon", gp.horizon, "time horizon N");
  gen->add_option("--machines", gp.machines, "machine count M");
  gen->add_option("--w", gp.max_weight, "max weight");
  gen->add_option("--seed", gp.seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output file (default stdout)");

  // --- mc ----------------------------------------------------------------
  auto* mc = app.add_subcommand("mc", "Monte-Carlo partition experiments");
  std::string exp, mc_report;
  int trials = 100, mc_machines = 2;
  std::uint64_t mc_seed = 0;
  mc->add_option("--exp", exp, "experiment id")
      ->required()
      ->check(CLI::IsMember(
          {"tight-unweighted", "random-unweighted", "random-weighted"}));
  mc->add_option("--trials", trials, "trial count")->required();
  mc->add_option("--seed", mc_seed, "base seed")->required();
  mc->add_option("--machines", mc_machines, "machine count M");
  mc->add_option("--report", mc_report, "write the report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      opts.epsilon = isched::Rat::parse(epsilon_str);
      opts.weight_cap = isched::Rat::parse(wcap_str);
      opts.oracle_every = oracle_every;

      std::ifstream in(trace_path);
      if (!in) throw std::runtime_error("cannot open " + trace_path);
      auto events = isched::parse_trace(in);

      std::ofstream probe_file;
      if (!probe_log_path.empty()) {
        probe_file.open(probe_log_path);
        if (!probe_file)
          throw std::runtime_error("cannot open " + probe_log_path);
        opts.probe_log = [&probe_file](isched::Time x,
                                       const std::optional<isched::Job>& j) {
          probe_file << "probe " << x << " -> ";
          if (j) probe_file << j->id;
          else probe_file << "none";
          probe_file << "\n";
        };
      }
      std::ofstream dump_file;
      if (!dump_cells_path.empty()) {
        dump_file.open(dump_cells_path);
        if (!dump_file)
          throw std::runtime_error("cannot open " + dump_cells_path);
        opts.dump_cells = &dump_file;
      }

      auto report = isched::run_trace(algo, events, opts);
      std::ofstream out_file;
      report.write(*open_output(report_path, out_file));
      return report.violations == 0 ? 0 : 2;
    }
    if (*gen) {
      auto events = isched::generate_trace(gp);
      std::ofstream out_file;
      std::ostream* os = open_output(gen_out, out_file);
      for (const auto& e : events) *os << isched::format_trace_event(e) << "\n";
      return 0;
    }
    if (*mc) {
      auto report = isched::monte_carlo(exp, trials, mc_seed, mc_machines);
      std::ofstream out_file;
      report.write(*open_output(mc_report, out_file));
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
