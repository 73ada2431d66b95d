// wiresim: replay or generate PCM write traces and compare write schemes.
//
//   wiresim run     [--config F] [--trace F | --preset P] [--schemes a,b] [--lifetime] [--out DIR]
//   wiresim gen     [--config F] [--preset P] [--seed N] [--out DIR]
//   wiresim analyze [--config F] [--trace F | --preset P] [--out DIR]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wire/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string trace;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string preset;
  std::optional<std::string> schemes;
  bool lifetime = false;
  std::optional<std::uint64_t> events;
  std::optional<unsigned> granule_bits;
};

wire::ExperimentConfig resolve(const Options& o) {
  wire::ExperimentConfig cfg = o.config.empty() ? wire::ExperimentConfig{} : wire::ExperimentConfig::load(o.config);
  if (!o.preset.empty()) cfg.set_preset(o.preset);
  if (!o.trace.empty()) cfg.trace_path = o.trace;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) cfg.gen.seed = *o.seed;
  if (o.schemes) {
    cfg.set_schemes(*o.schemes);
    if (cfg.schemes.empty()) throw wire::ConfigError("--schemes lists no scheme");
  }
  if (o.lifetime) cfg.lifetime = true;
  if (o.events) cfg.gen.events = *o.events;
  if (o.granule_bits) cfg.sim.pcm.granule_bits = *o.granule_bits;
  cfg.validate();
  return cfg;
}

int cmd_run(const Options& o) {
  const auto cfg = resolve(o);
  const auto trace = wire::load_experiment_trace(cfg);
  const auto reports = wire::run_experiment(cfg, trace);
  wire::write_reports(cfg.out_dir, cfg, reports);
  std::cout << wire::reports_csv(reports);
  for (const auto& r : reports)
    if (r.truncated) std::cerr << "wiresim: " << r.scheme << " hit a dead block; report truncated\n";
  return 0;
}

int cmd_gen(const Options& o) {
  const auto cfg = resolve(o);
  const auto trace = wire::generate(cfg.gen_spec());
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / "trace.txt";
  std::ofstream out(path);
  if (!out) throw wire::Error("cannot write " + path.string());
  wire::emit_trace(out, trace);
  std::cout << path.string() << ": " << trace.size() << " events, hash " << std::hex << wire::trace_hash(trace)
            << std::dec << '\n';
  return 0;
}

int cmd_analyze(const Options& o) {
  const auto cfg = resolve(o);
  const auto trace = wire::load_experiment_trace(cfg);
  fs::create_directories(cfg.out_dir);
  std::cout << "g  top1     top2     top3     top4     top5\n" << std::fixed << std::setprecision(4);
  for (unsigned g : {1u, 2u, 4u, 8u}) {
    const auto rows = wire::mfv_coverage(trace, g);
    const fs::path path = fs::path(cfg.out_dir) / ("coverage_g" + std::to_string(g) + ".csv");
    std::ofstream out(path);
    if (!out) throw wire::Error("cannot write " + path.string());
    out << wire::coverage_csv(rows, g);
    std::cout << std::left << std::setw(3) << g;
    for (std::size_t k = 1; k <= 5; ++k) std::cout << std::setw(9) << wire::top_k_coverage(rows, k);
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PCM write-scheme simulator"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "generator seed");
    sub->add_option("--preset", o.preset, "workload mix")
        ->check(CLI::IsMember({"read-heavy", "balanced", "write-heavy"}));
    sub->add_option("--events", o.events, "generated trace length");
    sub->add_option("--granule-bits", o.granule_bits, "granule width in bits");
  };

  auto* run = app.add_subcommand("run", "replay a trace under each scheme and write report.csv/report.json");
  common(run);
  run->add_option("--trace", o.trace, "trace file (default: generate)")->check(CLI::ExistingFile);
  run->add_option("--schemes", o.schemes, "comma-separated list of plain,diffwrite,fnw,wire");
  run->add_flag("--lifetime", o.lifetime, "replay cyclically until half the pages fail");

  auto* gen = app.add_subcommand("gen", "write a synthetic trace to OUT/trace.txt");
  common(gen);

  auto* analyze = app.add_subcommand("analyze", "value coverage tables for granules of 1, 2, 4 and 8 bits");
  common(analyze);
  analyze->add_option("--trace", o.trace, "trace file (default: generate)")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(o);
    if (gen->parsed()) return cmd_gen(o);
    return cmd_analyze(o);
  } catch (const std::exception& e) {
    std::cerr << "wiresim: " << e.what() << '\n';
    return 2;
  }
}
