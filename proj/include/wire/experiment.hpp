#pragma once

// Experiment plumbing behind the command-line tool: a flat, namespaced
// JSON configuration, the scheme-comparison runner and report output.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "wire/config.hpp"
#include "wire/error.hpp"
#include "wire/metrics.hpp"
#include "wire/schemes.hpp"
#include "wire/simulator.hpp"
#include "wire/trace.hpp"

namespace wire {

struct ExperimentConfig {
  SimConfig sim;
  std::vector<SchemeId> schemes{SchemeId::plain, SchemeId::diffwrite, SchemeId::fnw, SchemeId::wire};
  std::optional<std::string> trace_path;  // replay this file instead of generating
  std::string preset = "balanced";
  GenSpec gen = wire::preset("balanced");  // geometry fields follow `sim`
  std::string out_dir = "out";
  bool lifetime = false;
  std::uint64_t max_writes = 100'000'000;
  bool verify_reads = true;

  /// Generator spec with geometry taken from the simulated memory.
  GenSpec gen_spec() const {
    GenSpec g = gen;
    g.memory_blocks = sim.memory_blocks;
    g.block_bytes = sim.pcm.block_bytes;
    g.granule_bits = sim.pcm.granule_bits;
    return g;
  }

  void validate() const {
    if (schemes.empty()) throw ConfigError("at least one scheme is required");
    sim.validate();
    gen_spec().validate();
    if (max_writes == 0) throw ConfigError("max_writes must be positive");
  }

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return to_json(a) == to_json(b);
  }

  static nlohmann::ordered_json to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    const auto& p = c.sim.pcm;
    j["memory.blocks"] = c.sim.memory_blocks;
    j["pcm.block_bytes"] = p.block_bytes;
    j["pcm.partitions_per_block"] = p.partitions_per_block;
    j["pcm.granule_bits"] = p.granule_bits;
    j["pcm.cell_endurance"] = p.cell_endurance;
    j["pcm.e_set"] = p.e_set;
    j["pcm.e_reset"] = p.e_reset;
    j["pcm.write_latency_ns"] = p.write_latency_ns;
    j["pcm.page_bytes"] = p.page_bytes;
    j["pcm.count_metadata_flips"] = p.count_metadata_flips;
    j["wire.rotation_max"] = p.rotation_max;
    j["wire.counter_bits"] = p.counter_bits;
    j["wire.metadata_cache_bytes"] = p.metadata_cache_bytes;
    j["wire.codebook_mfvs"] = c.sim.mfv.codebook_mfvs;
    j["wire.rebuild_interval"] = c.sim.mfv.rebuild_interval;
    j["mfv.fifo_entries"] = c.sim.mfv.fifo_entries;
    j["mfv.sat_max"] = c.sim.mfv.sat_max;
    j["mfv.replace_threshold"] = c.sim.mfv.replace_threshold;
    j["mfv.fv_entries"] = c.sim.mfv.fv_entries;
    j["mfv.fv_counter_max"] = c.sim.mfv.fv_counter_max;
    j["fnw.word_bits"] = c.sim.fnw.word_bits;
    j["wear.enabled"] = c.sim.wear.enabled;
    j["wear.epoch_writes"] = c.sim.wear.epoch_writes;
    j["wear.remap_period"] = c.sim.wear.remap_period;
    auto& schemes = j["scheme"] = nlohmann::ordered_json::array();
    for (auto s : c.schemes) schemes.push_back(std::string(to_string(s)));
    if (c.trace_path) j["trace.path"] = *c.trace_path;
    j["gen.preset"] = c.preset;
    j["gen.events"] = c.gen.events;
    j["gen.read_fraction"] = c.gen.read_fraction;
    j["gen.address_model"] = c.gen.address.kind == AddressModel::Kind::zipf ? "zipf" : "uniform";
    j["gen.address_zipf_s"] = c.gen.address.zipf_s;
    j["gen.value_model"] = c.gen.values.kind == ValueModel::Kind::zipf ? "zipf" : "categorical";
    auto& vals = j["gen.values"] = nlohmann::ordered_json::array();
    for (const auto& [v, prob] : c.gen.values.top) vals.push_back({v, prob});
    j["gen.value_zipf_s"] = c.gen.values.zipf_s;
    j["seed"] = c.gen.seed;
    j["out.dir"] = c.out_dir;
    j["lifetime"] = c.lifetime;
    j["max_writes"] = c.max_writes;
    j["verify_reads"] = c.verify_reads;
    return j;
  }

  /// Starts from defaults and applies every key present. Unknown keys are
  /// rejected. `gen.preset` is applied before the other `gen.*` keys.
  static ExperimentConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    try {
      if (j.contains("gen.preset")) c.set_preset(j.at("gen.preset").get<std::string>());
      for (const auto& [key, value] : j.items()) c.apply(key, value);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
  }

  static ExperimentConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  void set_preset(const std::string& name) {
    const GenSpec p = wire::preset(name);
    preset = name;
    gen.read_fraction = p.read_fraction;
    gen.values = p.values;
  }

  void set_schemes(const std::string& csv) {
    schemes.clear();
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) schemes.push_back(parse_scheme(item));
  }

 private:
  void apply(const std::string& key, const nlohmann::json& v) {
    auto& p = sim.pcm;
    auto& m = sim.mfv;
    if (key == "memory.blocks") sim.memory_blocks = v.get<std::size_t>();
    else if (key == "pcm.block_bytes") p.block_bytes = v.get<std::size_t>();
    else if (key == "pcm.partitions_per_block") p.partitions_per_block = v.get<std::size_t>();
    else if (key == "pcm.granule_bits") p.granule_bits = v.get<unsigned>();
    else if (key == "pcm.cell_endurance") p.cell_endurance = v.get<std::uint64_t>();
    else if (key == "pcm.e_set") p.e_set = v.get<double>();
    else if (key == "pcm.e_reset") p.e_reset = v.get<double>();
    else if (key == "pcm.write_latency_ns") p.write_latency_ns = v.get<double>();
    else if (key == "pcm.page_bytes") p.page_bytes = v.get<std::size_t>();
    else if (key == "pcm.count_metadata_flips") p.count_metadata_flips = v.get<bool>();
    else if (key == "wire.rotation_max") p.rotation_max = v.get<unsigned>();
    else if (key == "wire.counter_bits") p.counter_bits = v.get<unsigned>();
    else if (key == "wire.metadata_cache_bytes") p.metadata_cache_bytes = v.get<std::size_t>();
    else if (key == "wire.codebook_mfvs") m.codebook_mfvs = v.get<std::size_t>();
    else if (key == "wire.rebuild_interval") m.rebuild_interval = v.get<std::uint64_t>();
    else if (key == "mfv.fifo_entries") m.fifo_entries = v.get<std::size_t>();
    else if (key == "mfv.sat_max") m.sat_max = v.get<unsigned>();
    else if (key == "mfv.replace_threshold") m.replace_threshold = v.get<unsigned>();
    else if (key == "mfv.fv_entries") m.fv_entries = v.get<std::size_t>();
    else if (key == "mfv.fv_counter_max") m.fv_counter_max = v.get<std::uint32_t>();
    else if (key == "fnw.word_bits") sim.fnw.word_bits = v.get<std::size_t>();
    else if (key == "wear.enabled") sim.wear.enabled = v.get<bool>();
    else if (key == "wear.epoch_writes") sim.wear.epoch_writes = v.get<std::uint64_t>();
    else if (key == "wear.remap_period") sim.wear.remap_period = v.get<std::uint64_t>();
    else if (key == "scheme") {
      schemes.clear();
      if (v.is_string()) set_schemes(v.get<std::string>());
      else
        for (const auto& s : v) schemes.push_back(parse_scheme(s.get<std::string>()));
    } else if (key == "trace.path") trace_path = v.get<std::string>();
    else if (key == "gen.preset") {
      // applied first by from_json
    } else if (key == "gen.events") gen.events = v.get<std::uint64_t>();
    else if (key == "gen.read_fraction") gen.read_fraction = v.get<double>();
    else if (key == "gen.address_model") {
      const auto s = v.get<std::string>();
      if (s == "uniform") gen.address.kind = AddressModel::Kind::uniform;
      else if (s == "zipf") gen.address.kind = AddressModel::Kind::zipf;
      else throw ConfigError("gen.address_model must be uniform or zipf");
    } else if (key == "gen.address_zipf_s") gen.address.zipf_s = v.get<double>();
    else if (key == "gen.value_model") {
      const auto s = v.get<std::string>();
      if (s == "categorical") gen.values.kind = ValueModel::Kind::categorical;
      else if (s == "zipf") gen.values.kind = ValueModel::Kind::zipf;
      else throw ConfigError("gen.value_model must be categorical or zipf");
    } else if (key == "gen.values") {
      gen.values.top.clear();
      for (const auto& pair : v) gen.values.top.emplace_back(pair.at(0).get<std::uint32_t>(), pair.at(1).get<double>());
    } else if (key == "gen.value_zipf_s") gen.values.zipf_s = v.get<double>();
    else if (key == "seed") gen.seed = v.get<std::uint64_t>();
    else if (key == "out.dir") out_dir = v.get<std::string>();
    else if (key == "lifetime") lifetime = v.get<bool>();
    else if (key == "max_writes") max_writes = v.get<std::uint64_t>();
    else if (key == "verify_reads") verify_reads = v.get<bool>();
    else throw ConfigError("unknown config key '" + key + "'");
  }
};

/// The trace a run replays: the configured file, or a generated one.
inline Trace load_experiment_trace(const ExperimentConfig& cfg) {
  if (cfg.trace_path) {
    std::ifstream in(*cfg.trace_path);
    if (!in) throw Error("cannot read trace " + *cfg.trace_path);
    return parse_trace(in, cfg.sim.pcm.block_bytes, cfg.sim.memory_blocks);
  }
  return generate(cfg.gen_spec());
}

/// Replays `trace` on a fresh, all-zero memory under one scheme.
inline RunReport run_scheme(const ExperimentConfig& cfg, SchemeId id, std::span<const TraceEvent> trace,
                            std::span<const CoverageRow> coverage) {
  Simulator sim(cfg.sim, id);
  RunReport r;
  r.scheme = std::string(to_string(id));
  r.trace_hash = trace_hash(trace);

  if (cfg.lifetime) {
    const auto life = run_lifetime(sim, trace, cfg.max_writes);
    r.lifetime_writes = life.writes;
    r.lifetime_seconds = life.seconds;
    r.lifetime_cap_reached = life.cap_reached;
    r.dropped_writes = life.dropped_writes;
  } else {
    std::unordered_map<std::uint64_t, std::vector<std::uint8_t>> shadow;
    const std::vector<std::uint8_t> zeros(cfg.sim.pcm.block_bytes, 0);
    for (const auto& ev : trace) {
      if (ev.op == Op::read) {
        const auto got = sim.read(ev.addr);
        if (cfg.verify_reads) {
          auto it = shadow.find(ev.addr);
          if (got.data != (it == shadow.end() ? zeros : it->second))
            throw Error(r.scheme + ": read of block " + std::to_string(ev.addr) + " returned stale data");
        }
        continue;
      }
      try {
        sim.write(ev.addr, ev.payload);
      } catch (const DeadBlockError&) {
        r.truncated = true;
        break;
      }
      if (cfg.verify_reads) shadow[ev.addr] = ev.payload;
    }
  }

  const auto& t = sim.totals();
  r.writes = sim.writes();
  r.reads = sim.reads();
  r.flips_set = t.flips_set;
  r.flips_reset = t.flips_reset;
  r.flips_meta = t.meta_flips();
  r.energy_pj = t.energy_pj(cfg.sim.pcm);
  r.data_energy_pj = t.data_energy_pj(cfg.sim.pcm);
  const auto wear = sim.wear();
  r.intrav = intrav(wear);
  r.intrav_degenerate = wear.total() == 0;
  r.meta_extra_reads = t.meta_extra_reads;
  for (std::size_t k = 0; k < 5; ++k) r.mfv_top[k] = top_k_coverage(coverage, k + 1);
  r.overhead_bits = sim.scheme().overhead_bits();
  r.block_bits = cfg.sim.pcm.block_bits();
  r.capacity = sim.capacity();
  r.remap_steps = sim.remap_steps();
  if (const auto* w = dynamic_cast<const WireScheme*>(&sim.scheme())) r.codebook_versions = w->codebook_versions();
  return r;
}

/// Granule width used for value-coverage statistics: the configured width
/// when the histogram supports it, else nibbles.
inline unsigned coverage_granule(unsigned g) { return (g == 1 || g == 2 || g == 4 || g == 8) ? g : 4; }

/// Runs every configured scheme on the same trace, concurrently; results
/// come back in configuration order.
inline std::vector<RunReport> run_experiment(const ExperimentConfig& cfg, std::span<const TraceEvent> trace) {
  cfg.validate();
  const auto coverage = mfv_coverage(trace, coverage_granule(cfg.sim.pcm.granule_bits));
  std::vector<std::future<RunReport>> jobs;
  for (auto id : cfg.schemes)
    jobs.push_back(std::async(std::launch::async, [&, id] { return run_scheme(cfg, id, trace, coverage); }));
  std::vector<RunReport> reports;
  for (auto& j : jobs) reports.push_back(j.get());
  return reports;
}

inline std::string reports_csv(std::span<const RunReport> reports) {
  std::string s = csv_header() + "\n";
  for (const auto& r : reports) s += csv_row(r) + "\n";
  return s;
}

inline nlohmann::ordered_json report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["scheme"] = r.scheme;
  j["writes"] = r.writes;
  j["reads"] = r.reads;
  j["flips_set"] = r.flips_set;
  j["flips_reset"] = r.flips_reset;
  j["flips_meta"] = r.flips_meta;
  j["energy_pj"] = r.energy_pj;
  j["data_energy_pj"] = r.data_energy_pj;
  j["intrav"] = r.intrav;
  j["intrav_degenerate"] = r.intrav_degenerate;
  j["lifetime_writes"] = r.lifetime_writes;
  j["lifetime_seconds"] = r.lifetime_seconds;
  j["lifetime_cap_reached"] = r.lifetime_cap_reached;
  j["meta_extra_reads"] = r.meta_extra_reads;
  j["mfv_top"] = r.mfv_top;
  j["overhead_bits"] = r.overhead_bits;
  j["overhead_ratio"] = r.overhead_ratio();
  j["capacity"] = r.capacity;
  j["truncated"] = r.truncated;
  j["dropped_writes"] = r.dropped_writes;
  j["remap_steps"] = r.remap_steps;
  j["codebook_versions"] = r.codebook_versions;
  std::ostringstream h;
  h << std::hex << r.trace_hash;
  j["trace_hash"] = h.str();
  return j;
}

inline nlohmann::ordered_json reports_document(const ExperimentConfig& cfg, std::span<const RunReport> reports) {
  nlohmann::ordered_json doc;
  doc["format"] = "wire-report v1";
  doc["config"] = ExperimentConfig::to_json(cfg);
  auto& runs = doc["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) runs.push_back(report_json(r));
  return doc;
}

/// Writes report.csv and report.json into `dir`.
inline void write_reports(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                          std::span<const RunReport> reports) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "report.csv");
  std::ofstream doc(dir / "report.json");
  if (!csv || !doc) throw Error("cannot write reports into " + dir.string());
  csv << reports_csv(reports);
  doc << reports_document(cfg, reports).dump(2) << '\n';
}

inline std::string coverage_csv(std::span<const CoverageRow> rows, unsigned g) {
  std::ostringstream os;
  os << "rank,value,count,fraction,cumulative\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  const int digits = static_cast<int>((g + 3) / 4);
  for (std::size_t k = 0; k < rows.size(); ++k)
    os << (k + 1) << ",0x" << std::hex << std::setw(digits) << std::setfill('0') << rows[k].value << std::dec
       << std::setfill(' ') << ',' << rows[k].count << ',' << rows[k].fraction << ',' << rows[k].cumulative << '\n';
  return os.str();
}

}  // namespace wire
