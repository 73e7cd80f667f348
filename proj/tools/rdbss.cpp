// rdbss command line: simulate, separate, evaluate, benchmark-optimizer, benchmark-suite.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rdbss/rdbss.hpp"

namespace fs = std::filesystem;
using namespace rdbss;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repeats;
  std::optional<std::string> preset;
  std::optional<std::string> mode;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> probes;
  std::optional<int> workers;
  std::optional<std::size_t> chunk_size;
  std::optional<double> reoptimize_period;
  std::optional<double> max_delay;
  std::optional<std::string> divergence;
};

void add_run_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "Base seed");
  app->add_option("--repeats", f.repeats, "Seeded repeats per item");
  app->add_option("--mode", f.mode, "Run mode")->check(CLI::IsMember({"online", "offline"}));
  app->add_option("--iterations", f.iterations, "Optimizer iterations T");
  app->add_option("--probes", f.probes, "Probes per iteration P");
  app->add_option("--workers", f.workers, "Threads for probe evaluation");
  app->add_option("--chunk-size", f.chunk_size, "Streaming chunk in samples");
  app->add_option("--reoptimize-period", f.reoptimize_period, "Seconds between online re-optimizations");
  app->add_option("--max-delay", f.max_delay, "Maximum unmixing delay in samples");
  app->add_option("--divergence", f.divergence, "KL estimator")
      ->check(CLI::IsMember({"envelope", "histogram"}));
}

RunConfig build_run_config(const CommonFlags& f, Json* doc_out = nullptr) {
  RunConfig cfg;
  Json doc = Json::object();
  if (!f.config.empty()) doc = load_json_file(f.config);
  apply_run_config(doc, cfg);
  if (f.seed) cfg.search.seed = *f.seed;
  if (f.repeats) cfg.repeats = *f.repeats;
  if (f.mode) cfg.mode = run_mode_from_string(*f.mode);
  if (f.iterations) cfg.search.iterations = *f.iterations;
  if (f.probes) cfg.search.probes = *f.probes;
  if (f.workers) cfg.workers = *f.workers;
  if (f.chunk_size) cfg.chunk_size = *f.chunk_size;
  if (f.reoptimize_period) cfg.reoptimize_period = *f.reoptimize_period;
  if (f.max_delay) cfg.max_delay = *f.max_delay;
  if (f.divergence) cfg.objective.divergence = divergence_from_string(*f.divergence);
  cfg.validate();
  if (doc_out) *doc_out = std::move(doc);
  return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

/// Mono files become one channel each; a single multichannel file is used as is.
MultichannelSignal read_stack(const std::vector<std::string>& paths) {
  if (paths.size() == 1) return read_wav(paths.front());
  std::vector<std::vector<double>> chans;
  int rate = 0;
  for (const auto& p : paths) {
    const auto s = read_wav(p);
    if (s.channels() != 1) throw ParameterError(p + ": expected a mono file");
    if (rate != 0 && s.sample_rate() != rate) throw ParameterError(p + ": sample rate differs");
    rate = s.sample_rate();
    chans.emplace_back(s.channel(0).begin(), s.channel(0).end());
  }
  std::size_t n = 0;
  for (const auto& c : chans) n = std::max(n, c.size());
  for (auto& c : chans) c.resize(n, 0.0);
  return MultichannelSignal::from_channels(chans, rate);
}

WavEncoding encoding_from(const std::string& name) {
  return name == "pcm16" ? WavEncoding::pcm16 : WavEncoding::float32;
}

void write_sources(const fs::path& dir, const std::string& stem, const MultichannelSignal& y,
                   WavEncoding enc) {
  for (std::size_t s = 0; s < y.channels(); ++s) {
    MultichannelSignal one(1, y.samples(), y.sample_rate());
    auto c = y.channel(s);
    std::copy(c.begin(), c.end(), one.channel(0).begin());
    write_wav((dir / (stem + "_" + std::to_string(s + 1) + ".wav")).string(), one, enc);
  }
}

MicArrayPreset preset_for_channels(std::size_t mics) {
  switch (mics) {
  case 2: return MicArrayPreset::stereo;
  case 4: return MicArrayPreset::square;
  case 8: return MicArrayPreset::cube;
  default: throw ParameterError("no preset has " + std::to_string(mics) +
                                " microphones; pass --geometry or --max-delay");
  }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string preset = "stereo";
  std::optional<double> rt60;
  std::vector<std::string> sources;
  std::uint64_t synthetic_seed = 1;
  double seconds = 8.0;
  std::string out;
  std::string encoding = "float32";
};

int cmd_simulate(const SimulateArgs& a, bool preset_given) {
  RoomSpec room = reference_room(preset_from_string(a.preset));
  std::string preset_name = a.preset;
  if (!a.config.empty()) {
    const Json doc = load_json_file(a.config);
    check_document(doc);
    if (doc.contains("room")) {
      const auto& r = doc.at("room");
      apply_json(r, room);
      if (r.contains("mics")) preset_name = "custom";
      if (r.contains("preset")) preset_name = r.at("preset").get<std::string>();
    }
  }
  if (preset_given) {
    room.mic_positions = mic_array(preset_from_string(a.preset), {3.1, 2.1, 1.2});
    preset_name = a.preset;
  }
  if (a.rt60) room.rt60 = *a.rt60;

  std::vector<MultichannelSignal> dry;
  if (a.sources.empty()) {
    const auto n = static_cast<std::size_t>(std::llround(a.seconds * room.sample_rate));
    dry = synthetic_pair(n, room.sample_rate, a.synthetic_seed);
  } else {
    for (const auto& p : a.sources) {
      auto s = read_wav(p);
      if (s.channels() != 1) throw ParameterError(p + ": dry sources must be mono");
      dry.push_back(std::move(s));
    }
    room.sample_rate = dry.front().sample_rate();
  }

  const auto sim = simulate(room, dry);
  fs::create_directories(a.out);
  const auto enc = encoding_from(a.encoding);
  write_wav((fs::path(a.out) / "mixture.wav").string(), sim.mixture, enc);
  write_sources(a.out, "reference", sim.references, enc);
  write_text(fs::path(a.out) / "geometry.json", geometry_json(room, preset_name).dump(2) + "\n");
  std::cerr << "wrote " << sim.mixture.channels() << "-channel mixture of "
            << sim.mixture.duration_seconds() << " s to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct SeparateArgs {
  CommonFlags common;
  std::string mixture;
  std::vector<std::string> references;
  std::string geometry;
  std::string out;
  std::string encoding = "float32";
};

int cmd_separate(const SeparateArgs& a) {
  RunConfig cfg = build_run_config(a.common);
  SeparationInput in;
  in.label = fs::path(a.mixture).stem().string();
  in.mixture = read_wav(a.mixture);
  if (!a.references.empty()) {
    in.references = read_stack(a.references);
    cfg.sources = in.references->channels();
    if (in.references->samples() != in.mixture.samples()) {
      throw ParameterError("references and mixture differ in length");
    }
  }
  if (!a.geometry.empty()) {
    const Json g = load_json_file(a.geometry);
    const auto mics = g.at("mics");
    std::vector<Vec3> pts;
    for (const auto& p : mics) pts.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    if (pts.size() != in.mixture.channels()) {
      throw ParameterError("geometry lists " + std::to_string(pts.size()) + " mics, mixture has " +
                           std::to_string(in.mixture.channels()));
    }
    in.max_delay = default_max_delay(pts, in.mixture.sample_rate(),
                                     g.value("speed_of_sound", kSpeedOfSound));
  } else if (!cfg.max_delay) {
    const auto preset = a.common.preset ? preset_from_string(*a.common.preset)
                                        : preset_for_channels(in.mixture.channels());
    const auto pts = mic_array(preset, {0.0, 0.0, 0.0});
    if (pts.size() != in.mixture.channels()) {
      throw ParameterError(std::string("preset ") + to_string(preset) + " does not match the mixture's " +
                           std::to_string(in.mixture.channels()) + " channels");
    }
    in.max_delay = default_max_delay(pts, in.mixture.sample_rate());
  }

  fs::create_directories(a.out);
  const auto enc = encoding_from(a.encoding);
  std::vector<RunResult> runs;
  bool failed = false;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    auto res = run_once(in, cfg, r);
    const fs::path dir = fs::path(a.out) / ("run" + std::to_string(r));
    fs::create_directories(dir);
    {
      std::ofstream tr(dir / "trace.csv");
      write_trace_csv(tr, res.trace);
    }
    if (res.estimates.samples() > 0) {
      write_sources(dir, res.mode == RunMode::online ? "streamed" : "source", res.estimates, enc);
    }
    if (res.applied) write_sources(dir, "source", *res.applied, enc);
    if (!res.ok) {
      failed = true;
      write_text(dir / "FAILED", res.error + "\n");
      std::cerr << "run " << r << " failed: " << res.error << "\n";
    } else {
      std::cerr << "run " << r << ": objective " << res.objective;
      if (res.metrics) {
        std::cerr << "  SDR " << res.metrics->mean_sdr() << "  SIR " << res.metrics->mean_sir()
                  << "  SAR " << res.metrics->mean_sar();
      }
      std::cerr << "  RTF " << res.real_time_factor << "\n";
    }
    for (const auto& line : res.log) std::cerr << "  " << line << "\n";
    runs.push_back(std::move(res));
  }

  {
    std::ofstream os(fs::path(a.out) / "metrics.csv");
    write_metrics_csv(os, runs);
  }
  write_text(fs::path(a.out) / "metrics.json", runs_json(runs).dump(2) + "\n");
  return failed ? 1 : 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> estimates;
  std::vector<std::string> references;
  std::size_t proj_len = kDefaultProjectionLength;
  std::string item = "item";
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  auto est = read_stack(a.estimates);
  auto ref = read_stack(a.references);
  if (est.samples() != ref.samples()) {
    throw ParameterError("estimates have " + std::to_string(est.samples()) +
                         " samples, references " + std::to_string(ref.samples()));
  }
  RunResult r;
  r.item = a.item;
  r.metrics = evaluate(est, ref, a.proj_len);
  std::vector<RunResult> runs{r};
  std::ostringstream csv;
  write_metrics_csv(csv, runs);
  const auto json = runs_json(runs);
  if (a.out.empty()) {
    std::cout << csv.str() << json["aggregate"].dump(2) << "\n";
  } else {
    fs::create_directories(a.out);
    write_text(fs::path(a.out) / "metrics.csv", csv.str());
    write_text(fs::path(a.out) / "metrics.json", json.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct OptimizerBenchArgs {
  std::size_t runs = 50;
  std::uint64_t seed = 1;
  std::size_t iterations = 1000;
  std::size_t probes = 8;
  int workers = 1;
  std::string out;
};

int cmd_benchmark_optimizer(const OptimizerBenchArgs& a) {
  struct Case {
    std::string name;
    std::size_t dim;
    double (*f)(std::span<const double>);
    double success_below;
    double required_rate;
  };
  const std::vector<Case> cases{{"sphere", 16, testfn::sphere, 1e-4, 0.95},
                                {"rastrigin", 2, testfn::rastrigin, 1.0, 0.80}};
  Json results = Json::array();
  bool ok = true;
  for (const auto& c : cases) {
    std::size_t hits = 0, failures = 0;
    std::vector<double> finals;
    for (std::size_t r = 0; r < a.runs; ++r) {
      SearchConfig sc;
      sc.iterations = a.iterations;
      sc.probes = a.probes;
      sc.seed = repeat_seed(a.seed, r);
      auto rng = make_engine(sc.seed, 0x78300000ULL);
      std::uniform_real_distribution<double> u(-4.0, 4.0);
      std::vector<double> x0(c.dim);
      for (auto& v : x0) v = u(rng);
      try {
        auto res = [&] {
          if (a.workers > 1) return random_directions_minimize(c.f, x0, sc, ParallelExecutor(a.workers));
          return random_directions_minimize(c.f, x0, sc);
        }();
        finals.push_back(res.f_best);
        if (res.f_best < c.success_below) ++hits;
      } catch (const std::exception& e) {
        ++failures;
        std::cerr << c.name << " run " << r << " failed: " << e.what() << "\n";
      }
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(a.runs);
    const bool cell_ok = failures == 0 && rate >= c.required_rate;
    ok = ok && cell_ok;
    const auto b = stats::box(finals);
    results.push_back({{"function", c.name},
                       {"dimension", c.dim},
                       {"runs", a.runs},
                       {"success_threshold", c.success_below},
                       {"successes", hits},
                       {"success_rate", rate},
                       {"required_rate", c.required_rate},
                       {"failed_runs", failures},
                       {"ok", cell_ok},
                       {"final_value", to_json(b)}});
  }
  const Json doc = {{"iterations", a.iterations}, {"probes", a.probes}, {"seed", a.seed},
                    {"results", results}, {"ok", ok}};
  if (a.out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_text(a.out, doc.dump(2) + "\n");
  }
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SuiteArgs {
  CommonFlags common;
  std::string manifest;
  std::string out;
};

int cmd_benchmark_suite(const SuiteArgs& a) {
  const RunConfig cfg = build_run_config(a.common);
  Manifest manifest = parse_manifest(load_json_file(a.manifest));
  if (a.common.preset) manifest.presets = {preset_from_string(*a.common.preset)};

  const auto report = benchmark_suite(manifest, cfg, fs::path(a.manifest).parent_path(),
                                      [](const CellResult& c) {
                                        std::cerr << c.item << " / " << to_string(c.preset) << ": ";
                                        if (!c.ok) std::cerr << "FAILED ";
                                        std::cerr << "SIR " << c.summary.sir.mean << " +- "
                                                  << c.summary.sir.stddev << "  SAR "
                                                  << c.summary.sar.mean << "  RTF "
                                                  << c.summary.real_time_factor.mean << "\n";
                                        for (const auto& e : c.errors) std::cerr << "  " << e << "\n";
                                      });

  fs::create_directories(a.out);
  {
    std::ofstream os(fs::path(a.out) / "runs.csv");
    write_suite_runs_csv(os, report);
  }
  {
    std::ofstream os(fs::path(a.out) / "cells.csv");
    write_suite_cells_csv(os, report);
  }
  {
    std::vector<RunResult> flat;
    for (const auto& c : report.cells) flat.insert(flat.end(), c.runs.begin(), c.runs.end());
    std::ofstream os(fs::path(a.out) / "metrics.csv");
    write_metrics_csv(os, flat);
  }
  write_text(fs::path(a.out) / "summary.json", suite_json(report).dump(2) + "\n");
  return report.all_ok() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-domain blind source separation with Random Directions"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Render a room mixture to WAV files");
  simulate_cmd->add_option("--config", sim.config, "JSON config with a room section")->check(CLI::ExistingFile);
  auto* sim_preset = simulate_cmd->add_option("--preset", sim.preset, "Microphone array")
                         ->check(CLI::IsMember({"stereo", "square", "cube"}));
  simulate_cmd->add_option("--rt60", sim.rt60, "Reverberation time in seconds, 0 for anechoic");
  simulate_cmd->add_option("--sources", sim.sources, "Mono dry source WAVs")->check(CLI::ExistingFile);
  simulate_cmd->add_option("--synthetic-seed", sim.synthetic_seed, "Seed for synthetic sources");
  simulate_cmd->add_option("--seconds", sim.seconds, "Length of synthetic sources");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();
  simulate_cmd->add_option("--encoding", sim.encoding)->check(CLI::IsMember({"float32", "pcm16"}));

  SeparateArgs sep;
  auto* separate_cmd = app.add_subcommand("separate", "Separate a mixture (offline or online)");
  add_run_flags(separate_cmd, sep.common);
  separate_cmd->add_option("--preset", sep.common.preset, "Array preset for the delay bound")
      ->check(CLI::IsMember({"stereo", "square", "cube"}));
  separate_cmd->add_option("--mixture", sep.mixture, "Multichannel mixture WAV")->required()->check(CLI::ExistingFile);
  separate_cmd->add_option("--references", sep.references, "Reference WAVs for metrics")->check(CLI::ExistingFile);
  separate_cmd->add_option("--geometry", sep.geometry, "Geometry sidecar from simulate")->check(CLI::ExistingFile);
  separate_cmd->add_option("--out", sep.out, "Output directory")->required();
  separate_cmd->add_option("--encoding", sep.encoding)->check(CLI::IsMember({"float32", "pcm16"}));

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "SDR/SIR/SAR of estimates against references");
  evaluate_cmd->add_option("--estimates", ev.estimates)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--references", ev.references)->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--proj-len", ev.proj_len, "Projection filter taps");
  evaluate_cmd->add_option("--item", ev.item, "Item label");
  evaluate_cmd->add_option("--out", ev.out, "Output directory (default: stdout)");

  OptimizerBenchArgs ob;
  auto* bench_opt_cmd = app.add_subcommand("benchmark-optimizer", "Success rates on test functions");
  bench_opt_cmd->add_option("--runs", ob.runs, "Seeded runs per function");
  bench_opt_cmd->add_option("--seed", ob.seed);
  bench_opt_cmd->add_option("--iterations", ob.iterations);
  bench_opt_cmd->add_option("--probes", ob.probes);
  bench_opt_cmd->add_option("--workers", ob.workers);
  bench_opt_cmd->add_option("--out", ob.out, "JSON output file (default: stdout)");

  SuiteArgs su;
  auto* suite_cmd = app.add_subcommand("benchmark-suite", "Run every manifest item with every preset");
  add_run_flags(suite_cmd, su.common);
  suite_cmd->add_option("--preset", su.common.preset, "Restrict to one preset")
      ->check(CLI::IsMember({"stereo", "square", "cube"}));
  suite_cmd->add_option("--manifest", su.manifest)->required()->check(CLI::ExistingFile);
  suite_cmd->add_option("--out", su.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) return cmd_simulate(sim, sim_preset->count() > 0);
    if (*separate_cmd) return cmd_separate(sep);
    if (*evaluate_cmd) return cmd_evaluate(ev);
    if (*bench_opt_cmd) return cmd_benchmark_optimizer(ob);
    if (*suite_cmd) return cmd_benchmark_suite(su);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
