#pragma once

// Experiment harness. Offline runs optimize once on the accumulated head of
// the mixture and unmix everything with the result. Online runs stream the
// mixture chunk by chunk through a consumer while a worker thread optimizes
// on arriving audio and publishes immutable coefficient snapshots.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rdbss/bsseval.hpp"
#include "rdbss/executor.hpp"
#include "rdbss/objective.hpp"
#include "rdbss/optimizer.hpp"
#include "rdbss/rng.hpp"
#include "rdbss/roomsim.hpp"
#include "rdbss/stats.hpp"
#include "rdbss/unmixer.hpp"

namespace rdbss {

enum class RunMode { offline, online };

inline const char* to_string(RunMode m) { return m == RunMode::online ? "online" : "offline"; }

inline RunMode run_mode_from_string(const std::string& name) {
  if (name == "online") return RunMode::online;
  if (name == "offline") return RunMode::offline;
  throw ParameterError("unknown mode '" + name + "'");
}

/// Simulated: publications land at fixed sample positions and the stream waits
/// for them. Wall: the stream runs on its own clock and picks up whatever the
/// worker has published.
enum class ClockMode { simulated, wall };

inline const char* to_string(ClockMode c) { return c == ClockMode::wall ? "wall" : "simulated"; }

inline ClockMode clock_mode_from_string(const std::string& name) {
  if (name == "simulated") return ClockMode::simulated;
  if (name == "wall") return ClockMode::wall;
  throw ParameterError("unknown clock '" + name + "'");
}

struct RunConfig {
  RunMode mode = RunMode::offline;
  SearchConfig search;
  ObjectiveConfig objective;
  DelayKernel kernel = DelayKernel::thiran;
  std::size_t sources = 2;
  std::size_t chunk_size = 128;
  /// Seconds between re-optimizations after the first pass; unset means one pass.
  std::optional<double> reoptimize_period;
  std::size_t repeats = 10;
  /// Overrides the geometry-derived maximum delay (samples).
  std::optional<double> max_delay;
  std::size_t projection_length = kDefaultProjectionLength;
  /// Threads evaluating probes; 1 evaluates serially.
  int workers = 1;
  ClockMode clock = ClockMode::simulated;
  /// Wall clock only: stream speed as a multiple of real time, 0 for unpaced.
  double pace = 1.0;
  bool publish = true;

  void validate() const {
    search.validate();
    objective.validate();
    if (sources < 2) throw ParameterError("need at least 2 sources");
    if (chunk_size == 0) throw ParameterError("chunk_size must be at least 1");
    if (repeats == 0) throw ParameterError("repeats must be at least 1");
    if (reoptimize_period && !(*reoptimize_period > 0.0)) {
      throw ParameterError("reoptimize_period must be positive");
    }
    if (max_delay && !(*max_delay >= 0.0 && std::isfinite(*max_delay))) {
      throw ParameterError("max_delay must be finite and nonnegative");
    }
    if (projection_length == 0) throw ParameterError("projection_length must be positive");
    if (!(pace >= 0.0)) throw ParameterError("pace must be nonnegative");
  }
};

/// Mixture plus optional ground truth for one item.
struct SeparationInput {
  std::string label = "item";
  MultichannelSignal mixture;
  /// One channel per source, aligned with the mixture.
  std::optional<MultichannelSignal> references;
  /// Geometry-derived maximum delay in samples.
  double max_delay = 0.0;
};

inline SeparationInput input_from_simulation(std::string label, const RoomSpec& room,
                                             Simulation sim) {
  SeparationInput in;
  in.label = std::move(label);
  in.max_delay = default_max_delay(room.mic_positions, room.sample_rate, room.speed_of_sound);
  in.mixture = std::move(sim.mixture);
  in.references = std::move(sim.references);
  return in;
}

inline std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat) {
  return derive_seed(seed, 0x7265706561747300ULL, repeat);
}

/// Attenuations uniform in [-1, 1], delays uniform in [0, max_delay].
inline std::vector<double> random_start(std::size_t mics, std::size_t sources, double max_delay,
                                        std::uint64_t seed) {
  auto rng = make_engine(seed, 0x7374617274ULL);
  std::uniform_real_distribution<double> atten(-1.0, 1.0);
  std::uniform_real_distribution<double> delay(0.0, max_delay);
  std::vector<double> x(2 * mics * sources);
  for (std::size_t i = 0; i < x.size(); i += 2) {
    x[i] = atten(rng);
    x[i + 1] = max_delay > 0.0 ? delay(rng) : 0.0;
  }
  return x;
}

/// Samples consumed by the first accumulation: whole blocks, at most max_blocks.
inline std::size_t accumulation_length(std::size_t samples, const ObjectiveConfig& cfg) {
  return std::min(samples / cfg.block_size, cfg.max_blocks) * cfg.block_size;
}

/// Sample positions at which the online worker optimizes.
inline std::vector<std::size_t> optimization_positions(std::size_t samples, int sample_rate,
                                                       const RunConfig& cfg) {
  std::vector<std::size_t> pos;
  const std::size_t first = accumulation_length(samples, cfg.objective);
  if (first == 0) return pos;
  pos.push_back(first);
  if (cfg.reoptimize_period) {
    const auto step = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(*cfg.reoptimize_period * sample_rate)));
    for (std::size_t p = first + step; p < samples; p += step) pos.push_back(p);
  }
  return pos;
}

inline double algorithmic_delay_ms(std::size_t chunk_size, int sample_rate) {
  return static_cast<double>(chunk_size) * 1000.0 / static_cast<double>(sample_rate);
}

struct StreamReport {
  std::size_t chunk_size = 0;
  int sample_rate = 0;
  double algorithmic_delay_ms = 0.0;
  std::size_t samples_in = 0;
  std::size_t samples_out = 0;
  std::size_t publications = 0;
  std::size_t skipped_publications = 0;
  std::size_t worker_failures = 0;
  std::size_t snapshot_reads = 0;
  std::size_t torn_reads = 0;
  /// Stream positions where a new snapshot took effect.
  std::vector<std::size_t> swap_positions;
  double consumer_seconds = 0.0;
  double worker_seconds = 0.0;
};

struct RunResult {
  std::string item;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  RunMode mode = RunMode::offline;
  bool ok = true;
  std::string error;
  std::vector<std::string> log;

  std::vector<double> x_best;
  std::optional<UnmixingCoeffs> coeffs;
  double objective = std::numeric_limits<double>::infinity();
  /// Trace of the last optimization pass.
  OptimizationTrace trace;

  /// Offline: the unmixed signal. Online: the streamed output.
  MultichannelSignal estimates;
  /// Online only: the whole signal unmixed with the final coefficients.
  std::optional<MultichannelSignal> applied;
  std::optional<SeparationMetrics> metrics;
  std::optional<SeparationMetrics> applied_metrics;

  double processing_seconds = 0.0;
  double real_time_factor = 0.0;
  std::optional<StreamReport> stream;
};

// ---------------------------------------------------------------------------
// Snapshots

/// FNV-1a over the coefficient bit patterns and the generation.
inline std::uint64_t coeff_checksum(const UnmixingCoeffs& c, std::uint64_t generation) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  feed(generation);
  for (const auto& e : c.entries()) {
    std::uint64_t bits;
    std::memcpy(&bits, &e.attenuation, sizeof bits);
    feed(bits);
    std::memcpy(&bits, &e.delay, sizeof bits);
    feed(bits);
  }
  return h;
}

/// Immutable once published.
struct CoeffSnapshot {
  UnmixingCoeffs coeffs;
  std::vector<double> vector;
  std::uint64_t generation = 0;
  double objective = std::numeric_limits<double>::infinity();
  /// Stream position `primed` corresponds to.
  std::size_t position = 0;
  /// State after running `coeffs` over the stream's first `position` samples.
  StreamState primed;
  std::uint64_t checksum = 0;

  bool intact() const { return checksum == coeff_checksum(coeffs, generation); }
};

inline std::shared_ptr<const CoeffSnapshot> make_snapshot(UnmixingCoeffs coeffs,
                                                          std::uint64_t generation,
                                                          double objective,
                                                          std::size_t position = 0,
                                                          std::optional<StreamState> primed = {}) {
  auto s = std::make_shared<CoeffSnapshot>();
  s->vector = encode(coeffs);
  s->generation = generation;
  s->objective = objective;
  s->position = position;
  s->primed = primed ? std::move(*primed)
                     : StreamState(coeffs.mics(), coeffs.sources(), coeffs.max_delay());
  s->checksum = coeff_checksum(coeffs, generation);
  s->coeffs = std::move(coeffs);
  return s;
}

/// Single-slot publication point. Readers get either the old or the new
/// snapshot as a whole; generations must increase.
class SnapshotSlot {
public:
  explicit SnapshotSlot(std::shared_ptr<const CoeffSnapshot> initial) {
    std::atomic_store(&current_, std::move(initial));
  }

  std::shared_ptr<const CoeffSnapshot> load() const { return std::atomic_load(&current_); }

  void publish(std::shared_ptr<const CoeffSnapshot> next) {
    const auto prev = load();
    if (prev && next->generation <= prev->generation) {
      throw ParameterError("snapshot generations must increase");
    }
    std::atomic_store(&current_, std::move(next));
  }

private:
  std::shared_ptr<const CoeffSnapshot> current_;
};

// ---------------------------------------------------------------------------
// Runs

namespace detail {

template <class Fn>
decltype(auto) with_executor(int workers, Fn&& fn) {
  if (workers > 1) {
    ParallelExecutor ex(workers);
    return fn(ex);
  }
  SerialExecutor ex;
  return fn(ex);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline double resolve_max_delay(const SeparationInput& in, const RunConfig& cfg) {
  return cfg.max_delay ? *cfg.max_delay : in.max_delay;
}

inline void score(RunResult& r, const SeparationInput& in, const RunConfig& cfg) {
  if (!in.references) return;
  r.metrics = evaluate(r.estimates, *in.references, cfg.projection_length);
  if (r.applied) r.applied_metrics = evaluate(*r.applied, *in.references, cfg.projection_length);
}

struct Cancelled : std::runtime_error {
  Cancelled() : std::runtime_error("cancelled") {}
};

} // namespace detail

inline RunResult run_offline_once(const SeparationInput& in, const RunConfig& cfg,
                                  std::size_t repeat) {
  cfg.validate();
  RunResult r;
  r.item = in.label;
  r.repeat = repeat;
  r.mode = RunMode::offline;
  r.seed = repeat_seed(cfg.search.seed, repeat);

  const std::size_t mics = in.mixture.channels();
  const double dmax = detail::resolve_max_delay(in, cfg);
  const auto t0 = std::chrono::steady_clock::now();
  std::string stage = "accumulation";
  try {
    SeparationContext ctx{accumulate_blocks(in.mixture, cfg.objective), cfg.sources, dmax,
                          cfg.objective, cfg.kernel};
    const SeparationObjective f(std::move(ctx));
    SearchConfig sc = cfg.search;
    sc.seed = r.seed;
    const auto x0 = random_start(mics, cfg.sources, dmax, r.seed);

    stage = "optimization";
    auto res = detail::with_executor(cfg.workers, [&](auto& ex) {
      return random_directions_minimize(f, x0, sc, ex);
    });
    r.x_best = std::move(res.x_best);
    r.objective = res.f_best;
    r.trace = std::move(res.trace);
    r.coeffs = decode(r.x_best, mics, cfg.sources, dmax);

    stage = "unmixing";
    r.estimates = unmix(in.mixture, *r.coeffs, cfg.kernel);
    r.processing_seconds = detail::seconds_since(t0);
    r.real_time_factor = r.processing_seconds / in.mixture.duration_seconds();

    stage = "evaluation";
    detail::score(r, in, cfg);
  } catch (const OptimizationAborted& e) {
    r.ok = false;
    r.trace = e.trace();
    r.x_best = e.x_best();
    r.error = stage + ": " + e.what();
    try {
      if (e.cause()) std::rethrow_exception(e.cause());
    } catch (const std::exception& inner) {
      r.error += std::string(" (") + inner.what() + ")";
    } catch (...) {
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = stage + ": " + e.what();
  }
  return r;
}

/// Test seam for the online worker.
struct OnlineHooks {
  /// Called before optimization pass `k`; throwing fails that pass.
  std::function<void(std::size_t)> before_pass;
};

inline RunResult run_online_once(const SeparationInput& in, const RunConfig& cfg,
                                 std::size_t repeat, const OnlineHooks& hooks = {}) {
  cfg.validate();
  RunResult r;
  r.item = in.label;
  r.repeat = repeat;
  r.mode = RunMode::online;
  r.seed = repeat_seed(cfg.search.seed, repeat);

  const MultichannelSignal& x = in.mixture;
  const std::size_t mics = x.channels();
  const std::size_t length = x.samples();
  const int fs = x.sample_rate();
  const double dmax = detail::resolve_max_delay(in, cfg);

  StreamReport rep;
  rep.chunk_size = cfg.chunk_size;
  rep.sample_rate = fs;
  rep.algorithmic_delay_ms = algorithmic_delay_ms(cfg.chunk_size, fs);

  const auto passthrough = UnmixingCoeffs::passthrough(mics, cfg.sources, dmax);
  SnapshotSlot slot(make_snapshot(passthrough, 0, std::numeric_limits<double>::infinity()));

  const auto positions = cfg.publish ? optimization_positions(length, fs, cfg)
                                     : std::vector<std::size_t>{};
  if (!cfg.publish) r.log.push_back("snapshot publication disabled");
  if (cfg.publish && positions.empty()) {
    r.log.push_back("signal shorter than one accumulation block; no optimization");
  }

  // Worker <-> consumer progress; never held across an objective evaluation.
  std::mutex mu;
  std::condition_variable cv;
  std::size_t arrived = 0;
  std::size_t passes_done = 0;
  std::atomic<bool> stop{false};

  std::vector<double> best_x;
  OptimizationTrace last_trace;
  std::vector<std::string> worker_log;
  double worker_seconds = 0.0;
  std::size_t published = 0, skipped = 0, failures = 0;

  auto worker = [&] {
    BlockAccumulator acc(mics, cfg.objective.block_size, fs, cfg.objective.leak);
    const std::size_t first_blocks = positions.empty() ? 0 : positions.front() / cfg.objective.block_size;
    double last_objective = std::numeric_limits<double>::infinity();
    std::uint64_t generation = 0;

    for (std::size_t k = 0; k < positions.size(); ++k) {
      {
        std::unique_lock lock(mu);
        cv.wait(lock, [&] { return arrived >= positions[k] || stop.load(); });
      }
      if (stop.load()) break;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const std::size_t blocks = k == 0 ? first_blocks : positions[k] / cfg.objective.block_size;
        while (acc.blocks() < blocks) acc.push(x, acc.blocks() * cfg.objective.block_size);
        if (hooks.before_pass) hooks.before_pass(k);

        SeparationContext ctx{acc.block(), cfg.sources, dmax, cfg.objective, cfg.kernel};
        const SeparationObjective inner(std::move(ctx));
        auto f = [&](std::span<const double> v) {
          if (stop.load(std::memory_order_relaxed)) throw detail::Cancelled();
          return inner(v);
        };
        SearchConfig sc = cfg.search;
        sc.seed = k == 0 ? r.seed : derive_seed(r.seed, 0x7061737300ULL, k);
        const auto x0 = best_x.empty() ? random_start(mics, cfg.sources, dmax, r.seed) : best_x;
        auto res = detail::with_executor(cfg.workers, [&](auto& ex) {
          return random_directions_minimize(f, x0, sc, ex);
        });
        last_trace = res.trace;

        if (res.f_best <= last_objective) {
          auto coeffs = decode(res.x_best, mics, cfg.sources, dmax);
          StreamState primed(mics, cfg.sources, dmax);
          if (positions[k] > 0) {
            streaming_unmix(x.slice(0, positions[k]), coeffs, primed, cfg.kernel);
          }
          slot.publish(make_snapshot(std::move(coeffs), ++generation, res.f_best, positions[k],
                                     std::move(primed)));
          last_objective = res.f_best;
          best_x = std::move(res.x_best);
          ++published;
        } else {
          ++skipped;
          worker_log.push_back("pass " + std::to_string(k) + ": objective " +
                               std::to_string(res.f_best) + " above published " +
                               std::to_string(last_objective) + ", kept previous snapshot");
        }
      } catch (const OptimizationAborted& e) {
        bool cancelled = false;
        try {
          if (e.cause()) std::rethrow_exception(e.cause());
        } catch (const detail::Cancelled&) {
          cancelled = true;
        } catch (...) {
        }
        if (!cancelled) {
          ++failures;
          worker_log.push_back("pass " + std::to_string(k) + " failed: " + e.what() +
                               "; keeping last good snapshot");
        }
      } catch (const std::exception& e) {
        ++failures;
        worker_log.push_back("pass " + std::to_string(k) + " failed: " + e.what() +
                             "; keeping last good snapshot");
      }
      worker_seconds += detail::seconds_since(t0);
      {
        std::lock_guard lock(mu);
        passes_done = k + 1;
      }
      cv.notify_all();
    }
  };

  std::thread worker_thread;
  if (!positions.empty()) worker_thread = std::thread(worker);

  MultichannelSignal out(cfg.sources, length, fs);
  std::uint64_t current_generation = 0;
  UnmixingCoeffs current = passthrough;
  StreamState state(mics, cfg.sources, dmax);
  double consumer_seconds = 0.0;
  const auto wall_start = std::chrono::steady_clock::now();
  std::size_t due = 0;

  try {
    std::size_t q = 0;
    while (q < length) {
      if (cfg.clock == ClockMode::simulated) {
        while (due < positions.size() && positions[due] <= q) {
          std::unique_lock lock(mu);
          cv.wait(lock, [&] { return passes_done > due; });
          ++due;
        }
      }
      const auto t0 = std::chrono::steady_clock::now();
      const auto snap = slot.load();
      ++rep.snapshot_reads;
      if (!snap->intact()) {
        ++rep.torn_reads;
      } else if (snap->generation != current_generation && snap->position <= q) {
        state = snap->primed;
        if (snap->position < q) {
          streaming_unmix(x.slice(snap->position, q - snap->position), snap->coeffs, state,
                          cfg.kernel);
        }
        current = snap->coeffs;
        current_generation = snap->generation;
        rep.swap_positions.push_back(q);
      }

      const std::size_t n = std::min(cfg.chunk_size, length - q);
      const auto y = streaming_unmix(x.slice(q, n), current, state, cfg.kernel);
      for (std::size_t s = 0; s < cfg.sources; ++s) {
        auto src = y.channel(s);
        std::copy(src.begin(), src.end(), out.channel(s).begin() + static_cast<std::ptrdiff_t>(q));
      }
      rep.samples_in += n;
      rep.samples_out += y.samples();
      q += n;
      consumer_seconds += detail::seconds_since(t0);
      {
        std::lock_guard lock(mu);
        arrived = q;
      }
      cv.notify_all();

      if (cfg.clock == ClockMode::wall && cfg.pace > 0.0) {
        const auto due_time = wall_start + std::chrono::duration<double>(
                                               static_cast<double>(q) / fs / cfg.pace);
        std::this_thread::sleep_until(due_time);
      }
    }
    // Passes due at the very end still count for the filter-then-apply result.
    if (cfg.clock == ClockMode::simulated && due < positions.size()) {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return passes_done == positions.size(); });
    }
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = std::string("streaming: ") + e.what();
  }

  stop.store(true);
  cv.notify_all();
  if (worker_thread.joinable()) worker_thread.join();

  rep.publications = published;
  rep.skipped_publications = skipped;
  rep.worker_failures = failures;
  rep.consumer_seconds = consumer_seconds;
  rep.worker_seconds = worker_seconds;
  r.log.insert(r.log.end(), worker_log.begin(), worker_log.end());

  const auto final_snap = slot.load();
  r.coeffs = final_snap->coeffs;
  r.x_best = final_snap->vector;
  r.objective = final_snap->objective;
  r.trace = std::move(last_trace);
  r.estimates = std::move(out);
  r.processing_seconds = consumer_seconds + worker_seconds;
  r.real_time_factor = r.processing_seconds / x.duration_seconds();
  r.stream = std::move(rep);

  if (r.ok) {
    try {
      r.applied = unmix(x, *r.coeffs, cfg.kernel);
      detail::score(r, in, cfg);
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = std::string("evaluation: ") + e.what();
    }
  }
  return r;
}

inline RunResult run_once(const SeparationInput& in, const RunConfig& cfg, std::size_t repeat) {
  return cfg.mode == RunMode::online ? run_online_once(in, cfg, repeat)
                                     : run_offline_once(in, cfg, repeat);
}

/// All repeats of one item in the configured mode.
inline std::vector<RunResult> run_repeats(const SeparationInput& in, const RunConfig& cfg) {
  std::vector<RunResult> runs;
  for (std::size_t r = 0; r < cfg.repeats; ++r) runs.push_back(run_once(in, cfg, r));
  return runs;
}

inline std::vector<RunResult> run_offline(const SeparationInput& in, RunConfig cfg) {
  cfg.mode = RunMode::offline;
  return run_repeats(in, cfg);
}

inline std::vector<RunResult> run_online(const SeparationInput& in, RunConfig cfg) {
  cfg.mode = RunMode::online;
  return run_repeats(in, cfg);
}

// ---------------------------------------------------------------------------
// Aggregation

struct MetricSummary {
  stats::BoxStats sdr, sir, sar;
  stats::BoxStats real_time_factor;
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
};

/// Statistics over sources x runs of the primary metrics of successful runs.
inline MetricSummary summarize(const std::vector<const RunResult*>& runs) {
  std::vector<double> sdr, sir, sar, rtf;
  MetricSummary s;
  for (const auto* r : runs) {
    ++s.runs;
    if (!r->ok) {
      ++s.failed_runs;
      continue;
    }
    rtf.push_back(r->real_time_factor);
    if (!r->metrics) continue;
    for (const auto& m : r->metrics->sources) {
      sdr.push_back(m.sdr_db);
      sir.push_back(m.sir_db);
      sar.push_back(m.sar_db);
    }
  }
  s.sdr = stats::box(sdr);
  s.sir = stats::box(sir);
  s.sar = stats::box(sar);
  s.real_time_factor = stats::box(rtf);
  return s;
}

inline MetricSummary summarize(const std::vector<RunResult>& runs) {
  std::vector<const RunResult*> ptrs;
  for (const auto& r : runs) ptrs.push_back(&r);
  return summarize(ptrs);
}

// ---------------------------------------------------------------------------
// Benchmark suite

struct ManifestItem {
  std::string name;
  /// Mono dry source WAVs; empty when synthetic.
  std::vector<std::string> files;
  std::optional<std::uint64_t> synthetic_seed;
  double seconds = 8.0;
};

struct Manifest {
  std::vector<ManifestItem> items;
  std::vector<MicArrayPreset> presets{MicArrayPreset::stereo};
  /// Room template; microphones are replaced per preset.
  RoomSpec room = reference_room(MicArrayPreset::stereo);
  Vec3 array_center{3.1, 2.1, 1.2};
  double array_size = 0.2;
};

struct CellResult {
  std::string item;
  MicArrayPreset preset = MicArrayPreset::stereo;
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<RunResult> runs;
  MetricSummary summary;
  /// Every run's real-time factor below 1.
  bool real_time_capable = false;
};

struct SuiteReport {
  std::vector<CellResult> cells;
  MetricSummary aggregate;

  bool all_ok() const {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.ok; });
  }
};

} // namespace rdbss
