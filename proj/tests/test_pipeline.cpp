#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "rdbss/pipeline.hpp"
#include "rdbss/synth.hpp"

using namespace rdbss;

namespace {

/// 2 s anechoic stereo mixture with references.
const SeparationInput& fixture() {
  static const SeparationInput in = [] {
    const auto room = reference_room(MicArrayPreset::stereo, 0.0);
    return input_from_simulation("fixture", room, simulate(room, synthetic_pair(32000, 16000, 7)));
  }();
  return in;
}

RunConfig quick() {
  RunConfig cfg;
  cfg.search.iterations = 30;
  cfg.search.probes = 4;
  cfg.objective.block_size = 2000;
  cfg.repeats = 1;
  cfg.projection_length = 32;
  return cfg;
}

UnmixingCoeffs random_coeffs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(-1.0, 1.0), d(0.0, 14.0);
  UnmixingCoeffs c(2, 2, 14.0);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t k = 0; k < 2; ++k) c.at(m, k) = {a(rng), d(rng)};
  }
  return c;
}

} // namespace

TEST(Snapshot, ChecksumDetectsTampering) {
  std::mt19937_64 rng(1);
  auto s = std::const_pointer_cast<CoeffSnapshot>(make_snapshot(random_coeffs(rng), 3, 0.5));
  EXPECT_TRUE(s->intact());
  s->coeffs.at(1, 0).delay += 1e-12;
  EXPECT_FALSE(s->intact());
  s->coeffs.at(1, 0).delay -= 1e-12;
  s->generation = 4;
  EXPECT_FALSE(s->intact());
}

TEST(Snapshot, GenerationsMustIncrease) {
  std::mt19937_64 rng(2);
  SnapshotSlot slot(make_snapshot(random_coeffs(rng), 5, 0.0));
  EXPECT_THROW(slot.publish(make_snapshot(random_coeffs(rng), 5, 0.0)), ParameterError);
  EXPECT_NO_THROW(slot.publish(make_snapshot(random_coeffs(rng), 6, 0.0)));
  EXPECT_EQ(slot.load()->generation, 6u);
}

TEST(Snapshot, ConcurrentReadsAreNeverTorn) {
  std::mt19937_64 rng(3);
  SnapshotSlot slot(make_snapshot(random_coeffs(rng), 0, 0.0));
  std::atomic<bool> done{false};
  std::thread writer([&] {
    std::mt19937_64 wrng(4);
    for (std::uint64_t g = 1; !done.load(); ++g) slot.publish(make_snapshot(random_coeffs(wrng), g, 0.0));
  });
  std::size_t torn = 0, backwards = 0;
  std::uint64_t last = 0;
  for (int i = 0; i < 1000000; ++i) {
    const auto s = slot.load();
    if (!s->intact()) ++torn;
    if (s->generation < last) ++backwards;
    last = s->generation;
  }
  done.store(true);
  writer.join();
  EXPECT_EQ(torn, 0u);
  EXPECT_EQ(backwards, 0u);
}

TEST(Schedule, Positions) {
  RunConfig cfg;
  cfg.reoptimize_period = 1.0;
  EXPECT_EQ(optimization_positions(192000, 16000, cfg),
            (std::vector<std::size_t>{128000, 144000, 160000, 176000}));
  cfg.reoptimize_period.reset();
  EXPECT_EQ(optimization_positions(40000, 16000, cfg), (std::vector<std::size_t>{40000}));
  EXPECT_TRUE(optimization_positions(7999, 16000, cfg).empty());
}

TEST(Schedule, AlgorithmicDelay) {
  EXPECT_EQ(algorithmic_delay_ms(96, 16000), 6.0);
  EXPECT_EQ(algorithmic_delay_ms(128, 16000), 8.0);
}

TEST(Seeds, RandomStartWithinBounds) {
  const auto x = random_start(4, 2, 9.0, 11);
  ASSERT_EQ(x.size(), 16u);
  for (std::size_t i = 0; i < x.size(); i += 2) {
    EXPECT_GE(x[i], -1.0);
    EXPECT_LE(x[i], 1.0);
    EXPECT_GE(x[i + 1], 0.0);
    EXPECT_LE(x[i + 1], 9.0);
  }
  EXPECT_EQ(x, random_start(4, 2, 9.0, 11));
  EXPECT_NE(x, random_start(4, 2, 9.0, 12));
  EXPECT_NE(repeat_seed(0, 0), repeat_seed(0, 1));
}

TEST(Offline, ReproducibleForSameSeed) {
  const auto cfg = quick();
  const auto a = run_offline_once(fixture(), cfg, 0);
  const auto b = run_offline_once(fixture(), cfg, 0);
  ASSERT_TRUE(a.ok) << a.error;
  EXPECT_EQ(a.x_best, b.x_best);
  EXPECT_EQ(a.estimates, b.estimates);
  EXPECT_EQ(a.objective, b.objective);
  ASSERT_TRUE(a.metrics);
  EXPECT_EQ(a.metrics->sources.size(), 2u);
}

TEST(Offline, WorkersDoNotChangeResult) {
  auto cfg = quick();
  const auto serial = run_offline_once(fixture(), cfg, 2);
  cfg.workers = 3;
  const auto parallel = run_offline_once(fixture(), cfg, 2);
  EXPECT_EQ(serial.x_best, parallel.x_best);
}

TEST(Offline, RepeatsDifferAndSpread) {
  auto cfg = quick();
  cfg.repeats = 10;
  const auto runs = run_offline(fixture(), cfg);
  ASSERT_EQ(runs.size(), 10u);
  std::set<std::vector<double>> distinct;
  for (const auto& r : runs) {
    ASSERT_TRUE(r.ok) << r.error;
    distinct.insert(r.x_best);
    EXPECT_TRUE(r.trace.non_increasing());
  }
  EXPECT_EQ(distinct.size(), 10u);
  const auto s = summarize(runs);
  EXPECT_EQ(s.runs, 10u);
  EXPECT_EQ(s.failed_runs, 0u);
  EXPECT_EQ(s.sir.count, 20u);
  EXPECT_GT(s.sir.stddev, 0.0);
}

TEST(Offline, ShortInputFailsCleanly) {
  auto in = fixture();
  in.mixture = in.mixture.slice(0, 1000);
  in.references = in.references->slice(0, 1000);
  const auto r = run_offline_once(in, quick(), 0);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.error.find("accumulation"), std::string::npos);
}

TEST(Online, PublicationDisabledIsPassthrough) {
  auto cfg = quick();
  cfg.publish = false;
  const auto r = run_online_once(fixture(), cfg, 0);
  ASSERT_TRUE(r.ok) << r.error;
  const auto expect = unmix(fixture().mixture, UnmixingCoeffs::passthrough(2, 2, fixture().max_delay));
  EXPECT_EQ(r.estimates, expect);
  EXPECT_EQ(r.stream->publications, 0u);
  EXPECT_TRUE(r.stream->swap_positions.empty());
}

TEST(Online, TailMatchesOfflineAndFilterThenApply) {
  auto cfg = quick();
  cfg.objective.max_blocks = 8;
  const auto on = run_online_once(fixture(), cfg, 0);
  const auto off = run_offline_once(fixture(), cfg, 0);
  ASSERT_TRUE(on.ok) << on.error;
  ASSERT_EQ(on.stream->publications, 1u);
  // Same accumulation and seed as the offline run.
  EXPECT_EQ(*on.coeffs, *off.coeffs);
  EXPECT_EQ(on.objective, off.objective);
  ASSERT_TRUE(on.applied);
  EXPECT_EQ(*on.applied, off.estimates);
  ASSERT_EQ(on.stream->swap_positions.size(), 1u);
  const std::size_t from = on.stream->swap_positions.front();
  EXPECT_EQ(from, 16000u);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t n = from; n < 32000; ++n) ASSERT_EQ(on.estimates.at(s, n), off.estimates.at(s, n));
  }
  // Before the swap the consumer ran the passthrough.
  const auto pass = unmix(fixture().mixture, UnmixingCoeffs::passthrough(2, 2, fixture().max_delay));
  for (std::size_t n = 0; n < from; ++n) ASSERT_EQ(on.estimates.at(0, n), pass.at(0, n));
}

TEST(Online, CatchUpAfterMidStreamSwap) {
  auto in = fixture();
  auto cfg = quick();
  cfg.objective.max_blocks = 4;
  cfg.reoptimize_period = 0.25;
  cfg.chunk_size = 100;
  const auto r = run_online_once(in, cfg, 1);
  ASSERT_TRUE(r.ok) << r.error;
  const auto& rep = *r.stream;
  EXPECT_EQ(rep.publications + rep.skipped_publications + rep.worker_failures,
            optimization_positions(32000, 16000, cfg).size());
  ASSERT_FALSE(rep.swap_positions.empty());
  // After the last swap the output equals a batch run of the final coefficients.
  const std::size_t from = rep.swap_positions.back();
  const auto batch = unmix(in.mixture, *r.coeffs);
  for (std::size_t s = 0; s < 2; ++s) {
    for (std::size_t n = from; n < 32000; ++n) ASSERT_EQ(r.estimates.at(s, n), batch.at(s, n));
  }
  EXPECT_EQ(rep.torn_reads, 0u);
}

TEST(Online, GateNeverRaisesPublishedObjective) {
  auto cfg = quick();
  cfg.objective.max_blocks = 4;
  const auto single = run_online_once(fixture(), cfg, 3);
  cfg.reoptimize_period = 0.25;
  const auto multi = run_online_once(fixture(), cfg, 3);
  ASSERT_TRUE(single.ok && multi.ok);
  EXPECT_LE(multi.objective, single.objective);
  EXPECT_GE(multi.stream->publications, 1u);
}

TEST(Online, LatencyAndSampleAccounting) {
  for (std::size_t chunk : {96u, 1u, 777u}) {
    auto cfg = quick();
    cfg.chunk_size = chunk;
    cfg.search.iterations = 5;
    const auto r = run_online_once(fixture(), cfg, 0);
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.stream->samples_in, 32000u);
    EXPECT_EQ(r.stream->samples_out, 32000u);
    EXPECT_EQ(r.stream->algorithmic_delay_ms, chunk * 1000.0 / 16000.0);
    if (chunk == 96) {
      EXPECT_EQ(r.stream->algorithmic_delay_ms, 6.0);
    }
  }
}

TEST(Online, WorkerFailureKeepsLastSnapshot) {
  auto cfg = quick();
  cfg.objective.max_blocks = 4;
  cfg.reoptimize_period = 0.5;
  OnlineHooks hooks;
  hooks.before_pass = [](std::size_t k) {
    if (k >= 1) throw std::runtime_error("injected");
  };
  const auto failed = run_online_once(fixture(), cfg, 0, hooks);
  ASSERT_TRUE(failed.ok) << failed.error;
  EXPECT_EQ(failed.stream->publications, 1u);
  EXPECT_GE(failed.stream->worker_failures, 1u);

  auto single = cfg;
  single.reoptimize_period.reset();
  const auto first = run_online_once(fixture(), single, 0);
  EXPECT_EQ(failed.x_best, first.x_best);
  EXPECT_EQ(failed.stream->samples_out, 32000u);
}

TEST(Online, FirstPassFailureStaysOnPassthrough) {
  auto cfg = quick();
  OnlineHooks hooks;
  hooks.before_pass = [](std::size_t) { throw std::runtime_error("injected"); };
  const auto r = run_online_once(fixture(), cfg, 0, hooks);
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.stream->worker_failures, 1u);
  EXPECT_EQ(r.estimates, unmix(fixture().mixture, UnmixingCoeffs::passthrough(2, 2, fixture().max_delay)));
}

TEST(Online, WallClockCompletes) {
  auto cfg = quick();
  cfg.clock = ClockMode::wall;
  cfg.pace = 0.0;
  const auto r = run_online_once(fixture(), cfg, 0);
  ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(r.stream->samples_out, 32000u);
  EXPECT_EQ(r.stream->torn_reads, 0u);
}

TEST(Degenerate, IdenticalChannelsComplete) {
  auto in = fixture();
  auto ch0 = in.mixture.channel(0);
  std::copy(ch0.begin(), ch0.end(), in.mixture.channel(1).begin());
  for (auto mode : {RunMode::offline, RunMode::online}) {
    auto cfg = quick();
    cfg.mode = mode;
    const auto r = run_once(in, cfg, 0);
    ASSERT_TRUE(r.ok) << to_string(mode) << ": " << r.error;
    for (double v : r.estimates.raw()) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(Summary, PopulationStatistics) {
  std::vector<RunResult> runs(3);
  runs[0].metrics = SeparationMetrics{};
  runs[0].metrics->sources = {{0.0, 1.0, 0.0}, {0.0, 3.0, 0.0}};
  runs[1].metrics = SeparationMetrics{};
  runs[1].metrics->sources = {{0.0, 5.0, 0.0}, {0.0, 7.0, 0.0}};
  runs[2].ok = false;
  const auto s = summarize(runs);
  EXPECT_EQ(s.runs, 3u);
  EXPECT_EQ(s.failed_runs, 1u);
  EXPECT_EQ(s.sir.count, 4u);
  EXPECT_DOUBLE_EQ(s.sir.mean, 4.0);
  EXPECT_DOUBLE_EQ(s.sir.stddev, std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(s.sir.median, 4.0);
  EXPECT_DOUBLE_EQ(s.sir.q1, 2.5);
  EXPECT_DOUBLE_EQ(s.sir.q3, 5.5);
}

TEST(RunConfig, Validation) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.chunk_size = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.reoptimize_period = 0.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.max_delay = -1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  EXPECT_EQ(run_mode_from_string("online"), RunMode::online);
  EXPECT_THROW(run_mode_from_string("batch"), ParameterError);
  EXPECT_EQ(clock_mode_from_string("wall"), ClockMode::wall);
}
