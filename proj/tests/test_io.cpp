#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "rdbss/config.hpp"
#include "rdbss/report.hpp"
#include "rdbss/suite.hpp"
#include "rdbss/wav.hpp"

using namespace rdbss;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("rdbss-test-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

private:
  fs::path path_;
};

MultichannelSignal noise(std::size_t channels, std::size_t n, int rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  MultichannelSignal s(channels, n, rate);
  for (auto& v : s.raw()) v = u(rng);
  return s;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

RunConfig quick() {
  RunConfig cfg;
  cfg.search.iterations = 10;
  cfg.search.probes = 2;
  cfg.objective.block_size = 2000;
  cfg.repeats = 2;
  cfg.projection_length = 16;
  return cfg;
}

} // namespace

TEST(Wav, Float32RoundTrip) {
  TempDir dir;
  const auto sig = noise(3, 1234, 22050, 1);
  const auto path = (dir.path() / "f.wav").string();
  write_wav(path, sig, WavEncoding::float32);
  const auto back = read_wav(path);
  ASSERT_EQ(back.channels(), 3u);
  ASSERT_EQ(back.samples(), 1234u);
  EXPECT_EQ(back.sample_rate(), 22050);
  for (std::size_t i = 0; i < sig.raw().size(); ++i) {
    EXPECT_EQ(back.raw()[i], static_cast<double>(static_cast<float>(sig.raw()[i])));
  }
}

TEST(Wav, Pcm16RoundTrip) {
  TempDir dir;
  const auto sig = noise(2, 500, 16000, 2);
  const auto path = (dir.path() / "p.wav").string();
  write_wav(path, sig, WavEncoding::pcm16);
  const auto back = read_wav(path);
  ASSERT_EQ(back.channels(), 2u);
  for (std::size_t i = 0; i < sig.raw().size(); ++i) EXPECT_NEAR(back.raw()[i], sig.raw()[i], 0.5 / 32768.0 + 1e-12);
  EXPECT_EQ(fs::file_size(path), 44u + 500u * 2u * 2u);
}

TEST(Wav, Pcm16ClipsAndReadsHandWrittenFile) {
  TempDir dir;
  MultichannelSignal sig(1, 4, 8000);
  sig.at(0, 0) = 0.5;
  sig.at(0, 1) = -1.0;
  sig.at(0, 2) = 2.0;
  sig.at(0, 3) = -0.25;
  const auto path = (dir.path() / "c.wav").string();
  write_wav(path, sig, WavEncoding::pcm16);
  std::ifstream in(path, std::ios::binary);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_EQ(bytes.size(), 52u);
  auto sample = [&](std::size_t k) {
    return static_cast<std::int16_t>(bytes[44 + 2 * k] | (bytes[45 + 2 * k] << 8));
  };
  EXPECT_EQ(sample(0), 16384);
  EXPECT_EQ(sample(1), -32768);
  EXPECT_EQ(sample(2), 32767);
  EXPECT_EQ(sample(3), -8192);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RIFF");
}

TEST(Wav, Errors) {
  TempDir dir;
  EXPECT_THROW(read_wav((dir.path() / "absent.wav").string()), WavError);
  const auto path = (dir.path() / "junk.wav").string();
  std::ofstream(path) << "not a wave file at all";
  EXPECT_THROW(read_wav(path), WavError);
}

TEST(Config, AppliesSectionsAndComments) {
  const auto doc = Json::parse(R"({
    // comments are allowed
    "search": {"iterations": 250, "probes": 6, "line_search_exponents": [-4, 4], "seed": 9},
    "objective": {"divergence": "histogram", "block_size": 4000, "histogram_range": 1.5},
    "run": {"mode": "online", "chunk_size": 96, "reoptimize_period": 0.5, "kernel": "lagrange"}
  })", nullptr, true, true);
  RunConfig cfg;
  apply_run_config(doc, cfg);
  EXPECT_EQ(cfg.search.iterations, 250u);
  EXPECT_EQ(cfg.search.probes, 6u);
  EXPECT_EQ(cfg.search.min_exponent, -4);
  EXPECT_EQ(cfg.search.max_exponent, 4);
  EXPECT_EQ(cfg.search.seed, 9u);
  EXPECT_EQ(cfg.objective.divergence, Divergence::amplitude_histogram);
  EXPECT_EQ(cfg.objective.block_size, 4000u);
  EXPECT_EQ(cfg.objective.histogram_range, 1.5);
  EXPECT_EQ(cfg.mode, RunMode::online);
  EXPECT_EQ(cfg.chunk_size, 96u);
  EXPECT_EQ(cfg.reoptimize_period, 0.5);
  EXPECT_EQ(cfg.kernel, DelayKernel::lagrange);
  // Untouched keys keep their defaults.
  EXPECT_EQ(cfg.objective.lambda, 0.1);
  EXPECT_EQ(cfg.repeats, 10u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  RunConfig cfg;
  EXPECT_THROW(apply_run_config(Json::parse(R"({"serach": {}})"), cfg), ConfigError);
  EXPECT_THROW(apply_run_config(Json::parse(R"({"search": {"iteration": 5}})"), cfg), ConfigError);
  EXPECT_THROW(apply_run_config(Json::parse(R"({"search": {"iterations": "many"}})"), cfg), ConfigError);
  EXPECT_THROW(apply_run_config(Json::parse(R"({"run": {"mode": "batch"}})"), cfg), ParameterError);
  EXPECT_THROW(apply_run_config(Json::parse(R"({"search": {"line_search_exponents": [1]}})"), cfg),
               ConfigError);
}

TEST(Config, LoadFile) {
  TempDir dir;
  const auto path = (dir.path() / "c.json").string();
  std::ofstream(path) << "{ /* block */ \"run\": {\"repeats\": 3} }";
  RunConfig cfg;
  apply_run_config(load_json_file(path), cfg);
  EXPECT_EQ(cfg.repeats, 3u);
  EXPECT_THROW(load_json_file((dir.path() / "none.json").string()), ConfigError);
  std::ofstream(path) << "{ broken";
  EXPECT_THROW(load_json_file(path), ConfigError);
}

TEST(Config, RoomSection) {
  RoomSpec room = reference_room(MicArrayPreset::stereo);
  apply_json(Json::parse(R"({"rt60": 0.2, "preset": "square", "array_center": [2, 2, 1], "array_size": 0.1})"),
             room);
  EXPECT_EQ(room.rt60, 0.2);
  EXPECT_EQ(room.mic_positions, mic_array(MicArrayPreset::square, {2.0, 2.0, 1.0}, 0.1));
  apply_json(Json::parse(R"({"mics": [[1, 1, 1], [1.2, 1, 1]]})"), room);
  EXPECT_EQ(room.mic_positions.size(), 2u);
  EXPECT_THROW(apply_json(Json::parse(R"({"mics": [[1, 1]]})"), room), ConfigError);
  EXPECT_THROW(apply_json(Json::parse(R"({"mics": [], "preset": "cube"})"), room), ConfigError);
}

TEST(Manifest, Parse) {
  const auto m = parse_manifest(Json::parse(R"({
    "items": [{"name": "a", "files": ["s1.wav", "s2.wav"]}, {"synthetic_seed": 4, "seconds": 3}],
    "presets": ["stereo", "cube"],
    "room": {"rt60": 0.0, "array_center": [3, 2, 1.5]}
  })"));
  ASSERT_EQ(m.items.size(), 2u);
  EXPECT_EQ(m.items[0].files.size(), 2u);
  EXPECT_EQ(m.items[1].name, "item2");
  EXPECT_EQ(m.items[1].synthetic_seed, 4u);
  EXPECT_EQ(m.items[1].seconds, 3.0);
  EXPECT_EQ(m.presets, (std::vector<MicArrayPreset>{MicArrayPreset::stereo, MicArrayPreset::cube}));
  EXPECT_EQ(m.room.rt60, 0.0);
  EXPECT_EQ(m.array_center, (Vec3{3.0, 2.0, 1.5}));
  EXPECT_THROW(parse_manifest(Json::parse(R"({"items": []})")), ConfigError);
  EXPECT_THROW(parse_manifest(Json::parse(R"({"items": [{"name": "x"}]})")), ConfigError);
  EXPECT_THROW(parse_manifest(Json::parse(R"({"items": [{"synthetic_seed": 1}], "presets": ["ring"]})")),
               ParameterError);
}

TEST(Report, MetricsCsvLayout) {
  RunResult off;
  off.item = "x";
  off.repeat = 2;
  off.metrics = SeparationMetrics{};
  off.metrics->sources = {{1.5, 2.5, 3.5}, {4.0, 5.0, 6.0}};
  off.metrics->permutation = {1, 0};
  RunResult on = off;
  on.mode = RunMode::online;
  on.applied_metrics = off.metrics;
  std::ostringstream os;
  write_metrics_csv(os, {off, on});
  const auto l = lines(os.str());
  ASSERT_EQ(l.size(), 7u);
  EXPECT_EQ(l[0], "item,run,source,sdr,sir,sar,permutation");
  EXPECT_EQ(l[1], "x,2,0,1.5,2.5,3.5,1");
  EXPECT_EQ(l[2], "x,2,1,4,5,6,0");
  EXPECT_EQ(l[3], "x/streamed,2,0,1.5,2.5,3.5,1");
  EXPECT_EQ(l[5], "x/filter-then-apply,2,0,1.5,2.5,3.5,1");
}

TEST(Report, GeometryJson) {
  const auto room = reference_room(MicArrayPreset::cube);
  const auto j = geometry_json(room, "cube");
  EXPECT_EQ(j.at("preset"), "cube");
  EXPECT_EQ(j.at("mics").size(), 8u);
  EXPECT_EQ(j.at("sources").size(), 2u);
  EXPECT_EQ(j.at("dimensions"), Json::parse("[5.0, 4.0, 2.5]"));
  EXPECT_NEAR(j.at("absorption").get<double>(), 0.947, 5e-4);
  EXPECT_DOUBLE_EQ(j.at("max_delay_samples").get<double>(),
                   default_max_delay(room.mic_positions, 16000, 343.0));
  // Round trip through the room parser.
  RoomSpec back;
  Json r = j;
  for (const char* k : {"absorption", "anechoic", "preset", "max_delay_samples", "reference_mic"}) r.erase(k);
  apply_json(r, back);
  EXPECT_EQ(back.mic_positions, room.mic_positions);
  EXPECT_EQ(back.source_positions, room.source_positions);
}

TEST(Report, RunJsonCarriesStreamAndTrace) {
  RunResult r;
  r.item = "y";
  r.mode = RunMode::online;
  r.trace.evaluations = 17;
  r.trace.records.push_back({0, 1.0, 2.0, true, 3});
  r.stream = StreamReport{};
  r.stream->chunk_size = 96;
  r.stream->algorithmic_delay_ms = 6.0;
  const auto j = to_json(r);
  EXPECT_EQ(j.at("mode"), "online");
  EXPECT_EQ(j.at("stream").at("algorithmic_delay_ms"), 6.0);
  EXPECT_EQ(j.at("accepted_iterations"), 1);
  EXPECT_EQ(j.at("evaluations"), 17);
  EXPECT_TRUE(j.at("objective").is_null());
}

TEST(Suite, MissingFileFailsOnlyItsCell) {
  TempDir dir;
  write_wav((dir.path() / "a.wav").string(), noise(1, 16000, 16000, 3));
  write_wav((dir.path() / "b.wav").string(), noise(2, 12000, 16000, 4));
  Manifest m;
  m.items = {{"broken", {"a.wav", "gone.wav"}, std::nullopt, 1.0},
             {"files", {"a.wav", "b.wav"}, std::nullopt, 1.0},
             {"synth", {}, 5, 1.0}};
  m.room.rt60 = 0.0;
  std::vector<std::string> seen;
  const auto rep = benchmark_suite(m, quick(), dir.path(), [&](const CellResult& c) { seen.push_back(c.item); });
  ASSERT_EQ(rep.cells.size(), 3u);
  EXPECT_EQ(seen, (std::vector<std::string>{"broken", "files", "synth"}));
  EXPECT_FALSE(rep.cells[0].ok);
  ASSERT_FALSE(rep.cells[0].errors.empty());
  EXPECT_NE(rep.cells[0].errors[0].find("gone.wav"), std::string::npos);
  EXPECT_TRUE(rep.cells[0].runs.empty());
  for (std::size_t c = 1; c < 3; ++c) {
    EXPECT_TRUE(rep.cells[c].ok) << rep.cells[c].item;
    EXPECT_EQ(rep.cells[c].runs.size(), 2u);
    EXPECT_EQ(rep.cells[c].summary.sir.count, 4u);
  }
  EXPECT_FALSE(rep.all_ok());
  EXPECT_EQ(rep.aggregate.runs, 4u);

  std::ostringstream cells, runs;
  write_suite_cells_csv(cells, rep);
  write_suite_runs_csv(runs, rep);
  const auto lc = lines(cells.str());
  ASSERT_EQ(lc.size(), 4u);
  EXPECT_EQ(lc[0].rfind("item,preset,ok,runs,sdr_mean,sdr_std", 0), 0u);
  EXPECT_EQ(lc[1].rfind("broken,stereo,0,0", 0), 0u);
  const auto lr = lines(runs.str());
  ASSERT_EQ(lr.size(), 6u);
  EXPECT_EQ(lr.back().rfind("aggregate,all,all,", 0), 0u);
  EXPECT_EQ(lr.back().back(), '0');
  const auto j = suite_json(rep);
  EXPECT_FALSE(j.at("ok").get<bool>());
  EXPECT_EQ(j.at("cells").size(), 3u);
}

TEST(Suite, MixedSampleRatesRejected) {
  TempDir dir;
  write_wav((dir.path() / "a.wav").string(), noise(1, 8000, 16000, 6));
  write_wav((dir.path() / "b.wav").string(), noise(1, 8000, 8000, 7));
  std::vector<std::string> errors;
  const auto dry = load_item_sources({"mixed", {"a.wav", "b.wav"}, std::nullopt, 1.0}, 16000, dir.path(), errors);
  EXPECT_TRUE(dry.empty());
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_NE(errors[0].find("sample rates"), std::string::npos);
}
