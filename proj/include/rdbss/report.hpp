#pragma once

// CSV and JSON writers for runs, benchmark cells and room geometry.

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rdbss/pipeline.hpp"
#include "rdbss/roomsim.hpp"

namespace rdbss {

namespace detail {

inline void csv_metrics_rows(std::ostream& os, const std::string& item, std::size_t run,
                             const SeparationMetrics& m) {
  for (std::size_t s = 0; s < m.sources.size(); ++s) {
    const auto& v = m.sources[s];
    os << item << ',' << run << ',' << s << ',' << v.sdr_db << ',' << v.sir_db << ','
       << v.sar_db << ',' << m.permutation[s] << '\n';
  }
}

} // namespace detail

/// Columns item,run,source,sdr,sir,sar,permutation; `permutation` is the
/// reference index assigned to the estimate. Online runs add a second row set
/// labeled `<item>/filter-then-apply`, and their primary rows are `<item>/streamed`.
inline void write_metrics_csv(std::ostream& os, const std::vector<RunResult>& runs) {
  os << "item,run,source,sdr,sir,sar,permutation\n";
  const auto old = os.precision(10);
  for (const auto& r : runs) {
    const bool online = r.mode == RunMode::online;
    if (r.metrics) detail::csv_metrics_rows(os, online ? r.item + "/streamed" : r.item, r.repeat, *r.metrics);
    if (r.applied_metrics) {
      detail::csv_metrics_rows(os, r.item + "/filter-then-apply", r.repeat, *r.applied_metrics);
    }
  }
  os.precision(old);
}

inline nlohmann::json to_json(const stats::BoxStats& b) {
  return {{"mean", b.mean}, {"std", b.stddev}, {"min", b.min},     {"q1", b.q1},
          {"median", b.median}, {"q3", b.q3},  {"max", b.max},     {"count", b.count}};
}

inline nlohmann::json to_json(const MetricSummary& s) {
  return {{"sdr", to_json(s.sdr)},
          {"sir", to_json(s.sir)},
          {"sar", to_json(s.sar)},
          {"real_time_factor", to_json(s.real_time_factor)},
          {"runs", s.runs},
          {"failed_runs", s.failed_runs}};
}

inline nlohmann::json to_json(const SeparationMetrics& m) {
  nlohmann::json src = nlohmann::json::array();
  for (const auto& s : m.sources) src.push_back({{"sdr", s.sdr_db}, {"sir", s.sir_db}, {"sar", s.sar_db}});
  return {{"sources", src},
          {"permutation", m.permutation},
          {"mean_sdr", m.mean_sdr()},
          {"mean_sir", m.mean_sir()},
          {"mean_sar", m.mean_sar()},
          {"regularized", m.regularized}};
}

inline nlohmann::json to_json(const StreamReport& s) {
  return {{"chunk_size", s.chunk_size},
          {"sample_rate", s.sample_rate},
          {"algorithmic_delay_ms", s.algorithmic_delay_ms},
          {"samples_in", s.samples_in},
          {"samples_out", s.samples_out},
          {"publications", s.publications},
          {"skipped_publications", s.skipped_publications},
          {"worker_failures", s.worker_failures},
          {"snapshot_reads", s.snapshot_reads},
          {"torn_reads", s.torn_reads},
          {"swap_positions", s.swap_positions},
          {"consumer_seconds", s.consumer_seconds},
          {"worker_seconds", s.worker_seconds}};
}

inline nlohmann::json to_json(const RunResult& r) {
  nlohmann::json j = {{"item", r.item},
                      {"run", r.repeat},
                      {"seed", r.seed},
                      {"mode", to_string(r.mode)},
                      {"ok", r.ok},
                      {"objective", std::isfinite(r.objective) ? nlohmann::json(r.objective) : nlohmann::json()},
                      {"accepted_iterations", r.trace.accepted_count()},
                      {"evaluations", r.trace.evaluations},
                      {"processing_seconds", r.processing_seconds},
                      {"real_time_factor", r.real_time_factor},
                      {"coefficients", r.x_best},
                      {"log", r.log}};
  if (!r.ok) j["error"] = r.error;
  if (r.metrics) j[r.mode == RunMode::online ? "streamed" : "metrics"] = to_json(*r.metrics);
  if (r.applied_metrics) j["filter_then_apply"] = to_json(*r.applied_metrics);
  if (r.stream) j["stream"] = to_json(*r.stream);
  return j;
}

/// Aggregate over sources x runs, plus every run.
inline nlohmann::json runs_json(const std::vector<RunResult>& runs) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : runs) list.push_back(to_json(r));
  nlohmann::json j = {{"aggregate", to_json(summarize(runs))}, {"runs", list}};
  std::vector<const RunResult*> applied;
  for (const auto& r : runs) {
    if (r.applied_metrics) applied.push_back(&r);
  }
  if (!applied.empty()) {
    // Summaries of the filter-then-apply metrics for online runs.
    std::vector<RunResult> shadow;
    for (const auto* r : applied) {
      RunResult s;
      s.ok = r->ok;
      s.real_time_factor = r->real_time_factor;
      s.metrics = r->applied_metrics;
      shadow.push_back(std::move(s));
    }
    j["aggregate_filter_then_apply"] = to_json(summarize(shadow));
  }
  return j;
}

/// One row per run (mean over sources) followed by an aggregate row.
inline void write_suite_runs_csv(std::ostream& os, const SuiteReport& rep) {
  os << "item,preset,run,sdr,sir,sar,real_time_factor,ok\n";
  const auto old = os.precision(10);
  for (const auto& c : rep.cells) {
    for (const auto& r : c.runs) {
      os << c.item << ',' << to_string(c.preset) << ',' << r.repeat << ',';
      if (r.metrics) {
        os << r.metrics->mean_sdr() << ',' << r.metrics->mean_sir() << ',' << r.metrics->mean_sar();
      } else {
        os << ",,";
      }
      os << ',' << r.real_time_factor << ',' << (r.ok ? 1 : 0) << '\n';
    }
  }
  const auto& a = rep.aggregate;
  os << "aggregate,all,all," << a.sdr.mean << ',' << a.sir.mean << ',' << a.sar.mean << ','
     << a.real_time_factor.mean << ',' << (rep.all_ok() ? 1 : 0) << '\n';
  os.precision(old);
}

/// Per-cell mean, std and quartiles of each metric.
inline void write_suite_cells_csv(std::ostream& os, const SuiteReport& rep) {
  os << "item,preset,ok,runs";
  for (const char* m : {"sdr", "sir", "sar"}) {
    for (const char* f : {"mean", "std", "min", "q1", "median", "q3", "max"}) os << ',' << m << '_' << f;
  }
  os << ",rtf_mean,real_time_capable\n";
  const auto old = os.precision(10);
  for (const auto& c : rep.cells) {
    os << c.item << ',' << to_string(c.preset) << ',' << (c.ok ? 1 : 0) << ',' << c.runs.size();
    for (const auto* b : {&c.summary.sdr, &c.summary.sir, &c.summary.sar}) {
      os << ',' << b->mean << ',' << b->stddev << ',' << b->min << ',' << b->q1 << ',' << b->median
         << ',' << b->q3 << ',' << b->max;
    }
    os << ',' << c.summary.real_time_factor.mean << ',' << (c.real_time_capable ? 1 : 0) << '\n';
  }
  os.precision(old);
}

inline nlohmann::json suite_json(const SuiteReport& rep) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : rep.cells) {
    cells.push_back({{"item", c.item},
                     {"preset", to_string(c.preset)},
                     {"ok", c.ok},
                     {"errors", c.errors},
                     {"real_time_capable", c.real_time_capable},
                     {"summary", to_json(c.summary)}});
  }
  return {{"cells", cells}, {"aggregate", to_json(rep.aggregate)}, {"ok", rep.all_ok()}};
}

/// Sidecar describing the simulated scene.
inline nlohmann::json geometry_json(const RoomSpec& room, const std::string& preset_name) {
  auto points = [](const std::vector<Vec3>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : v) a.push_back({p[0], p[1], p[2]});
    return a;
  };
  const auto abs = absorption_from_rt60(room);
  return {{"dimensions", {room.dimensions[0], room.dimensions[1], room.dimensions[2]}},
          {"rt60", room.rt60},
          {"absorption", abs.alpha},
          {"anechoic", abs.anechoic},
          {"sources", points(room.source_positions)},
          {"mics", points(room.mic_positions)},
          {"preset", preset_name},
          {"sample_rate", room.sample_rate},
          {"max_image_order", room.max_image_order},
          {"speed_of_sound", room.speed_of_sound},
          {"kernel", to_string(room.kernel)},
          {"max_delay_samples",
           default_max_delay(room.mic_positions, room.sample_rate, room.speed_of_sound)},
          {"reference_mic", 0}};
}

} // namespace rdbss
