#pragma once

// Table-style benchmark: every manifest item is simulated with every array
// preset and separated `repeats` times.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rdbss/pipeline.hpp"
#include "rdbss/roomsim.hpp"
#include "rdbss/synth.hpp"
#include "rdbss/wav.hpp"

namespace rdbss {

/// Dry sources of an item. Problems are appended to `errors` and yield an empty list.
inline std::vector<MultichannelSignal> load_item_sources(const ManifestItem& item,
                                                         int default_rate,
                                                         const std::filesystem::path& base,
                                                         std::vector<std::string>& errors) {
  if (item.files.empty()) {
    if (!item.synthetic_seed) {
      errors.push_back(item.name + ": no source files and no synthetic seed");
      return {};
    }
    const auto n = static_cast<std::size_t>(std::llround(item.seconds * default_rate));
    return synthetic_pair(n, default_rate, *item.synthetic_seed);
  }

  bool missing = false;
  for (const auto& f : item.files) {
    const auto p = base / f;
    if (!std::filesystem::exists(p)) {
      errors.push_back(item.name + ": missing input file " + p.string());
      missing = true;
    }
  }
  if (missing) return {};

  std::vector<MultichannelSignal> out;
  try {
    for (const auto& f : item.files) {
      const auto sig = read_wav((base / f).string());
      // Multichannel files contribute their first channel.
      MultichannelSignal mono(1, sig.samples(), sig.sample_rate());
      auto c0 = sig.channel(0);
      std::copy(c0.begin(), c0.end(), mono.channel(0).begin());
      out.push_back(std::move(mono));
    }
  } catch (const std::exception& e) {
    errors.push_back(item.name + ": " + e.what());
    return {};
  }
  for (const auto& s : out) {
    if (s.sample_rate() != out.front().sample_rate()) {
      errors.push_back(item.name + ": sources have different sample rates");
      return {};
    }
  }
  return out;
}

/// Runs every (item, preset) cell. A failing cell is recorded and the rest still run.
inline SuiteReport benchmark_suite(const Manifest& manifest, const RunConfig& cfg,
                                   const std::filesystem::path& base = ".",
                                   const std::function<void(const CellResult&)>& on_cell = {}) {
  cfg.validate();
  SuiteReport report;
  std::vector<const RunResult*> all;

  for (const auto& item : manifest.items) {
    std::vector<std::string> load_errors;
    const auto dry = load_item_sources(item, manifest.room.sample_rate, base, load_errors);

    for (const auto preset : manifest.presets) {
      CellResult cell;
      cell.item = item.name;
      cell.preset = preset;
      cell.errors = load_errors;
      if (dry.empty()) {
        cell.ok = false;
      } else {
        try {
          RoomSpec room = manifest.room;
          room.mic_positions = mic_array(preset, manifest.array_center, manifest.array_size);
          room.sample_rate = dry.front().sample_rate();
          auto input = input_from_simulation(item.name + "/" + to_string(preset), room,
                                             simulate(room, dry));
          cell.runs = run_repeats(input, cfg);
        } catch (const std::exception& e) {
          cell.ok = false;
          cell.errors.push_back(item.name + "/" + to_string(preset) + ": " + e.what());
        }
      }
      for (auto& r : cell.runs) {
        if (!r.ok) {
          cell.ok = false;
          cell.errors.push_back(r.item + " run " + std::to_string(r.repeat) + ": " + r.error);
        }
        // Keep metrics, drop audio.
        r.estimates = MultichannelSignal();
        r.applied.reset();
      }
      cell.summary = summarize(cell.runs);
      cell.real_time_capable =
          !cell.runs.empty() && std::all_of(cell.runs.begin(), cell.runs.end(), [](const auto& r) {
            return r.ok && r.real_time_factor < 1.0;
          });
      report.cells.push_back(std::move(cell));
      if (on_cell) on_cell(report.cells.back());
    }
  }
  for (const auto& c : report.cells) {
    for (const auto& r : c.runs) all.push_back(&r);
  }
  report.aggregate = summarize(all);
  return report;
}

} // namespace rdbss
