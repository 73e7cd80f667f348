#pragma once

// Random Directions: a zeroth-order minimizer that probes the objective with
// P Gaussian search vectors per iteration, each restricted to a random subset
// of coordinates, with a standard deviation annealed quadratically from
// `starting_scale` to `end_scale`. A successful probe is refined by a coarse
// power-of-two line search. Only strict improvements are accepted, so the best
// value never increases.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdbss/executor.hpp"
#include "rdbss/rng.hpp"
#include "rdbss/signal.hpp"

namespace rdbss {

struct SearchConfig {
  std::size_t iterations = 1000;
  std::size_t probes = 8;
  double starting_scale = 4.0;
  double end_scale = 0.0;
  std::size_t subspace_dim = 8;
  int min_exponent = -8;
  int max_exponent = 8;
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations == 0) throw ParameterError("iterations must be positive");
    if (probes == 0) throw ParameterError("probes must be positive");
    if (subspace_dim == 0) throw ParameterError("subspace_dim must be positive");
    if (!(starting_scale >= 0.0) || !(end_scale >= 0.0)) {
      throw ParameterError("scales must be nonnegative");
    }
    if (end_scale > starting_scale) {
      throw ParameterError("end_scale must not exceed starting_scale");
    }
    if (min_exponent > max_exponent) {
      throw ParameterError("empty line-search exponent range");
    }
  }

  std::size_t line_search_points() const {
    return static_cast<std::size_t>(max_exponent - min_exponent + 1);
  }
};

struct IterationRecord {
  std::size_t iteration = 0;
  double scale = 0.0;
  double f_best = 0.0;
  bool accepted = false;
  std::optional<int> k_best;
};

struct OptimizationTrace {
  double initial_value = 0.0;
  /// Probe and line-search evaluations; the single evaluation of f(x0) is not counted.
  std::size_t evaluations = 0;
  std::vector<IterationRecord> records;

  std::size_t accepted_count() const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const auto& r) { return r.accepted; }));
  }

  bool non_increasing() const {
    double prev = initial_value;
    for (const auto& r : records) {
      if (r.f_best > prev) return false;
      prev = r.f_best;
    }
    return true;
  }
};

/// CSV with columns `iteration,scale,f_best,accepted,k_best`; k_best is empty for rejected iterations.
inline void write_trace_csv(std::ostream& os, const OptimizationTrace& trace) {
  os << "iteration,scale,f_best,accepted,k_best\n";
  const auto old_precision = os.precision(17);
  for (const auto& r : trace.records) {
    os << r.iteration << ',' << r.scale << ',' << r.f_best << ',' << (r.accepted ? 1 : 0) << ',';
    if (r.k_best) os << *r.k_best;
    os << '\n';
  }
  os.precision(old_precision);
}

/// Thrown when the objective fails mid-run; carries everything recorded so far.
class OptimizationAborted : public std::runtime_error {
public:
  OptimizationAborted(const std::string& what, OptimizationTrace trace, std::vector<double> x_best,
                      std::exception_ptr cause)
      : std::runtime_error(what), trace_(std::move(trace)), x_best_(std::move(x_best)),
        cause_(std::move(cause)) {}

  const OptimizationTrace& trace() const noexcept { return trace_; }
  const std::vector<double>& x_best() const noexcept { return x_best_; }
  std::exception_ptr cause() const noexcept { return cause_; }

private:
  OptimizationTrace trace_;
  std::vector<double> x_best_;
  std::exception_ptr cause_;
};

/// endscale + (startingscale - endscale) * (1 - m/T)^2
inline double scale_schedule(std::size_t m, const SearchConfig& config) {
  if (m == 0) return config.starting_scale;
  if (m >= config.iterations) return config.end_scale;
  const double remaining = 1.0 - static_cast<double>(m) / static_cast<double>(config.iterations);
  return config.end_scale + (config.starting_scale - config.end_scale) * remaining * remaining;
}

/// Draws a search vector with exactly min(subspace_dim, dim) nonzero entries at
/// distinct uniformly chosen indices; nonzeros are N(0, scale^2). A zero scale
/// yields the zero vector.
template <class Rng>
std::vector<double> sample_search_vector(std::size_t dim, std::size_t subspace_dim, double scale,
                                         Rng& rng) {
  if (dim == 0) throw ParameterError("search dimension must be positive");
  std::vector<double> v(dim, 0.0);
  if (scale == 0.0) return v;
  const std::size_t active = std::min(subspace_dim, dim);

  // Partial Fisher-Yates: the first `active` slots become a uniform subset.
  std::vector<std::size_t> index(dim);
  std::iota(index.begin(), index.end(), std::size_t{0});
  for (std::size_t i = 0; i < active; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, dim - 1);
    std::swap(index[i], index[pick(rng)]);
  }
  std::normal_distribution<double> gauss(0.0, scale);
  for (std::size_t i = 0; i < active; ++i) {
    double draw = gauss(rng);
    // An exact zero draw would break the sparsity count.
    while (draw == 0.0) draw = gauss(rng);
    v[index[i]] = draw;
  }
  return v;
}

namespace detail {

inline double sanitize(double value) {
  return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

inline void axpy(std::span<const double> x, double alpha, std::span<const double> v,
                 std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + alpha * v[i];
}

} // namespace detail

struct LineSearchResult {
  int k_best = 0;
  double f_best = std::numeric_limits<double>::infinity();
  std::vector<double> x_best;
  std::size_t evaluations = 0;
};

/// Evaluates f(x + 2^k v) for every k in [min_exponent, max_exponent] and
/// returns the minimizer. Candidates are visited as 0, -1, +1, -2, +2, ...
/// and only strict improvements replace the incumbent, so ties go to smaller
/// |k| and then to negative k. Non-finite values count as +inf.
template <class Objective>
LineSearchResult line_search(Objective&& f, std::span<const double> x_best,
                             std::span<const double> v, int min_exponent, int max_exponent) {
  if (x_best.size() != v.size()) throw ParameterError("line search dimension mismatch");
  if (min_exponent > max_exponent) throw ParameterError("empty line-search exponent range");

  std::vector<int> order;
  const int reach = std::max(std::abs(min_exponent), std::abs(max_exponent));
  auto in_range = [&](int k) { return k >= min_exponent && k <= max_exponent; };
  if (in_range(0)) order.push_back(0);
  for (int mag = 1; mag <= reach; ++mag) {
    if (in_range(-mag)) order.push_back(-mag);
    if (in_range(mag)) order.push_back(mag);
  }

  LineSearchResult result;
  std::vector<double> candidate(x_best.size());
  for (int k : order) {
    detail::axpy(x_best, std::ldexp(1.0, k), v, candidate);
    const double value = detail::sanitize(f(std::span<const double>(candidate)));
    ++result.evaluations;
    if (result.x_best.empty() || value < result.f_best) {
      result.k_best = k;
      result.f_best = value;
      result.x_best = candidate;
    }
  }
  return result;
}

struct MinimizeResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  OptimizationTrace trace;
};

/// Random Directions minimization of `f` from `x0`.
///
/// Probe p of iteration m draws from a stream keyed by (seed, m, p), so the
/// result is identical whether the executor evaluates probes serially or
/// concurrently. `f` must be callable concurrently when a parallel executor
/// is used.
template <class Objective, class Executor = SerialExecutor>
MinimizeResult random_directions_minimize(Objective&& f, std::span<const double> x0,
                                          const SearchConfig& config, Executor&& executor = {}) {
  config.validate();
  if (x0.empty()) throw ParameterError("starting point must not be empty");
  for (double v : x0) {
    if (!std::isfinite(v)) throw ParameterError("starting point must be finite");
  }

  const std::size_t dim = x0.size();
  MinimizeResult result;
  result.x_best.assign(x0.begin(), x0.end());
  auto& trace = result.trace;
  trace.records.reserve(config.iterations);

  auto abort = [&](const char* stage) {
    throw OptimizationAborted(std::string("objective failed during ") + stage, trace,
                              result.x_best, std::current_exception());
  };

  try {
    result.f_best = detail::sanitize(f(std::span<const double>(result.x_best)));
  } catch (...) {
    abort("initial evaluation");
  }
  trace.initial_value = result.f_best;

  std::vector<std::vector<double>> directions(config.probes);
  std::vector<double> values(config.probes);

  for (std::size_t m = 0; m < config.iterations; ++m) {
    const double scale = scale_schedule(m, config);

    try {
      executor.for_each(config.probes, [&](std::size_t p) {
        auto rng = make_engine(config.seed, m, p);
        directions[p] = sample_search_vector(dim, config.subspace_dim, scale, rng);
        std::vector<double> probe(dim);
        detail::axpy(result.x_best, 1.0, directions[p], probe);
        values[p] = detail::sanitize(f(std::span<const double>(probe)));
      });
    } catch (...) {
      abort("probe evaluation");
    }
    trace.evaluations += config.probes;

    const auto best_probe = static_cast<std::size_t>(
        std::distance(values.begin(), std::min_element(values.begin(), values.end())));

    IterationRecord record;
    record.iteration = m;
    record.scale = scale;

    if (values[best_probe] < result.f_best) {
      LineSearchResult refined;
      try {
        refined = line_search(f, result.x_best, directions[best_probe], config.min_exponent,
                              config.max_exponent);
      } catch (...) {
        abort("line search");
      }
      trace.evaluations += refined.evaluations;
      // k = 0 is always a candidate, so this only fails for a non-deterministic objective.
      if (refined.f_best < result.f_best) {
        result.x_best = std::move(refined.x_best);
        result.f_best = refined.f_best;
        record.accepted = true;
        record.k_best = refined.k_best;
      }
    }
    record.f_best = result.f_best;
    trace.records.push_back(record);
  }
  return result;
}

} // namespace rdbss
