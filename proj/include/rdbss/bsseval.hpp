#pragma once

// BSS Eval style source metrics. An estimate is split, in the space of signals
// of length n + L - 1, into
//   target       projection onto L delayed copies of its own reference,
//   interference projection onto L delayed copies of all references, minus target,
//   artifacts    the remainder,
// and SDR/SIR/SAR are energy ratios of those parts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "rdbss/dsp.hpp"
#include "rdbss/signal.hpp"

namespace rdbss {

inline constexpr double kMetricCapDb = 200.0;
inline constexpr std::size_t kDefaultProjectionLength = 512;
inline constexpr double kRidge = 1e-10;

/// 10 log10(num / den), saturating at +/- kMetricCapDb.
inline double ratio_db(double num, double den) {
  if (!(den > 0.0)) return num > 0.0 ? kMetricCapDb : 0.0;
  if (!(num > 0.0)) return -kMetricCapDb;
  return std::clamp(10.0 * std::log10(num / den), -kMetricCapDb, kMetricCapDb);
}

struct Decomposition {
  std::vector<double> target;
  std::vector<double> interference;
  std::vector<double> artifacts;
  /// True when the projection system needed the ridge term.
  bool regularized = false;

  double sdr() const;
  double sir() const;
  double sar() const;
};

namespace detail {

inline double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

inline double energy_of_sum(std::span<const double> a, std::span<const double> b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] + b[i]) * (a[i] + b[i]);
  return e;
}

/// Cholesky factor of a Gram matrix, retried with a relative ridge when singular.
struct GramSolver {
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool regularized = false;

  explicit GramSolver(Eigen::MatrixXd gram) {
    llt.compute(gram);
    if (llt.info() != Eigen::Success) {
      const double scale = std::max(gram.diagonal().mean(), 1e-300);
      gram.diagonal().array() += kRidge * scale;
      llt.compute(gram);
      regularized = true;
    }
  }
};

} // namespace detail

inline double Decomposition::sdr() const {
  return ratio_db(detail::energy(target), detail::energy_of_sum(interference, artifacts));
}
inline double Decomposition::sir() const {
  return ratio_db(detail::energy(target), detail::energy(interference));
}
inline double Decomposition::sar() const {
  return ratio_db(detail::energy_of_sum(target, interference), detail::energy(artifacts));
}

/// Precomputed projection systems for one set of references.
class BssProjector {
public:
  BssProjector(std::vector<std::vector<double>> references, std::size_t proj_len)
      : refs_(std::move(references)), taps_(proj_len) {
    if (refs_.empty()) throw ParameterError("need at least one reference");
    if (taps_ == 0) throw ParameterError("projection length must be positive");
    length_ = refs_.front().size();
    for (const auto& r : refs_) {
      if (r.size() != length_) throw ParameterError("references must have equal length");
    }
    const std::size_t count = refs_.size();
    const auto L = static_cast<Eigen::Index>(taps_);

    // corr[i][j][l] = sum_u r_i[u] r_j[u + l]
    std::vector<std::vector<std::vector<double>>> corr(count, std::vector<std::vector<double>>(count));
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) corr[i][j] = dsp::correlate(refs_[i], refs_[j], taps_ - 1);
    }

    Eigen::MatrixXd gram(L * static_cast<Eigen::Index>(count), L * static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        for (Eigen::Index a = 0; a < L; ++a) {
          for (Eigen::Index b = 0; b < L; ++b) {
            gram(static_cast<Eigen::Index>(i) * L + a, static_cast<Eigen::Index>(j) * L + b) =
                a >= b ? corr[i][j][static_cast<std::size_t>(a - b)]
                       : corr[j][i][static_cast<std::size_t>(b - a)];
          }
        }
      }
    }
    all_ = std::make_unique<detail::GramSolver>(gram);
    for (std::size_t i = 0; i < count; ++i) {
      own_.push_back(std::make_unique<detail::GramSolver>(
          gram.block(static_cast<Eigen::Index>(i) * L, static_cast<Eigen::Index>(i) * L, L, L)));
    }
  }

  std::size_t references() const noexcept { return refs_.size(); }
  std::size_t signal_length() const noexcept { return length_; }
  std::size_t projection_length() const noexcept { return taps_; }

  Decomposition decompose(std::span<const double> estimate, std::size_t target) const {
    if (estimate.size() != length_) {
      throw ParameterError("estimate length " + std::to_string(estimate.size()) +
                           " differs from reference length " + std::to_string(length_));
    }
    if (target >= refs_.size()) throw ParameterError("target reference index out of range");

    const std::size_t out_len = length_ + taps_ - 1;
    std::vector<std::vector<double>> corr_est(refs_.size());
    for (std::size_t i = 0; i < refs_.size(); ++i) {
      corr_est[i] = dsp::correlate(refs_[i], estimate, taps_ - 1);
    }

    Decomposition d;
    std::vector<std::size_t> just_target{target};
    std::vector<std::size_t> everyone(refs_.size());
    std::iota(everyone.begin(), everyone.end(), std::size_t{0});
    d.target = project(*own_[target], just_target, corr_est, out_len);
    const auto full = project(*all_, everyone, corr_est, out_len);
    d.regularized = own_[target]->regularized || all_->regularized;

    d.interference.resize(out_len);
    d.artifacts.resize(out_len);
    for (std::size_t t = 0; t < out_len; ++t) {
      d.interference[t] = full[t] - d.target[t];
      const double e = t < length_ ? estimate[t] : 0.0;
      d.artifacts[t] = e - full[t];
    }
    return d;
  }

private:
  std::vector<double> project(const detail::GramSolver& solver,
                              const std::vector<std::size_t>& which,
                              const std::vector<std::vector<double>>& corr_est,
                              std::size_t out_len) const {
    const auto L = static_cast<Eigen::Index>(taps_);
    Eigen::VectorXd rhs(L * static_cast<Eigen::Index>(which.size()));
    for (std::size_t w = 0; w < which.size(); ++w) {
      for (Eigen::Index a = 0; a < L; ++a) {
        rhs(static_cast<Eigen::Index>(w) * L + a) = corr_est[which[w]][static_cast<std::size_t>(a)];
      }
    }
    const Eigen::VectorXd coef = solver.llt.solve(rhs);
    std::vector<double> out(out_len, 0.0);
    for (std::size_t w = 0; w < which.size(); ++w) {
      std::vector<double> filter(taps_);
      for (Eigen::Index a = 0; a < L; ++a) filter[static_cast<std::size_t>(a)] = coef(static_cast<Eigen::Index>(w) * L + a);
      const auto part = dsp::convolve(refs_[which[w]], filter, out_len);
      for (std::size_t t = 0; t < out_len; ++t) out[t] += part[t];
    }
    return out;
  }

  std::vector<std::vector<double>> refs_;
  std::size_t taps_;
  std::size_t length_ = 0;
  std::unique_ptr<detail::GramSolver> all_;
  std::vector<std::unique_ptr<detail::GramSolver>> own_;
};

/// One-shot decomposition of `estimate` against `references[target]`.
inline Decomposition decompose(std::span<const double> estimate,
                               const std::vector<std::vector<double>>& references,
                               std::size_t target,
                               std::size_t proj_len = kDefaultProjectionLength) {
  return BssProjector(references, proj_len).decompose(estimate, target);
}

struct SourceMetrics {
  double sdr_db = 0.0;
  double sir_db = 0.0;
  double sar_db = 0.0;
};

struct SeparationMetrics {
  /// Indexed by estimate.
  std::vector<SourceMetrics> sources;
  /// permutation[estimate] = reference index.
  std::vector<std::size_t> permutation;
  std::size_t assignments_evaluated = 0;
  bool regularized = false;

  double mean_sdr() const { return mean_of(&SourceMetrics::sdr_db); }
  double mean_sir() const { return mean_of(&SourceMetrics::sir_db); }
  double mean_sar() const { return mean_of(&SourceMetrics::sar_db); }

private:
  double mean_of(double SourceMetrics::*field) const {
    if (sources.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : sources) acc += s.*field;
    return acc / static_cast<double>(sources.size());
  }
};

/// Metrics under the estimate-to-reference assignment with the highest mean
/// SIR; the identity assignment wins ties.
inline SeparationMetrics evaluate(const MultichannelSignal& estimates,
                                  const MultichannelSignal& references,
                                  std::size_t proj_len = kDefaultProjectionLength) {
  if (estimates.channels() != references.channels()) {
    throw ParameterError("estimates and references must have the same source count");
  }
  if (estimates.samples() != references.samples()) {
    throw ParameterError("estimates and references must have equal length");
  }
  const std::size_t count = references.channels();
  std::vector<std::vector<double>> refs;
  for (std::size_t i = 0; i < count; ++i) {
    auto ch = references.channel(i);
    refs.emplace_back(ch.begin(), ch.end());
  }
  const BssProjector projector(std::move(refs), proj_len);

  // table[j][i]: estimate j scored against reference i.
  std::vector<std::vector<SourceMetrics>> table(count, std::vector<SourceMetrics>(count));
  bool regularized = false;
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t i = 0; i < count; ++i) {
      const auto d = projector.decompose(estimates.channel(j), i);
      table[j][i] = {d.sdr(), d.sir(), d.sar()};
      regularized = regularized || d.regularized;
    }
  }

  SeparationMetrics best;
  best.regularized = regularized;
  std::vector<std::size_t> perm(count);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best_sir = -std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  do {
    ++evaluated;
    double sir = 0.0;
    for (std::size_t j = 0; j < count; ++j) sir += table[j][perm[j]].sir_db;
    sir /= static_cast<double>(count);
    if (sir > best_sir) {
      best_sir = sir;
      best.permutation = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  best.assignments_evaluated = evaluated;
  for (std::size_t j = 0; j < count; ++j) best.sources.push_back(table[j][best.permutation[j]]);
  return best;
}

} // namespace rdbss
