#pragma once

// Monte-Carlo propagation of Poissonian counting noise.

#include "qstorage/tomography.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace qstorage::mc {

struct McConfig {
  int trials = 1000;
  std::uint64_t seed = 20120101;
  /// Coincidences per setting assumed when probabilities are turned into counts.
  double assumed_total_per_setting = 5000.0;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 1;

  /// Throws ContractViolation unless trials >= 2, N > 0 and threads >= 0.
  void validate() const;
};

/// One dataset per entry; an analysis sees all of them resampled together.
using RecordSet = std::vector<tomo::CoincidenceRecord>;
using Metrics = std::vector<std::pair<std::string, double>>;
using Analysis = std::function<Metrics(const std::vector<RecordSet>&)>;

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation
};

struct McReport {
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<MetricSummary> metrics;
  std::vector<int> failed_trials;

  /// Throws MissingInput for an unknown metric name.
  const MetricSummary& at(const std::string& name) const;
};

/// Each count replaced by an independent Poisson draw with that mean.
RecordSet poisson_resample(const RecordSet& records, std::mt19937_64& rng);

/// Runs `analysis` on `config.trials` resampled copies of `datasets`. Trial t
/// draws from substream (seed, t), so results do not depend on scheduling.
/// Failed trials are listed in the report; more than 10% failures throw
/// AnalysisFailure naming the first failing trial.
McReport propagate(const std::vector<RecordSet>& datasets, const McConfig& config,
                   const Analysis& analysis);

}  // namespace qstorage::mc
