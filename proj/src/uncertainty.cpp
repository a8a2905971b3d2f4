#include "qstorage/uncertainty.hpp"

#include "qstorage/errors.hpp"
#include "qstorage/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

namespace qstorage::mc {

void McConfig::validate() const {
  if (trials < 2) throw ContractViolation("Monte-Carlo needs at least 2 trials");
  if (!(assumed_total_per_setting > 0.0)) {
    throw ContractViolation("assumed_total_per_setting must be positive");
  }
  if (threads < 0) throw ContractViolation("thread count must be non-negative");
}

const MetricSummary& McReport::at(const std::string& name) const {
  for (const auto& m : metrics)
    if (m.name == name) return m;
  throw MissingInput("no Monte-Carlo metric named '" + name + "'");
}

RecordSet poisson_resample(const RecordSet& records, std::mt19937_64& rng) {
  RecordSet out = records;
  for (auto& r : out) {
    for (double& c : r.counts) {
      if (!(c >= 0.0) || !std::isfinite(c)) throw ContractViolation("cannot resample a negative count");
      if (c == 0.0) continue;
      std::poisson_distribution<long long> dist(c);
      c = static_cast<double>(dist(rng));
    }
  }
  return out;
}

namespace {

struct TrialOutcome {
  std::optional<Metrics> metrics;
  std::string error;
};

}  // namespace

McReport propagate(const std::vector<RecordSet>& datasets, const McConfig& config,
                   const Analysis& analysis) {
  config.validate();
  const Metrics reference = analysis(datasets);
  const auto n = static_cast<std::size_t>(config.trials);
  std::vector<TrialOutcome> outcomes(n);

  auto run_trial = [&](std::size_t t) {
    std::mt19937_64 rng(substream_seed(config.seed, t));
    std::vector<RecordSet> resampled;
    resampled.reserve(datasets.size());
    for (const auto& d : datasets) resampled.push_back(poisson_resample(d, rng));
    try {
      Metrics m = analysis(resampled);
      if (m.size() != reference.size()) throw AnalysisFailure("analysis changed its metric list");
      outcomes[t].metrics = std::move(m);
    } catch (const Error& e) {
      outcomes[t].error = e.what();
    }
  };

  unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : static_cast<unsigned>(config.threads);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t t = 0; t < n; ++t) run_trial(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < n; t = next++) run_trial(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  McReport report;
  report.trials = config.trials;
  report.seed = config.seed;
  for (std::size_t t = 0; t < n; ++t)
    if (!outcomes[t].metrics) report.failed_trials.push_back(static_cast<int>(t));
  if (!report.failed_trials.empty() && report.failed_trials.size() * 10 > n) {
    const int first = report.failed_trials.front();
    throw AnalysisFailure("Monte-Carlo trial " + std::to_string(first) + " failed (" +
                          outcomes[static_cast<std::size_t>(first)].error + "); " +
                          std::to_string(report.failed_trials.size()) + " of " +
                          std::to_string(n) + " trials failed");
  }
  const std::size_t good = n - report.failed_trials.size();
  if (good < 2) throw AnalysisFailure("fewer than two Monte-Carlo trials succeeded");

  for (std::size_t k = 0; k < reference.size(); ++k) {
    double sum = 0.0;
    for (const auto& o : outcomes)
      if (o.metrics) sum += (*o.metrics)[k].second;
    const double mean = sum / static_cast<double>(good);
    double ss = 0.0;
    for (const auto& o : outcomes) {
      if (!o.metrics) continue;
      const double d = (*o.metrics)[k].second - mean;
      ss += d * d;
    }
    report.metrics.push_back(
        {reference[k].first, mean, std::sqrt(ss / static_cast<double>(good - 1))});
  }
  return report;
}

}  // namespace qstorage::mc
