#include "occdet/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "occdet/rng.hpp"

namespace occdet {

std::vector<SensorSample> resample(const std::vector<SensorSample>& samples,
                                   std::int64_t interval_seconds) {
  if (interval_seconds <= 0) {
    throw ValueError("resample interval must be positive");
  }
  std::vector<SensorSample> out;
  if (samples.empty()) return out;

  auto bucket_of = [interval_seconds](std::int64_t t) {
    // Floor division so pre-epoch timestamps bucket correctly too.
    std::int64_t q = t / interval_seconds;
    if (t % interval_seconds < 0) --q;
    return q;
  };

  std::size_t i = 0;
  std::int64_t prev_t = samples.front().timestamp;
  while (i < samples.size()) {
    const std::int64_t bucket = bucket_of(samples[i].timestamp);
    std::array<double, kNumChannels> sums{};
    std::array<int, kNumChannels> counts{};
    int occupied_count = 0;
    int total = 0;
    for (; i < samples.size() && bucket_of(samples[i].timestamp) == bucket; ++i) {
      const SensorSample& s = samples[i];
      if (s.timestamp < prev_t) {
        throw ValueError("resample input is not time-ordered");
      }
      prev_t = s.timestamp;
      for (int c = 0; c < kNumChannels; ++c) {
        if (s.channels[c].has_value()) {
          sums[c] += *s.channels[c];
          counts[c] += 1;
        }
      }
      occupied_count += s.occupied;
      ++total;
    }
    SensorSample agg;
    agg.timestamp = bucket * interval_seconds;
    for (int c = 0; c < kNumChannels; ++c) {
      if (counts[c] > 0) agg.channels[c] = sums[c] / counts[c];
    }
    // Tie at exactly one half counts as occupied.
    agg.occupied = (2 * occupied_count >= total) ? 1 : 0;
    out.push_back(agg);
  }
  return out;
}

FeatureMatrix build_matrix(const std::vector<SensorSample>& samples,
                           const FeatureSet& features) {
  const std::size_t n_features = features.size();
  const std::size_t n_rows = samples.size();

  // Forward-filled channel values per requested column; NaN where unfillable.
  std::vector<double> filled(n_rows * n_features);
  std::vector<std::size_t> gap_rows(n_features, 0);
  for (std::size_t f = 0; f < n_features; ++f) {
    const Channel c = features.channels()[f];
    double last = 0.0;
    int run = kMaxForwardFill + 1;  // no value to carry yet
    for (std::size_t r = 0; r < n_rows; ++r) {
      const auto& v = samples[r].channel(c);
      if (v.has_value()) {
        last = *v;
        run = 0;
        filled[r * n_features + f] = last;
      } else if (++run <= kMaxForwardFill) {
        filled[r * n_features + f] = last;
      } else {
        filled[r * n_features + f] = std::numeric_limits<double>::quiet_NaN();
        gap_rows[f] += 1;
      }
    }
  }

  std::vector<char> keep(n_rows, 1);
  std::size_t kept = 0;
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (std::size_t f = 0; f < n_features; ++f) {
      if (std::isnan(filled[r * n_features + f])) {
        keep[r] = 0;
        break;
      }
    }
    kept += keep[r];
  }

  if (n_rows > 0 && 2 * (n_rows - kept) > n_rows) {
    const std::size_t worst =
        std::max_element(gap_rows.begin(), gap_rows.end()) - gap_rows.begin();
    const Channel c = features.channels()[worst];
    throw AvailabilityError(
        c, std::string("channel ") + std::string(channel_name(c)) + " is missing in " +
               std::to_string(gap_rows[worst]) + " of " + std::to_string(n_rows) +
               " rows; more than half the rows would be dropped");
  }

  FeatureMatrix m;
  m.features = features;
  m.rows = kept;
  m.values.reserve(kept * n_features);
  m.labels.reserve(kept);
  m.source_rows.reserve(kept);
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!keep[r]) continue;
    for (std::size_t f = 0; f < n_features; ++f) {
      m.values.push_back(filled[r * n_features + f]);
    }
    m.labels.push_back(samples[r].occupied);
    m.source_rows.push_back(r);
  }
  return m;
}

Standardizer fit_standardizer(const FeatureMatrix& train) {
  if (train.rows < 2) {
    throw ValueError("standardizer needs at least 2 rows, got " +
                     std::to_string(train.rows));
  }
  const std::size_t d = train.cols();
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 1.0);
  for (std::size_t r = 0; r < train.rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += train.at(r, c);
  }
  for (std::size_t c = 0; c < d; ++c) s.mean[c] /= static_cast<double>(train.rows);
  for (std::size_t c = 0; c < d; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < train.rows; ++r) {
      const double dv = train.at(r, c) - s.mean[c];
      acc += dv * dv;
    }
    const double var = acc / static_cast<double>(train.rows);  // population
    s.stddev[c] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

FeatureMatrix Standardizer::apply(const FeatureMatrix& m) const {
  if (m.cols() != mean.size()) {
    throw ValueError("standardizer fitted on " + std::to_string(mean.size()) +
                     " columns, matrix has " + std::to_string(m.cols()));
  }
  FeatureMatrix out = m;
  const std::size_t d = m.cols();
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      out.at(r, c) = (m.at(r, c) - mean[c]) / stddev[c];
    }
  }
  return out;
}

FeatureMatrix Standardizer::inverse(const FeatureMatrix& m) const {
  if (m.cols() != mean.size()) {
    throw ValueError("standardizer fitted on " + std::to_string(mean.size()) +
                     " columns, matrix has " + std::to_string(m.cols()));
  }
  FeatureMatrix out = m;
  const std::size_t d = m.cols();
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      out.at(r, c) = m.at(r, c) * stddev[c] + mean[c];
    }
  }
  return out;
}

FoldAssignment split_folds(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) {
    throw ValueError("fold count must be at least 2");
  }
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw ValueError("labels must be 0 or 1");
    }
    by_class[labels[i]].push_back(i);
  }
  for (int cls = 0; cls < 2; ++cls) {
    if (by_class[cls].size() < static_cast<std::size_t>(k)) {
      throw ValueError("class " + std::to_string(cls) + " has " +
                       std::to_string(by_class[cls].size()) + " members, needs at least " +
                       std::to_string(k) + " for " + std::to_string(k) + "-fold splitting");
    }
  }

  FoldAssignment fa;
  fa.k = k;
  fa.fold_of_row.assign(labels.size(), 0);
  // One continuous round-robin deal across both shuffled classes keeps both
  // the per-class and the total fold sizes within one of each other.
  int cursor = 0;
  for (int cls = 0; cls < 2; ++cls) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(by_class[cls]);
    for (std::size_t idx : by_class[cls]) {
      fa.fold_of_row[idx] = cursor;
      cursor = (cursor + 1) % k;
    }
  }
  return fa;
}

}  // namespace occdet
