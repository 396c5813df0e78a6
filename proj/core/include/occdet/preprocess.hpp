#pragma once

#include <cstdint>
#include <vector>

#include "occdet/types.hpp"

namespace occdet {

// Buckets samples into fixed intervals aligned to the epoch. Each bucket with
// at least one input yields one sample at the bucket start; channel values are
// means over the inputs that have them, occupied is 1 iff at least half of the
// bucket's inputs are occupied.
std::vector<SensorSample> resample(const std::vector<SensorSample>& samples,
                                   std::int64_t interval_seconds);

// Forward-fill limit used by build_matrix: an absent channel is carried
// forward for at most this many consecutive rows.
inline constexpr int kMaxForwardFill = 3;

// Extracts the requested channels into a dense matrix (canonical column
// order). Gaps are forward-filled up to kMaxForwardFill rows; rows still
// incomplete are dropped. Throws AvailabilityError if more than half of the
// rows would be dropped, naming the channel with the most gaps.
FeatureMatrix build_matrix(const std::vector<SensorSample>& samples,
                           const FeatureSet& features);

// Per-column location/scale fitted on a training matrix. Population variance;
// constant columns get stddev 1 so they transform to zero.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  FeatureMatrix apply(const FeatureMatrix& m) const;
  // Undoes apply(); for checking round trips.
  FeatureMatrix inverse(const FeatureMatrix& m) const;
};

Standardizer fit_standardizer(const FeatureMatrix& train);

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of_row;  // values in [0, k)
};

// Stratified k-fold assignment: per-class counts per fold differ by at most
// one, as do total fold sizes. Deterministic per (labels, k, seed).
FoldAssignment split_folds(const std::vector<int>& labels, int k, std::uint64_t seed);

}  // namespace occdet
