#include "occdet/knn.hpp"

#include <algorithm>
#include <cmath>

namespace occdet {

namespace {

std::vector<std::pair<double, std::size_t>> ranked_distances(
    const FeatureMatrix& train, std::span<const double> x, std::size_t k) {
  if (k == 0) throw ValueError("knn requires k >= 1");
  if (train.rows < k) {
    throw ValueError("knn requires at least k training rows");
  }
  if (x.size() != train.cols()) {
    throw ValueError("knn query has wrong dimension");
  }
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(train.rows);
  for (std::size_t r = 0; r < train.rows; ++r) {
    const double* row = train.values.data() + r * train.cols();
    double s = 0.0;
    for (std::size_t c = 0; c < train.cols(); ++c) {
      const double d = x[c] - row[c];
      s += d * d;
    }
    dist.emplace_back(s, r);
  }
  // The (distance, index) pair order is total, so ties are broken by index.
  std::nth_element(dist.begin(), dist.begin() + static_cast<long>(k - 1),
                   dist.end());
  std::sort(dist.begin(), dist.begin() + static_cast<long>(k));
  dist.resize(k);
  return dist;
}

}  // namespace

std::vector<std::size_t> knn_neighbors(const FeatureMatrix& train,
                                       std::span<const double> x,
                                       std::size_t k) {
  const auto ranked = ranked_distances(train, x, k);
  std::vector<std::size_t> out;
  out.reserve(k);
  for (const auto& [d, r] : ranked) out.push_back(r);
  return out;
}

int knn_predict(const FeatureMatrix& train, std::span<const double> x,
                std::size_t k) {
  const auto ranked = ranked_distances(train, x, k);
  std::size_t votes1 = 0;
  for (const auto& [d, r] : ranked) {
    votes1 += static_cast<std::size_t>(train.labels[r]);
  }
  return votes1 * 2 > k ? 1 : 0;
}

}  // namespace occdet
