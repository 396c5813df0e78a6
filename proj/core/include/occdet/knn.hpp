#pragma once

#include <span>
#include <vector>

#include "occdet/types.hpp"

namespace occdet {

// k-nearest-neighbour vote with Euclidean distance and uniform weights.
// Distance ties prefer the lower training-row index, which makes the
// neighbour set (and therefore the prediction) deterministic. Vote ties
// resolve to class 0. Throws ValueError when the training set has fewer
// than k rows.
int knn_predict(const FeatureMatrix& train, std::span<const double> x,
                std::size_t k = 5);

// The row indices of the k nearest training rows, closest first.
std::vector<std::size_t> knn_neighbors(const FeatureMatrix& train,
                                       std::span<const double> x,
                                       std::size_t k = 5);

}  // namespace occdet
