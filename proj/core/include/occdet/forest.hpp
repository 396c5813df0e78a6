#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "occdet/rng.hpp"
#include "occdet/types.hpp"

namespace occdet {

// Binary decision tree stored as a flat node array; node 0 is the root.
// Internal nodes route x[feature] <= threshold to `left`, otherwise `right`.
// Leaves have feature == -1 and carry the majority label.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
};

struct DecisionTree {
  std::size_t dim = 0;
  std::vector<TreeNode> nodes;

  int predict(std::span<const double> x) const;
};

struct RfcParams {
  int n_trees = 100;
  int max_depth = -1;                  // -1: grow until pure / too small
  std::size_t min_samples_split = 2;   // nodes smaller than this become leaves
  std::size_t features_per_split = 0;  // 0: ceil(sqrt(n_features))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct RfcModel {
  std::size_t dim = 0;
  int n_trees = 0;
  std::vector<DecisionTree> trees;
  // Mean decrease in Gini impurity, normalized to sum to 1 whenever any
  // split occurred; all zeros for degenerate (splitless) forests.
  std::vector<double> importances;

  // Majority vote across trees; exact ties resolve to class 0.
  int predict(std::span<const double> x) const;
};

// Grows a single tree on the given rows. Split quality is Gini impurity
// decrease; candidate thresholds are midpoints between consecutive distinct
// values, and the first best-scoring (feature, threshold) wins ties.
// Weighted impurity decreases are accumulated into `importance` (size dim).
DecisionTree tree_fit(const FeatureMatrix& m,
                      const std::vector<std::size_t>& rows,
                      const RfcParams& params, Rng& rng,
                      std::vector<double>& importance);

RfcModel rfc_fit(const FeatureMatrix& m, const RfcParams& params = {});

}  // namespace occdet
