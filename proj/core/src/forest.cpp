#include "occdet/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace occdet {

namespace {

constexpr double kMinGain = 1e-12;

using RowIdx = std::uint32_t;

// Per-node working set: the node's rows (with bootstrap multiplicity), kept
// once per feature in ascending order of that feature's value. Splitting a
// node is then a stable partition of each list instead of a fresh sort.
using SortedLists = std::vector<std::vector<RowIdx>>;

double gini(std::size_t n0, std::size_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0.0) return 0.0;
  const double p0 = static_cast<double>(n0) / n;
  const double p1 = static_cast<double>(n1) / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& m, const RfcParams& p, Rng& rng,
              std::vector<double>& importance)
      : m_(m), p_(p), rng_(rng), importance_(importance) {
    mtry_ = p.features_per_split;
    if (mtry_ == 0) {
      mtry_ = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(m.cols()))));
    }
    mtry_ = std::min(mtry_, m.cols());
  }

  DecisionTree build(SortedLists lists) {
    tree_.dim = m_.cols();
    total_rows_ = static_cast<double>(lists.front().size());
    grow(std::move(lists), 0);
    return std::move(tree_);
  }

 private:
  // Returns the index of the node created for this row set.
  int grow(SortedLists lists, int depth) {
    const int node_id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    const std::size_t n_rows = lists.front().size();
    std::size_t n1 = 0;
    for (RowIdx r : lists.front()) {
      n1 += static_cast<std::size_t>(m_.labels[r]);
    }
    const std::size_t n0 = n_rows - n1;

    const bool stop = n0 == 0 || n1 == 0 || n_rows < p_.min_samples_split ||
                      (p_.max_depth >= 0 && depth >= p_.max_depth);
    Split split;
    if (!stop) split = best_split(lists, n0, n1);
    if (!split.found) {
      tree_.nodes[node_id].label = n1 * 2 > n_rows ? 1 : 0;
      return node_id;
    }

    importance_[static_cast<std::size_t>(split.feature)] +=
        static_cast<double>(n_rows) / total_rows_ * split.gain;

    const auto g = static_cast<std::size_t>(split.feature);
    SortedLists left(lists.size()), right(lists.size());
    for (std::size_t f = 0; f < lists.size(); ++f) {
      left[f].reserve(n_rows);
      right[f].reserve(n_rows);
      for (RowIdx r : lists[f]) {
        if (m_.at(r, g) <= split.threshold) {
          left[f].push_back(r);
        } else {
          right[f].push_back(r);
        }
      }
    }
    lists.clear();
    lists.shrink_to_fit();

    tree_.nodes[node_id].feature = split.feature;
    tree_.nodes[node_id].threshold = split.threshold;
    const int left_id = grow(std::move(left), depth + 1);
    tree_.nodes[node_id].left = left_id;
    const int right_id = grow(std::move(right), depth + 1);
    tree_.nodes[node_id].right = right_id;
    return node_id;
  }

  Split best_split(const SortedLists& lists, std::size_t n0, std::size_t n1) {
    std::vector<std::size_t> features(m_.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
    rng_.shuffle(features);
    features.resize(mtry_);

    const std::size_t n_rows = lists.front().size();
    const double parent = gini(n0, n1);
    const double n = static_cast<double>(n_rows);
    Split best;
    for (std::size_t f : features) {
      const std::vector<RowIdx>& column = lists[f];
      std::size_t left0 = 0, left1 = 0;
      for (std::size_t i = 0; i + 1 < n_rows; ++i) {
        if (m_.labels[column[i]] == 1) {
          ++left1;
        } else {
          ++left0;
        }
        const double value = m_.at(column[i], f);
        const double next = m_.at(column[i + 1], f);
        if (value == next) continue;
        const std::size_t nl = left0 + left1;
        const std::size_t nr = n_rows - nl;
        const double child =
            static_cast<double>(nl) / n * gini(left0, left1) +
            static_cast<double>(nr) / n * gini(n0 - left0, n1 - left1);
        const double gain = parent - child;
        const double better = best.found ? best.gain : kMinGain;
        if (gain > better) {
          best.found = true;
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (value + next);
          best.gain = gain;
        }
      }
    }
    return best;
  }

  const FeatureMatrix& m_;
  const RfcParams& p_;
  Rng& rng_;
  std::vector<double>& importance_;
  std::size_t mtry_ = 0;
  double total_rows_ = 0.0;
  DecisionTree tree_;
};

// Row indices 0..n-1 ordered by each feature's value (ties by row index).
SortedLists sort_columns(const FeatureMatrix& m) {
  SortedLists cols(m.cols());
  for (std::size_t f = 0; f < m.cols(); ++f) {
    cols[f].resize(m.rows);
    std::iota(cols[f].begin(), cols[f].end(), RowIdx{0});
    std::sort(cols[f].begin(), cols[f].end(), [&m, f](RowIdx a, RowIdx b) {
      const double va = m.at(a, f);
      const double vb = m.at(b, f);
      return va < vb || (va == vb && a < b);
    });
  }
  return cols;
}

}  // namespace

int DecisionTree::predict(std::span<const double> x) const {
  if (x.size() != dim) {
    throw ValueError("tree predict input has wrong dimension");
  }
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                   : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

DecisionTree tree_fit(const FeatureMatrix& m,
                      const std::vector<std::size_t>& rows,
                      const RfcParams& params, Rng& rng,
                      std::vector<double>& importance) {
  if (m.rows == 0 || m.cols() == 0 || rows.empty()) {
    throw ValueError("tree_fit requires a non-empty matrix");
  }
  if (importance.size() != m.cols()) {
    throw ValueError("importance accumulator has wrong size");
  }
  SortedLists lists(m.cols());
  for (std::size_t f = 0; f < m.cols(); ++f) {
    lists[f].assign(rows.begin(), rows.end());
    std::sort(lists[f].begin(), lists[f].end(),
              [&m, f](RowIdx a, RowIdx b) { return m.at(a, f) < m.at(b, f); });
  }
  TreeBuilder builder(m, params, rng, importance);
  return builder.build(std::move(lists));
}

RfcModel rfc_fit(const FeatureMatrix& m, const RfcParams& params) {
  if (m.rows < 1 || m.cols() == 0) {
    throw ValueError("rfc_fit requires a non-empty matrix");
  }
  if (params.n_trees < 1) throw ValueError("rfc n_trees must be positive");

  RfcModel model;
  model.dim = m.cols();
  model.n_trees = params.n_trees;
  model.importances.assign(m.cols(), 0.0);

  // Columns are sorted once; each tree's sorted bootstrap lists come from a
  // multiplicity-weighted pass over them, so trees never sort.
  const SortedLists sorted_cols = sort_columns(m);
  std::vector<std::uint32_t> multiplicity(m.rows);

  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::size_t drawn = m.rows;
    if (params.bootstrap) {
      std::fill(multiplicity.begin(), multiplicity.end(), 0u);
      for (std::size_t i = 0; i < m.rows; ++i) ++multiplicity[rng.below(m.rows)];
    } else {
      std::fill(multiplicity.begin(), multiplicity.end(), 1u);
    }
    SortedLists lists(m.cols());
    for (std::size_t f = 0; f < m.cols(); ++f) {
      lists[f].reserve(drawn);
      for (RowIdx r : sorted_cols[f]) {
        for (std::uint32_t c = 0; c < multiplicity[r]; ++c) {
          lists[f].push_back(r);
        }
      }
    }
    TreeBuilder builder(m, params, rng, model.importances);
    model.trees.push_back(builder.build(std::move(lists)));
  }

  const double total = std::accumulate(model.importances.begin(),
                                       model.importances.end(), 0.0);
  if (total > 0.0) {
    for (double& v : model.importances) v /= total;
  }
  return model;
}

int RfcModel::predict(std::span<const double> x) const {
  std::size_t votes1 = 0;
  for (const DecisionTree& tree : trees) {
    votes1 += static_cast<std::size_t>(tree.predict(x));
  }
  return votes1 * 2 > trees.size() ? 1 : 0;
}

}  // namespace occdet
