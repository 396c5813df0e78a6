#pragma once

#include <array>
#include <span>
#include <vector>

#include "occdet/types.hpp"

namespace occdet {

// Gaussian naive Bayes with per-class feature means/variances and a shared
// variance floor of 1e-9 times the largest per-feature variance of the
// training data (keeps likelihoods finite for near-constant features).
struct GnbModel {
  std::size_t dim = 0;
  std::array<double, 2> priors{0.0, 0.0};
  std::array<std::vector<double>, 2> means;
  std::array<std::vector<double>, 2> variances;  // smoothed

  // Posterior class probabilities, computed in log space and normalized.
  std::array<double, 2> posterior(std::span<const double> x) const;
  // Maximum a posteriori class; exact ties resolve to class 0.
  int predict(std::span<const double> x) const;
};

GnbModel gnb_fit(const FeatureMatrix& m);

}  // namespace occdet
