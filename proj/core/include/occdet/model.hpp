#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "occdet/forest.hpp"
#include "occdet/knn.hpp"
#include "occdet/logistic.hpp"
#include "occdet/naive_bayes.hpp"
#include "occdet/preprocess.hpp"
#include "occdet/svm.hpp"
#include "occdet/types.hpp"

namespace occdet {

enum class ModelKind { svm, gnb, lgr, rfc, knn };
inline constexpr std::array<ModelKind, 5> kAllModels = {
    ModelKind::svm, ModelKind::gnb, ModelKind::lgr, ModelKind::rfc,
    ModelKind::knn};

std::string model_kind_name(ModelKind kind);           // "SVM", "GNB", ...
ModelKind model_kind_from_name(const std::string& s);  // inverse

struct KnnParams {
  std::size_t k = 5;
};

// One model choice plus its hyperparameters (only the block matching `kind`
// is consulted).
struct ModelSpec {
  ModelKind kind = ModelKind::svm;
  SvmParams svm;
  LgrParams lgr;
  RfcParams rfc;
  KnnParams knn;
};

ModelSpec default_spec(ModelKind kind);

// A fitted model behind the uniform predict contract. Only the member for
// `kind` is meaningful; KNN keeps its (already standardized) training set.
struct TrainedModel {
  ModelKind kind = ModelKind::svm;
  SvmModel svm;
  GnbModel gnb;
  LgrModel lgr;
  RfcModel rfc;
  FeatureMatrix knn_train;
  KnnParams knn;

  int predict(std::span<const double> x) const;
};

TrainedModel fit_model(const FeatureMatrix& m, const ModelSpec& spec);

// End-to-end artifact for train/predict workflows: which channels feed the
// model, the training standardization, and the fitted parameters.
struct Pipeline {
  FeatureSet features;
  Standardizer scaler;
  ModelSpec spec;
  TrainedModel model;

  // Builds the feature matrix from resampled samples, standardizes with the
  // stored statistics, and predicts one label per retained row.
  std::vector<int> predict(const std::vector<SensorSample>& samples) const;
};

Pipeline fit_pipeline(const std::vector<SensorSample>& samples,
                      const FeatureSet& features, const ModelSpec& spec);

// Versioned JSON persistence:
//   {"schema_version": 1, "kind": ..., "hyperparams": {...},
//    "parameters": {"features": [...], "standardizer": {...}, ...}}
std::string pipeline_to_json(const Pipeline& p);
Pipeline pipeline_from_json(const std::string& text);

}  // namespace occdet
