#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "occdet/model.hpp"
#include "occdet/types.hpp"

namespace occdet {

// Fraction of matching entries; throws on empty or mismatched lengths.
double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels);

struct CvOptions {
  int k = 10;
  std::uint64_t seed = 0;
  // Non-empty grid -> nested SVM penalty tuning inside each training split,
  // run as a small inner cross-validation on a stratified subsample.
  std::vector<double> svm_c_grid;
  int svm_tune_folds = 3;
  std::size_t svm_tune_max_rows = 768;
  // When > 0, each fold's SVM trains on a stratified subsample of at most
  // this many rows. A converged fit on a modest sample is both faster and
  // more reliable than a step-capped fit on the full split.
  std::size_t svm_train_max_rows = 0;
};

struct CvResult {
  std::vector<double> fold_accuracies;  // fractions, one per fold
  double mean = 0.0;
  double stddev = 0.0;     // population std over fold accuracies
  double precision = 0.0;  // pooled over folds, class 1 positive
  double recall = 0.0;
};

// Stratified k-fold cross-validation. Standardization statistics are fit on
// the training folds only; per-fold model seeds derive from `seed`.
CvResult cross_validate(const FeatureMatrix& m, const ModelSpec& spec,
                        const CvOptions& opt);

// Mean-CV-accuracy grid search for the SVM penalty; ties take the smallest C.
double tune_svm_c(const FeatureMatrix& m, const std::vector<double>& grid,
                  int k, std::uint64_t seed, const SvmParams& base = {});

// Fits a random forest on all columns and keeps features whose importance is
// at least `threshold` times the mean importance (always keeps the top one).
FeatureSet select_features_rf(const FeatureMatrix& m, const RfcParams& params,
                              double threshold = 0.5);

// The result table's eight feature rows: six single channels plus the
// CO2+VOC and CO2+VOC+light combinations, where the combination's CO2 means
// co2_inhale when available and co2_bg otherwise.
struct FeatureMenuRow {
  std::string label;
  std::vector<Channel> channels;  // fixed channels of the row
  bool auto_co2 = false;          // prepend co2_inhale-or-co2_bg
};
const std::vector<FeatureMenuRow>& table1_feature_menu();

// Resolves a menu row against a zone's channel availability; throws
// AvailabilityError when a required channel is missing.
FeatureSet resolve_feature_row(const FeatureMenuRow& row,
                               const std::array<bool, kNumChannels>& available);

struct ZoneData {
  std::string name;
  std::vector<SensorSample> samples;  // already at evaluation cadence
};

struct ExperimentConfig {
  std::vector<ModelKind> models{kAllModels.begin(), kAllModels.end()};
  int k_folds = 10;
  std::uint64_t seed = 0;
  std::vector<double> svm_c_grid{0.1, 1.0, 10.0, 100.0};
  int svm_tune_folds = 3;
  std::size_t svm_tune_max_rows = 384;
  std::size_t svm_train_max_rows = 1024;
  // Per-fit SMO step budget during experiments. Accuracy on the noisy zone
  // datasets plateaus orders of magnitude before the library default.
  std::uint64_t svm_max_steps = 4000;
  // Logistic-regression optimizer settings for experiments; looser than the
  // library default for the same plateau reason.
  LbfgsParams lgr_optimizer{.grad_tolerance = 1e-5, .max_iters = 150};
  double rf_selection_threshold = 0.5;
  unsigned threads = 0;  // 0 -> hardware concurrency
};

// One (zone, model, feature-row) cell of the local table. Accuracy-like
// quantities are percentages. `present` is false when the zone lacks the
// row's channels; such cells stay in the report as explicit absences.
struct LocalCell {
  std::string zone;
  std::string model;
  std::string feature_set;  // menu row label
  bool present = false;
  std::vector<double> fold_accs;
  double mean_acc = 0.0;
  double stddev = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct GlobalCell {
  std::string train_zone;
  std::string test_zone;
  std::string model;
  std::string feature_set;
  double acc = 0.0;             // percent, fit on train zone, eval on test
  double local_mean_acc = 0.0;  // the test zone's local CV mean
  double drop = 0.0;            // local_mean_acc - acc
};

struct EvalReport {
  std::vector<std::string> zones;         // column order
  std::vector<std::string> models;        // model order
  std::vector<std::string> feature_rows;  // menu labels, row order
  std::vector<LocalCell> local;           // zone-major, then row, then model
  std::vector<GlobalCell> global;
  // zone name -> selected channel names, in zone order
  std::vector<std::pair<std::string, std::vector<std::string>>>
      selected_features;

  const LocalCell* find_local(const std::string& zone,
                              const std::string& model,
                              const std::string& feature_set) const;
  const GlobalCell* find_global(const std::string& test_zone,
                                const std::string& model,
                                const std::string& feature_set) const;
};

// Cross-validates every zone x menu-row x model combination and runs RF
// feature selection per zone. Unavailable combinations become absent cells.
EvalReport run_local(const ExperimentConfig& cfg,
                     const std::vector<ZoneData>& zones);

// Fits on the full training zone and evaluates on every other zone, over
// the menu rows whose channels are available in both zones. Appends to
// `report.global`, pairing each cell with the test zone's local CV mean.
void run_global(const ExperimentConfig& cfg,
                const std::vector<ZoneData>& zones,
                const std::string& train_zone, EvalReport& report);

// Fixed-width text table in the reference table's "a / b / -" cell style
// (integer percentages), plus global-transfer and selected-feature sections.
std::string render_report_text(const EvalReport& report);

// One-decimal JSON document; see README for the schema. Byte-deterministic.
std::string render_report_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

}  // namespace occdet
