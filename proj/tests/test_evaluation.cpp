#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "occdet/evaluate.hpp"
#include "occdet/preprocess.hpp"
#include "occdet/rng.hpp"
#include "occdet/simulate.hpp"
#include "test_util.hpp"

using namespace occdet;

namespace {

// Two days of the first reference zone at the evaluation cadence.
const std::vector<SensorSample>& office_samples() {
  static const std::vector<SensorSample> samples = [] {
    auto zones = make_paper_zones(2, 51);
    return resample(
        simulate_zone(zones[0].config, zones[0].schedule, zones[0].sim_seed),
        300);
  }();
  return samples;
}

FeatureMatrix copy_rows(const FeatureMatrix& m,
                        const std::vector<std::size_t>& rows) {
  FeatureMatrix out;
  out.features = m.features;
  out.rows = rows.size();
  for (std::size_t r : rows) {
    const auto row = m.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
    out.labels.push_back(m.labels[r]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- accuracy ----

TEST_CASE("accuracy counts matches") {
  CHECK(accuracy({1, 0, 1}, {1, 0, 1}) == 1.0);
  CHECK(accuracy({1, 0}, {0, 1}) == 0.0);
  CHECK(accuracy({1, 0, 1}, {1, 1, 1}) == doctest::Approx(2.0 / 3.0));
  CHECK(accuracy({0, 0, 1, 1}, {0, 1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(accuracy({}, {}), ValueError);
  CHECK_THROWS_AS(accuracy({1}, {1, 0}), ValueError);
}

// --------------------------------------------------------- cross-validation ----

TEST_CASE("cross-validation is perfect on well-separated blobs") {
  const FeatureMatrix m = testutil::random_blobs(100, 2, 8.0, 7);
  ModelSpec spec;
  spec.kind = ModelKind::knn;
  CvOptions opt;
  opt.k = 10;
  opt.seed = 1;
  const CvResult r = cross_validate(m, spec, opt);
  REQUIRE(r.fold_accuracies.size() == 10);
  CHECK(r.mean == 1.0);
  CHECK(r.stddev == 0.0);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
}

TEST_CASE("the reported mean is the mean of the fold accuracies") {
  const FeatureMatrix m = testutil::random_blobs(60, 2, 1.0, 11);
  ModelSpec spec;
  spec.kind = ModelKind::gnb;
  CvOptions opt;
  opt.k = 6;
  opt.seed = 2;
  const CvResult r = cross_validate(m, spec, opt);
  REQUIRE(r.fold_accuracies.size() == 6);
  double mean = 0.0;
  for (double f : r.fold_accuracies) mean += f;
  mean /= 6.0;
  CHECK(r.mean == doctest::Approx(mean).epsilon(1e-12));
  double var = 0.0;
  for (double f : r.fold_accuracies) var += (f - mean) * (f - mean);
  CHECK(r.stddev == doctest::Approx(std::sqrt(var / 6.0)).epsilon(1e-12));
  CHECK_THROWS_AS(cross_validate(m, spec, CvOptions{.k = 1}), ValueError);
}

TEST_CASE("label-free data scores at chance level") {
  Rng rng(101);
  FeatureMatrix m = testutil::make_matrix(2, {}, {});
  m.rows = 1000;
  for (std::size_t i = 0; i < 1000; ++i) {
    m.values.push_back(rng.uniform(-1.0, 1.0));
    m.values.push_back(rng.uniform(-1.0, 1.0));
    m.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
  }
  ModelSpec spec;
  spec.kind = ModelKind::knn;
  CvOptions opt;
  opt.k = 10;
  opt.seed = 3;
  const CvResult r = cross_validate(m, spec, opt);
  CHECK(r.mean > 0.4);
  CHECK(r.mean < 0.6);
}

TEST_CASE("fold scalers are fit on the training folds only") {
  // Mirror of the documented recipe; bit-equal fold accuracies prove the
  // production path standardizes without looking at the held-out fold.
  FeatureMatrix m = testutil::random_blobs(40, 2, 2.0, 13);
  for (std::size_t r = 0; r < m.rows; ++r) {
    m.at(r, 0) *= 1000.0;  // wildly different column scales
    m.at(r, 1) *= 0.001;
  }
  ModelSpec spec;
  spec.kind = ModelKind::lgr;
  CvOptions opt;
  opt.k = 5;
  opt.seed = 17;
  const CvResult r = cross_validate(m, spec, opt);

  const FoldAssignment fa = split_folds(m.labels, opt.k, opt.seed);
  for (int fold = 0; fold < opt.k; ++fold) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t row = 0; row < m.rows; ++row) {
      (fa.fold_of_row[row] == fold ? test_idx : train_idx).push_back(row);
    }
    const FeatureMatrix train = copy_rows(m, train_idx);
    const FeatureMatrix test = copy_rows(m, test_idx);
    const Standardizer scaler = fit_standardizer(train);
    const FeatureMatrix train_s = scaler.apply(train);
    const FeatureMatrix test_s = scaler.apply(test);
    const LgrModel model = lgr_fit(train_s, spec.lgr);
    std::vector<int> preds(test_s.rows);
    for (std::size_t row = 0; row < test_s.rows; ++row) {
      preds[row] = model.predict(test_s.row(row));
    }
    CHECK(r.fold_accuracies[static_cast<std::size_t>(fold)] ==
          accuracy(preds, test_s.labels));
  }
}

// ----------------------------------------------------------- penalty tuning ----

TEST_CASE("penalty tuning returns the smallest of tied candidates") {
  const FeatureMatrix m = testutil::random_blobs(30, 2, 8.0, 19);
  CHECK(tune_svm_c(m, {1.0}, 3, 5) == 1.0);
  // Fully separable: every penalty scores 1.0, so the smallest wins even
  // when the grid arrives unsorted.
  CHECK(tune_svm_c(m, {10.0, 0.5, 100.0}, 3, 5) == 0.5);
  CHECK(tune_svm_c(m, {10.0, 0.5, 100.0}, 3, 5) ==
        tune_svm_c(m, {10.0, 0.5, 100.0}, 3, 5));
  CHECK_THROWS_AS(tune_svm_c(m, {}, 3, 5), ValueError);
}

// --------------------------------------------------------- feature selection ----

TEST_CASE("forest selection drops constant and pure-noise features") {
  Rng rng(23);
  std::vector<double> values;
  std::vector<int> labels;
  for (int i = 0; i < 80; ++i) {
    const int label = i % 2;
    const double informative =
        label == 0 ? rng.uniform(0.0, 0.4) : rng.uniform(1.0, 1.4);
    values.push_back(informative);
    values.push_back(9.0);  // constant
    labels.push_back(label);
  }
  const FeatureMatrix m = testutil::make_matrix(2, values, labels);
  RfcParams params;
  params.n_trees = 50;
  params.seed = 3;
  const FeatureSet kept = select_features_rf(m, params);
  CHECK(kept.channels() == std::vector<Channel>{Channel::co2_inhale});
}

TEST_CASE("forest selection keeps duplicated informative features") {
  Rng rng(29);
  std::vector<double> values;
  std::vector<int> labels;
  for (int i = 0; i < 80; ++i) {
    const int label = i % 2;
    const double informative =
        label == 0 ? rng.uniform(0.0, 0.4) : rng.uniform(1.0, 1.4);
    values.push_back(informative);
    values.push_back(informative);  // exact duplicate
    values.push_back(rng.uniform(0.0, 1.4));  // noise
    labels.push_back(label);
  }
  const FeatureMatrix m = testutil::make_matrix(3, values, labels);
  RfcParams params;
  params.n_trees = 50;
  params.seed = 5;
  const FeatureSet kept = select_features_rf(m, params);
  CHECK(kept.contains(Channel::co2_inhale));
  CHECK(kept.contains(Channel::co2_bg));
  CHECK_FALSE(kept.contains(Channel::voc));
}

TEST_CASE("a splitless forest keeps every feature") {
  // Identical feature values for both classes: no split clears the gain
  // floor, importances stay zero, and the filter has nothing to rank.
  std::vector<double> values;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    values.push_back(1.0);
    values.push_back(2.0);
    labels.push_back(i % 2);
  }
  const FeatureMatrix m = testutil::make_matrix(2, values, labels);
  RfcParams params;
  params.n_trees = 10;
  params.seed = 1;
  const FeatureSet kept = select_features_rf(m, params);
  CHECK(kept.size() == 2);
  CHECK_THROWS_AS(
      select_features_rf(testutil::make_matrix(1, {0.0, 1.0}, {0, 1}), params),
      ValueError);
}

// ------------------------------------------------------------- feature menu ----

TEST_CASE("the results table offers eight feature rows") {
  const auto& menu = table1_feature_menu();
  REQUIRE(menu.size() == 8);
  const std::vector<std::string> labels = {
      "co2_inhale", "co2_bg",   "voc",     "light",
      "temperature", "humidity", "co2+voc", "co2+voc+light"};
  for (std::size_t i = 0; i < menu.size(); ++i) {
    CHECK(menu[i].label == labels[i]);
    CHECK(menu[i].auto_co2 == (i >= 6));
  }
}

TEST_CASE("compound rows pick the best available CO2 channel") {
  const auto& menu = table1_feature_menu();
  const FeatureMenuRow& co2_voc = menu[6];

  std::array<bool, kNumChannels> all{};
  all.fill(true);
  CHECK(resolve_feature_row(co2_voc, all) ==
        FeatureSet({Channel::co2_inhale, Channel::voc}));

  std::array<bool, kNumChannels> no_inhale = all;
  no_inhale[static_cast<int>(Channel::co2_inhale)] = false;
  CHECK(resolve_feature_row(co2_voc, no_inhale) ==
        FeatureSet({Channel::co2_bg, Channel::voc}));

  std::array<bool, kNumChannels> no_co2 = no_inhale;
  no_co2[static_cast<int>(Channel::co2_bg)] = false;
  CHECK_THROWS_AS(resolve_feature_row(co2_voc, no_co2), AvailabilityError);

  std::array<bool, kNumChannels> no_voc = all;
  no_voc[static_cast<int>(Channel::voc)] = false;
  CHECK_THROWS_AS(resolve_feature_row(co2_voc, no_voc), AvailabilityError);
  CHECK_THROWS_AS(resolve_feature_row(menu[2], no_voc), AvailabilityError);
}

// ------------------------------------------------------------ local tables ----

TEST_CASE("the local experiment covers every zone, row, and model") {
  auto zones = make_paper_zones(2, 51);
  std::vector<ZoneData> data;
  for (const auto& z : zones) {
    data.push_back(
        {z.config.name,
         resample(simulate_zone(z.config, z.schedule, z.sim_seed), 300)});
  }
  ExperimentConfig cfg;
  cfg.k_folds = 5;
  cfg.seed = 9;
  cfg.svm_c_grid.clear();  // skip nested tuning in the structural test
  const EvalReport rep = run_local(cfg, data);

  CHECK(rep.zones ==
        std::vector<std::string>{"office_a", "office_b", "conference"});
  CHECK(rep.models ==
        std::vector<std::string>{"SVM", "GNB", "LGR", "RFC", "KNN"});
  REQUIRE(rep.feature_rows.size() == 8);
  REQUIRE(rep.local.size() == 3 * 8 * 5);

  // Channel masks propagate into absent cells.
  const LocalCell* conf_inhale =
      rep.find_local("conference", "GNB", "co2_inhale");
  REQUIRE(conf_inhale != nullptr);
  CHECK_FALSE(conf_inhale->present);
  const LocalCell* b_light = rep.find_local("office_b", "GNB", "light");
  REQUIRE(b_light != nullptr);
  CHECK_FALSE(b_light->present);
  CHECK_FALSE(rep.find_local("office_b", "KNN", "co2+voc+light")->present);
  CHECK(rep.find_local("office_a", "KNN", "co2+voc+light")->present);
  CHECK(rep.find_local("conference", "SVM", "co2+voc")->present);

  for (const LocalCell& cell : rep.local) {
    if (!cell.present) {
      CHECK(cell.fold_accs.empty());
      continue;
    }
    REQUIRE(cell.fold_accs.size() == 5);
    double mean = 0.0;
    for (double f : cell.fold_accs) {
      CHECK(f >= 0.0);
      CHECK(f <= 100.0);
      mean += f;
    }
    CHECK(cell.mean_acc == doctest::Approx(mean / 5.0).epsilon(1e-12));
  }

  REQUIRE(rep.selected_features.size() == 3);
  for (const auto& [zone, names] : rep.selected_features) {
    CHECK(!names.empty());
  }

  // Text rendering: zone legend plus "-" for the structurally absent cells.
  const std::string text = render_report_text(rep);
  CHECK(text.find("Local occupancy-detection accuracy") == 0);
  CHECK(text.find("Cells: office_a / office_b / conference\n") !=
        std::string::npos);
  CHECK(text.find(" / - / ") != std::string::npos);   // office_b light cell
  CHECK(text.find("Selected features") != std::string::npos);

  // JSON rendering is canonical: parse and re-render byte-identically.
  const std::string json = render_report_json(rep);
  const EvalReport parsed = report_from_json(json);
  CHECK(render_report_json(parsed) == json);
  CHECK(render_report_text(parsed) == text);
  CHECK_THROWS_WITH_AS(report_from_json("{oops"),
                       doctest::Contains("invalid report json"), ValueError);
}

// ----------------------------------------------------------- global transfer ----

TEST_CASE("transfer onto an identical zone loses almost nothing") {
  const auto& samples = office_samples();
  const std::vector<ZoneData> data = {{"alpha", samples}, {"beta", samples}};
  ExperimentConfig cfg;
  cfg.models = {ModelKind::gnb, ModelKind::knn};
  cfg.k_folds = 5;
  cfg.seed = 21;
  cfg.svm_c_grid.clear();
  EvalReport rep = run_local(cfg, data);
  run_global(cfg, data, "alpha", rep);

  REQUIRE(rep.global.size() == 8 * 2);
  for (const GlobalCell& cell : rep.global) {
    CHECK(cell.train_zone == "alpha");
    CHECK(cell.test_zone == "beta");
    CHECK(cell.drop ==
          doctest::Approx(cell.local_mean_acc - cell.acc).epsilon(1e-12));
    // Resubstitution on a byte-identical zone cannot do worse than held-out
    // folds beyond noise.
    CHECK(cell.acc >= cell.local_mean_acc - 0.5);
  }
  const GlobalCell* found = rep.find_global("beta", "KNN", "voc");
  REQUIRE(found != nullptr);
  CHECK(found->model == "KNN");

  CHECK_THROWS_AS(run_global(cfg, data, "gamma", rep), ValueError);
}
