#include "occdet/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "json.hpp"
#include "occdet/preprocess.hpp"
#include "occdet/rng.hpp"

namespace occdet {

using ordered_json = nlohmann::ordered_json;

namespace {

FeatureMatrix subset_rows(const FeatureMatrix& m,
                          const std::vector<std::size_t>& rows) {
  FeatureMatrix out;
  out.features = m.features;
  out.rows = rows.size();
  out.values.reserve(rows.size() * m.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto row = m.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
    out.labels.push_back(m.labels[r]);
  }
  return out;
}

// Runs fn(0..n-1) across up to `threads` workers (0 = hardware concurrency).
// Each index must write only its own output slot, so results are identical
// no matter how indices are interleaved.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  unsigned t = threads == 0 ? std::thread::hardware_concurrency() : threads;
  if (t == 0) t = 1;
  t = static_cast<unsigned>(std::min<std::size_t>(t, n));
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(t - 1);
  for (unsigned w = 0; w + 1 < t; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

// Stratified subsample of at most max_rows rows (seeded); returns row
// indices in ascending order. Keeps at least min_per_class rows per class.
std::vector<std::size_t> stratified_subsample(const std::vector<int>& labels,
                                              std::size_t max_rows,
                                              std::size_t min_per_class,
                                              std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  if (labels.size() <= max_rows) {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  const double frac0 = static_cast<double>(by_class[0].size()) /
                       static_cast<double>(labels.size());
  std::size_t take0 = static_cast<std::size_t>(
      std::llround(frac0 * static_cast<double>(max_rows)));
  take0 = std::clamp(take0, min_per_class, max_rows - min_per_class);
  std::size_t take1 = max_rows - take0;
  take0 = std::min(take0, by_class[0].size());
  take1 = std::min(take1, by_class[1].size());
  std::vector<std::size_t> rows;
  rows.reserve(take0 + take1);
  for (int cls = 0; cls < 2; ++cls) {
    auto& pool = by_class[static_cast<std::size_t>(cls)];
    Rng rng(mix_seed(seed, 21 + static_cast<std::uint64_t>(cls)));
    rng.shuffle(pool);
    const std::size_t take = cls == 0 ? take0 : take1;
    rows.insert(rows.end(), pool.begin(),
                pool.begin() + static_cast<long>(take));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

// Nested penalty tuning for one outer training split.
double tune_c_for_fold(const FeatureMatrix& train, const SvmParams& base,
                       const CvOptions& opt, std::uint64_t fold_seed) {
  std::array<std::size_t, 2> counts{0, 0};
  for (int lbl : train.labels) ++counts[static_cast<std::size_t>(lbl)];
  const auto k = static_cast<std::size_t>(opt.svm_tune_folds);
  if (counts[0] < k || counts[1] < k) return base.c;  // too small to tune
  const auto rows = stratified_subsample(train.labels, opt.svm_tune_max_rows,
                                         k, mix_seed(fold_seed, 3));
  const FeatureMatrix sub =
      rows.size() == train.rows ? train : subset_rows(train, rows);
  // Ranking penalty candidates needs far less optimization than a final fit.
  SvmParams tune_base = base;
  tune_base.max_steps =
      std::min<std::uint64_t>(tune_base.max_steps, 4 * sub.rows);
  return tune_svm_c(sub, opt.svm_c_grid, opt.svm_tune_folds,
                    mix_seed(fold_seed, 7), tune_base);
}

double vector_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double vector_stddev(const std::vector<double>& v, double mean) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

double accuracy(const std::vector<int>& predictions,
                const std::vector<int>& labels) {
  if (predictions.empty()) throw ValueError("accuracy of empty vectors");
  if (predictions.size() != labels.size()) {
    throw ValueError("accuracy requires equal-length vectors");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

CvResult cross_validate(const FeatureMatrix& m, const ModelSpec& spec,
                        const CvOptions& opt) {
  if (opt.k < 2) throw ValueError("cross-validation requires k >= 2");
  const FoldAssignment fa = split_folds(m.labels, opt.k, opt.seed);

  CvResult res;
  res.fold_accuracies.reserve(static_cast<std::size_t>(opt.k));
  std::size_t tp = 0, fp = 0, fn = 0;
  for (int fold = 0; fold < opt.k; ++fold) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t r = 0; r < m.rows; ++r) {
      (fa.fold_of_row[r] == fold ? test_idx : train_idx).push_back(r);
    }
    const FeatureMatrix train = subset_rows(m, train_idx);
    const FeatureMatrix test = subset_rows(m, test_idx);
    const Standardizer scaler = fit_standardizer(train);
    const FeatureMatrix train_s = scaler.apply(train);
    const FeatureMatrix test_s = scaler.apply(test);

    ModelSpec fold_spec = spec;
    const std::uint64_t fold_seed =
        mix_seed(opt.seed, 1000 + static_cast<std::uint64_t>(fold));
    if (spec.kind == ModelKind::rfc) fold_spec.rfc.seed = fold_seed;
    if (spec.kind == ModelKind::svm) {
      fold_spec.svm.seed = fold_seed;
      if (!opt.svm_c_grid.empty()) {
        fold_spec.svm.c =
            tune_c_for_fold(train, fold_spec.svm, opt, fold_seed);
      }
    }

    const FeatureMatrix* fit_m = &train_s;
    std::optional<FeatureMatrix> svm_sub;
    if (spec.kind == ModelKind::svm && opt.svm_train_max_rows > 0 &&
        train_s.rows > opt.svm_train_max_rows) {
      const auto rows = stratified_subsample(
          train_s.labels, opt.svm_train_max_rows, 1, mix_seed(fold_seed, 5));
      svm_sub = subset_rows(train_s, rows);
      fit_m = &*svm_sub;
    }
    const TrainedModel model = fit_model(*fit_m, fold_spec);
    std::vector<int> preds(test_s.rows);
    for (std::size_t r = 0; r < test_s.rows; ++r) {
      preds[r] = model.predict(test_s.row(r));
    }
    res.fold_accuracies.push_back(accuracy(preds, test_s.labels));
    for (std::size_t r = 0; r < test_s.rows; ++r) {
      if (preds[r] == 1 && test_s.labels[r] == 1) ++tp;
      if (preds[r] == 1 && test_s.labels[r] == 0) ++fp;
      if (preds[r] == 0 && test_s.labels[r] == 1) ++fn;
    }
  }
  res.mean = vector_mean(res.fold_accuracies);
  res.stddev = vector_stddev(res.fold_accuracies, res.mean);
  res.precision = tp + fp > 0 ? static_cast<double>(tp) /
                                    static_cast<double>(tp + fp)
                              : 0.0;
  res.recall = tp + fn > 0 ? static_cast<double>(tp) /
                                 static_cast<double>(tp + fn)
                           : 0.0;
  return res;
}

double tune_svm_c(const FeatureMatrix& m, const std::vector<double>& grid,
                  int k, std::uint64_t seed, const SvmParams& base) {
  if (grid.empty()) throw ValueError("svm penalty grid must be non-empty");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double best_c = sorted.front();
  double best_acc = -1.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    ModelSpec spec;
    spec.kind = ModelKind::svm;
    spec.svm = base;
    spec.svm.c = sorted[i];
    CvOptions opt;
    opt.k = k;
    opt.seed = mix_seed(seed, 100 + i);
    const CvResult r = cross_validate(m, spec, opt);
    if (r.mean > best_acc) {  // strict: ties keep the smaller C
      best_acc = r.mean;
      best_c = sorted[i];
    }
  }
  return best_c;
}

FeatureSet select_features_rf(const FeatureMatrix& m, const RfcParams& params,
                              double threshold) {
  if (m.cols() < 2) {
    throw ValueError("feature selection requires at least 2 features");
  }
  const RfcModel rf = rfc_fit(m, params);
  const double mean_imp =
      std::accumulate(rf.importances.begin(), rf.importances.end(), 0.0) /
      static_cast<double>(m.cols());
  std::size_t top = 0;
  for (std::size_t c = 1; c < m.cols(); ++c) {
    if (rf.importances[c] > rf.importances[top]) top = c;
  }
  std::vector<Channel> kept;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (c == top || rf.importances[c] >= threshold * mean_imp) {
      kept.push_back(m.features.channels()[c]);
    }
  }
  return FeatureSet(kept);
}

const std::vector<FeatureMenuRow>& table1_feature_menu() {
  static const std::vector<FeatureMenuRow> menu = {
      {"co2_inhale", {Channel::co2_inhale}, false},
      {"co2_bg", {Channel::co2_bg}, false},
      {"voc", {Channel::voc}, false},
      {"light", {Channel::light}, false},
      {"temperature", {Channel::temperature}, false},
      {"humidity", {Channel::humidity}, false},
      {"co2+voc", {Channel::voc}, true},
      {"co2+voc+light", {Channel::voc, Channel::light}, true},
  };
  return menu;
}

FeatureSet resolve_feature_row(
    const FeatureMenuRow& row,
    const std::array<bool, kNumChannels>& available) {
  std::vector<Channel> channels;
  if (row.auto_co2) {
    if (available[static_cast<std::size_t>(Channel::co2_inhale)]) {
      channels.push_back(Channel::co2_inhale);
    } else if (available[static_cast<std::size_t>(Channel::co2_bg)]) {
      channels.push_back(Channel::co2_bg);
    } else {
      throw AvailabilityError(Channel::co2_bg,
                              "no CO2 channel available for " + row.label);
    }
  }
  for (Channel ch : row.channels) {
    if (!available[static_cast<std::size_t>(ch)]) {
      throw AvailabilityError(
          ch, std::string(channel_name(ch)) + " unavailable for " + row.label);
    }
    channels.push_back(ch);
  }
  return FeatureSet(channels);
}

namespace {

std::array<bool, kNumChannels> probe_availability(
    const std::vector<SensorSample>& samples) {
  std::array<bool, kNumChannels> available{};
  for (Channel ch : kAllChannels) {
    try {
      build_matrix(samples, FeatureSet({ch}));
      available[static_cast<std::size_t>(ch)] = true;
    } catch (const AvailabilityError&) {
      available[static_cast<std::size_t>(ch)] = false;
    }
  }
  return available;
}

double round1(double x) {
  const double r = std::round(x * 10.0) / 10.0;
  return r == 0.0 ? 0.0 : r;  // normalize -0.0
}

long text_percent(double x) { return std::lround(round1(x)); }

}  // namespace

const LocalCell* EvalReport::find_local(const std::string& zone,
                                        const std::string& model,
                                        const std::string& feature_set) const {
  for (const LocalCell& c : local) {
    if (c.zone == zone && c.model == model && c.feature_set == feature_set) {
      return &c;
    }
  }
  return nullptr;
}

const GlobalCell* EvalReport::find_global(
    const std::string& test_zone, const std::string& model,
    const std::string& feature_set) const {
  for (const GlobalCell& c : global) {
    if (c.test_zone == test_zone && c.model == model &&
        c.feature_set == feature_set) {
      return &c;
    }
  }
  return nullptr;
}

EvalReport run_local(const ExperimentConfig& cfg,
                     const std::vector<ZoneData>& zones) {
  if (zones.empty()) throw ValueError("run_local requires at least one zone");
  if (cfg.models.empty()) throw ValueError("run_local requires models");
  if (cfg.k_folds < 2) throw ValueError("k_folds must be >= 2");

  const auto& menu = table1_feature_menu();
  EvalReport rep;
  for (const ZoneData& z : zones) rep.zones.push_back(z.name);
  for (ModelKind m : cfg.models) rep.models.push_back(model_kind_name(m));
  for (const auto& row : menu) rep.feature_rows.push_back(row.label);

  const std::size_t nz = zones.size();
  const std::size_t nr = menu.size();
  const std::size_t nm = cfg.models.size();

  // One matrix per (zone, menu row); unavailable combinations stay empty.
  std::vector<std::vector<std::optional<FeatureMatrix>>> mats(
      nz, std::vector<std::optional<FeatureMatrix>>(nr));
  std::vector<std::array<bool, kNumChannels>> availability(nz);
  for (std::size_t z = 0; z < nz; ++z) {
    availability[z] = probe_availability(zones[z].samples);
    for (std::size_t r = 0; r < nr; ++r) {
      try {
        const FeatureSet fs = resolve_feature_row(menu[r], availability[z]);
        mats[z][r] = build_matrix(zones[z].samples, fs);
      } catch (const AvailabilityError&) {
        // absent cell
      }
    }
  }

  rep.local.resize(nz * nr * nm);
  parallel_for(rep.local.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t z = i / (nr * nm);
    const std::size_t r = (i / nm) % nr;
    const std::size_t m = i % nm;
    LocalCell& cell = rep.local[i];
    cell.zone = zones[z].name;
    cell.model = rep.models[m];
    cell.feature_set = menu[r].label;
    if (!mats[z][r]) return;  // absent

    ModelSpec spec = default_spec(cfg.models[m]);
    spec.lgr.optimizer = cfg.lgr_optimizer;
    CvOptions opt;
    opt.k = cfg.k_folds;
    opt.seed = mix_seed(cfg.seed, i);
    if (spec.kind == ModelKind::svm) {
      spec.svm.max_steps = cfg.svm_max_steps;
      opt.svm_c_grid = cfg.svm_c_grid;
      opt.svm_tune_folds = cfg.svm_tune_folds;
      opt.svm_tune_max_rows = cfg.svm_tune_max_rows;
      opt.svm_train_max_rows = cfg.svm_train_max_rows;
    }
    const CvResult cv = cross_validate(*mats[z][r], spec, opt);
    cell.present = true;
    for (double f : cv.fold_accuracies) cell.fold_accs.push_back(100.0 * f);
    cell.mean_acc = vector_mean(cell.fold_accs);
    cell.stddev = vector_stddev(cell.fold_accs, cell.mean_acc);
    cell.precision = 100.0 * cv.precision;
    cell.recall = 100.0 * cv.recall;
  });

  // Forest-based feature selection over each zone's available channels.
  for (std::size_t z = 0; z < nz; ++z) {
    std::vector<Channel> avail;
    for (Channel ch : kAllChannels) {
      if (availability[z][static_cast<std::size_t>(ch)]) avail.push_back(ch);
    }
    std::vector<std::string> names;
    if (avail.size() >= 2) {
      const FeatureMatrix all = build_matrix(zones[z].samples,
                                             FeatureSet(avail));
      RfcParams params;
      params.seed = mix_seed(cfg.seed, 0xFEA70 + z);
      const FeatureSet kept =
          select_features_rf(all, params, cfg.rf_selection_threshold);
      for (Channel ch : kept.channels()) {
        names.emplace_back(channel_name(ch));
      }
    } else {
      for (Channel ch : avail) names.emplace_back(channel_name(ch));
    }
    rep.selected_features.emplace_back(zones[z].name, std::move(names));
  }
  return rep;
}

void run_global(const ExperimentConfig& cfg,
                const std::vector<ZoneData>& zones,
                const std::string& train_zone, EvalReport& report) {
  const ZoneData* train = nullptr;
  for (const ZoneData& z : zones) {
    if (z.name == train_zone) train = &z;
  }
  if (train == nullptr) {
    throw ValueError("unknown training zone: " + train_zone);
  }
  const auto& menu = table1_feature_menu();
  const auto train_avail = probe_availability(train->samples);

  std::uint64_t cell_counter = 0;
  for (const ZoneData& test : zones) {
    if (test.name == train_zone) continue;
    const auto test_avail = probe_availability(test.samples);
    std::array<bool, kNumChannels> joint{};
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      joint[c] = train_avail[c] && test_avail[c];
    }

    bool any_row = false;
    for (const auto& row : menu) {
      FeatureSet fs;
      FeatureMatrix train_m, test_m;
      try {
        fs = resolve_feature_row(row, joint);
        train_m = build_matrix(train->samples, fs);
        test_m = build_matrix(test.samples, fs);
      } catch (const AvailabilityError&) {
        continue;
      }
      any_row = true;
      const Standardizer scaler = fit_standardizer(train_m);
      const FeatureMatrix train_s = scaler.apply(train_m);
      const FeatureMatrix test_s = scaler.apply(test_m);

      for (ModelKind kind : cfg.models) {
        const LocalCell* local =
            report.find_local(test.name, model_kind_name(kind), row.label);
        if (local == nullptr || !local->present) continue;

        ModelSpec spec = default_spec(kind);
        spec.lgr.optimizer = cfg.lgr_optimizer;
        const std::uint64_t seed =
            mix_seed(cfg.seed, 0x61000000 + cell_counter++);
        if (kind == ModelKind::rfc) spec.rfc.seed = seed;
        if (kind == ModelKind::svm) {
          spec.svm.seed = seed;
          spec.svm.max_steps = cfg.svm_max_steps;
          if (!cfg.svm_c_grid.empty()) {
            CvOptions opt;
            opt.k = cfg.k_folds;
            opt.svm_c_grid = cfg.svm_c_grid;
            opt.svm_tune_folds = cfg.svm_tune_folds;
            opt.svm_tune_max_rows = cfg.svm_tune_max_rows;
            spec.svm.c = tune_c_for_fold(train_m, spec.svm, opt, seed);
          }
        }
        const FeatureMatrix* fit_m = &train_s;
        std::optional<FeatureMatrix> svm_sub;
        if (kind == ModelKind::svm && cfg.svm_train_max_rows > 0 &&
            train_s.rows > cfg.svm_train_max_rows) {
          const auto rows = stratified_subsample(
              train_s.labels, cfg.svm_train_max_rows, 1, mix_seed(seed, 5));
          svm_sub = subset_rows(train_s, rows);
          fit_m = &*svm_sub;
        }
        const TrainedModel model = fit_model(*fit_m, spec);
        std::vector<int> preds(test_s.rows);
        for (std::size_t r = 0; r < test_s.rows; ++r) {
          preds[r] = model.predict(test_s.row(r));
        }
        GlobalCell cell;
        cell.train_zone = train_zone;
        cell.test_zone = test.name;
        cell.model = model_kind_name(kind);
        cell.feature_set = row.label;
        cell.acc = 100.0 * accuracy(preds, test_s.labels);
        cell.local_mean_acc = local->mean_acc;
        cell.drop = cell.local_mean_acc - cell.acc;
        report.global.push_back(std::move(cell));
      }
    }
    if (!any_row) {
      throw ValueError("no common channels between " + train_zone + " and " +
                       test.name);
    }
  }
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
  std::string out = s;
  while (out.size() < width) out.push_back(' ');
  return out;
}

}  // namespace

std::string render_report_text(const EvalReport& report) {
  std::string out;
  out += "Local occupancy-detection accuracy (percent, mean over folds)\n";
  out += "Cells:";
  for (std::size_t z = 0; z < report.zones.size(); ++z) {
    out += z == 0 ? " " : " / ";
    out += report.zones[z];
  }
  out += "\n\n";

  // Cell strings per (feature row, model column).
  std::vector<std::vector<std::string>> cells(
      report.feature_rows.size(),
      std::vector<std::string>(report.models.size()));
  for (std::size_t r = 0; r < report.feature_rows.size(); ++r) {
    for (std::size_t m = 0; m < report.models.size(); ++m) {
      std::string text;
      for (std::size_t z = 0; z < report.zones.size(); ++z) {
        if (z > 0) text += " / ";
        const LocalCell* cell = report.find_local(
            report.zones[z], report.models[m], report.feature_rows[r]);
        if (cell != nullptr && cell->present) {
          text += std::to_string(text_percent(cell->mean_acc));
        } else {
          text += "-";
        }
      }
      cells[r][m] = std::move(text);
    }
  }

  std::size_t label_w = 7;  // "feature"
  for (const auto& row : report.feature_rows) {
    label_w = std::max(label_w, row.size());
  }
  std::vector<std::size_t> col_w(report.models.size());
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    col_w[m] = report.models[m].size();
    for (std::size_t r = 0; r < report.feature_rows.size(); ++r) {
      col_w[m] = std::max(col_w[m], cells[r][m].size());
    }
  }

  out += pad("feature", label_w + 2);
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    const bool last = m + 1 == report.models.size();
    out += last ? report.models[m] : pad(report.models[m], col_w[m] + 2);
  }
  out += "\n";
  for (std::size_t r = 0; r < report.feature_rows.size(); ++r) {
    out += pad(report.feature_rows[r], label_w + 2);
    for (std::size_t m = 0; m < report.models.size(); ++m) {
      const bool last = m + 1 == report.models.size();
      out += last ? cells[r][m] : pad(cells[r][m], col_w[m] + 2);
    }
    out += "\n";
  }

  if (!report.global.empty()) {
    out += "\nGlobal transfer (model fit on the training zone, percent)\n";
    out += pad("train_zone", 12) + pad("test_zone", 12) + pad("model", 7) +
           pad("feature", 15) + pad("acc", 6) + pad("local", 7) + "drop\n";
    for (const GlobalCell& cell : report.global) {
      out += pad(cell.train_zone, 12) + pad(cell.test_zone, 12) +
             pad(cell.model, 7) + pad(cell.feature_set, 15) +
             pad(std::to_string(text_percent(cell.acc)), 6) +
             pad(std::to_string(text_percent(cell.local_mean_acc)), 7) +
             std::to_string(text_percent(cell.drop)) + "\n";
    }
  }

  if (!report.selected_features.empty()) {
    out += "\nSelected features (forest importance filter)\n";
    for (const auto& [zone, names] : report.selected_features) {
      out += zone + ":";
      for (std::size_t i = 0; i < names.size(); ++i) {
        out += i == 0 ? " " : ", ";
        out += names[i];
      }
      out += "\n";
    }
  }
  return out;
}

std::string render_report_json(const EvalReport& report) {
  ordered_json j;
  j["schema_version"] = 1;
  ordered_json local = ordered_json::array();
  for (const LocalCell& cell : report.local) {
    ordered_json jc;
    jc["zone"] = cell.zone;
    jc["model"] = cell.model;
    jc["feature_set"] = cell.feature_set;
    if (cell.present) {
      jc["mean_acc"] = round1(cell.mean_acc);
      ordered_json folds = ordered_json::array();
      for (double f : cell.fold_accs) folds.push_back(round1(f));
      jc["fold_accs"] = std::move(folds);
      jc["std"] = round1(cell.stddev);
      jc["precision"] = round1(cell.precision);
      jc["recall"] = round1(cell.recall);
    } else {
      jc["mean_acc"] = nullptr;
      jc["fold_accs"] = ordered_json::array();
      jc["std"] = nullptr;
      jc["precision"] = nullptr;
      jc["recall"] = nullptr;
    }
    local.push_back(std::move(jc));
  }
  j["local"] = std::move(local);

  ordered_json global = ordered_json::array();
  for (const GlobalCell& cell : report.global) {
    ordered_json jc;
    jc["train_zone"] = cell.train_zone;
    jc["test_zone"] = cell.test_zone;
    jc["model"] = cell.model;
    jc["feature_set"] = cell.feature_set;
    jc["acc"] = round1(cell.acc);
    jc["local_mean_acc"] = round1(cell.local_mean_acc);
    jc["drop"] = round1(cell.drop);
    global.push_back(std::move(jc));
  }
  j["global"] = std::move(global);

  ordered_json selected = ordered_json::object();
  for (const auto& [zone, names] : report.selected_features) {
    selected[zone] = names;
  }
  j["selected_features"] = std::move(selected);
  return j.dump(2) + "\n";
}

namespace {

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace

EvalReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("invalid report json: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw ValueError("unsupported report schema_version");
    }
    EvalReport rep;
    for (const auto& jc : j.at("local")) {
      LocalCell cell;
      cell.zone = jc.at("zone").get<std::string>();
      cell.model = jc.at("model").get<std::string>();
      cell.feature_set = jc.at("feature_set").get<std::string>();
      cell.present = !jc.at("mean_acc").is_null();
      if (cell.present) {
        cell.mean_acc = jc.at("mean_acc").get<double>();
        cell.fold_accs = jc.at("fold_accs").get<std::vector<double>>();
        cell.stddev = jc.at("std").get<double>();
        cell.precision = jc.at("precision").get<double>();
        cell.recall = jc.at("recall").get<double>();
      }
      push_unique(rep.zones, cell.zone);
      push_unique(rep.models, cell.model);
      push_unique(rep.feature_rows, cell.feature_set);
      rep.local.push_back(std::move(cell));
    }
    for (const auto& jc : j.at("global")) {
      GlobalCell cell;
      cell.train_zone = jc.at("train_zone").get<std::string>();
      cell.test_zone = jc.at("test_zone").get<std::string>();
      cell.model = jc.at("model").get<std::string>();
      cell.feature_set = jc.at("feature_set").get<std::string>();
      cell.acc = jc.at("acc").get<double>();
      cell.local_mean_acc = jc.at("local_mean_acc").get<double>();
      cell.drop = jc.at("drop").get<double>();
      rep.global.push_back(std::move(cell));
    }
    for (const auto& [zone, names] : j.at("selected_features").items()) {
      rep.selected_features.emplace_back(
          zone, names.get<std::vector<std::string>>());
    }
    return rep;
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("invalid report json: ") + e.what());
  }
}

}  // namespace occdet
