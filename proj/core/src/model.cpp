#include "occdet/model.hpp"

#include <utility>

#include "json.hpp"

namespace occdet {

using ordered_json = nlohmann::ordered_json;

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::svm: return "SVM";
    case ModelKind::gnb: return "GNB";
    case ModelKind::lgr: return "LGR";
    case ModelKind::rfc: return "RFC";
    case ModelKind::knn: return "KNN";
  }
  throw ValueError("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& s) {
  for (ModelKind kind : kAllModels) {
    if (model_kind_name(kind) == s) return kind;
  }
  throw ValueError("unknown model kind: " + s);
}

ModelSpec default_spec(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  return spec;
}

TrainedModel fit_model(const FeatureMatrix& m, const ModelSpec& spec) {
  TrainedModel model;
  model.kind = spec.kind;
  switch (spec.kind) {
    case ModelKind::svm:
      model.svm = svm_fit(m, spec.svm);
      break;
    case ModelKind::gnb:
      model.gnb = gnb_fit(m);
      break;
    case ModelKind::lgr:
      model.lgr = lgr_fit(m, spec.lgr);
      break;
    case ModelKind::rfc:
      model.rfc = rfc_fit(m, spec.rfc);
      break;
    case ModelKind::knn:
      if (m.rows < spec.knn.k) {
        throw ValueError("knn requires at least k training rows");
      }
      model.knn_train = m;
      model.knn = spec.knn;
      break;
  }
  return model;
}

int TrainedModel::predict(std::span<const double> x) const {
  switch (kind) {
    case ModelKind::svm: return svm.predict(x);
    case ModelKind::gnb: return gnb.predict(x);
    case ModelKind::lgr: return lgr.predict(x);
    case ModelKind::rfc: return rfc.predict(x);
    case ModelKind::knn: return knn_predict(knn_train, x, knn.k);
  }
  throw ValueError("unknown model kind");
}

Pipeline fit_pipeline(const std::vector<SensorSample>& samples,
                      const FeatureSet& features, const ModelSpec& spec) {
  Pipeline p;
  p.features = features;
  p.spec = spec;
  const FeatureMatrix raw = build_matrix(samples, features);
  p.scaler = fit_standardizer(raw);
  const FeatureMatrix scaled = p.scaler.apply(raw);
  p.model = fit_model(scaled, spec);
  return p;
}

std::vector<int> Pipeline::predict(
    const std::vector<SensorSample>& samples) const {
  const FeatureMatrix raw = build_matrix(samples, features);
  const FeatureMatrix scaled = scaler.apply(raw);
  std::vector<int> out;
  out.reserve(scaled.rows);
  for (std::size_t r = 0; r < scaled.rows; ++r) {
    out.push_back(model.predict(scaled.row(r)));
  }
  return out;
}

namespace {

ordered_json hyperparams_to_json(const ModelSpec& spec) {
  ordered_json j = ordered_json::object();
  switch (spec.kind) {
    case ModelKind::svm:
      j["c"] = spec.svm.c;
      j["kernel"] = spec.svm.kernel == KernelKind::rbf ? "rbf" : "linear";
      if (spec.svm.gamma) {
        j["gamma"] = *spec.svm.gamma;
      } else {
        j["gamma"] = "auto";
      }
      j["tolerance"] = spec.svm.tolerance;
      j["step_eps"] = spec.svm.step_eps;
      j["max_passes"] = spec.svm.max_passes;
      j["max_sweeps"] = spec.svm.max_sweeps;
      j["seed"] = spec.svm.seed;
      break;
    case ModelKind::gnb:
      break;
    case ModelKind::lgr:
      j["c"] = spec.lgr.c;
      j["memory"] = spec.lgr.optimizer.memory;
      j["grad_tolerance"] = spec.lgr.optimizer.grad_tolerance;
      j["max_iters"] = spec.lgr.optimizer.max_iters;
      break;
    case ModelKind::rfc:
      j["n_trees"] = spec.rfc.n_trees;
      j["max_depth"] = spec.rfc.max_depth;
      j["min_samples_split"] = spec.rfc.min_samples_split;
      j["features_per_split"] = spec.rfc.features_per_split;
      j["bootstrap"] = spec.rfc.bootstrap;
      j["seed"] = spec.rfc.seed;
      break;
    case ModelKind::knn:
      j["k"] = spec.knn.k;
      break;
  }
  return j;
}

void hyperparams_from_json(const ordered_json& j, ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::svm:
      spec.svm.c = j.at("c").get<double>();
      spec.svm.kernel = j.at("kernel").get<std::string>() == "rbf"
                            ? KernelKind::rbf
                            : KernelKind::linear;
      if (j.at("gamma").is_string()) {
        spec.svm.gamma.reset();
      } else {
        spec.svm.gamma = j.at("gamma").get<double>();
      }
      spec.svm.tolerance = j.at("tolerance").get<double>();
      spec.svm.step_eps = j.at("step_eps").get<double>();
      spec.svm.max_passes = j.at("max_passes").get<int>();
      spec.svm.max_sweeps = j.at("max_sweeps").get<int>();
      spec.svm.seed = j.at("seed").get<std::uint64_t>();
      break;
    case ModelKind::gnb:
      break;
    case ModelKind::lgr:
      spec.lgr.c = j.at("c").get<double>();
      spec.lgr.optimizer.memory = j.at("memory").get<int>();
      spec.lgr.optimizer.grad_tolerance =
          j.at("grad_tolerance").get<double>();
      spec.lgr.optimizer.max_iters = j.at("max_iters").get<int>();
      break;
    case ModelKind::rfc:
      spec.rfc.n_trees = j.at("n_trees").get<int>();
      spec.rfc.max_depth = j.at("max_depth").get<int>();
      spec.rfc.min_samples_split =
          j.at("min_samples_split").get<std::size_t>();
      spec.rfc.features_per_split =
          j.at("features_per_split").get<std::size_t>();
      spec.rfc.bootstrap = j.at("bootstrap").get<bool>();
      spec.rfc.seed = j.at("seed").get<std::uint64_t>();
      break;
    case ModelKind::knn:
      spec.knn.k = j.at("k").get<std::size_t>();
      break;
  }
}

ordered_json parameters_to_json(const Pipeline& p) {
  ordered_json j = ordered_json::object();
  ordered_json features = ordered_json::array();
  for (Channel ch : p.features.channels()) {
    features.push_back(std::string(channel_name(ch)));
  }
  j["features"] = std::move(features);
  j["standardizer"] = {{"mean", p.scaler.mean}, {"stddev", p.scaler.stddev}};

  const TrainedModel& m = p.model;
  switch (m.kind) {
    case ModelKind::svm: {
      ordered_json svs = ordered_json::array();
      for (std::size_t i = 0; i < m.svm.n_sv(); ++i) {
        auto row = m.svm.sv(i);
        svs.push_back(std::vector<double>(row.begin(), row.end()));
      }
      j["svm"] = {{"kernel",
                   m.svm.kernel == KernelKind::rbf ? "rbf" : "linear"},
                  {"gamma", m.svm.gamma},
                  {"c", m.svm.c},
                  {"bias", m.svm.bias},
                  {"converged", m.svm.converged},
                  {"sv_coef", m.svm.sv_coef},
                  {"support_vectors", std::move(svs)}};
      break;
    }
    case ModelKind::gnb:
      j["gnb"] = {{"priors", m.gnb.priors},
                  {"means", m.gnb.means},
                  {"variances", m.gnb.variances}};
      break;
    case ModelKind::lgr:
      j["lgr"] = {{"weights", m.lgr.weights}, {"intercept", m.lgr.intercept}};
      break;
    case ModelKind::rfc: {
      ordered_json trees = ordered_json::array();
      for (const DecisionTree& tree : m.rfc.trees) {
        ordered_json nodes = ordered_json::array();
        for (const TreeNode& nd : tree.nodes) {
          nodes.push_back(ordered_json::array(
              {nd.feature, nd.threshold, nd.left, nd.right, nd.label}));
        }
        trees.push_back(std::move(nodes));
      }
      j["rfc"] = {{"importances", m.rfc.importances},
                  {"trees", std::move(trees)}};
      break;
    }
    case ModelKind::knn:
      j["knn"] = {{"rows", m.knn_train.rows},
                  {"labels", m.knn_train.labels},
                  {"values", m.knn_train.values}};
      break;
  }
  return j;
}

void parameters_from_json(const ordered_json& j, Pipeline& p) {
  std::vector<Channel> channels;
  for (const auto& name : j.at("features")) {
    const auto ch = channel_from_name(name.get<std::string>());
    if (!ch) throw ValueError("unknown channel: " + name.get<std::string>());
    channels.push_back(*ch);
  }
  p.features = FeatureSet(channels);
  const std::size_t dim = p.features.size();

  p.scaler.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
  p.scaler.stddev =
      j.at("standardizer").at("stddev").get<std::vector<double>>();
  if (p.scaler.mean.size() != dim || p.scaler.stddev.size() != dim) {
    throw ValueError("standardizer size does not match feature count");
  }

  TrainedModel& m = p.model;
  m.kind = p.spec.kind;
  switch (m.kind) {
    case ModelKind::svm: {
      const auto& js = j.at("svm");
      m.svm.kernel = js.at("kernel").get<std::string>() == "rbf"
                         ? KernelKind::rbf
                         : KernelKind::linear;
      m.svm.gamma = js.at("gamma").get<double>();
      m.svm.c = js.at("c").get<double>();
      m.svm.bias = js.at("bias").get<double>();
      m.svm.converged = js.at("converged").get<bool>();
      m.svm.sv_coef = js.at("sv_coef").get<std::vector<double>>();
      m.svm.dim = dim;
      m.svm.sv_values.clear();
      for (const auto& row : js.at("support_vectors")) {
        const auto vals = row.get<std::vector<double>>();
        if (vals.size() != dim) {
          throw ValueError("support vector dimension mismatch");
        }
        m.svm.sv_values.insert(m.svm.sv_values.end(), vals.begin(),
                               vals.end());
      }
      if (m.svm.sv_coef.size() * dim != m.svm.sv_values.size()) {
        throw ValueError("support vector count does not match coefficients");
      }
      break;
    }
    case ModelKind::gnb: {
      const auto& jg = j.at("gnb");
      m.gnb.dim = dim;
      m.gnb.priors = jg.at("priors").get<std::array<double, 2>>();
      auto means = jg.at("means").get<std::array<std::vector<double>, 2>>();
      auto vars =
          jg.at("variances").get<std::array<std::vector<double>, 2>>();
      for (int cls = 0; cls < 2; ++cls) {
        if (means[cls].size() != dim || vars[cls].size() != dim) {
          throw ValueError("gnb parameter dimension mismatch");
        }
      }
      m.gnb.means = std::move(means);
      m.gnb.variances = std::move(vars);
      break;
    }
    case ModelKind::lgr:
      m.lgr.dim = dim;
      m.lgr.weights = j.at("lgr").at("weights").get<std::vector<double>>();
      m.lgr.intercept = j.at("lgr").at("intercept").get<double>();
      if (m.lgr.weights.size() != dim) {
        throw ValueError("lgr weight dimension mismatch");
      }
      break;
    case ModelKind::rfc: {
      const auto& jr = j.at("rfc");
      m.rfc.dim = dim;
      m.rfc.importances = jr.at("importances").get<std::vector<double>>();
      if (m.rfc.importances.size() != dim) {
        throw ValueError("rfc importance dimension mismatch");
      }
      m.rfc.trees.clear();
      for (const auto& jt : jr.at("trees")) {
        DecisionTree tree;
        tree.dim = dim;
        for (const auto& jn : jt) {
          if (!jn.is_array() || jn.size() != 5) {
            throw ValueError("malformed tree node");
          }
          TreeNode nd;
          nd.feature = jn[0].get<int>();
          nd.threshold = jn[1].get<double>();
          nd.left = jn[2].get<int>();
          nd.right = jn[3].get<int>();
          nd.label = jn[4].get<int>();
          tree.nodes.push_back(nd);
        }
        if (tree.nodes.empty()) throw ValueError("empty tree");
        m.rfc.trees.push_back(std::move(tree));
      }
      m.rfc.n_trees = static_cast<int>(m.rfc.trees.size());
      break;
    }
    case ModelKind::knn: {
      const auto& jk = j.at("knn");
      m.knn = p.spec.knn;
      FeatureMatrix train;
      train.features = p.features;
      train.rows = jk.at("rows").get<std::size_t>();
      train.labels = jk.at("labels").get<std::vector<int>>();
      train.values = jk.at("values").get<std::vector<double>>();
      if (train.labels.size() != train.rows ||
          train.values.size() != train.rows * dim) {
        throw ValueError("knn training data shape mismatch");
      }
      m.knn_train = std::move(train);
      break;
    }
  }
}

}  // namespace

std::string pipeline_to_json(const Pipeline& p) {
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = model_kind_name(p.spec.kind);
  j["hyperparams"] = hyperparams_to_json(p.spec);
  j["parameters"] = parameters_to_json(p);
  return j.dump(2) + "\n";
}

Pipeline pipeline_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("invalid model json: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != 1) {
      throw ValueError("unsupported model schema_version");
    }
    Pipeline p;
    p.spec.kind = model_kind_from_name(j.at("kind").get<std::string>());
    hyperparams_from_json(j.at("hyperparams"), p.spec);
    parameters_from_json(j.at("parameters"), p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("invalid model json: ") + e.what());
  }
}

}  // namespace occdet
