// Command-line front end: simulate sensor data, run the cross-validation
// experiments, export plot-ready data, and train/apply persisted models.
// Every command writes a manifest next to its outputs so runs can be
// reproduced bit-for-bit from the recorded seed and input hashes.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "occdet/csv.hpp"
#include "occdet/evaluate.hpp"
#include "occdet/model.hpp"
#include "occdet/preprocess.hpp"
#include "occdet/simulate.hpp"
#include "occdet/types.hpp"
#include "occdet/version.hpp"

#include <openssl/evp.h>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Filesystem-level failures; mapped to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void make_directories(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

// Reproducibility record written next to every command's outputs. Contains
// no timestamps, so identical runs write identical manifests.
void write_manifest(const fs::path& path, const std::string& command,
                    const std::vector<std::string>& args, std::uint64_t seed,
                    const std::vector<std::string>& inputs) {
  ordered_json j;
  j["command"] = command;
  j["args"] = args;
  j["seed"] = seed;
  j["version"] = occdet::kVersion;
  ordered_json hashes = ordered_json::array();
  for (const std::string& p : inputs) hashes.push_back(sha256_hex(read_file(p)));
  j["input_sha256"] = std::move(hashes);
  write_file(path, j.dump(2) + "\n");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

std::vector<occdet::Channel> parse_channel_list(const std::string& text) {
  std::vector<occdet::Channel> channels;
  for (const std::string& name : split_list(text)) {
    const auto ch = occdet::channel_from_name(name);
    if (!ch) throw occdet::ValueError("unknown channel: " + name);
    channels.push_back(*ch);
  }
  return channels;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct SimulateArgs {
  std::string config;
  std::string preset;
  int days = 30;
  std::uint64_t seed = 42;
  std::string out;
};

struct ExperimentArgs {
  std::string mode = "local";
  std::vector<std::string> data;
  std::string preset;
  std::string train_zone;
  int days = 30;
  std::int64_t interval = 300;
  int folds = 10;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string out;
};

struct PlotArgs {
  std::string data;
  std::string channels;
  std::string out;
};

struct TrainArgs {
  std::string data;
  std::string model;
  std::string features;
  std::int64_t interval = 300;
  std::uint64_t seed = 0;
  std::string out;
};

struct PredictArgs {
  std::string model;
  std::string data;
  std::int64_t interval = 300;
  std::string out;
};

std::vector<occdet::ZoneScenario> load_scenarios(const std::string& config,
                                                 const std::string& preset,
                                                 int days, std::uint64_t seed) {
  if (days <= 0) throw occdet::ValueError("--days must be positive");
  if (!config.empty()) {
    return occdet::parse_scenarios(read_file(config), days, seed);
  }
  if (preset == "paper") return occdet::make_paper_zones(days, seed);
  if (!preset.empty()) {
    throw occdet::ValueError("unknown preset: " + preset +
                             " (only 'paper' is defined)");
  }
  throw occdet::ValueError("either --config or --preset is required");
}

void cmd_simulate(const SimulateArgs& a,
                  const std::vector<std::string>& raw_args) {
  const auto zones = load_scenarios(a.config, a.preset, a.days, a.seed);
  make_directories(a.out);
  for (const occdet::ZoneScenario& z : zones) {
    const auto samples =
        occdet::simulate_zone(z.config, z.schedule, z.sim_seed);
    write_file(fs::path(a.out) / (z.config.name + ".csv"),
               occdet::format_csv(samples));
  }
  std::vector<std::string> inputs;
  if (!a.config.empty()) inputs.push_back(a.config);
  write_manifest(fs::path(a.out) / "manifest.json", "simulate", raw_args,
                 a.seed, inputs);
  std::cout << "wrote " << zones.size() << " zone CSVs to " << a.out << "\n";
}

void cmd_experiment(const ExperimentArgs& a,
                    const std::vector<std::string>& raw_args) {
  std::vector<occdet::ZoneData> zones;
  std::vector<std::string> inputs;
  if (!a.preset.empty()) {
    for (const occdet::ZoneScenario& z :
         load_scenarios("", a.preset, a.days, a.seed)) {
      zones.push_back(
          {z.config.name,
           occdet::resample(occdet::simulate_zone(z.config, z.schedule,
                                                  z.sim_seed),
                            a.interval)});
    }
  } else if (!a.data.empty()) {
    for (const std::string& path : a.data) {
      zones.push_back({fs::path(path).stem().string(),
                       occdet::resample(occdet::load_csv(path), a.interval)});
    }
    inputs = a.data;
  } else {
    throw occdet::ValueError("provide --data files or --preset paper");
  }

  occdet::ExperimentConfig cfg;
  cfg.seed = a.seed;
  cfg.k_folds = a.folds;
  cfg.threads = a.threads;
  occdet::EvalReport report = occdet::run_local(cfg, zones);
  if (a.mode == "global") {
    const std::string train =
        a.train_zone.empty() ? zones.front().name : a.train_zone;
    occdet::run_global(cfg, zones, train, report);
  }

  make_directories(a.out);
  write_file(fs::path(a.out) / "report.txt",
             occdet::render_report_text(report));
  write_file(fs::path(a.out) / "report.json",
             occdet::render_report_json(report));
  write_manifest(fs::path(a.out) / "manifest.json", "experiment", raw_args,
                 a.seed, inputs);
  std::cout << "wrote report.txt and report.json to " << a.out << "\n";
}

void cmd_plot_data(const PlotArgs& a,
                   const std::vector<std::string>& raw_args) {
  const auto samples = occdet::load_csv(a.data);
  const auto channels = a.channels.empty()
                            ? std::vector<occdet::Channel>(
                                  occdet::kAllChannels.begin(),
                                  occdet::kAllChannels.end())
                            : parse_channel_list(a.channels);
  std::string out = "timestamp,channel,value,occupied\n";
  for (const occdet::SensorSample& s : samples) {
    for (occdet::Channel ch : channels) {
      out += occdet::format_timestamp(s.timestamp);
      out += ',';
      out += occdet::channel_name(ch);
      out += ',';
      const auto& v = s.channel(ch);
      if (v.has_value()) out += format_value(*v);
      out += ',';
      out += s.occupied ? '1' : '0';
      out += '\n';
    }
  }
  write_file(a.out, out);
  write_manifest(a.out + ".manifest.json", "plot-data", raw_args, 0,
                 {a.data});
}

void cmd_train(const TrainArgs& a, const std::vector<std::string>& raw_args) {
  std::string kind_name = a.model;
  std::transform(kind_name.begin(), kind_name.end(), kind_name.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  const occdet::ModelKind kind = occdet::model_kind_from_name(kind_name);
  const auto samples =
      occdet::resample(occdet::load_csv(a.data), a.interval);
  const occdet::FeatureSet features{parse_channel_list(a.features)};
  occdet::ModelSpec spec = occdet::default_spec(kind);
  spec.svm.seed = a.seed;
  spec.rfc.seed = a.seed;
  const occdet::Pipeline pipeline =
      occdet::fit_pipeline(samples, features, spec);
  write_file(a.out, occdet::pipeline_to_json(pipeline));
  write_manifest(a.out + ".manifest.json", "train", raw_args, a.seed,
                 {a.data});
}

void cmd_predict(const PredictArgs& a,
                 const std::vector<std::string>& raw_args) {
  const occdet::Pipeline pipeline =
      occdet::pipeline_from_json(read_file(a.model));
  const auto samples =
      occdet::resample(occdet::load_csv(a.data), a.interval);
  const occdet::FeatureMatrix matrix =
      occdet::build_matrix(samples, pipeline.features);
  const occdet::FeatureMatrix standardized = pipeline.scaler.apply(matrix);
  std::string out = "timestamp,predicted\n";
  for (std::size_t r = 0; r < standardized.rows; ++r) {
    out += occdet::format_timestamp(
        samples[matrix.source_rows[r]].timestamp);
    out += ',';
    out += pipeline.model.predict(standardized.row(r)) ? '1' : '0';
    out += '\n';
  }
  if (a.out.empty()) {
    std::cout << out;
  } else {
    write_file(a.out, out);
    write_manifest(a.out + ".manifest.json", "predict", raw_args, 0,
                   {a.model, a.data});
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> raw_args(argv + 1, argv + argc);
  CLI::App app{"Occupancy detection from environmental sensor data"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Generate labeled sensor CSVs from the zone simulator");
  simulate->add_option("--config", sim.config, "Zone scenario JSON file");
  simulate->add_option("--preset", sim.preset, "Named scenario set ('paper')");
  simulate->add_option("--days", sim.days, "Days to simulate");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  ExperimentArgs exp;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "Cross-validated accuracy tables over zone datasets");
  experiment->add_option("--mode", exp.mode, "local or global")
      ->check(CLI::IsMember({"local", "global"}));
  experiment->add_option("--data", exp.data, "Zone CSV files");
  experiment->add_option("--preset", exp.preset,
                         "Simulate a named scenario set instead of reading "
                         "--data ('paper')");
  experiment->add_option("--train-zone", exp.train_zone,
                         "Training zone for --mode global (default: first)");
  experiment->add_option("--days", exp.days, "Days to simulate for --preset");
  experiment->add_option("--interval", exp.interval,
                         "Resample interval in seconds");
  experiment->add_option("--folds", exp.folds, "Cross-validation folds");
  experiment->add_option("--seed", exp.seed, "Random seed");
  experiment->add_option("--threads", exp.threads,
                         "Worker threads (0 = all cores)");
  experiment->add_option("--out", exp.out, "Output directory")->required();

  PlotArgs plot;
  CLI::App* plot_data = app.add_subcommand(
      "plot-data", "Export a long-format CSV for external plotting");
  plot_data->add_option("data", plot.data, "Input CSV")->required();
  plot_data->add_option("--channels", plot.channels,
                        "Comma-separated channel names (default: all)");
  plot_data->add_option("--out", plot.out, "Output CSV path")->required();

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Fit a classifier pipeline and save it as JSON");
  train_cmd->add_option("--data", train.data, "Training CSV")->required();
  train_cmd->add_option("--model", train.model,
                        "svm, gnb, lgr, rfc, or knn")->required();
  train_cmd
      ->add_option("--features", train.features,
                   "Comma-separated channel names")
      ->required();
  train_cmd->add_option("--interval", train.interval,
                        "Resample interval in seconds");
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--out", train.out, "Model JSON path")->required();

  PredictArgs pred;
  CLI::App* predict = app.add_subcommand(
      "predict", "Apply a saved pipeline to a CSV of sensor data");
  predict->add_option("--model", pred.model, "Model JSON path")->required();
  predict->add_option("--data", pred.data, "Input CSV")->required();
  predict->add_option("--interval", pred.interval,
                      "Resample interval in seconds");
  predict->add_option("--out", pred.out,
                      "Predictions CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) cmd_simulate(sim, raw_args);
    if (experiment->parsed()) cmd_experiment(exp, raw_args);
    if (plot_data->parsed()) cmd_plot_data(plot, raw_args);
    if (train_cmd->parsed()) cmd_train(train, raw_args);
    if (predict->parsed()) cmd_predict(pred, raw_args);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const occdet::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const occdet::ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const occdet::AvailabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const occdet::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const occdet::Error& e) {
    // Remaining library errors are file-level I/O failures.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
