// ssmix experiment driver: semi-supervised mixture estimation under a
// margin-based MAR label mechanism, with the Aranda-Ordaz missingness link.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "ssmix/error.hpp"
#include "ssmix/experiments.hpp"

using namespace ssmix;

namespace {

std::string out_path(const ExperimentConfig& config, const std::string& name) {
  return (std::filesystem::path(config.output_dir) / name).string();
}

void print_aggregate(const RunRecord& record) {
  std::printf("%-20s %8s %8s %8s %8s %8s %8s\n", "estimator", "auc", "logloss", "brier",
              "prec", "recall", "f1");
  for (const auto& agg : record.aggregates) {
    std::printf("%-20s %8.3f %8.3f %8.3f %8.3f %8.3f %8.3f\n", agg.estimator.c_str(),
                agg.mean[0], agg.mean[1], agg.mean[2], agg.mean[3], agg.mean[4],
                agg.mean[5]);
  }
}

std::vector<std::vector<std::string>> aggregate_rows(const RunRecord& record,
                                                     const std::string& family) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& agg : record.aggregates) {
    std::vector<std::string> row;
    if (!family.empty()) row.push_back(family);
    row.push_back(agg.estimator);
    for (int k = 0; k < 6; ++k) {
      row.push_back(format_double(agg.mean[k]));
      row.push_back(format_double(agg.sd[k]));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::string> aggregate_columns(bool with_family) {
  std::vector<std::string> cols;
  if (with_family) cols.push_back("family");
  cols.push_back("estimator");
  for (const char* m : {"auc", "logloss", "brier", "precision_opt", "recall_opt", "f1_opt"}) {
    cols.push_back(std::string(m) + "_mean");
    cols.push_back(std::string(m) + "_sd");
  }
  return cols;
}

std::vector<std::vector<std::string>> replicate_rows(const RunRecord& record,
                                                     const std::string& family) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& rep : record.replicates) {
    for (const auto& est : rep.estimators) {
      std::vector<std::string> row;
      if (!family.empty()) row.push_back(family);
      row.push_back(std::to_string(rep.index));
      row.push_back(est.name);
      row.push_back(format_double(rep.realized_missing_rate));
      row.push_back(format_double(est.metrics.auc));
      row.push_back(format_double(est.metrics.logloss));
      row.push_back(format_double(est.metrics.brier));
      row.push_back(format_double(est.metrics.precision_opt));
      row.push_back(format_double(est.metrics.recall_opt));
      row.push_back(format_double(est.metrics.f1_opt));
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<std::string> replicate_columns(bool with_family) {
  std::vector<std::string> cols;
  if (with_family) cols.push_back("family");
  for (const char* c : {"replicate", "estimator", "missing_rate", "auc", "logloss", "brier",
                        "precision_opt", "recall_opt", "f1_opt"}) {
    cols.emplace_back(c);
  }
  return cols;
}

int dispatch(const std::string& command, ExperimentConfig config, bool export_data) {
  config.experiment = command;
  if (const char* env = std::getenv("SSMIX_OUT_DIR")) config.output_dir = env;

  if (command == "approx-check") {
    const auto rows = run_approx_check(config.grid_size);
    std::vector<std::vector<double>> data;
    data.reserve(rows.size());
    for (const auto& r : rows) data.push_back({r.m2, r.exact, r.approx});
    write_data_file(out_path(config, "approx_check.csv"), config,
                    {"threshold_m2=0.36"}, {"m2", "H_exact", "H_approx"}, data);
    std::printf("wrote %s (%zu rows)\n", out_path(config, "approx_check.csv").c_str(),
                rows.size());
    return 0;
  }

  if (command == "simulate-fit") {
    const RunRecord record = run_simulate_fit(config);
    write_mixed_file(out_path(config, "table1_aggregate.csv"), config,
                     aggregate_columns(false), aggregate_rows(record, ""));
    write_mixed_file(out_path(config, "table1_replicates.csv"), config,
                     replicate_columns(false), replicate_rows(record, ""));
    write_run_record(out_path(config, "run_record.json"), record);
    if (export_data) {
      // datasets are deterministic per seed; regenerate and dump them
      for (const auto& rep : record.replicates) {
        SimSpec spec = config.sim;
        spec.seed = rep.seed;
        const Dataset ds = apply_mar_deletion(simulate(spec), config.mar.mechanism(),
                                              moment_matched_mixture(spec),
                                              config.mar.target_rate);
        write_dataset_csv(ds, out_path(config, "dataset_rep" + std::to_string(rep.index) +
                                                   ".csv"));
      }
    }
    print_aggregate(record);
    return 0;
  }

  if (command == "robustness") {
    std::vector<std::vector<std::string>> agg_rows, rep_rows;
    for (Family family : {Family::gamma, Family::beta, Family::laplace}) {
      const RunRecord record = run_robustness_family(config, family);
      const std::string label = record.family_label;
      for (auto& row : aggregate_rows(record, label)) agg_rows.push_back(row);
      for (auto& row : replicate_rows(record, label)) rep_rows.push_back(row);
      write_run_record(out_path(config, "run_record_" + label + ".json"), record);
      std::printf("-- %s --\n", label.c_str());
      print_aggregate(record);
    }
    write_mixed_file(out_path(config, "table2_aggregate.csv"), config,
                     aggregate_columns(true), agg_rows);
    write_mixed_file(out_path(config, "table2_replicates.csv"), config,
                     replicate_columns(true), rep_rows);
    return 0;
  }

  if (command == "missing-sweep") {
    const auto points = run_missing_sweep(config);
    std::vector<std::vector<double>> data;
    for (const auto& p : points) data.push_back({p.rate, p.auc_ecm_ao, p.auc_logistic});
    write_data_file(out_path(config, "missing_sweep.csv"), config, {},
                    {"rate", "auc_ecm_ao", "auc_logistic"}, data);
    for (const auto& p : points) {
      std::printf("rate %.2f  auc ecm-ao %.4f  auc logistic %.4f\n", p.rate, p.auc_ecm_ao,
                  p.auc_logistic);
    }
    return 0;
  }

  if (command == "threshold-sweep") {
    SimSpec spec = config.sim;
    spec.seed = config.seed;
    const Dataset full = simulate(spec);
    const Dataset ds = apply_mar_deletion(full, config.mar.mechanism(),
                                          moment_matched_mixture(spec), config.mar.target_rate);
    if (export_data) write_dataset_csv(ds, out_path(config, "dataset.csv"));
    const auto rows = run_threshold_sweep(ds, config);
    std::vector<std::vector<std::string>> data;
    for (const auto& r : rows) {
      data.push_back({format_double(r.threshold), r.metric, r.estimator,
                      format_double(r.value)});
    }
    write_mixed_file(out_path(config, "threshold_sweep.csv"), config,
                     {"threshold", "metric", "estimator", "value"}, data);
    std::printf("wrote %s (%zu rows)\n", out_path(config, "threshold_sweep.csv").c_str(),
                rows.size());
    return 0;
  }

  if (command == "magic") {
    const MagicResult result = run_magic(config);
    write_mixed_file(out_path(config, "magic_metrics.csv"), config, aggregate_columns(false),
                     aggregate_rows(result.record, ""));
    std::vector<std::vector<std::string>> sweep;
    for (const auto& r : result.threshold_rows) {
      sweep.push_back({format_double(r.threshold), r.metric, r.estimator,
                       format_double(r.value)});
    }
    write_mixed_file(out_path(config, "magic_threshold_sweep.csv"), config,
                     {"threshold", "metric", "estimator", "value"}, sweep);
    if (!result.missing_rows.empty()) {
      std::vector<std::vector<double>> data;
      for (const auto& p : result.missing_rows) {
        data.push_back({p.rate, p.auc_ecm_ao, p.auc_logistic});
      }
      write_data_file(out_path(config, "magic_missing_sweep.csv"), config, {},
                      {"rate", "auc_ecm_ao", "auc_logistic"}, data);
    }
    write_run_record(out_path(config, "magic_run_record.json"), result.record);
    std::printf("realized missing rate: %.4f\n",
                result.record.replicates.front().realized_missing_rate);
    print_aggregate(result.record);
    return 0;
  }

  throw std::invalid_argument("unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised two-component mixture estimation under MAR labels"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_dir;
  std::string magic_csv;
  std::string rates_csv;
  std::uint64_t seed = 0;
  int replicates = 0;
  int grid_size = 0;
  bool magic_sweep = false;
  bool export_data = false;
  bool have_seed = false, have_replicates = false, have_grid = false, have_out = false;

  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed = v; have_seed = true; }, "base RNG seed");
  app.add_option_function<std::string>(
         "--out", [&](const std::string& v) { out_dir = v; have_out = true; },
         "output directory");
  app.add_option_function<int>(
         "--replicates", [&](int v) { replicates = v; have_replicates = true; },
         "replicates per setting");
  app.add_flag("--export-data", export_data,
               "also write the simulated datasets as delimited text");

  CLI::App* approx = app.add_subcommand("approx-check", "entropy vs squared-margin table");
  approx->add_option_function<int>(
      "--grid-size", [&](int v) { grid_size = v; have_grid = true; }, "number of grid rows");

  app.add_subcommand("simulate-fit", "Gaussian design: three estimators, aggregate table");
  app.add_subcommand("robustness", "gamma/beta/laplace designs, two estimators");
  CLI::App* sweep = app.add_subcommand("missing-sweep", "mean AUC across missing rates");
  sweep->add_option("--rates", rates_csv, "comma-separated rates, e.g. 0.5,0.6,0.7");
  app.add_subcommand("threshold-sweep", "precision/recall/accuracy across thresholds");
  CLI::App* magic = app.add_subcommand("magic", "MAGIC telescope pipeline");
  magic->add_option("--data", magic_csv, "path to the MAGIC csv file");
  magic->add_flag("--missing-sweep", magic_sweep, "also run the missing-rate sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config;
    if (!config_path.empty()) config = ExperimentConfig::from_json_file(config_path);
    if (have_seed) config.seed = seed;
    if (have_out) config.output_dir = out_dir;
    if (have_replicates) config.replicates = replicates;
    if (have_grid) config.grid_size = grid_size;
    if (!magic_csv.empty()) config.magic_csv = magic_csv;
    if (magic_sweep) config.magic_missing_sweep = true;
    if (!rates_csv.empty()) {
      config.rates.clear();
      std::stringstream ss(rates_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) config.rates.push_back(std::stod(tok));
    }
    return dispatch(app.get_subcommands().front()->get_name(), std::move(config), export_data);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
