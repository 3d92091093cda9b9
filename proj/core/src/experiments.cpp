#include "ssmix/experiments.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "ssmix/error.hpp"
#include "ssmix/logistic.hpp"
#include "ssmix/magic.hpp"

namespace ssmix {

namespace {

using nlohmann::json;

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<long>(j.size()));
  long i = 0;
  for (const auto& x : j) v(i++) = x.get<double>();
  return v;
}

Eigen::MatrixXd mat_from_json(const json& j) {
  const long rows = static_cast<long>(j.size());
  const long cols = static_cast<long>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

json vec_to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (long i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json j = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

Family family_from_string(const std::string& s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "gamma") return Family::gamma;
  if (s == "beta") return Family::beta;
  if (s == "laplace") return Family::laplace;
  throw std::invalid_argument("unknown family: " + s);
}

std::string family_to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::gamma: return "gamma";
    case Family::beta: return "beta";
    case Family::laplace: return "laplace";
  }
  return "gaussian";
}

LinkKind link_from_string(const std::string& s) {
  if (s == "ao") return LinkKind::ao;
  if (s == "logit") return LinkKind::logit;
  throw std::invalid_argument("unknown link: " + s);
}

void sim_from_json(SimSpec& sim, const json& j) {
  if (j.contains("family")) {
    sim.family = family_from_string(j.at("family").get<std::string>());
    SimSpec defaults = SimSpec::defaults(sim.family);
    sim.components = defaults.components;
  }
  if (j.contains("n")) sim.n = j.at("n").get<long>();
  if (j.contains("mixing")) sim.mixing = j.at("mixing").get<double>();
  if (j.contains("gaussian") && sim.family == Family::gaussian) {
    const auto& g = j.at("gaussian");
    GaussianPair pair = std::get<GaussianPair>(sim.components);
    if (g.contains("means")) {
      pair[0].mean = vec_from_json(g.at("means").at(0));
      pair[1].mean = vec_from_json(g.at("means").at(1));
    }
    if (g.contains("covariances")) {
      pair[0].cov = mat_from_json(g.at("covariances").at(0));
      pair[1].cov = mat_from_json(g.at("covariances").at(1));
    }
    sim.components = pair;
  }
  if (j.contains("gamma") && sim.family == Family::gamma) {
    const auto& g = j.at("gamma");
    GammaPair pair = std::get<GammaPair>(sim.components);
    for (int c = 0; c < 2; ++c) {
      if (g.contains("shapes")) pair[c].shape = vec_from_json(g.at("shapes").at(c));
      if (g.contains("scales")) pair[c].scale = vec_from_json(g.at("scales").at(c));
      if (g.contains("offsets")) pair[c].offset = vec_from_json(g.at("offsets").at(c));
    }
    sim.components = pair;
  }
  if (j.contains("beta") && sim.family == Family::beta) {
    const auto& g = j.at("beta");
    BetaPair pair = std::get<BetaPair>(sim.components);
    for (int c = 0; c < 2; ++c) {
      if (g.contains("a")) pair[c].a = vec_from_json(g.at("a").at(c));
      if (g.contains("b")) pair[c].b = vec_from_json(g.at("b").at(c));
    }
    sim.components = pair;
  }
  if (j.contains("laplace") && sim.family == Family::laplace) {
    const auto& g = j.at("laplace");
    LaplacePair pair = std::get<LaplacePair>(sim.components);
    for (int c = 0; c < 2; ++c) {
      if (g.contains("locations")) pair[c].location = vec_from_json(g.at("locations").at(c));
      if (g.contains("scales")) pair[c].scale = vec_from_json(g.at("scales").at(c));
    }
    sim.components = pair;
  }
}

json sim_to_json(const SimSpec& sim) {
  json j;
  j["family"] = family_to_string(sim.family);
  j["n"] = sim.n;
  j["mixing"] = sim.mixing;
  std::visit(
      [&](const auto& pair) {
        using T = std::decay_t<decltype(pair)>;
        if constexpr (std::is_same_v<T, GaussianPair>) {
          j["gaussian"] = {{"means", json::array({vec_to_json(pair[0].mean), vec_to_json(pair[1].mean)})},
                           {"covariances", json::array({mat_to_json(pair[0].cov), mat_to_json(pair[1].cov)})}};
        } else if constexpr (std::is_same_v<T, GammaPair>) {
          j["gamma"] = {{"shapes", json::array({vec_to_json(pair[0].shape), vec_to_json(pair[1].shape)})},
                        {"scales", json::array({vec_to_json(pair[0].scale), vec_to_json(pair[1].scale)})},
                        {"offsets", json::array({vec_to_json(pair[0].offset), vec_to_json(pair[1].offset)})}};
        } else if constexpr (std::is_same_v<T, BetaPair>) {
          j["beta"] = {{"a", json::array({vec_to_json(pair[0].a), vec_to_json(pair[1].a)})},
                       {"b", json::array({vec_to_json(pair[0].b), vec_to_json(pair[1].b)})}};
        } else {
          j["laplace"] = {{"locations", json::array({vec_to_json(pair[0].location), vec_to_json(pair[1].location)})},
                          {"scales", json::array({vec_to_json(pair[0].scale), vec_to_json(pair[1].scale)})}};
        }
      },
      sim.components);
  return j;
}

}  // namespace

std::variant<AoParams, LogitParams> MarSpec::mechanism() const {
  if (link == LinkKind::logit) return LogitParams{intercept, slope};
  return AoParams{intercept, slope, lambda};
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (grid_size < 2) throw std::invalid_argument("config: grid_size must be >= 2");
  for (double r : rates) {
    if (!(r > 0.0) || !(r < 1.0)) {
      throw std::invalid_argument("config: sweep rates must lie in (0, 1)");
    }
  }
  sim.validate();
  ecm.validate();
  if (mar.lambda < 0.0 || mar.lambda > 10.0) {
    throw std::invalid_argument("config: mar.lambda outside [0, 10]");
  }
}

void ExperimentConfig::apply_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  try {
    if (j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("replicates")) replicates = j.at("replicates").get<int>();
    if (j.contains("output_dir")) output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("grid_size")) grid_size = j.at("grid_size").get<int>();
    if (j.contains("rates")) rates = j.at("rates").get<std::vector<double>>();
    if (j.contains("magic_csv")) magic_csv = j.at("magic_csv").get<std::string>();
    if (j.contains("magic_missing_sweep")) {
      magic_missing_sweep = j.at("magic_missing_sweep").get<bool>();
    }
    if (j.contains("sim")) sim_from_json(sim, j.at("sim"));
    if (j.contains("mar")) {
      const auto& m = j.at("mar");
      if (m.contains("link")) mar.link = link_from_string(m.at("link").get<std::string>());
      if (m.contains("slope")) mar.slope = m.at("slope").get<double>();
      if (m.contains("lambda")) mar.lambda = m.at("lambda").get<double>();
      if (m.contains("intercept")) {
        mar.intercept = m.at("intercept").get<double>();
        if (!m.contains("target_rate")) mar.target_rate.reset();
      }
      if (m.contains("target_rate")) {
        if (m.at("target_rate").is_null()) mar.target_rate.reset();
        else mar.target_rate = m.at("target_rate").get<double>();
      }
    }
    if (j.contains("ecm")) {
      const auto& e = j.at("ecm");
      if (e.contains("max_iters")) ecm.max_iters = e.at("max_iters").get<int>();
      if (e.contains("rel_tol")) ecm.rel_tol = e.at("rel_tol").get<double>();
      if (e.contains("ridge")) ecm.ridge = e.at("ridge").get<double>();
      if (e.contains("link")) ecm.link = link_from_string(e.at("link").get<std::string>());
      if (e.contains("lambda")) {
        if (e.at("lambda").is_string()) {
          if (e.at("lambda").get<std::string>() != "estimated") {
            throw std::invalid_argument("config: ecm.lambda must be a number or \"estimated\"");
          }
          ecm.lambda_estimated = true;
        } else {
          ecm.lambda_estimated = false;
          ecm.lambda_fixed = e.at("lambda").get<double>();
        }
      }
      if (e.contains("lambda_grid")) {
        ecm.lambda_grid = {e.at("lambda_grid").at(0).get<double>(),
                           e.at("lambda_grid").at(1).get<double>()};
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: bad field: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ExperimentConfig config;
  config.apply_json_text(text);
  return config;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["replicates"] = replicates;
  j["output_dir"] = output_dir;
  j["grid_size"] = grid_size;
  j["rates"] = rates;
  if (!magic_csv.empty()) j["magic_csv"] = magic_csv;
  j["magic_missing_sweep"] = magic_missing_sweep;
  j["sim"] = sim_to_json(sim);
  j["mar"] = {{"link", mar.link == LinkKind::ao ? "ao" : "logit"},
              {"slope", mar.slope},
              {"lambda", mar.lambda}};
  if (mar.target_rate) j["mar"]["target_rate"] = *mar.target_rate;
  else j["mar"]["intercept"] = mar.intercept;
  j["ecm"] = {{"max_iters", ecm.max_iters},
              {"rel_tol", ecm.rel_tol},
              {"ridge", ecm.ridge},
              {"link", ecm.link == LinkKind::ao ? "ao" : "logit"},
              {"lambda_grid", json::array({ecm.lambda_grid.first, ecm.lambda_grid.second})}};
  if (ecm.lambda_estimated) j["ecm"]["lambda"] = "estimated";
  else j["ecm"]["lambda"] = ecm.lambda_fixed;
  return j.dump(2);
}

std::string ExperimentConfig::config_hash() const {
  const std::string dump = to_json_text();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void RunRecord::aggregate() {
  aggregates.clear();
  std::vector<std::string> names;
  for (const auto& rep : replicates) {
    for (const auto& est : rep.estimators) {
      if (std::find(names.begin(), names.end(), est.name) == names.end()) {
        names.push_back(est.name);
      }
    }
  }
  for (const auto& name : names) {
    std::vector<std::array<double, 6>> rows;
    for (const auto& rep : replicates) {
      for (const auto& est : rep.estimators) {
        if (est.name != name) continue;
        rows.push_back({est.metrics.auc, est.metrics.logloss, est.metrics.brier,
                        est.metrics.precision_opt, est.metrics.recall_opt,
                        est.metrics.f1_opt});
      }
    }
    AggregateRow agg;
    agg.estimator = name;
    const double n = static_cast<double>(rows.size());
    for (int k = 0; k < 6; ++k) {
      double mean = 0.0;
      for (const auto& r : rows) mean += r[k];
      mean /= n;
      double var = 0.0;
      for (const auto& r : rows) var += (r[k] - mean) * (r[k] - mean);
      agg.mean[k] = mean;
      agg.sd[k] = std::sqrt(var / n);
    }
    aggregates.push_back(agg);
  }
}

Eigen::VectorXd ecm_scores(const Dataset& dataset, const FullParams& params) {
  return responsibilities(dataset.features, params.theta).tau.col(0);
}

MixtureParams preliminary_gaussian_fit(const Dataset& dataset, double ridge) {
  if (dataset.num_labeled() != dataset.n()) {
    throw std::invalid_argument("preliminary_gaussian_fit: dataset must be fully labeled");
  }
  const long d = dataset.dim();
  MixtureParams theta;
  theta.weights.resize(2);
  theta.means.assign(2, Eigen::VectorXd::Zero(d));
  theta.covariances.assign(2, Eigen::MatrixXd::Zero(d, d));
  std::array<long, 2> counts{0, 0};
  for (long j = 0; j < dataset.n(); ++j) {
    const int c = dataset.true_labels[j] - 1;
    theta.means[c] += dataset.features.row(j).transpose();
    ++counts[c];
  }
  for (int c = 0; c < 2; ++c) {
    if (counts[c] < d + 1) {
      throw DataError("preliminary_gaussian_fit: class " + std::to_string(c + 1) +
                      " has too few rows");
    }
    theta.weights(c) = static_cast<double>(counts[c]) / dataset.n();
    theta.means[c] /= static_cast<double>(counts[c]);
  }
  for (long j = 0; j < dataset.n(); ++j) {
    const int c = dataset.true_labels[j] - 1;
    const Eigen::VectorXd r = dataset.features.row(j).transpose() - theta.means[c];
    theta.covariances[c] += r * r.transpose();
  }
  for (int c = 0; c < 2; ++c) {
    theta.covariances[c] /= static_cast<double>(counts[c]);
    theta.covariances[c].diagonal().array() +=
        ridge * theta.covariances[c].trace() / static_cast<double>(d);
  }
  theta.validate();
  return theta;
}

namespace {

std::vector<int> truth01_of(const Dataset& ds) {
  std::vector<int> truth(ds.n());
  for (long j = 0; j < ds.n(); ++j) truth[j] = ds.true_labels[j] == 1 ? 1 : 0;
  return truth;
}

EstimatorResult run_one_estimator(const std::string& name, const Dataset& ds,
                                  const EcmConfig& base, std::uint64_t seed) {
  EstimatorResult result;
  result.name = name;
  const std::vector<int> truth = truth01_of(ds);

  if (name == "logistic-baseline") {
    const auto rows = ds.labeled_rows();
    Eigen::MatrixXd x(static_cast<long>(rows.size()), ds.dim());
    std::vector<int> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      x.row(static_cast<long>(i)) = ds.features.row(rows[i]);
      y[i] = ds.observed_labels[rows[i]] == 1 ? 1 : 0;
    }
    const LogisticModel model = fit_irls(x, y);
    result.metrics = compute_metrics(predict_proba(model, ds.features), truth);
    result.separation_flag = model.separation_flag;
    return result;
  }

  EcmConfig cfg = base;
  cfg.seed = seed;
  if (name == "ecm-ao") {
    cfg.link = LinkKind::ao;
  } else if (name == "ecm-logit") {
    cfg.link = LinkKind::logit;
  } else {
    throw std::invalid_argument("unknown estimator: " + name);
  }
  const auto [params, report] = fit(ds, cfg);
  result.metrics = compute_metrics(ecm_scores(ds, params), truth);
  result.iterations = report.iterations;
  result.converged = report.converged;
  result.final_loglik = report.loglik_trace.back();
  return result;
}

}  // namespace

ReplicateRecord run_sim_replicate(const ExperimentConfig& config, const SimSpec& sim,
                                  int replicate_index,
                                  const std::vector<std::string>& estimators) {
  SimSpec spec = sim;
  spec.seed = config.seed + static_cast<std::uint64_t>(replicate_index);
  const Dataset full = simulate(spec);
  const MixtureParams oracle = moment_matched_mixture(spec);
  const Dataset ds =
      apply_mar_deletion(full, config.mar.mechanism(), oracle, config.mar.target_rate);

  ReplicateRecord rec;
  rec.index = replicate_index;
  rec.seed = spec.seed;
  rec.realized_missing_rate = ds.realized_missing_rate();
  for (const auto& name : estimators) {
    rec.estimators.push_back(run_one_estimator(name, ds, config.ecm, spec.seed));
  }
  return rec;
}

RunRecord run_simulate_fit(const ExperimentConfig& config) {
  config.validate();
  RunRecord record;
  record.config = config;
  for (int rep = 0; rep < config.replicates; ++rep) {
    try {
      record.replicates.push_back(run_sim_replicate(
          config, config.sim, rep, {"ecm-ao", "ecm-logit", "logistic-baseline"}));
    } catch (const std::exception& e) {
      std::cerr << "warning: replicate " << rep << " failed: " << e.what() << "\n";
    }
  }
  if (record.replicates.empty()) throw NumericError("simulate-fit: every replicate failed");
  record.aggregate();
  return record;
}

RunRecord run_robustness_family(const ExperimentConfig& config, Family family) {
  config.validate();
  SimSpec sim = config.sim.family == family ? config.sim : SimSpec::defaults(family);
  if (config.sim.family != family) {
    sim.n = config.sim.n;
    sim.mixing = config.sim.mixing;
  }
  RunRecord record;
  record.config = config;
  record.family_label = family_to_string(family);
  for (int rep = 0; rep < config.replicates; ++rep) {
    try {
      record.replicates.push_back(
          run_sim_replicate(config, sim, rep, {"ecm-ao", "logistic-baseline"}));
    } catch (const std::exception& e) {
      std::cerr << "warning: replicate " << rep << " failed: " << e.what() << "\n";
    }
  }
  if (record.replicates.empty()) throw NumericError("robustness: every replicate failed");
  record.aggregate();
  return record;
}

std::vector<SweepPoint> run_missing_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<SweepPoint> points;
  for (std::size_t ri = 0; ri < config.rates.size(); ++ri) {
    // common random numbers across rates: replicate r reuses the same
    // simulated dataset and deletion uniforms at every rate, so the sweep
    // isolates the effect of the missing fraction instead of between-rate
    // sampling noise
    ExperimentConfig block = config;
    block.mar.target_rate = config.rates[ri];
    SweepPoint point;
    point.rate = config.rates[ri];
    long count = 0;
    for (int rep = 0; rep < config.replicates; ++rep) {
      try {
        const ReplicateRecord rec = run_sim_replicate(block, config.sim, rep,
                                                      {"ecm-ao", "logistic-baseline"});
        point.auc_ecm_ao += rec.estimators[0].metrics.auc;
        point.auc_logistic += rec.estimators[1].metrics.auc;
        ++count;
      } catch (const std::exception& e) {
        std::cerr << "warning: rate " << config.rates[ri] << " replicate " << rep
                  << " failed: " << e.what() << "\n";
      }
    }
    if (count == 0) throw NumericError("missing-sweep: every replicate failed at a rate");
    point.auc_ecm_ao /= static_cast<double>(count);
    point.auc_logistic /= static_cast<double>(count);
    points.push_back(point);
  }
  return points;
}

namespace {

std::vector<ThresholdSweepRow> threshold_rows_from_scores(
    const std::vector<std::pair<std::string, Eigen::VectorXd>>& scores,
    const std::vector<int>& truth) {
  std::vector<ThresholdSweepRow> rows;
  for (const auto& [name, s] : scores) {
    for (const SweepRow& r : threshold_sweep(s, truth)) {
      rows.push_back({r.threshold, "precision", name, r.precision});
      rows.push_back({r.threshold, "recall", name, r.recall});
      rows.push_back({r.threshold, "accuracy", name, r.accuracy});
    }
  }
  return rows;
}

}  // namespace

std::vector<ThresholdSweepRow> run_threshold_sweep(const Dataset& dataset,
                                                   const ExperimentConfig& config) {
  const std::vector<int> truth = truth01_of(dataset);

  EcmConfig cfg = config.ecm;
  cfg.link = LinkKind::ao;
  cfg.seed = config.seed;
  const auto [params, report] = fit(dataset, cfg);

  const auto rows_idx = dataset.labeled_rows();
  Eigen::MatrixXd x(static_cast<long>(rows_idx.size()), dataset.dim());
  std::vector<int> y(rows_idx.size());
  for (std::size_t i = 0; i < rows_idx.size(); ++i) {
    x.row(static_cast<long>(i)) = dataset.features.row(rows_idx[i]);
    y[i] = dataset.observed_labels[rows_idx[i]] == 1 ? 1 : 0;
  }
  const LogisticModel baseline = fit_irls(x, y);

  return threshold_rows_from_scores(
      {{"ecm-ao", ecm_scores(dataset, params)},
       {"logistic-baseline", predict_proba(baseline, dataset.features)}},
      truth);
}

std::vector<ApproxRow> run_approx_check(int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("approx-check: grid size must be >= 2");
  std::vector<ApproxRow> rows;
  rows.reserve(grid_size);
  Eigen::VectorXd tau(2);
  for (int i = 0; i < grid_size; ++i) {
    const double m2 = static_cast<double>(i) / (grid_size - 1);
    const double delta = std::sqrt(m2);
    tau << 0.5 * (1.0 + delta), 0.5 * (1.0 - delta);
    rows.push_back({m2, shannon_entropy(tau), entropy_quadratic_approx(delta)});
  }
  return rows;
}

MagicResult run_magic(const ExperimentConfig& config) {
  config.validate();
  if (config.magic_csv.empty()) {
    throw std::invalid_argument("magic: a dataset path is required (--data)");
  }
  MagicResult out;
  out.record.config = config;

  Dataset pre = preprocess_magic(load_magic_csv(config.magic_csv));
  pre.seed = config.seed;
  const MixtureParams oracle = preliminary_gaussian_fit(pre);
  const Dataset ds =
      apply_mar_deletion(pre, config.mar.mechanism(), oracle, config.mar.target_rate);
  out.prepared = ds;

  ReplicateRecord rec;
  rec.index = 0;
  rec.seed = config.seed;
  rec.realized_missing_rate = ds.realized_missing_rate();

  const std::vector<int> truth = truth01_of(ds);
  EcmConfig cfg = config.ecm;
  cfg.link = LinkKind::ao;
  cfg.seed = config.seed;
  const auto [params, report] = fit(ds, cfg);
  EstimatorResult ecm_result;
  ecm_result.name = "ecm-ao";
  ecm_result.metrics = compute_metrics(ecm_scores(ds, params), truth);
  ecm_result.iterations = report.iterations;
  ecm_result.converged = report.converged;
  ecm_result.final_loglik = report.loglik_trace.back();
  rec.estimators.push_back(ecm_result);

  const auto rows_idx = ds.labeled_rows();
  Eigen::MatrixXd x(static_cast<long>(rows_idx.size()), ds.dim());
  std::vector<int> y(rows_idx.size());
  for (std::size_t i = 0; i < rows_idx.size(); ++i) {
    x.row(static_cast<long>(i)) = ds.features.row(rows_idx[i]);
    y[i] = ds.observed_labels[rows_idx[i]] == 1 ? 1 : 0;
  }
  const LogisticModel baseline = fit_irls(x, y);
  EstimatorResult logit_result;
  logit_result.name = "logistic-baseline";
  logit_result.metrics = compute_metrics(predict_proba(baseline, ds.features), truth);
  logit_result.separation_flag = baseline.separation_flag;
  rec.estimators.push_back(logit_result);

  out.record.replicates.push_back(rec);
  out.record.aggregate();

  out.threshold_rows = threshold_rows_from_scores(
      {{"ecm-ao", ecm_scores(ds, params)},
       {"logistic-baseline", predict_proba(baseline, ds.features)}},
      truth);

  if (config.magic_missing_sweep) {
    for (std::size_t ri = 0; ri < config.rates.size(); ++ri) {
      SweepPoint point;
      point.rate = config.rates[ri];
      long count = 0;
      for (int rep = 0; rep < config.replicates; ++rep) {
        try {
          Dataset redeleted = pre;
          redeleted.seed =
              config.seed + 10007ULL * static_cast<std::uint64_t>(ri) + rep;
          redeleted = apply_mar_deletion(redeleted, config.mar.mechanism(), oracle,
                                         config.rates[ri]);
          EcmConfig sweep_cfg = cfg;
          sweep_cfg.seed = redeleted.seed;
          const auto [p2, r2] = fit(redeleted, sweep_cfg);
          point.auc_ecm_ao += compute_metrics(ecm_scores(redeleted, p2), truth).auc;

          const auto li = redeleted.labeled_rows();
          Eigen::MatrixXd xl(static_cast<long>(li.size()), redeleted.dim());
          std::vector<int> yl(li.size());
          for (std::size_t i = 0; i < li.size(); ++i) {
            xl.row(static_cast<long>(i)) = redeleted.features.row(li[i]);
            yl[i] = redeleted.observed_labels[li[i]] == 1 ? 1 : 0;
          }
          const LogisticModel bl = fit_irls(xl, yl);
          point.auc_logistic += compute_metrics(predict_proba(bl, redeleted.features), truth).auc;
          ++count;
        } catch (const std::exception& e) {
          std::cerr << "warning: magic sweep rate " << config.rates[ri] << " replicate "
                    << rep << " failed: " << e.what() << "\n";
        }
      }
      if (count > 0) {
        point.auc_ecm_ao /= static_cast<double>(count);
        point.auc_logistic /= static_cast<double>(count);
        out.missing_rows.push_back(point);
      }
    }
  }
  return out;
}

// --- emission ----------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void write_preamble(std::ofstream& out, const ExperimentConfig& config) {
  out << "# generated: " << timestamp_utc() << "\n";
  out << "# config: " << config.config_hash() << " experiment=" << config.experiment
      << " seed=" << config.seed << "\n";
}

}  // namespace

void write_data_file(const std::string& path, const ExperimentConfig& config,
                     const std::vector<std::string>& extra_comments,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  write_preamble(out, config);
  for (const auto& c : extra_comments) out << "# " << c << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << format_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
  }
}

void write_mixed_file(const std::string& path, const ExperimentConfig& config,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_out(path);
  write_preamble(out, config);
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
  }
}

void write_run_record(const std::string& path, const RunRecord& record) {
  json j;
  j["config"] = json::parse(record.config.to_json_text());
  j["config_hash"] = record.config.config_hash();
  if (!record.family_label.empty()) j["family"] = record.family_label;

  json reps = json::array();
  for (const auto& rep : record.replicates) {
    json r;
    r["index"] = rep.index;
    r["seed"] = rep.seed;
    r["realized_missing_rate"] = rep.realized_missing_rate;
    json ests = json::array();
    for (const auto& est : rep.estimators) {
      json e;
      e["name"] = est.name;
      e["auc"] = est.metrics.auc;
      e["logloss"] = est.metrics.logloss;
      e["brier"] = est.metrics.brier;
      e["threshold_opt"] = est.metrics.threshold_opt;
      e["precision_opt"] = est.metrics.precision_opt;
      e["recall_opt"] = est.metrics.recall_opt;
      e["f1_opt"] = est.metrics.f1_opt;
      if (est.name == "logistic-baseline") {
        e["separation_flag"] = est.separation_flag;
      } else {
        e["iterations"] = est.iterations;
        e["converged"] = est.converged;
        e["final_loglik"] = est.final_loglik;
      }
      ests.push_back(e);
    }
    r["estimators"] = ests;
    reps.push_back(r);
  }
  j["replicates"] = reps;

  json aggs = json::array();
  static const std::array<const char*, 6> kMetricNames{"auc",           "logloss",
                                                       "brier",         "precision_opt",
                                                       "recall_opt",    "f1_opt"};
  for (const auto& agg : record.aggregates) {
    json a;
    a["estimator"] = agg.estimator;
    for (int k = 0; k < 6; ++k) {
      a[std::string(kMetricNames[k]) + "_mean"] = agg.mean[k];
      a[std::string(kMetricNames[k]) + "_sd"] = agg.sd[k];
    }
    aggs.push_back(a);
  }
  j["aggregates"] = aggs;
  // evaluation protocol note carried on every report
  j["evaluation_population"] = "all rows (labeled and missing) against true labels";

  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace ssmix
