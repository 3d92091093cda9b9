#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssmix/error.hpp"
#include "ssmix/experiments.hpp"
#include "support/magic_fixture.hpp"

using namespace ssmix;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strips the timestamp line so reruns can be compared byte for byte.
std::string without_timestamp(const std::string& text) {
  const auto nl = text.find('\n');
  REQUIRE(text.rfind("# generated:", 0) == 0);
  return text.substr(nl + 1);
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "ssmix_test_out";
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("config json round trip and overrides") {
  ExperimentConfig config;
  config.seed = 42;
  config.replicates = 7;
  config.mar.slope = -2.5;
  const std::string text = config.to_json_text();

  ExperimentConfig parsed;
  parsed.apply_json_text(text);
  CHECK(parsed.seed == 42);
  CHECK(parsed.replicates == 7);
  CHECK(parsed.mar.slope == doctest::Approx(-2.5));
  CHECK(parsed.config_hash() == config.config_hash());

  // partial override leaves everything else at defaults
  ExperimentConfig partial;
  partial.apply_json_text(R"({"replicates": 3, "ecm": {"lambda": 2.0}})");
  CHECK(partial.replicates == 3);
  CHECK_FALSE(partial.ecm.lambda_estimated);
  CHECK(partial.ecm.lambda_fixed == doctest::Approx(2.0));
  CHECK(partial.seed == ExperimentConfig{}.seed);

  // sim block: family switch pulls that family's defaults, then overrides
  ExperimentConfig fam;
  fam.apply_json_text(R"({"sim": {"family": "gamma", "n": 500,
    "gamma": {"shapes": [[3,3],[6,6]]}}})");
  CHECK(fam.sim.family == Family::gamma);
  CHECK(fam.sim.n == 500);
  CHECK(std::get<GammaPair>(fam.sim.components)[0].shape(0) == doctest::Approx(3.0));
  CHECK(std::get<GammaPair>(fam.sim.components)[1].offset(0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(ExperimentConfig{}.apply_json_text("{not json"), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig{}.apply_json_text(R"({"ecm": {"lambda": "auto"}})"),
                  std::invalid_argument);
}

TEST_CASE("config hash is stable and sensitive") {
  ExperimentConfig a, b;
  CHECK(a.config_hash() == b.config_hash());
  b.seed += 1;
  CHECK(a.config_hash() != b.config_hash());
}

TEST_CASE("approx-check rows") {
  const auto rows = run_approx_check(101);
  REQUIRE(rows.size() == 101);
  CHECK(rows.front().m2 == 0.0);
  CHECK(rows.front().exact == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(rows.front().approx == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(rows.back().m2 == doctest::Approx(1.0));
  // the 0.36 gridpoint sits within the validated error band
  const auto& at36 = rows[36];
  CHECK(at36.m2 == doctest::Approx(0.36));
  CHECK(std::abs(at36.exact - at36.approx) <= 0.013);
}

TEST_CASE("simulate-fit record: aggregates recompute from replicates") {
  ExperimentConfig config;
  config.replicates = 3;
  config.sim.n = 300;
  config.seed = 11;
  config.ecm.max_iters = 30;
  config.ecm.lambda_estimated = false;  // keep this test fast
  const RunRecord record = run_simulate_fit(config);

  REQUIRE(record.replicates.size() == 3);
  REQUIRE(record.aggregates.size() == 3);  // ecm-ao, ecm-logit, logistic-baseline
  CHECK(record.aggregates[0].estimator == "ecm-ao");
  CHECK(record.aggregates[1].estimator == "ecm-logit");
  CHECK(record.aggregates[2].estimator == "logistic-baseline");

  for (const auto& agg : record.aggregates) {
    double mean_auc = 0.0;
    long count = 0;
    for (const auto& rep : record.replicates) {
      for (const auto& est : rep.estimators) {
        if (est.name == agg.estimator) {
          mean_auc += est.metrics.auc;
          ++count;
        }
      }
    }
    mean_auc /= static_cast<double>(count);
    CHECK(std::abs(agg.mean[0] - mean_auc) <= 1e-12);
  }

  // lambda fixed at 1 makes the AO and logit estimators coincide
  for (const auto& rep : record.replicates) {
    CHECK(std::abs(rep.estimators[0].metrics.auc - rep.estimators[1].metrics.auc) <= 1e-10);
    CHECK(std::abs(rep.estimators[0].metrics.logloss - rep.estimators[1].metrics.logloss) <=
          1e-10);
  }
}

TEST_CASE("data files: header shape and rerun determinism") {
  TempDir tmp;
  ExperimentConfig config;
  config.experiment = "approx-check";
  const auto rows = run_approx_check(11);
  std::vector<std::vector<double>> data;
  for (const auto& r : rows) data.push_back({r.m2, r.exact, r.approx});

  const std::string p1 = (tmp.path / "a.csv").string();
  const std::string p2 = (tmp.path / "b.csv").string();
  write_data_file(p1, config, {"threshold_m2=0.36"}, {"m2", "H_exact", "H_approx"}, data);
  write_data_file(p2, config, {"threshold_m2=0.36"}, {"m2", "H_exact", "H_approx"}, data);

  const std::string t1 = slurp(p1), t2 = slurp(p2);
  CHECK(without_timestamp(t1) == without_timestamp(t2));
  CHECK(t1.find("# config: " + config.config_hash()) != std::string::npos);
  CHECK(t1.find("# threshold_m2=0.36") != std::string::npos);
  CHECK(t1.find("m2,H_exact,H_approx") != std::string::npos);

  // file row count matches the grid size (11 data rows)
  long data_lines = -1;  // exclude the column header
  std::stringstream ss(t1);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line[0] != '#') ++data_lines;
  }
  CHECK(data_lines == 11);
}

TEST_CASE("run record json sidecar") {
  TempDir tmp;
  ExperimentConfig config;
  config.replicates = 2;
  config.sim.n = 250;
  config.seed = 5;
  config.ecm.max_iters = 25;
  config.ecm.lambda_estimated = false;
  RunRecord record = run_simulate_fit(config);

  const std::string p = (tmp.path / "run_record.json").string();
  write_run_record(p, record);
  const std::string text = slurp(p);
  CHECK(text.find("\"config_hash\"") != std::string::npos);
  CHECK(text.find("\"realized_missing_rate\"") != std::string::npos);
  CHECK(text.find("\"ecm-ao\"") != std::string::npos);
  CHECK(text.find("\"evaluation_population\"") != std::string::npos);

  // sidecar is timestamp-free: byte-identical on rewrite
  const std::string p2 = (tmp.path / "run_record2.json").string();
  write_run_record(p2, record);
  CHECK(slurp(p) == slurp(p2));
}

TEST_CASE("replicate determinism: same config, same record") {
  ExperimentConfig config;
  config.replicates = 2;
  config.sim.n = 200;
  config.seed = 77;
  config.ecm.max_iters = 20;
  config.ecm.lambda_estimated = false;
  const RunRecord a = run_simulate_fit(config);
  const RunRecord b = run_simulate_fit(config);
  REQUIRE(a.replicates.size() == b.replicates.size());
  for (std::size_t r = 0; r < a.replicates.size(); ++r) {
    CHECK(a.replicates[r].realized_missing_rate == b.replicates[r].realized_missing_rate);
    for (std::size_t e = 0; e < a.replicates[r].estimators.size(); ++e) {
      CHECK(a.replicates[r].estimators[e].metrics.auc ==
            b.replicates[r].estimators[e].metrics.auc);
      CHECK(a.replicates[r].estimators[e].metrics.logloss ==
            b.replicates[r].estimators[e].metrics.logloss);
    }
  }
}

TEST_CASE("magic pipeline on the stand-in fixture") {
  TempDir tmp;
  const std::string csv = (tmp.path / "magic_like.csv").string();
  testsupport::write_magic_like_csv(csv);

  ExperimentConfig config;
  config.magic_csv = csv;
  config.seed = 3;
  config.ecm.max_iters = 40;  // smoke-level fit, full runs live in acceptance
  config.ecm.lambda_estimated = false;
  const MagicResult result = run_magic(config);

  CHECK(result.prepared.n() == 19020);
  CHECK(result.prepared.dim() == 4);
  CHECK(std::abs(result.record.replicates.front().realized_missing_rate - 0.7) <= 0.02);
  REQUIRE(result.record.replicates.front().estimators.size() == 2);
  CHECK(result.threshold_rows.size() == 9 * 3 * 2);  // 9 thresholds x 3 metrics x 2 estimators

  // both estimators discriminate far better than chance on the fixture
  for (const auto& est : result.record.replicates.front().estimators) {
    CHECK(est.metrics.auc > 0.7);
  }
}

TEST_CASE("preliminary gaussian fit oracle") {
  SimSpec spec = SimSpec::defaults(Family::gaussian);
  spec.n = 500;
  spec.seed = 2;
  const Dataset ds = simulate(spec);
  const MixtureParams fit = preliminary_gaussian_fit(ds);
  CHECK_NOTHROW(fit.validate());
  // weights match class frequencies
  long n1 = std::count(ds.true_labels.begin(), ds.true_labels.end(), 1);
  CHECK(fit.weights(0) == doctest::Approx(static_cast<double>(n1) / ds.n()).epsilon(1e-12));

  Dataset partial = ds;
  partial.observed_labels[0] = 0;
  partial.missing_flags[0] = 1;
  CHECK_THROWS_AS(preliminary_gaussian_fit(partial), std::invalid_argument);
}
