#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ssmix/error.hpp"
#include "ssmix/magic.hpp"

using namespace ssmix;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name, const std::string& contents) {
    path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

const char* kFiveRows =
    "28.7967,16.0021,2.6449,0.3918,0.1982,27.7004,22.011,-8.2027,40.092,81.8828,g\n"
    "31.6036,11.7235,2.5185,0.5303,0.3773,26.2722,23.8238,-9.9574,6.3609,205.261,g\n"
    "162.052,136.031,4.0612,0.0374,0.0187,116.741,-64.858,-45.216,76.96,256.788,g\n"
    "23.8172,9.5728,2.3385,0.6147,0.3922,27.2107,-6.4633,-7.1513,10.449,116.737,h\n"
    "75.1362,30.9205,3.1611,0.3168,0.1832,-5.5277,28.5525,21.8393,4.648,356.462,h\n";

}  // namespace

TEST_CASE("load_magic_csv: five-row fixture with known values") {
  TempFile f("ssmix_magic_five.csv", kFiveRows);
  const Dataset ds = load_magic_csv(f.path.string());
  REQUIRE(ds.n() == 5);
  REQUIRE(ds.dim() == 10);
  CHECK(ds.features(0, 0) == doctest::Approx(28.7967).epsilon(1e-12));
  CHECK(ds.features(2, 6) == doctest::Approx(-64.858).epsilon(1e-12));
  CHECK(ds.features(4, 9) == doctest::Approx(356.462).epsilon(1e-12));
  CHECK(ds.true_labels == std::vector<int>{1, 1, 1, 2, 2});
  CHECK(ds.column_names.size() == 10);
  CHECK(ds.column_names[8] == "fAlpha");
  CHECK(ds.num_labeled() == 5);
}

TEST_CASE("load_magic_csv: header auto-detection") {
  std::string with_header = "fLength,fWidth,fSize,fConc,fConc1,fAsym,fM3Long,fM3Trans,fAlpha,fDist,class\n";
  with_header += kFiveRows;
  TempFile f("ssmix_magic_header.csv", with_header);
  const Dataset ds = load_magic_csv(f.path.string());
  CHECK(ds.n() == 5);
}

TEST_CASE("load_magic_csv: error paths") {
  TempFile header_only("ssmix_magic_empty.csv",
                       "fLength,fWidth,fSize,fConc,fConc1,fAsym,fM3Long,fM3Trans,fAlpha,fDist,class\n");
  CHECK_THROWS_AS(load_magic_csv(header_only.path.string()), DataError);

  TempFile bad_field("ssmix_magic_bad.csv",
                     "28.7967,16.0021,2.6449,0.3918,0.1982,27.7004,22.011,-8.2027,40.092,81.8828,g\n"
                     "1,2,three,4,5,6,7,8,9,10,g\n");
  try {
    load_magic_csv(bad_field.path.string());
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }

  TempFile bad_class("ssmix_magic_class.csv",
                     "1,2,3,4,5,6,7,8,9,10,x\n");
  CHECK_THROWS_AS(load_magic_csv(bad_class.path.string()), DataError);

  TempFile short_row("ssmix_magic_short.csv", "1,2,3,g\n");
  CHECK_THROWS_AS(load_magic_csv(short_row.path.string()), DataError);

  CHECK_THROWS_AS(load_magic_csv("/nonexistent/path.csv"), DataError);
}

TEST_CASE("preprocess_magic: selection, standardization, round trip") {
  TempFile f("ssmix_magic_pre.csv", kFiveRows);
  const Dataset raw = load_magic_csv(f.path.string());
  const Dataset pre = preprocess_magic(raw);

  REQUIRE(pre.dim() == 4);
  CHECK(pre.column_names ==
        std::vector<std::string>{"fAlpha", "fLength", "fM3Long", "fSize"});

  for (long c = 0; c < 4; ++c) {
    CHECK(std::abs(pre.features.col(c).mean()) <= 1e-10);
    const double var = pre.features.col(c).array().square().sum() / pre.n();
    CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-10);
  }

  // de-standardization recovers the original columns
  REQUIRE(pre.standardization.has_value());
  const Eigen::MatrixXd recovered = pre.standardization->invert(pre.features);
  Eigen::MatrixXd expected(5, 4);
  expected.col(0) = raw.features.col(8);  // fAlpha
  expected.col(1) = raw.features.col(0);  // fLength
  expected.col(2) = raw.features.col(6);  // fM3Long
  expected.col(3) = raw.features.col(2);  // fSize
  CHECK((recovered - expected).cwiseAbs().maxCoeff() <= 1e-10);

  // labels and flags carried through
  CHECK(pre.true_labels == raw.true_labels);
  CHECK(pre.num_labeled() == 5);
}

TEST_CASE("preprocess_magic: missing column") {
  Dataset ds;
  ds.features = Eigen::MatrixXd::Random(6, 3);
  ds.true_labels = {1, 1, 1, 2, 2, 2};
  ds.observed_labels = ds.true_labels;
  ds.missing_flags.assign(6, 0);
  ds.column_names = {"a", "b", "c"};
  CHECK_THROWS_AS(preprocess_magic(ds), DataError);

  ds.column_names.clear();
  CHECK_THROWS_AS(preprocess_magic(ds), DataError);
}
