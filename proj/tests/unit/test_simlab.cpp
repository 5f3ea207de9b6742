#include "doctest.h"

#include <cmath>
#include <sstream>

#include "bitreg/error.hpp"
#include "bitreg/simlab.hpp"

using namespace bitreg;

TEST_CASE("scenario generation is prefix-stable and deterministic") {
  Scenario s = lowDimScenario(200, 3);
  const auto big = generateScenario(s);
  s.n = 50;
  const auto small = generateScenario(s);
  CHECK(small.X == big.X.topRows(50));
  CHECK(small.y == big.y.head(50));
}

TEST_CASE("beta-mix columns have the stated variances") {
  Scenario s = lowDimScenario(40000, 1);
  const auto data = generateScenario(s);
  CHECK(designVariance(Design::BetaMix, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(designVariance(Design::BetaMix, 1) == doctest::Approx(0.2));
  CHECK(designVariance(Design::BetaMix, 2) == doctest::Approx(8.0 / 75.0));
  for (Eigen::Index j = 0; j < 4; ++j) {
    const auto col = data.X.col(j).array();
    const double mean = col.mean();
    const double var = (col - mean).square().mean();
    CHECK(var == doctest::Approx(designVariance(Design::BetaMix, j)).epsilon(0.03));
    CHECK(col.abs().maxCoeff() <= 1.0);
  }
  CHECK(std::abs(data.X.col(2).mean() + 0.6) < 0.01);  // Beta(1, 4): 2/5 - 1
}

TEST_CASE("range presets") {
  const Scenario s = lowDimScenario(10000);
  const auto r = scenarioRanges(s);
  CHECK(r.R() == 1.0);
  CHECK(r.L() == doctest::Approx(2.0 * std::sqrt(2.0) + std::sqrt(0.5) * std::sqrt(2 * std::log(10000.0))));
  const Scenario mse = mseScenario(Design::UniformScaled, 2.0);
  CHECK(mse.betaStar.norm() == doctest::Approx(1.0));
  CHECK(scenarioRanges(mse).R() == doctest::Approx(std::sqrt(3.0)));
  CHECK(scenarioRanges(mse).L() == doctest::Approx(2.5 * std::sqrt(5.0)));
  CHECK(moderateDimScenario().betaStar.tail(36).isZero());
}

TEST_CASE("aggregates use the sample sd over sqrt(count)") {
  std::vector<ReplicationRecord> recs(4);
  const double v[4] = {1.0, 2.0, 4.0, 8.0};
  for (int i = 0; i < 4; ++i) {
    recs[i].group = "g";
    recs[i].values = {{"x", v[i]}};
  }
  const auto agg = aggregateRecords(recs);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].mean == doctest::Approx(3.75));
  const double sd = std::sqrt(((1 - 3.75) * (1 - 3.75) + (2 - 3.75) * (2 - 3.75) + (4 - 3.75) * (4 - 3.75) +
                               (8 - 3.75) * (8 - 3.75)) / 3.0);
  CHECK(std::abs(agg[0].se - sd / 2.0) < 1e-12);
  CHECK(logLogSlope({1, 10, 100}, {1, 0.1, 0.01}) == doctest::Approx(-1.0));
}

TEST_CASE("reports are identical across thread counts") {
  MseStudyConfig cfg;
  cfg.scenario = mseScenario(Design::GaussianIID, 1.0, 2000, 77);
  cfg.sigmas = {1.0, 2.0};
  cfg.reps = 6;
  std::ostringstream one, four, csv1, csv4;
  const auto a = runMseStudy(cfg, {1});
  const auto b = runMseStudy(cfg, {4});
  a.writeJson(one);
  b.writeJson(four);
  a.writeCsv(csv1);
  b.writeCsv(csv4);
  CHECK(one.str() == four.str());
  CHECK(csv1.str() == csv4.str());
  CHECK(a.records.size() == 12);
  CHECK(a.records.front().group == "sigma=1");
  CHECK(a.records.back().group == "sigma=2");
}

TEST_CASE("transmission model") {
  const double full = transmissionModel(1000000, 10, 5e5, Full64{});
  const double quant = transmissionModel(1000000, 10, 5e5, Quantized{});
  CHECK(full == 1408.0);
  CHECK(quant == 42.0);
  CHECK(quant / full == 21.0 / 704.0);
  CHECK(transmissionModel(100, 2, 1.0, SketchQuantized{10}, 8.0) == 58.0);
}

TEST_CASE("paired-scheme closed forms") {
  // At beta = 0 the two leading variances differ only in the L^2 / 2 term.
  const auto c = areClosedForm(3.0, 4.0, 0.0);
  CHECK(c.squared == 144.0);
  CHECK(c.pairedAveraged == 0.5 * (144.0 + 16.0));
}

TEST_CASE("json configs") {
  const auto cfg = nlohmann::json::parse(R"({"scenario": {"preset": "lowDim", "n": 500}, "reps": 3, "nGrid": [200, 400]})");
  CHECK_THROWS_AS(runStudyFromJson("rate", cfg, std::nullopt), InvalidArgument);
  const auto report = runStudyFromJson("rate", cfg, 5, {1});
  CHECK(report.masterSeed == 5);
  CHECK(report.summary.contains("slope"));
  CHECK_THROWS_AS(runStudyFromJson("bogus", cfg, 5), InvalidArgument);
  CHECK_THROWS_AS(parseDesign("Cauchy"), InvalidArgument);
  CHECK(designName(parseDesign("BetaMix")) == "BetaMix");
  CHECK(report.configId().size() == 16);
}
