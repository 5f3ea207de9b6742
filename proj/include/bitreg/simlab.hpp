#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "bitreg/quantize.hpp"
#include "bitreg/sketch.hpp"

namespace bitreg {

// Scenarios.

enum class Design {
  GaussianIID,    // N(0, 1)
  UniformScaled,  // Unif[-sqrt 3, sqrt 3]
  Rademacher,     // +-1
  BetaMix,        // 2 Beta(a, b) - 1 with (a, b) cycling (1,1), (2,2), (1,4), (1,4)
};

enum class RangePresetKind {
  EmpiricalFixed,   // R as given, L = 2.5 sqrt(sigma^2 + ||beta||^2)
  Fixed,            // R, L as given
  ResponseBound,    // R as given, L = sqrt(s) ||beta||_2 + sigma sqrt(2 log n), s = #nonzeros
  SubGaussianLogN,  // growing ranges from (q, cK, cKbar, cKeps)
};

struct RangePreset {
  RangePresetKind kind = RangePresetKind::EmpiricalFixed;
  double R = 2.5;
  double L = 1.0;  // Fixed only
  double q = 3.0;
  double cK = 1.0;
  double cKbar = 1.0;
  double cKeps = 1.0;
};

struct Scenario {
  Design design = Design::GaussianIID;
  std::size_t d = 1;
  Eigen::VectorXd betaStar = Eigen::VectorXd::Zero(1);
  double sigma = 1.0;
  std::size_t n = 1000;
  RangePreset rangePreset;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument.
  void validate() const;
};

/// Population variance of coordinate j under the design.
double designVariance(Design design, std::size_t j);

struct GeneratedData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

/// y = X betaStar + sigma eps. Entry (i, j) uses stream (seed, i, j, Design)
/// and eps_i uses (seed, i, 0, Noise), so a smaller n yields a prefix.
GeneratedData generateScenario(const Scenario& s);

/// Quantizer ranges for the scenario's preset.
QuantizerRanges scenarioRanges(const Scenario& s);

// Named setups.

/// d = 4 BetaMix, betaStar = (0.5, -sqrt(3/4), sqrt(3/4), -0.5), sigma = sqrt(1/2),
/// R = 1, L = sqrt(s) ||beta|| + sigma sqrt(2 log n).
Scenario lowDimScenario(std::size_t n = 10000, std::uint64_t seed = 0);
/// Same with 36 extra zero coefficients (d = 40).
Scenario moderateDimScenario(std::size_t n = 10000, std::uint64_t seed = 0);
/// d = 10 unit-norm betaStar, fixed ranges (R = 2.5 Gaussian, sqrt 3 uniform).
Scenario mseScenario(Design design, double sigma, std::size_t n = 100000, std::uint64_t seed = 0);

// Reports.

struct ReplicationRecord {
  std::size_t groupIndex = 0;
  std::string group;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::vector<std::pair<std::string, double>> values;

  double value(const std::string& name) const;  // NaN if absent
};

struct Aggregate {
  std::string group;
  std::string metric;
  double mean = 0.0;
  double se = 0.0;  // sample SD / sqrt(count)
  std::size_t count = 0;
};

struct ExperimentReport {
  std::string study;
  nlohmann::ordered_json config;  // excludes thread count
  std::uint64_t masterSeed = 0;
  std::vector<ReplicationRecord> records;  // group-major, then replication
  std::vector<Aggregate> aggregates;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  nlohmann::ordered_json qq = nlohmann::ordered_json::object();

  std::size_t failures() const;
  const Aggregate* aggregate(const std::string& group, const std::string& metric) const;
  /// FNV-1a of the serialized config.
  std::string configId() const;
  nlohmann::ordered_json toJson() const;
  void writeJson(std::ostream& out) const;
  /// One row per replication record; union of value names as columns.
  void writeCsv(std::ostream& out) const;
};

/// Mean and SD/sqrt(n) of each value per group over non-failed records.
std::vector<Aggregate> aggregateRecords(const std::vector<ReplicationRecord>& records);

/// Least-squares slope of log y on log x.
double logLogSlope(const std::vector<double>& x, const std::vector<double>& y);

struct RunOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Runs fn(rep) for rep in [0, reps) on a work queue; results come back in rep
/// order regardless of the thread count.
std::vector<std::vector<ReplicationRecord>> runReplications(
    std::size_t reps, const RunOptions& opt,
    const std::function<std::vector<ReplicationRecord>(std::size_t)>& fn);

// Studies. The scenario seed is the master seed; replication r uses
// deriveSeed(master, r) for data and quantization.

struct MseStudyConfig {
  Scenario scenario;  // sigma is overridden by each grid value
  std::vector<double> sigmas = {1.0, 2.0, 4.0};
  std::size_t reps = 200;
};
ExperimentReport runMseStudy(const MseStudyConfig& cfg, const RunOptions& opt = {});

struct SketchStudyConfig {
  Scenario scenario;
  std::vector<std::size_t> mGrid = {2500, 5000, 10000, 20000};
  std::size_t reps = 100;
  SketchKind kind = SketchKind::GaussianIID;
  SketchMethod method = SketchMethod::GaussianGram;
  std::size_t slopePoints = 3;  // slope over the largest values of the grid
};
ExperimentReport runSketchStudy(const SketchStudyConfig& cfg, const RunOptions& opt = {});

struct LassoSpec {
  double lambda = std::numeric_limits<double>::quiet_NaN();  // NaN: lambdaScale sqrt(log d / n)
  double lambdaScale = 2.0;
  double ballRadius = std::numeric_limits<double>::infinity();
};

struct DebiasSpec {
  double mu = std::numeric_limits<double>::quiet_NaN();  // NaN: muScale sqrt(log d / n)
  double muScale = 0.1;
  int maxDoublings = 4;
};

struct CoverageStudyConfig {
  Scenario scenario;
  std::size_t reps = 1000;
  std::vector<double> levels = {0.95};
  std::optional<LassoSpec> lasso;
  std::optional<DebiasSpec> debias;  // requires lasso
};
ExperimentReport runCoverageStudy(const CoverageStudyConfig& cfg, const RunOptions& opt = {});

struct RateStudyConfig {
  Scenario scenario;  // n is overridden by each grid value
  std::vector<std::size_t> nGrid = {1000, 10000, 100000};
  std::size_t reps = 100;
  std::optional<LassoSpec> lasso;
};
ExperimentReport runRateStudy(const RateStudyConfig& cfg, const RunOptions& opt = {});

struct SnrPoint {
  double beta = 0.0;
  double sigma = 1.0;
};

/// d = 1 Gaussian comparison of the squared-value scheme with the paired
/// scheme. R follows the sub-Gaussian policy (q, cK) at n; L = R sqrt(beta^2 + sigma^2).
/// The leading-order comparison needs R^4 / n small; larger q drifts out of
/// that regime at moderate n (q = 3 at n = 1e5 gives R^4 / n near 0.09).
struct AreStudyConfig {
  std::vector<SnrPoint> snrGrid = {{0.0, 1.0}, {1.0, 1.0}, {5.0, 0.5}};
  std::size_t n = 100000;
  std::size_t reps = 2000;
  double q = 0.5;
  double cK = 1.0;
  std::uint64_t seed = 0;
};
ExperimentReport runAreStudy(const AreStudyConfig& cfg, const RunOptions& opt = {});

/// Leading-order n var of the two estimators at R, L, beta (X ~ N(0, 1)).
struct AreClosedForm {
  double squared = 0.0;        // R^2 L^2 + R^2 beta^2 - 6 beta^2
  double pairedAveraged = 0.0; // (R^2 L^2 + L^2) / 2 + R^4 beta^2 - 2 R^2 beta^2
};
AreClosedForm areClosedForm(double R, double L, double beta);

// Transmission.

struct Full64 {};
struct Quantized {};
struct SketchQuantized {
  std::size_t m = 0;
};
using TransmissionScheme = std::variant<Full64, Quantized, SketchQuantized>;

/// Seconds to send the data: 64 n (d+1), n (2d+1) or m (2d+1) bits plus
/// headerBits (quantized schemes only), divided by the link rate.
double transmissionModel(std::size_t n, std::size_t d, double linkBitsPerSecond,
                         const TransmissionScheme& scheme, double headerBits = 0.0);

struct TransmissionStudyConfig {
  std::vector<std::size_t> nGrid = {10000, 100000, 1000000, 10000000};
  std::size_t d = 10;
  double linkBitsPerSecond = 5e5;
  double sketchFraction = 0.1;  // m = sketchFraction * n
  double headerBits = 0.0;
};
ExperimentReport runTransmissionStudy(const TransmissionStudyConfig& cfg);

// JSON configs for the CLI.

/// Study names: mse, sketch, coverage, rate, are, transmission. `seed`
/// overrides the config's seed when set. Throws InvalidArgument on unknown
/// studies or malformed configs, including a missing seed.
ExperimentReport runStudyFromJson(const std::string& study, const nlohmann::json& config,
                                  std::optional<std::uint64_t> seed, const RunOptions& opt = {});

Design parseDesign(const std::string& name);
std::string designName(Design design);
RangePresetKind parseRangePresetKind(const std::string& name);
std::string rangePresetKindName(RangePresetKind kind);

}  // namespace bitreg
