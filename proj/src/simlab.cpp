#include "bitreg/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "bitreg/error.hpp"
#include "bitreg/moments.hpp"
#include "bitreg/normal.hpp"
#include "bitreg/regress.hpp"
#include "bitreg/rng.hpp"
#include "bitreg/sparse.hpp"

namespace bitreg {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Scenarios

namespace {

constexpr std::array<std::pair<int, int>, 4> kBetaShapes{{{1, 1}, {2, 2}, {1, 4}, {1, 4}}};

std::size_t countNonzeros(const Eigen::VectorXd& v) {
  return static_cast<std::size_t>((v.array() != 0.0).count());
}

// k-th smallest (1-based) of `count` uniforms from one coordinate's stream.
double uniformOrderStatistic(std::uint64_t seed, std::uint64_t i, std::uint32_t j, int k, int count) {
  std::array<double, 8> u{};
  for (int draw = 0; 2 * draw < count; ++draw) {
    const auto bits = counterBits(seed, i, j, StreamTag::Design, static_cast<std::uint32_t>(draw));
    u[2 * draw] = toUnitInterval(bits[0]);
    u[2 * draw + 1] = toUnitInterval(bits[1]);
  }
  std::nth_element(u.begin(), u.begin() + (k - 1), u.begin() + count);
  return u[static_cast<std::size_t>(k - 1)];
}

double designEntry(Design design, std::uint64_t seed, std::uint64_t i, std::uint32_t j) {
  switch (design) {
    case Design::GaussianIID:
      return standardNormal(seed, i, j, StreamTag::Design);
    case Design::UniformScaled:
      return std::sqrt(3.0) * (2.0 * uniform01(seed, i, j, StreamTag::Design) - 1.0);
    case Design::Rademacher:
      return uniform01(seed, i, j, StreamTag::Design) < 0.5 ? -1.0 : 1.0;
    case Design::BetaMix: {
      // Beta(a, b) with integer shapes is the a-th order statistic of a+b-1 uniforms.
      const auto [a, b] = kBetaShapes[j % 4];
      return 2.0 * uniformOrderStatistic(seed, i, j, a, a + b - 1) - 1.0;
    }
  }
  throw InvalidArgument("unknown design");
}

Eigen::MatrixXd generateDesign(Design design, std::size_t n, std::size_t d, std::uint64_t seed) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      X(i, j) = designEntry(design, seed, static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(j));
    }
  }
  return X;
}

Eigen::VectorXd generateNoise(std::size_t n, std::uint64_t seed) {
  Eigen::VectorXd eps(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < eps.size(); ++i) {
    eps(i) = standardNormal(seed, static_cast<std::uint64_t>(i), 0, StreamTag::Noise);
  }
  return eps;
}

}  // namespace

void Scenario::validate() const {
  if (d == 0) throw InvalidArgument("scenario requires d >= 1");
  if (static_cast<std::size_t>(betaStar.size()) != d) throw InvalidArgument("betaStar must have d entries");
  if (!betaStar.allFinite()) throw InvalidArgument("betaStar must be finite");
  if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidArgument("sigma must be finite and >= 0");
  if (n < 2) throw InvalidArgument("scenario requires n >= 2");
}

double designVariance(Design design, std::size_t j) {
  switch (design) {
    case Design::GaussianIID:
    case Design::UniformScaled:
    case Design::Rademacher:
      return 1.0;
    case Design::BetaMix: {
      const auto [a, b] = kBetaShapes[j % 4];
      const double s = a + b;
      return 4.0 * a * b / (s * s * (s + 1.0));
    }
  }
  throw InvalidArgument("unknown design");
}

GeneratedData generateScenario(const Scenario& s) {
  s.validate();
  GeneratedData out;
  out.X = generateDesign(s.design, s.n, s.d, s.seed);
  out.y = out.X * s.betaStar;
  if (s.sigma > 0.0) out.y += s.sigma * generateNoise(s.n, s.seed);
  return out;
}

QuantizerRanges scenarioRanges(const Scenario& s) {
  s.validate();
  const RangePreset& p = s.rangePreset;
  const double signal = s.betaStar.norm();
  switch (p.kind) {
    case RangePresetKind::EmpiricalFixed:
      return resolveRanges(empiricalFixed(s.sigma, signal, p.R), s.n, s.d);
    case RangePresetKind::Fixed:
      return resolveRanges(FixedRanges{p.R, p.L}, s.n, s.d);
    case RangePresetKind::ResponseBound: {
      const double sparsity = static_cast<double>(countNonzeros(s.betaStar));
      const double L = std::sqrt(sparsity) * signal +
                       s.sigma * std::sqrt(2.0 * std::log(static_cast<double>(s.n)));
      return resolveRanges(FixedRanges{p.R, L}, s.n, s.d);
    }
    case RangePresetKind::SubGaussianLogN: {
      double weighted = 0.0;
      for (std::size_t j = 0; j < s.d; ++j) {
        const double b = s.betaStar(static_cast<Eigen::Index>(j));
        weighted += designVariance(s.design, j) * b * b;
      }
      return resolveRanges(SubGaussianLogN{p.q, p.cK, p.cKbar, p.cKeps, s.sigma, std::sqrt(weighted)},
                           s.n, s.d);
    }
  }
  throw InvalidArgument("unknown range preset");
}

Scenario lowDimScenario(std::size_t n, std::uint64_t seed) {
  Scenario s;
  s.design = Design::BetaMix;
  s.d = 4;
  s.betaStar.resize(4);
  s.betaStar << 0.5, -std::sqrt(0.75), std::sqrt(0.75), -0.5;
  s.sigma = std::sqrt(0.5);
  s.n = n;
  s.rangePreset.kind = RangePresetKind::ResponseBound;
  s.rangePreset.R = 1.0;
  s.seed = seed;
  return s;
}

Scenario moderateDimScenario(std::size_t n, std::uint64_t seed) {
  Scenario s = lowDimScenario(n, seed);
  s.d = 40;
  const Eigen::VectorXd head = s.betaStar;
  s.betaStar = Eigen::VectorXd::Zero(40);
  s.betaStar.head(4) = head;
  return s;
}

Scenario mseScenario(Design design, double sigma, std::size_t n, std::uint64_t seed) {
  Scenario s;
  s.design = design;
  s.d = 10;
  s.betaStar.resize(10);
  const double a = std::sqrt(0.15), b = std::sqrt(0.1), c = std::sqrt(0.05);
  s.betaStar << a, -a, a, -a, b, -b, c, -c, c, -c;
  s.sigma = sigma;
  s.n = n;
  s.rangePreset.kind = RangePresetKind::EmpiricalFixed;
  s.rangePreset.R = design == Design::UniformScaled ? std::sqrt(3.0) : 2.5;
  s.seed = seed;
  return s;
}

// ---------------------------------------------------------------------------
// Names and JSON

namespace {

template <typename Enum, std::size_t N>
Enum parseName(const std::array<std::pair<Enum, const char*>, N>& table, const std::string& name,
               const char* what) {
  for (const auto& [value, label] : table) {
    if (name == label) return value;
  }
  throw InvalidArgument(std::string("unknown ") + what + " '" + name + "'");
}

template <typename Enum, std::size_t N>
std::string nameOf(const std::array<std::pair<Enum, const char*>, N>& table, Enum value) {
  for (const auto& [v, label] : table) {
    if (v == value) return label;
  }
  throw InvalidArgument("unnamed enum value");
}

constexpr std::array<std::pair<Design, const char*>, 4> kDesignNames{{
    {Design::GaussianIID, "GaussianIID"},
    {Design::UniformScaled, "UniformScaled"},
    {Design::Rademacher, "Rademacher"},
    {Design::BetaMix, "BetaMix"},
}};

constexpr std::array<std::pair<RangePresetKind, const char*>, 4> kPresetNames{{
    {RangePresetKind::EmpiricalFixed, "EmpiricalFixed"},
    {RangePresetKind::Fixed, "Fixed"},
    {RangePresetKind::ResponseBound, "ResponseBound"},
    {RangePresetKind::SubGaussianLogN, "SubGaussianLogN"},
}};

constexpr std::array<std::pair<SketchKind, const char*>, 3> kSketchKindNames{{
    {SketchKind::GaussianIID, "GaussianIID"},
    {SketchKind::TernaryAchlioptas, "TernaryAchlioptas"},
    {SketchKind::Identity, "Identity"},
}};

constexpr std::array<std::pair<SketchMethod, const char*>, 2> kSketchMethodNames{{
    {SketchMethod::Streamed, "Streamed"},
    {SketchMethod::GaussianGram, "GaussianGram"},
}};

ordered_json toJson(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ordered_json toJson(const RangePreset& p) {
  ordered_json out;
  out["kind"] = nameOf(kPresetNames, p.kind);
  switch (p.kind) {
    case RangePresetKind::EmpiricalFixed:
    case RangePresetKind::ResponseBound:
      out["R"] = p.R;
      break;
    case RangePresetKind::Fixed:
      out["R"] = p.R;
      out["L"] = p.L;
      break;
    case RangePresetKind::SubGaussianLogN:
      out["q"] = p.q;
      out["cK"] = p.cK;
      out["cKbar"] = p.cKbar;
      out["cKeps"] = p.cKeps;
      break;
  }
  return out;
}

ordered_json toJson(const Scenario& s) {
  ordered_json out;
  out["design"] = nameOf(kDesignNames, s.design);
  out["d"] = s.d;
  out["betaStar"] = toJson(s.betaStar);
  out["sigma"] = s.sigma;
  out["n"] = s.n;
  out["rangePreset"] = toJson(s.rangePreset);
  out["seed"] = s.seed;
  return out;
}

ordered_json toJson(const std::optional<LassoSpec>& spec) {
  if (!spec) return nullptr;
  ordered_json out;
  if (std::isfinite(spec->lambda)) {
    out["lambda"] = spec->lambda;
  } else {
    out["lambdaScale"] = spec->lambdaScale;
  }
  if (std::isfinite(spec->ballRadius)) out["ballRadius"] = spec->ballRadius;
  return out;
}

ordered_json toJson(const std::optional<DebiasSpec>& spec) {
  if (!spec) return nullptr;
  ordered_json out;
  if (std::isfinite(spec->mu)) {
    out["mu"] = spec->mu;
  } else {
    out["muScale"] = spec->muScale;
  }
  out["maxDoublings"] = spec->maxDoublings;
  return out;
}

template <typename T>
T get(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
  }
}

RangePreset parsePreset(const nlohmann::json& j, RangePreset p) {
  if (!j.is_object()) throw InvalidArgument("rangePreset must be an object");
  if (j.contains("kind")) p.kind = parseRangePresetKind(j.at("kind").get<std::string>());
  p.R = get(j, "R", p.R);
  p.L = get(j, "L", p.L);
  p.q = get(j, "q", p.q);
  p.cK = get(j, "cK", p.cK);
  p.cKbar = get(j, "cKbar", p.cKbar);
  p.cKeps = get(j, "cKeps", p.cKeps);
  return p;
}

Scenario parseScenario(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("scenario must be an object");
  Scenario s;
  const std::string preset = get<std::string>(j, "preset", "");
  const std::size_t n = get<std::size_t>(j, "n", 10000);
  if (preset == "lowDim") {
    s = lowDimScenario(n);
  } else if (preset == "moderateDim") {
    s = moderateDimScenario(n);
  } else if (preset == "mse") {
    s = mseScenario(parseDesign(get<std::string>(j, "design", "GaussianIID")), get(j, "sigma", 1.0), n);
  } else if (!preset.empty()) {
    throw InvalidArgument("unknown scenario preset '" + preset + "'");
  }
  if (j.contains("design")) s.design = parseDesign(j.at("design").get<std::string>());
  if (j.contains("betaStar")) {
    const auto beta = j.at("betaStar").get<std::vector<double>>();
    s.betaStar = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    s.d = beta.size();
  }
  s.d = get(j, "d", s.d);
  if (static_cast<std::size_t>(s.betaStar.size()) != s.d) {
    throw InvalidArgument("scenario betaStar length differs from d");
  }
  s.sigma = get(j, "sigma", s.sigma);
  s.n = n;
  if (j.contains("rangePreset")) s.rangePreset = parsePreset(j.at("rangePreset"), s.rangePreset);
  return s;
}

std::optional<LassoSpec> parseLasso(const nlohmann::json& j) {
  if (!j.contains("lasso") || j.at("lasso").is_null() || j.at("lasso") == false) return std::nullopt;
  const auto& l = j.at("lasso");
  LassoSpec spec;
  if (l.is_object()) {
    spec.lambda = get(l, "lambda", spec.lambda);
    spec.lambdaScale = get(l, "lambdaScale", spec.lambdaScale);
    spec.ballRadius = get(l, "ballRadius", spec.ballRadius);
  }
  return spec;
}

std::optional<DebiasSpec> parseDebias(const nlohmann::json& j) {
  if (!j.contains("debias") || j.at("debias").is_null() || j.at("debias") == false) return std::nullopt;
  const auto& dj = j.at("debias");
  DebiasSpec spec;
  if (dj.is_object()) {
    spec.mu = get(dj, "mu", spec.mu);
    spec.muScale = get(dj, "muScale", spec.muScale);
    spec.maxDoublings = get(dj, "maxDoublings", spec.maxDoublings);
  }
  return spec;
}

void requireReps(std::size_t reps, std::size_t minimum, const char* study) {
  if (reps < minimum) {
    throw InvalidArgument(std::string(study) + " study requires reps >= " + std::to_string(minimum));
  }
}

std::string formatNumber(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string groupLabel(const char* key, double v) { return std::string(key) + "=" + formatNumber(v); }

double sampleMean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sampleVariance(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = sampleMean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Values of one metric in one group over non-failed records, in record order.
std::vector<double> collect(const ExperimentReport& report, const std::string& group, const std::string& metric) {
  std::vector<double> out;
  for (const auto& r : report.records) {
    if (r.failed || r.group != group) continue;
    const double v = r.value(metric);
    if (!std::isnan(v)) out.push_back(v);
  }
  return out;
}

std::vector<ReplicationRecord> flatten(std::vector<std::vector<ReplicationRecord>> perRep) {
  std::vector<ReplicationRecord> out;
  for (auto& rep : perRep) {
    for (auto& rec : rep) out.push_back(std::move(rec));
  }
  std::stable_sort(out.begin(), out.end(), [](const ReplicationRecord& a, const ReplicationRecord& b) {
    return a.groupIndex < b.groupIndex;
  });
  return out;
}

ReplicationRecord makeRecord(std::size_t groupIndex, std::string group, std::size_t rep, std::uint64_t seed) {
  ReplicationRecord r;
  r.groupIndex = groupIndex;
  r.group = std::move(group);
  r.replication = rep;
  r.seed = seed;
  return r;
}

// Runs `body` and turns numerical failures into a failed record.
template <typename Body>
ReplicationRecord guarded(ReplicationRecord record, Body&& body) {
  try {
    body(record);
  } catch (const NumericalError& e) {
    record.failed = true;
    record.error = e.what();
    record.values.clear();
  }
  return record;
}

std::string indexed(const char* name, Eigen::Index j) { return std::string(name) + "_" + std::to_string(j + 1); }

std::string levelName(double level) {
  return "cov" + formatNumber(std::round(level * 1000.0) / 10.0);
}

double resolveLambda(const LassoSpec& spec, std::size_t n, std::size_t d) {
  if (std::isfinite(spec.lambda)) return spec.lambda;
  return spec.lambdaScale * std::sqrt(std::log(static_cast<double>(d)) / static_cast<double>(n));
}

double resolveMu(const DebiasSpec& spec, std::size_t n, std::size_t d) {
  if (std::isfinite(spec.mu)) return spec.mu;
  return spec.muScale * std::sqrt(std::log(static_cast<double>(d)) / static_cast<double>(n));
}

}  // namespace

Design parseDesign(const std::string& name) { return parseName(kDesignNames, name, "design"); }
std::string designName(Design design) { return nameOf(kDesignNames, design); }
RangePresetKind parseRangePresetKind(const std::string& name) {
  return parseName(kPresetNames, name, "range preset");
}
std::string rangePresetKindName(RangePresetKind kind) { return nameOf(kPresetNames, kind); }

// ---------------------------------------------------------------------------
// Reports

double ReplicationRecord::value(const std::string& name) const {
  for (const auto& [key, v] : values) {
    if (key == name) return v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::size_t ExperimentReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const ReplicationRecord& r) { return r.failed; }));
}

const Aggregate* ExperimentReport::aggregate(const std::string& group, const std::string& metric) const {
  for (const auto& a : aggregates) {
    if (a.group == group && a.metric == metric) return &a;
  }
  return nullptr;
}

std::string ExperimentReport::configId() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config.dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash;
  return os.str();
}

ordered_json ExperimentReport::toJson() const {
  ordered_json out;
  out["study"] = study;
  out["metadata"] = {{"configId", configId()}, {"masterSeed", masterSeed}, {"config", config}};
  out["replications"] = records.size();
  out["failures"] = failures();
  ordered_json aggs = ordered_json::array();
  for (const auto& a : aggregates) {
    aggs.push_back({{"group", a.group}, {"metric", a.metric}, {"mean", a.mean}, {"se", a.se}, {"count", a.count}});
  }
  out["aggregates"] = std::move(aggs);
  out["summary"] = summary;
  if (!qq.empty()) out["qq"] = qq;
  return out;
}

void ExperimentReport::writeJson(std::ostream& out) const { out << toJson().dump(2) << '\n'; }

void ExperimentReport::writeCsv(std::ostream& out) const {
  std::vector<std::string> columns;
  for (const auto& r : records) {
    for (const auto& [key, v] : r.values) {
      (void)v;
      if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
    }
  }
  out << "group,replication,seed,failed,error";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& r : records) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << r.group << ',' << r.replication << ',' << r.seed << ',' << (r.failed ? 1 : 0) << ',' << error;
    for (const auto& c : columns) {
      out << ',';
      const double v = r.value(c);
      if (!std::isnan(v)) out << formatNumber(v);
    }
    out << '\n';
  }
}

std::vector<Aggregate> aggregateRecords(const std::vector<ReplicationRecord>& records) {
  // Groups and metrics in first-appearance order.
  std::vector<std::string> groups;
  std::map<std::string, std::vector<std::string>> metrics;
  for (const auto& r : records) {
    if (std::find(groups.begin(), groups.end(), r.group) == groups.end()) groups.push_back(r.group);
    auto& names = metrics[r.group];
    for (const auto& [key, v] : r.values) {
      (void)v;
      if (std::find(names.begin(), names.end(), key) == names.end()) names.push_back(key);
    }
  }
  std::vector<Aggregate> out;
  for (const auto& g : groups) {
    for (const auto& metric : metrics[g]) {
      std::vector<double> values;
      for (const auto& r : records) {
        if (r.failed || r.group != g) continue;
        const double v = r.value(metric);
        if (!std::isnan(v)) values.push_back(v);
      }
      Aggregate a;
      a.group = g;
      a.metric = metric;
      a.count = values.size();
      a.mean = values.empty() ? std::numeric_limits<double>::quiet_NaN() : sampleMean(values);
      a.se = std::sqrt(sampleVariance(values) / static_cast<double>(values.size()));
      out.push_back(std::move(a));
    }
  }
  return out;
}

double logLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs >= 2 paired points");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("log-log slope needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const double mx = sampleMean(lx), my = sampleMean(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

std::vector<std::vector<ReplicationRecord>> runReplications(
    std::size_t reps, const RunOptions& opt,
    const std::function<std::vector<ReplicationRecord>(std::size_t)>& fn) {
  std::vector<std::vector<ReplicationRecord>> results(reps);
  unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(reps, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr firstError;
  std::mutex errorMutex;
  auto worker = [&] {
    for (std::size_t rep = next++; rep < reps; rep = next++) {
      try {
        results[rep] = fn(rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errorMutex);
        if (!firstError) firstError = std::current_exception();
        next = reps;  // stop handing out work
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (firstError) std::rethrow_exception(firstError);
  return results;
}

// ---------------------------------------------------------------------------
// MSE study

ExperimentReport runMseStudy(const MseStudyConfig& cfg, const RunOptions& opt) {
  cfg.scenario.validate();
  requireReps(cfg.reps, 2, "mse");
  if (cfg.sigmas.empty()) throw InvalidArgument("mse study needs at least one sigma");
  for (const double s : cfg.sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("sigma grid values must be > 0");
  }
  ExperimentReport report;
  report.study = "mse";
  report.masterSeed = cfg.scenario.seed;
  report.config = {{"scenario", toJson(cfg.scenario)}, {"sigmas", cfg.sigmas}, {"reps", cfg.reps}};

  const Scenario& base = cfg.scenario;
  auto perRep = runReplications(cfg.reps, opt, [&](std::size_t rep) {
    const std::uint64_t seed = deriveSeed(base.seed, rep);
    const Eigen::MatrixXd X = generateDesign(base.design, base.n, base.d, seed);
    const Eigen::VectorXd eps = generateNoise(base.n, seed);
    const Eigen::VectorXd signal = X * base.betaStar;
    std::vector<ReplicationRecord> out;
    for (std::size_t g = 0; g < cfg.sigmas.size(); ++g) {
      Scenario s = base;
      s.sigma = cfg.sigmas[g];
      out.push_back(guarded(makeRecord(g, groupLabel("sigma", s.sigma), rep, seed), [&](ReplicationRecord& r) {
        const Eigen::VectorXd y = signal + s.sigma * eps;
        const QuantizedDataset ds = quantizeDataset(X, y, scenarioRanges(s), seed);
        const Eigen::VectorXd beta = solvePlugIn(estimateMoments(ds));
        const Eigen::VectorXd ols = fitOls(X, y).betaHat;
        r.values = {{"quantMse", (beta - s.betaStar).squaredNorm()},
                    {"plainMse", (ols - s.betaStar).squaredNorm()},
                    {"clampEvents", static_cast<double>(ds.clampEvents)}};
      }));
    }
    return out;
  });
  report.records = flatten(std::move(perRep));
  report.aggregates = aggregateRecords(report.records);

  ordered_json rows = ordered_json::array();
  const double signal2 = base.betaStar.squaredNorm();
  for (const double sigma : cfg.sigmas) {
    const std::string g = groupLabel("sigma", sigma);
    const auto* q = report.aggregate(g, "quantMse");
    const auto* p = report.aggregate(g, "plainMse");
    if (!q || !p) continue;
    ordered_json row = {{"sigma", sigma},
                        {"quantMse", q->mean},
                        {"quantMseSe", q->se},
                        {"plainMse", p->mean},
                        {"plainMseSe", p->se},
                        {"plainX32", 32.0 * p->mean},
                        {"gapRatio", q->mean / (32.0 * p->mean)},
                        {"are", relativeEfficiency(q->mean, p->mean)},
                        {"areLowerBound", 1.0 + signal2 / (sigma * sigma)}};
    if (base.design == Design::Rademacher) {
      Scenario s = base;
      s.sigma = sigma;
      const double L = scenarioRanges(s).L();
      // Already 1-bit predictors: only the response is quantized.
      row["areOneBitPredictors"] = (L * L - signal2) / (sigma * sigma);
    }
    rows.push_back(std::move(row));
  }
  report.summary["bySigma"] = std::move(rows);
  return report;
}

// ---------------------------------------------------------------------------
// Sketch study

ExperimentReport runSketchStudy(const SketchStudyConfig& cfg, const RunOptions& opt) {
  cfg.scenario.validate();
  requireReps(cfg.reps, 2, "sketch");
  if (cfg.mGrid.empty() || !std::is_sorted(cfg.mGrid.begin(), cfg.mGrid.end()) ||
      std::adjacent_find(cfg.mGrid.begin(), cfg.mGrid.end()) != cfg.mGrid.end()) {
    throw InvalidArgument("mGrid must be strictly increasing");
  }
  if (cfg.mGrid.back() > cfg.scenario.n) throw InvalidArgument("mGrid exceeds n");
  if (cfg.slopePoints < 2 || cfg.slopePoints > cfg.mGrid.size()) {
    throw InvalidArgument("slopePoints must be in [2, |mGrid|]");
  }
  ExperimentReport report;
  report.study = "sketch";
  report.masterSeed = cfg.scenario.seed;
  report.config = {{"scenario", toJson(cfg.scenario)},
                   {"mGrid", cfg.mGrid},
                   {"reps", cfg.reps},
                   {"kind", nameOf(kSketchKindNames, cfg.kind)},
                   {"method", nameOf(kSketchMethodNames, cfg.method)},
                   {"slopePoints", cfg.slopePoints}};

  const Scenario& base = cfg.scenario;
  const std::size_t quantOnlyGroup = cfg.mGrid.size();
  auto perRep = runReplications(cfg.reps, opt, [&](std::size_t rep) {
    const std::uint64_t seed = deriveSeed(base.seed, rep);
    Scenario s = base;
    s.seed = seed;
    const GeneratedData data = generateScenario(s);
    std::vector<ReplicationRecord> out;
    for (std::size_t g = 0; g < cfg.mGrid.size(); ++g) {
      const std::size_t m = cfg.mGrid[g];
      out.push_back(guarded(makeRecord(g, "m=" + std::to_string(m), rep, seed), [&](ReplicationRecord& r) {
        Scenario sketched = s;
        sketched.n = m;
        const SketchedData sk = sketchData(
            data.X, data.y, SketchConfig{m, cfg.kind, deriveSeed(seed, m, StreamTag::Sketch), cfg.method});
        const QuantizedDataset ds = quantizeDataset(sk.X, sk.y, scenarioRanges(sketched), seed);
        const Eigen::VectorXd beta = solvePlugIn(estimateMoments(ds));
        r.values = {{"mse", (beta - s.betaStar).squaredNorm()}, {"clampEvents", static_cast<double>(ds.clampEvents)}};
      }));
    }
    out.push_back(guarded(makeRecord(quantOnlyGroup, "quantOnly", rep, seed), [&](ReplicationRecord& r) {
      const QuantizedDataset ds = quantizeDataset(data.X, data.y, scenarioRanges(s), seed);
      const Eigen::VectorXd beta = solvePlugIn(estimateMoments(ds));
      r.values = {{"mse", (beta - s.betaStar).squaredNorm()}, {"clampEvents", static_cast<double>(ds.clampEvents)}};
    }));
    return out;
  });
  report.records = flatten(std::move(perRep));
  report.aggregates = aggregateRecords(report.records);

  std::vector<double> ms, mses;
  ordered_json rows = ordered_json::array();
  for (const std::size_t m : cfg.mGrid) {
    const auto* a = report.aggregate("m=" + std::to_string(m), "mse");
    const double mse = a && a->count > 0 ? a->mean : std::numeric_limits<double>::quiet_NaN();
    ms.push_back(static_cast<double>(m));
    mses.push_back(mse);
    rows.push_back({{"m", m}, {"mse", mse}, {"mseSe", a ? a->se : std::numeric_limits<double>::quiet_NaN()}});
  }
  report.summary["byM"] = std::move(rows);
  if (const auto* q = report.aggregate("quantOnly", "mse")) {
    report.summary["quantOnlyMse"] = q->mean;
    report.summary["quantOnlyMseSe"] = q->se;
  }
  // Every m fully failed somewhere: no slope.
  if (std::any_of(mses.begin(), mses.end(), [](double v) { return std::isnan(v); })) {
    report.summary["slopeTop"] = nullptr;
    report.summary["slopeAll"] = nullptr;
    report.summary["smallestMAboveLine"] = nullptr;
    return report;
  }
  const std::size_t k = cfg.slopePoints;
  const std::vector<double> topM(ms.end() - static_cast<std::ptrdiff_t>(k), ms.end());
  const std::vector<double> topMse(mses.end() - static_cast<std::ptrdiff_t>(k), mses.end());
  report.summary["slopeTop"] = logLogSlope(topM, topMse);
  report.summary["slopeAll"] = logLogSlope(ms, mses);
  // Line with slope fixed at -1 through the top points, checked at the smallest m.
  double intercept = 0.0;
  for (std::size_t i = 0; i < k; ++i) intercept += std::log(topMse[i]) + std::log(topM[i]);
  intercept /= static_cast<double>(k);
  report.summary["smallestMAboveLine"] = std::log(mses.front()) > intercept - std::log(ms.front());
  return report;
}

// ---------------------------------------------------------------------------
// Coverage study

ExperimentReport runCoverageStudy(const CoverageStudyConfig& cfg, const RunOptions& opt) {
  cfg.scenario.validate();
  requireReps(cfg.reps, 100, "coverage");
  if (cfg.levels.empty()) throw InvalidArgument("coverage study needs at least one level");
  for (const double level : cfg.levels) {
    if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("levels must lie in (0, 1)");
  }
  if (cfg.debias && !cfg.lasso) throw InvalidArgument("debiasing requires the lasso");
  ExperimentReport report;
  report.study = "coverage";
  report.masterSeed = cfg.scenario.seed;
  report.config = {{"scenario", toJson(cfg.scenario)},
                   {"reps", cfg.reps},
                   {"levels", cfg.levels},
                   {"lasso", toJson(cfg.lasso)},
                   {"debias", toJson(cfg.debias)}};

  const Scenario& base = cfg.scenario;
  const auto d = static_cast<Eigen::Index>(base.d);
  const bool intervals = !cfg.lasso || cfg.debias.has_value();
  auto perRep = runReplications(cfg.reps, opt, [&](std::size_t rep) {
    const std::uint64_t seed = deriveSeed(base.seed, rep);
    return std::vector<ReplicationRecord>{guarded(makeRecord(0, "all", rep, seed), [&](ReplicationRecord& r) {
      Scenario s = base;
      s.seed = seed;
      const GeneratedData data = generateScenario(s);
      const QuantizedDataset ds = quantizeDataset(data.X, data.y, scenarioRanges(s), seed);
      const MomentEstimates mom = estimateMoments(ds);
      Eigen::VectorXd estimate, se;
      if (!cfg.lasso) {
        const FitResult fit = fitQuantized(mom, ds, cfg.levels.front());
        estimate = fit.betaHat;
        se = fit.stdErrors;
      } else {
        LassoConfig lc;
        lc.lambda = resolveLambda(*cfg.lasso, s.n, s.d);
        lc.ballRadius = cfg.lasso->ballRadius;
        const LassoResult lasso = fitLasso(mom, lc);
        if (!lasso.converged) throw NonConvergence("lasso did not converge");
        bool supportHit = true;
        for (Eigen::Index j = 0; j < d; ++j) {
          if (s.betaStar(j) != 0.0 && lasso.beta(j) == 0.0) supportHit = false;
        }
        r.values.emplace_back("lassoL2err", (lasso.beta - s.betaStar).norm());
        r.values.emplace_back("supportHit", supportHit ? 1.0 : 0.0);
        estimate = lasso.beta;
        if (cfg.debias) {
          const DebiasMatrix M = computeDebiasMatrixAdaptive(mom, resolveMu(*cfg.debias, s.n, s.d),
                                                             cfg.debias->maxDoublings);
          const DebiasResult db = debias(mom, lasso.beta, ds, M.M, cfg.levels.front());
          r.values.emplace_back("mu", M.mu);
          estimate = db.betaDb;
          se = db.stdErrors;
        }
      }
      r.values.emplace_back("l2err", (estimate - s.betaStar).norm());
      for (Eigen::Index j = 0; j < d; ++j) r.values.emplace_back(indexed("est", j), estimate(j));
      if (!intervals) return;
      for (Eigen::Index j = 0; j < d; ++j) r.values.emplace_back(indexed("se", j), se(j));
      for (Eigen::Index j = 0; j < d; ++j) {
        r.values.emplace_back(indexed("z", j), (estimate(j) - s.betaStar(j)) / se(j));
      }
      for (const double level : cfg.levels) {
        const auto ci = normalIntervals(estimate, se, level);
        for (Eigen::Index j = 0; j < d; ++j) {
          r.values.emplace_back(indexed(levelName(level).c_str(), j),
                                ci[static_cast<std::size_t>(j)].contains(s.betaStar(j)) ? 1.0 : 0.0);
        }
      }
    })};
  });
  report.records = flatten(std::move(perRep));
  report.aggregates = aggregateRecords(report.records);

  ordered_json coords = ordered_json::array();
  const double ksCritical = 1.63 / std::sqrt(static_cast<double>(cfg.reps - report.failures()));
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto est = collect(report, "all", indexed("est", j));
    ordered_json c = {{"coordinate", j + 1}, {"betaStar", base.betaStar(j)}};
    if (!est.empty()) {
      c["bias"] = sampleMean(est) - base.betaStar(j);
      c["sd"] = std::sqrt(sampleVariance(est));
    }
    if (intervals) {
      const auto se = collect(report, "all", indexed("se", j));
      if (!se.empty()) c["meanSe"] = sampleMean(se);
      ordered_json cov;
      for (const double level : cfg.levels) {
        const auto hits = collect(report, "all", indexed(levelName(level).c_str(), j));
        cov[formatNumber(level)] = hits.empty() ? std::numeric_limits<double>::quiet_NaN() : sampleMean(hits);
      }
      c["coverage"] = std::move(cov);
      auto z = collect(report, "all", indexed("z", j));
      if (!z.empty()) {
        c["ks"] = ksStatisticNormal(z);
        std::sort(z.begin(), z.end());
        std::vector<double> theoretical(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
          theoretical[i] = normalQuantile((static_cast<double>(i) + 0.5) / static_cast<double>(z.size()));
        }
        report.qq[std::to_string(j + 1)] = {{"sample", z}, {"theoretical", theoretical}};
      }
    }
    coords.push_back(std::move(c));
  }
  report.summary["coordinates"] = std::move(coords);
  report.summary["ksCritical01"] = ksCritical;
  if (cfg.lasso) {
    const auto hits = collect(report, "all", "supportHit");
    if (!hits.empty()) report.summary["supportRecovery"] = sampleMean(hits);
    report.summary["medianLassoL2err"] = median(collect(report, "all", "lassoL2err"));
  }
  report.summary["medianL2err"] = median(collect(report, "all", "l2err"));
  return report;
}

// ---------------------------------------------------------------------------
// Rate study

ExperimentReport runRateStudy(const RateStudyConfig& cfg, const RunOptions& opt) {
  cfg.scenario.validate();
  requireReps(cfg.reps, 2, "rate");
  if (cfg.nGrid.size() < 2 || !std::is_sorted(cfg.nGrid.begin(), cfg.nGrid.end())) {
    throw InvalidArgument("nGrid needs >= 2 increasing values");
  }
  ExperimentReport report;
  report.study = "rate";
  report.masterSeed = cfg.scenario.seed;
  report.config = {{"scenario", toJson(cfg.scenario)},
                   {"nGrid", cfg.nGrid},
                   {"reps", cfg.reps},
                   {"lasso", toJson(cfg.lasso)}};

  const Scenario& base = cfg.scenario;
  auto perRep = runReplications(cfg.reps, opt, [&](std::size_t rep) {
    const std::uint64_t seed = deriveSeed(base.seed, rep);
    std::vector<ReplicationRecord> out;
    for (std::size_t g = 0; g < cfg.nGrid.size(); ++g) {
      Scenario s = base;
      s.n = cfg.nGrid[g];
      s.seed = seed;
      out.push_back(guarded(makeRecord(g, "n=" + std::to_string(s.n), rep, seed), [&](ReplicationRecord& r) {
        const GeneratedData data = generateScenario(s);
        const QuantizedDataset ds = quantizeDataset(data.X, data.y, scenarioRanges(s), seed);
        const MomentEstimates mom = estimateMoments(ds);
        Eigen::VectorXd beta;
        if (cfg.lasso) {
          LassoConfig lc;
          lc.lambda = resolveLambda(*cfg.lasso, s.n, s.d);
          lc.ballRadius = cfg.lasso->ballRadius;
          const LassoResult fit = fitLasso(mom, lc);
          if (!fit.converged) throw NonConvergence("lasso did not converge");
          beta = fit.beta;
        } else {
          beta = solvePlugIn(mom);
        }
        r.values = {{"l2err", (beta - s.betaStar).norm()}};
      }));
    }
    return out;
  });
  report.records = flatten(std::move(perRep));
  report.aggregates = aggregateRecords(report.records);

  std::vector<double> ns, medians;
  ordered_json rows = ordered_json::array();
  for (const std::size_t n : cfg.nGrid) {
    const auto errs = collect(report, "n=" + std::to_string(n), "l2err");
    const double med = median(errs);
    ns.push_back(static_cast<double>(n));
    medians.push_back(med);
    rows.push_back({{"n", n}, {"medianL2err", med}, {"count", errs.size()}});
  }
  report.summary["byN"] = std::move(rows);
  report.summary["slope"] = logLogSlope(ns, medians);
  report.summary["medianRatioLastFirst"] = medians.back() / medians.front();
  return report;
}

// ---------------------------------------------------------------------------
// ARE study

AreClosedForm areClosedForm(double R, double L, double beta) {
  const double R2 = R * R, L2 = L * L, b2 = beta * beta;
  return {R2 * L2 + R2 * b2 - 6.0 * b2, 0.5 * (R2 * L2 + L2) + R2 * R2 * b2 - 2.0 * R2 * b2};
}

ExperimentReport runAreStudy(const AreStudyConfig& cfg, const RunOptions& opt) {
  requireReps(cfg.reps, 2, "are");
  if (cfg.snrGrid.empty()) throw InvalidArgument("are study needs a non-empty snrGrid");
  for (const auto& p : cfg.snrGrid) {
    if (!std::isfinite(p.beta) || !(p.sigma > 0.0)) throw InvalidArgument("invalid snrGrid point");
  }
  const double R = resolveRanges(SubGaussianLogN{cfg.q, cfg.cK, 1.0, 1.0, 1.0, 0.0}, cfg.n, 1).R();
  ExperimentReport report;
  report.study = "are";
  report.masterSeed = cfg.seed;
  ordered_json grid = ordered_json::array();
  for (const auto& p : cfg.snrGrid) grid.push_back({{"beta", p.beta}, {"sigma", p.sigma}});
  report.config = {{"snrGrid", grid}, {"n", cfg.n}, {"reps", cfg.reps}, {"q", cfg.q}, {"cK", cfg.cK}, {"seed", cfg.seed}};

  auto perRep = runReplications(cfg.reps, opt, [&](std::size_t rep) {
    const std::uint64_t seed = deriveSeed(cfg.seed, rep);
    const Eigen::MatrixXd X = generateDesign(Design::GaussianIID, cfg.n, 1, seed);
    const Eigen::VectorXd eps = generateNoise(cfg.n, seed);
    std::vector<ReplicationRecord> out;
    for (std::size_t g = 0; g < cfg.snrGrid.size(); ++g) {
      const auto& p = cfg.snrGrid[g];
      const std::string label = "beta=" + formatNumber(p.beta) + ",sigma=" + formatNumber(p.sigma);
      out.push_back(guarded(makeRecord(g, label, rep, seed), [&](ReplicationRecord& r) {
        const double L = R * std::sqrt(p.beta * p.beta + p.sigma * p.sigma);
        const auto ranges = QuantizerRanges::fromBounds(R, L);
        const Eigen::VectorXd y = p.beta * X.col(0) + p.sigma * eps;
        const QuantizedDataset ds = quantizeDataset(X, y, ranges, seed);
        const PairedQuantizedDataset paired = pairWithSecondCopy(ds, X);
        const MomentEstimates squared = estimateMoments(ds);
        const MomentEstimates first = estimateMomentsPaired(paired, PairedCross::FirstCopy);
        const MomentEstimates averaged = estimateMomentsPaired(paired, PairedCross::Averaged);
        // d = 1: the plug-in solution is a ratio; no PD threshold beyond a nonzero diagonal.
        auto ratio = [](const MomentEstimates& m) {
          if (!(m.sigmaHat(0, 0) > 0.0)) throw NotPositiveDefinite(m.sigmaHat(0, 0));
          return m.sigmaXyHat(0) / m.sigmaHat(0, 0);
        };
        r.values = {{"betaSquared", ratio(squared)},
                    {"betaPairedFirst", ratio(first)},
                    {"betaPairedAveraged", ratio(averaged)},
                    {"crossSquared", squared.sigmaXyHat(0)},
                    {"crossPairedAveraged", averaged.sigmaXyHat(0)}};
      }));
    }
    return out;
  });
  report.records = flatten(std::move(perRep));
  report.aggregates = aggregateRecords(report.records);

  const double n = static_cast<double>(cfg.n);
  ordered_json rows = ordered_json::array();
  for (const auto& p : cfg.snrGrid) {
    const std::string label = "beta=" + formatNumber(p.beta) + ",sigma=" + formatNumber(p.sigma);
    const double L = R * std::sqrt(p.beta * p.beta + p.sigma * p.sigma);
    const double vSq = n * sampleVariance(collect(report, label, "betaSquared"));
    const double vFirst = n * sampleVariance(collect(report, label, "betaPairedFirst"));
    const double vAvg = n * sampleVariance(collect(report, label, "betaPairedAveraged"));
    const auto closed = areClosedForm(R, L, p.beta);
    rows.push_back({{"beta", p.beta},
                    {"sigma", p.sigma},
                    {"R", R},
                    {"L", L},
                    {"R4OverN", std::pow(R, 4) / n},
                    {"nVarSquared", vSq},
                    {"nVarPairedFirst", vFirst},
                    {"nVarPairedAveraged", vAvg},
                    {"ratioAveraged", vAvg / vSq},
                    {"ratioFirstCopy", vFirst / vSq},
                    {"predictedRatioAveraged", closed.pairedAveraged / closed.squared},
                    {"nVarCrossSquared", n * sampleVariance(collect(report, label, "crossSquared"))},
                    {"nVarCrossPairedAveraged", n * sampleVariance(collect(report, label, "crossPairedAveraged"))}});
  }
  report.summary["bySnr"] = std::move(rows);
  return report;
}

// ---------------------------------------------------------------------------
// Transmission

double transmissionModel(std::size_t n, std::size_t d, double linkBitsPerSecond,
                         const TransmissionScheme& scheme, double headerBits) {
  if (!(linkBitsPerSecond > 0.0) || !std::isfinite(linkBitsPerSecond)) {
    throw InvalidArgument("link rate must be positive");
  }
  if (!(headerBits >= 0.0)) throw InvalidArgument("headerBits must be >= 0");
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  if (std::holds_alternative<Full64>(scheme)) return 64.0 * nd * (dd + 1.0) / linkBitsPerSecond;
  if (std::holds_alternative<Quantized>(scheme)) return (nd * (2.0 * dd + 1.0) + headerBits) / linkBitsPerSecond;
  const double m = static_cast<double>(std::get<SketchQuantized>(scheme).m);
  return (m * (2.0 * dd + 1.0) + headerBits) / linkBitsPerSecond;
}

ExperimentReport runTransmissionStudy(const TransmissionStudyConfig& cfg) {
  if (cfg.nGrid.empty()) throw InvalidArgument("transmission study needs a non-empty nGrid");
  if (!(cfg.sketchFraction > 0.0 && cfg.sketchFraction <= 1.0)) {
    throw InvalidArgument("sketchFraction must lie in (0, 1]");
  }
  ExperimentReport report;
  report.study = "transmission";
  report.config = {{"nGrid", cfg.nGrid},
                   {"d", cfg.d},
                   {"linkBitsPerSecond", cfg.linkBitsPerSecond},
                   {"sketchFraction", cfg.sketchFraction},
                   {"headerBits", cfg.headerBits}};
  ordered_json rows = ordered_json::array();
  for (std::size_t g = 0; g < cfg.nGrid.size(); ++g) {
    const std::size_t n = cfg.nGrid[g];
    const auto m = static_cast<std::size_t>(std::llround(cfg.sketchFraction * static_cast<double>(n)));
    const double full = transmissionModel(n, cfg.d, cfg.linkBitsPerSecond, Full64{});
    const double quant = transmissionModel(n, cfg.d, cfg.linkBitsPerSecond, Quantized{}, cfg.headerBits);
    const double sketch = transmissionModel(n, cfg.d, cfg.linkBitsPerSecond, SketchQuantized{m}, cfg.headerBits);
    ReplicationRecord r = makeRecord(g, "n=" + std::to_string(n), 0, 0);
    r.values = {{"full64Seconds", full}, {"quantizedSeconds", quant}, {"sketchQuantizedSeconds", sketch}};
    report.records.push_back(std::move(r));
    rows.push_back({{"n", n},
                    {"m", m},
                    {"full64Seconds", full},
                    {"quantizedSeconds", quant},
                    {"sketchQuantizedSeconds", sketch},
                    {"quantizedOverFull", quant / full}});
  }
  report.aggregates = aggregateRecords(report.records);
  report.summary["byN"] = std::move(rows);
  return report;
}

// ---------------------------------------------------------------------------
// JSON entry point

ExperimentReport runStudyFromJson(const std::string& study, const nlohmann::json& config,
                                  std::optional<std::uint64_t> seed, const RunOptions& opt) {
  if (!config.is_object()) throw InvalidArgument("study config must be a JSON object");
  if (study == "transmission") {
    TransmissionStudyConfig cfg;
    cfg.nGrid = get(config, "nGrid", cfg.nGrid);
    cfg.d = get(config, "d", cfg.d);
    cfg.linkBitsPerSecond = get(config, "linkBitsPerSecond", cfg.linkBitsPerSecond);
    cfg.sketchFraction = get(config, "sketchFraction", cfg.sketchFraction);
    cfg.headerBits = get(config, "headerBits", cfg.headerBits);
    return runTransmissionStudy(cfg);
  }
  if (!seed) {
    if (!config.contains("seed")) throw InvalidArgument("randomized studies require an explicit seed");
    seed = get<std::uint64_t>(config, "seed", 0);
  }
  if (study == "are") {
    AreStudyConfig cfg;
    cfg.seed = *seed;
    cfg.n = get(config, "n", cfg.n);
    cfg.reps = get(config, "reps", cfg.reps);
    cfg.q = get(config, "q", cfg.q);
    cfg.cK = get(config, "cK", cfg.cK);
    if (config.contains("snrGrid")) {
      cfg.snrGrid.clear();
      for (const auto& p : config.at("snrGrid")) cfg.snrGrid.push_back({get(p, "beta", 0.0), get(p, "sigma", 1.0)});
    }
    return runAreStudy(cfg, opt);
  }
  if (!config.contains("scenario")) throw InvalidArgument("study config needs a 'scenario' object");
  Scenario scenario = parseScenario(config.at("scenario"));
  scenario.seed = *seed;
  if (study == "mse") {
    MseStudyConfig cfg;
    cfg.scenario = scenario;
    cfg.sigmas = get(config, "sigmas", cfg.sigmas);
    cfg.reps = get(config, "reps", cfg.reps);
    return runMseStudy(cfg, opt);
  }
  if (study == "sketch") {
    SketchStudyConfig cfg;
    cfg.scenario = scenario;
    cfg.mGrid = get(config, "mGrid", cfg.mGrid);
    cfg.reps = get(config, "reps", cfg.reps);
    if (config.contains("kind")) cfg.kind = parseName(kSketchKindNames, config.at("kind").get<std::string>(), "sketch kind");
    if (config.contains("method")) {
      cfg.method = parseName(kSketchMethodNames, config.at("method").get<std::string>(), "sketch method");
    }
    cfg.slopePoints = get(config, "slopePoints", cfg.slopePoints);
    return runSketchStudy(cfg, opt);
  }
  if (study == "coverage") {
    CoverageStudyConfig cfg;
    cfg.scenario = scenario;
    cfg.reps = get(config, "reps", cfg.reps);
    cfg.levels = get(config, "levels", cfg.levels);
    cfg.lasso = parseLasso(config);
    cfg.debias = parseDebias(config);
    return runCoverageStudy(cfg, opt);
  }
  if (study == "rate") {
    RateStudyConfig cfg;
    cfg.scenario = scenario;
    cfg.nGrid = get(config, "nGrid", cfg.nGrid);
    cfg.reps = get(config, "reps", cfg.reps);
    cfg.lasso = parseLasso(config);
    return runRateStudy(cfg, opt);
  }
  throw InvalidArgument("unknown study '" + study + "' (expected mse, sketch, coverage, rate, are, transmission)");
}

}  // namespace bitreg
