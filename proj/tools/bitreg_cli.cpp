// bitreg: command-line front end for the quantized-regression library.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "json.hpp"

#include "bitreg/csv.hpp"
#include "bitreg/error.hpp"
#include "bitreg/likelihood.hpp"
#include "bitreg/moments.hpp"
#include "bitreg/qbr_format.hpp"
#include "bitreg/regress.hpp"
#include "bitreg/serialize.hpp"
#include "bitreg/simlab.hpp"
#include "bitreg/sketch.hpp"
#include "bitreg/sparse.hpp"

namespace {

using namespace bitreg;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int reportError(Exit code, const std::string& kind, const std::string& message) {
  ordered_json err = {{"error", kind}, {"message", message}, {"exitCode", static_cast<int>(code)}};
  std::cerr << err.dump() << '\n';
  return code;
}

struct CsvInput {
  std::string path = "-";
  bool header = false;
  std::optional<std::size_t> yCol;
};

void addCsvOptions(CLI::App* cmd, CsvInput& in) {
  cmd->add_option("--input,-i", in.path, "CSV of predictors and response ('-' for stdin)")->capture_default_str();
  cmd->add_flag("--header", in.header, "First row is a header");
  cmd->add_option("--y-col", in.yCol, "0-based response column (default: last)");
}

RegressionTable loadCsv(const CsvInput& in) {
  CsvOptions opt;
  opt.header = in.header;
  opt.yColumn = in.yCol;
  if (in.path == "-") return readRegressionCsv(std::cin, opt);
  std::ifstream file(in.path);
  if (!file) throw DataError("cannot open " + in.path);
  return readRegressionCsv(file, opt);
}

nlohmann::json loadJson(const std::string& path) {
  try {
    if (path == "-") return nlohmann::json::parse(std::cin);
    std::ifstream file(path);
    if (!file) throw DataError("cannot open " + path);
    return nlohmann::json::parse(file);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
}

void printJson(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

SketchKind parseKind(const std::string& s) {
  if (s == "gaussian") return SketchKind::GaussianIID;
  if (s == "ternary") return SketchKind::TernaryAchlioptas;
  if (s == "identity") return SketchKind::Identity;
  throw InvalidArgument("unknown sketch kind '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear regression from 1-bit dithered-quantized data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bitreg 0.1.0");

  // quantize
  CsvInput qIn;
  double qR = 0.0, qL = 0.0;
  std::uint64_t qSeed = 0;
  std::string qOut;
  bool qStrict = false;
  auto* quantize = app.add_subcommand("quantize", "Quantize a CSV dataset into a .qbr file");
  addCsvOptions(quantize, qIn);
  quantize->add_option("--R", qR, "Predictor range half-width")->required()->check(CLI::PositiveNumber);
  quantize->add_option("--L", qL, "Response range half-width")->required()->check(CLI::PositiveNumber);
  quantize->add_option("--seed", qSeed, "Dither seed")->required();
  quantize->add_option("--out,-o", qOut, "Output .qbr path")->required();
  quantize->add_flag("--strict", qStrict, "Reject out-of-range values instead of clamping");

  // moments
  std::string mPath;
  auto* moments = app.add_subcommand("moments", "Print plug-in moment estimates of a .qbr file as JSON");
  moments->add_option("qbr", mPath, "Quantized dataset")->required();

  // fit
  std::string fPath;
  double fLevel = 0.95;
  bool fLasso = false, fDebias = false;
  double fLambda = std::nan(""), fRadius = std::numeric_limits<double>::infinity(), fMu = std::nan("");
  double fPdTol = kDefaultPdTolerance;
  auto* fit = app.add_subcommand("fit", "Estimate coefficients, standard errors and intervals from a .qbr file");
  fit->add_option("qbr", fPath, "Quantized dataset")->required();
  fit->add_option("--level", fLevel, "Confidence level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  fit->add_option("--pd-tol", fPdTol, "Minimum eigenvalue accepted for the plug-in covariance")->capture_default_str();
  auto* lassoFlag = fit->add_flag("--lasso", fLasso, "l1-penalized fit");
  fit->add_option("--lambda", fLambda, "Penalty (default 2 sqrt(log d / n))")->needs(lassoFlag);
  fit->add_option("--radius", fRadius, "l1-ball radius (default unbounded)")->needs(lassoFlag);
  auto* debiasFlag = fit->add_flag("--debias", fDebias, "Debiased intervals after the lasso")->needs(lassoFlag);
  fit->add_option("--mu", fMu, "Debias constraint level (default 0.1 sqrt(log d / n))")->needs(debiasFlag);

  // sketch
  CsvInput sIn;
  std::size_t sM = 0;
  std::string sKind = "gaussian", sOut;
  std::uint64_t sSeed = 0;
  double sR = 0.0, sL = 0.0;
  auto* sketch = app.add_subcommand("sketch", "Sketch a CSV dataset to m rows, quantize, and write a .qbr file");
  addCsvOptions(sketch, sIn);
  sketch->add_option("--m", sM, "Sketch size")->required()->check(CLI::PositiveNumber);
  sketch->add_option("--kind", sKind, "gaussian | ternary | identity")
      ->check(CLI::IsMember({"gaussian", "ternary", "identity"}))
      ->capture_default_str();
  sketch->add_option("--seed", sSeed, "Seed for the sketch and the dither")->required();
  sketch->add_option("--R", sR, "Predictor range half-width")->required()->check(CLI::PositiveNumber);
  sketch->add_option("--L", sL, "Response range half-width")->required()->check(CLI::PositiveNumber);
  sketch->add_option("--out,-o", sOut, "Output .qbr path")->required();

  // likelihood
  ScalarModel model;
  auto* likelihood = app.add_subcommand("likelihood", "Collision probability and Fisher information for d = 1");
  likelihood->add_option("--beta", model.betaStar, "Coefficient")->required();
  likelihood->add_option("--sigma", model.sigma, "Noise standard deviation")->required();
  likelihood->add_option("--R", model.R, "Predictor range half-width")->required();
  likelihood->add_option("--L", model.L, "Response range half-width")->required();

  // sim
  std::string simStudy, simConfig, simCsv, simOut;
  unsigned simThreads = 0;
  std::optional<std::uint64_t> simSeed;
  auto* sim = app.add_subcommand("sim", "Run a simulation study from a JSON config");
  sim->add_option("study", simStudy, "mse | sketch | coverage | rate | are | transmission")
      ->required()
      ->check(CLI::IsMember({"mse", "sketch", "coverage", "rate", "are", "transmission"}));
  sim->add_option("--config,-c", simConfig, "JSON config ('-' for stdin)")->required();
  sim->add_option("--seed", simSeed, "Master seed (overrides the config)");
  sim->add_option("--threads", simThreads, "Worker threads (default: available parallelism)");
  sim->add_option("--csv", simCsv, "Write per-replication records as CSV");
  sim->add_option("--out,-o", simOut, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return reportError(kUsage, "usage", e.what());
  }

  try {
    if (*quantize) {
      const RegressionTable t = loadCsv(qIn);
      const QuantizedDataset ds = quantizeDataset(t.X, t.y, QuantizerRanges::fromBounds(qR, qL), qSeed,
                                                  qStrict ? ClampMode::Strict : ClampMode::Clamp);
      writeQbrFile(qOut, ds);
      printJson({{"n", ds.n()}, {"d", ds.d()}, {"clampEvents", ds.clampEvents}, {"out", qOut}});
    } else if (*moments) {
      printJson(toJson(estimateMoments(readQbrFile(mPath))));
    } else if (*fit) {
      const QuantizedDataset ds = readQbrFile(fPath);
      const MomentEstimates mom = estimateMoments(ds);
      if (!fLasso) {
        printJson(toJson(fitQuantized(mom, ds, fLevel, fPdTol)));
      } else {
        const double logTerm = std::sqrt(std::log(static_cast<double>(ds.d())) / static_cast<double>(ds.n()));
        LassoConfig cfg;
        cfg.lambda = std::isnan(fLambda) ? 2.0 * logTerm : fLambda;
        cfg.ballRadius = fRadius;
        const LassoResult lasso = fitLasso(mom, cfg);
        if (!lasso.converged) throw NonConvergence("lasso did not converge");
        if (!fDebias) {
          printJson(toJson(lasso, mom));
        } else {
          const double mu = std::isnan(fMu) ? defaultDebiasMu(ds.n(), ds.d()) : fMu;
          const DebiasMatrix M = computeDebiasMatrixAdaptive(mom, mu);
          const DebiasResult db = debias(mom, lasso.beta, ds, M.M, fLevel);
          printJson(toJson(lasso, db, mom, M.mu));
        }
      }
    } else if (*sketch) {
      const RegressionTable t = loadCsv(sIn);
      const SketchConfig cfg{sM, parseKind(sKind), sSeed, SketchMethod::Streamed};
      const QuantizedDataset ds = sketchThenQuantize(t.X, t.y, cfg, FixedRanges{sR, sL});
      writeQbrFile(sOut, ds);
      printJson({{"n", t.X.rows()}, {"m", ds.n()}, {"d", ds.d()}, {"clampEvents", ds.clampEvents}, {"out", sOut}});
    } else if (*likelihood) {
      const FisherInformation fi = fisherInformation(model);
      printJson({{"pi", fi.pi}, {"piDot", fi.piDot}, {"fisherInfo", fi.information}});
    } else if (*sim) {
      const ExperimentReport report = runStudyFromJson(simStudy, loadJson(simConfig), simSeed, RunOptions{simThreads});
      if (!simCsv.empty()) {
        std::ofstream csv(simCsv);
        if (!csv) throw DataError("cannot write " + simCsv);
        report.writeCsv(csv);
      }
      if (simOut.empty()) {
        report.writeJson(std::cout);
      } else {
        std::ofstream out(simOut);
        if (!out) throw DataError("cannot write " + simOut);
        report.writeJson(out);
      }
    }
  } catch (const InvalidArgument& e) {
    return reportError(kUsage, "usage", e.what());
  } catch (const DataError& e) {
    return reportError(kData, "data", e.what());
  } catch (const NotPositiveDefinite& e) {
    return reportError(kNumerical, "notPositiveDefinite", e.what());
  } catch (const NonConvergence& e) {
    return reportError(kNumerical, "nonConvergence", e.what());
  } catch (const NumericalError& e) {
    return reportError(kNumerical, "numerical", e.what());
  } catch (const std::exception& e) {
    return reportError(kData, "io", e.what());
  }
  return kOk;
}
