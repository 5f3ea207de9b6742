#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "bitreg/csv.hpp"
#include "bitreg/qbr_format.hpp"
#include "bitreg/regress.hpp"
#include "bitreg/rng.hpp"
#include "bitreg/serialize.hpp"

using namespace bitreg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the CLI, capturing stdout; stderr goes to `errFile`.
Run cli(const std::string& args, const fs::path& errFile) {
  const std::string cmd = std::string(BITREG_CLI_PATH) + " " + args + " 2>" + errFile.string();
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / "bitreg_cli_test";
  TempDir() {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("quantize then fit matches the library bit for bit") {
  TempDir tmp;
  const std::size_t n = 3000, d = 3;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) X(i, j) = standardNormal(1, i, j, StreamTag::Test);
    y(i) = X(i, 0) - 0.5 * X(i, 2) + standardNormal(1, i, 9, StreamTag::Test);
  }
  const fs::path csv = tmp.path / "x.csv", qbr = tmp.path / "d.qbr", err = tmp.path / "err";
  {
    std::ofstream out(csv);
    writeRegressionCsv(out, X, y);
  }
  const auto q = cli("quantize --input " + csv.string() + " --R 2.5 --L 5 --seed 7 --out " + qbr.string(), err);
  REQUIRE(q.code == 0);

  std::ifstream back(csv);
  const auto table = readRegressionCsv(back);
  const auto ds = quantizeDataset(table.X, table.y, QuantizerRanges::fromBounds(2.5, 5.0), 7);
  CHECK(readQbrFile(qbr).sameContent(ds));

  const auto fit = cli("fit " + qbr.string(), err);
  REQUIRE(fit.code == 0);
  CHECK(nlohmann::ordered_json::parse(fit.out) == toJson(fitQuantized(ds)));

  const auto mom = cli("moments " + qbr.string(), err);
  REQUIRE(mom.code == 0);
  const auto parsed = momentsFromJson(nlohmann::json::parse(mom.out));
  CHECK(parsed.sigmaHat == estimateMoments(ds).sigmaHat);

  const auto lasso = cli("fit " + qbr.string() + " --lasso --lambda 0.05 --debias", err);
  REQUIRE(lasso.code == 0);
  const auto lj = nlohmann::json::parse(lasso.out);
  CHECK(lj.contains("support"));
  CHECK(lj.contains("infNormResidual"));
}

TEST_CASE("error exit codes") {
  TempDir tmp;
  const fs::path err = tmp.path / "err";
  CHECK(cli("quantize --R 1 --L 1 --out x.qbr", err).code == 1);  // missing --seed
  CHECK(nlohmann::json::parse(slurp(err))["error"] == "usage");
  CHECK(cli("frobnicate", err).code == 1);
  CHECK(cli("fit --help", err).code == 0);

  // Truncated file.
  Eigen::MatrixXd X = Eigen::MatrixXd::Constant(20, 2, 0.5);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 0.1);
  auto bytes = encodeDataset(quantizeDataset(X, y, QuantizerRanges::fromBounds(1, 1), 1));
  bytes.resize(kQbrHeaderBytes + 3);
  const fs::path bad = tmp.path / "bad.qbr";
  {
    std::ofstream out(bad, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK(cli("fit " + bad.string(), err).code == 2);
  const auto e = nlohmann::json::parse(slurp(err));
  CHECK(e["message"] == "payload truncated");

  // Constant predictors: the plug-in covariance is singular.
  const fs::path flat = tmp.path / "flat.qbr";
  writeQbrFile(flat, quantizeDataset(Eigen::MatrixXd::Constant(20, 2, 1.0), y, QuantizerRanges::fromBounds(1, 1), 1));
  CHECK(cli("fit " + flat.string(), err).code == 3);

  // Missing value in the CSV.
  const fs::path csv = tmp.path / "missing.csv";
  {
    std::ofstream out(csv);
    out << "1,2,3\n4,,6\n";
  }
  CHECK(cli("quantize --input " + csv.string() + " --R 1 --L 1 --seed 1 --out " + (tmp.path / "m.qbr").string(), err)
            .code == 2);
  CHECK_FALSE(fs::exists(tmp.path / "m.qbr"));
}

TEST_CASE("likelihood subcommand") {
  TempDir tmp;
  const auto r = cli("likelihood --beta 1 --sigma 1 --R 2.5 --L 4", tmp.path / "err");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["pi"].get<double>() == doctest::Approx(0.5491694509830791).epsilon(1e-12));
  CHECK(j.contains("fisherInfo"));
}

TEST_CASE("sim subcommand requires a seed and is reproducible") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "cfg.json", err = tmp.path / "err";
  {
    std::ofstream out(cfg);
    out << R"({"scenario": {"preset": "mse", "design": "GaussianIID", "n": 1000}, "sigmas": [1], "reps": 3})";
  }
  CHECK(cli("sim mse --config " + cfg.string(), err).code == 1);
  const auto a = cli("sim mse --threads 1 --seed 3 --config " + cfg.string(), err);
  const auto b = cli("sim mse --threads 3 --seed 3 --config " + cfg.string(), err);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const fs::path tcfg = tmp.path / "t.json";
  {
    std::ofstream out(tcfg);
    out << R"({"nGrid": [1000000]})";
  }
  const auto t = cli("sim transmission --config - < " + tcfg.string(), err);
  REQUIRE(t.code == 0);
  CHECK(nlohmann::json::parse(t.out)["summary"]["byN"][0]["quantizedOverFull"].get<double>() == 21.0 / 704.0);
}
