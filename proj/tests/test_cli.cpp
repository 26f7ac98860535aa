#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"

#include "cli.hpp"
#include "csc/csv.hpp"
#include "csc/io.hpp"
#include "csc/signal.hpp"

namespace fs = std::filesystem;
using namespace csc;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run tool(std::vector<std::string> args) {
  args.insert(args.begin(), "csc");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("csc_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Field `column` of data row `row` in a CSV file.
std::string field(const fs::path& p, std::size_t row, const std::string& column) {
  const auto rows = csv::parse(slurp(p));
  REQUIRE(rows.size() > row + 1);
  for (std::size_t c = 0; c < rows[0].size(); ++c)
    if (rows[0][c] == column) return rows[row + 1][c];
  FAIL("no column " << column);
  return {};
}

// Clean 32x32 scene, its noisy copy and an 8x8x32 Gabor bank.
void fixture(const TempDir& t) {
  REQUIRE(tool({"synth-image", "--name", "shapes", "--size", "32", "--out", t / "clean.cimg"}).code == 0);
  REQUIRE(tool({"synth-dict", "--kind", "gabor", "--filter-size", "8", "--count", "32", "--out",
               t / "d.cdict"})
              .code == 0);
  REQUIRE(tool({"addnoise", "--in", t / "clean.cimg", "--out", t / "noisy.cimg", "--sigma", "0.05", "--seed",
               "3"})
              .code == 0);
}

}  // namespace

TEST_CASE("usage, help and version") {
  CHECK(tool({}).code == cli::kExitUsage);
  CHECK(tool({"frobnicate"}).code == cli::kExitUsage);
  const auto help = tool({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("denoise") != std::string::npos);
  const auto version = tool({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out.find("0.1.0") != std::string::npos);
  CHECK(tool({"denoise", "--help"}).code == 0);
  CHECK(tool({"synth-image", "--name", "nope", "--out", "x.cimg"}).code == cli::kExitUsage);
}

TEST_CASE("synthetic inputs and dictinfo") {
  TempDir t("synth");
  fixture(t);
  const Image clean = io::read_image(t / "clean.cimg");
  CHECK(clean.height() == 32);
  CHECK(clean.width() == 32);
  CHECK(fs::exists(t / "clean.cimg.manifest.json"));

  const auto info = tool({"dictinfo", "--dict", t / "d.cdict"});
  REQUIRE(info.code == 0);
  const auto j = nlohmann::json::parse(info.out);
  CHECK(j["filter_height"] == 8);
  CHECK(j["num_filters"] == 32);
  CHECK(j["normalized"] == true);
  for (const auto& n : j["norms"]) CHECK(n.get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j["max_coherence"].get<double>() < 1.0);

  REQUIRE(tool({"convert", "--in", t / "d.cdict", "--out", t / "montage.pgm"}).code == 0);
  CHECK(io::read_image(t / "montage.pgm").size() > 32 * 64);
  REQUIRE(tool({"convert", "--in", t / "clean.cimg", "--out", t / "clean.pgm"}).code == 0);
  CHECK(psnr(clean, io::read_image(t / "clean.pgm")) > 45.0);
}

TEST_CASE("addnoise") {
  TempDir t("noise");
  REQUIRE(tool({"synth-image", "--name", "texture", "--size", "128", "--out", t / "clean.cimg"}).code == 0);
  REQUIRE(tool({"addnoise", "--in", t / "clean.cimg", "--out", t / "zero.cimg", "--sigma", "0"}).code == 0);
  CHECK(io::read_image(t / "zero.cimg").values()[5] == io::read_image(t / "clean.cimg").values()[5]);
  CHECK(io::file_checksum(t / "zero.cimg") == io::file_checksum(t / "clean.cimg"));

  const auto a = tool({"addnoise", "--in", t / "clean.cimg", "--out", t / "a.cimg", "--sigma", "0.05"});
  REQUIRE(a.code == 0);
  REQUIRE(tool({"addnoise", "--in", t / "clean.cimg", "--out", t / "b.cimg", "--sigma", "0.05"}).code == 0);
  CHECK(io::file_checksum(t / "a.cimg") == io::file_checksum(t / "b.cimg"));
  CHECK(fs::exists(t / "a.pgm"));
  const double p = psnr(io::read_image(t / "clean.cimg"), io::read_image(t / "a.cimg"));
  CHECK(p == doctest::Approx(26.02).epsilon(0.2 / 26.02));
  CHECK(a.out.find("psnr") != std::string::npos);

  CHECK(tool({"addnoise", "--in", t / "clean.cimg", "--out", t / "c.cimg", "--sigma", "-1"}).code ==
        cli::kExitUsage);
  CHECK(tool({"addnoise", "--in", t / "clean.cimg", "--out", t / "c.pgm"}).code == cli::kExitUsage);
}

TEST_CASE("denoise") {
  TempDir t("denoise");
  fixture(t);
  const std::vector<std::string> base{"denoise", "--in", t / "noisy.cimg", "--dict", t / "d.cdict",
                                      "--reference", t / "clean.cimg"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return tool(a);
  };

  SUBCASE("l1 writes image, metrics and manifest") {
    REQUIRE(with({"--method", "l1", "--lambda", "0.05", "--out", t / "l1.cimg"}).code == 0);
    CHECK(io::read_image(t / "l1.cimg").size() == 32 * 32);
    const fs::path metrics = t / "l1.cimg.metrics.csv";
    CHECK(field(metrics, 0, "method") == "l1");
    CHECK(field(metrics, 0, "lambda") == "0.05");
    const double p = std::stod(field(metrics, 0, "psnr"));
    CHECK(p == doctest::Approx(psnr(io::read_image(t / "clean.cimg"), io::read_image(t / "l1.cimg"))));
    CHECK(p > psnr(io::read_image(t / "clean.cimg"), io::read_image(t / "noisy.cimg")));
    const auto m = nlohmann::json::parse(slurp(t / "l1.cimg.manifest.json"));
    CHECK(m["command"] == "denoise");
    CHECK(m["inputs"].size() == 3);
    CHECK(m["outputs"].size() == 2);
    CHECK(m["params"]["lambda"] == 0.05);
  }

  SUBCASE("a one-point grid equals the fixed lambda") {
    REQUIRE(with({"--method", "l1", "--lambda", "0.05", "--out", t / "fixed.cimg"}).code == 0);
    REQUIRE(with({"--method", "l1", "--grid-values", "0.05", "--out", t / "grid.cimg"}).code == 0);
    CHECK(io::file_checksum(t / "fixed.cimg") == io::file_checksum(t / "grid.cimg"));
    CHECK(field(t / "grid.cimg.grid.csv", 0, "lambda") == "0.05");
    CHECK(field(t / "grid.cimg.metrics.csv", 0, "psnr") == field(t / "fixed.cimg.metrics.csv", 0, "psnr"));
  }

  SUBCASE("nested and nonneg agree on the l1,inf functional") {
    const std::vector<std::string> common{"--method", "l1inf", "--lambda", "0.3", "--iterations", "5000"};
    auto run_alg = [&](const std::string& alg) {
      auto a = common;
      a.insert(a.end(), {"--algorithm", alg, "--out", t / (alg + ".cimg")});
      REQUIRE(with(a).code == 0);
      return std::stod(field(t / (alg + ".cimg.metrics.csv"), 0, "functional"));
    };
    const double nonneg = run_alg("nonneg");
    const double nested = run_alg("nested");
    CHECK(std::abs(nested - nonneg) <= 0.01 * nonneg);
    CHECK(field(t / "nested.cimg.metrics.csv", 0, "algorithm") == "nested");
  }

  SUBCASE("omp") {
    REQUIRE(with({"--method", "omp", "--sigma", "0.05", "--out", t / "omp.cimg"}).code == 0);
    CHECK(field(t / "omp.cimg.metrics.csv", 0, "method") == "omp");
    CHECK(with({"--method", "omp", "--lambda", "1", "--out", t / "x.cimg"}).code == cli::kExitUsage);
  }

  SUBCASE("usage errors") {
    CHECK(with({"--method", "l1", "--out", t / "x.cimg"}).code == cli::kExitUsage);
    CHECK(with({"--method", "l1", "--lambda", "-1", "--out", t / "x.cimg"}).code == cli::kExitUsage);
    CHECK(with({"--method", "l2", "--lambda", "1", "--out", t / "x.cimg"}).code == cli::kExitUsage);
    CHECK(tool({"denoise", "--in", t / "noisy.cimg", "--dict", t / "d.cdict", "--grid", "--method", "l1",
               "--out", t / "x.cimg"})
              .code == cli::kExitUsage);
  }
}

TEST_CASE("data errors") {
  TempDir t("data");
  fixture(t);
  {
    std::ofstream(t / "bad.cimg") << "not an image";
    std::ofstream(t / "bad.cdict") << "CDICT1 but truncated";
  }
  CHECK(tool({"psnr", "--reference", t / "clean.cimg", "--test", t / "bad.cimg"}).code == cli::kExitData);
  CHECK(tool({"dictinfo", "--dict", t / "bad.cdict"}).code == cli::kExitData);
  CHECK(tool({"denoise", "--in", t / "noisy.cimg", "--dict", t / "bad.cdict", "--method", "l1", "--lambda",
             "0.1", "--out", t / "x.cimg"})
            .code == cli::kExitData);
  // CLI11 rejects a missing input during parsing.
  CHECK(tool({"dictinfo", "--dict", t / "missing.cdict"}).code == cli::kExitUsage);
  const auto bad_read = tool({"convert", "--in", t / "bad.cimg", "--out", t / "y.pgm"});
  CHECK(bad_read.code == cli::kExitData);
  CHECK(bad_read.err.find("bad.cimg") != std::string::npos);

  const auto p = tool({"psnr", "--reference", t / "clean.cimg", "--test", t / "clean.cimg"});
  CHECK(p.code == 0);
  CHECK(p.out.find("inf") != std::string::npos);
}

TEST_CASE("blockerr") {
  TempDir t("blk");
  fixture(t);
  const auto r = tool({"blockerr", "--reference", t / "clean.cimg", "--test", t / "noisy.cimg,clean.cimg",
                      "--block", "8", "--out", t / "blk.csv", "--svg", t / "blk.svg"});
  CHECK(r.code == cli::kExitUsage);  // the second path is relative to the cwd
  REQUIRE(tool({"blockerr", "--reference", t / "clean.cimg", "--test", t / "noisy.cimg," + t / "clean.cimg",
               "--label", "noisy,clean", "--block", "8", "--out", t / "blk.csv", "--svg", t / "blk.svg"})
              .code == 0);
  const auto rows = csv::parse(slurp(t / "blk.csv"));
  REQUIRE(rows.size() >= 1);
  std::size_t noisy = 0, clean = 0;
  double clean_err = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][0] == "noisy") ++noisy;
    if (rows[i][0] == "clean") {
      ++clean;
      clean_err = std::max(clean_err, std::stod(rows[i].back()));
    }
  }
  // Stride-1 blocks, one per pixel.
  CHECK(noisy == 32 * 32);
  CHECK(clean == 32 * 32);
  CHECK(clean_err == 0.0);
  CHECK(slurp(t / "blk.svg").find("<svg") != std::string::npos);
  CHECK(tool({"blockerr", "--reference", t / "clean.cimg", "--test", t / "noisy.cimg", "--block", "64",
             "--out", t / "blk2.csv"})
            .code != 0);
}

TEST_CASE("benchmark determinism and replay") {
  TempDir t("bench");
  fixture(t);
  auto bench = [&](const std::string& dir, const std::string& threads) {
    return tool({"benchmark", "--synth", "shapes", "--size", "32", "--dict", t / "d.cdict", "--methods", "l1",
                "--grid-count", "3", "--threads", threads, "--out-dir", t / dir});
  };
  const auto a = bench("a", "1");
  REQUIRE(a.code == 0);
  REQUIRE(bench("b", "2").code == 0);

  const auto table = csv::parse(slurp(t / "a/table.csv"));
  REQUIRE(table.size() == 3);  // header, noisy, l1
  CHECK(table[0] == std::vector<std::string>{"method", "shapes"});
  CHECK(table[1][0] == "noisy");
  CHECK(table[2][0] == "l1");
  CHECK(std::stod(table[2][1]) > std::stod(table[1][1]));
  CHECK(a.out == slurp(t / "a/table.csv"));

  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(t.path / "a")) {
    const auto name = e.path().filename().string();
    if (name == "timings.csv" || name == "manifest.json") continue;
    CHECK_MESSAGE(slurp(e.path()) == slurp(t.path / "b" / name), name);
    ++compared;
  }
  CHECK(compared >= 7);

  SUBCASE("replay matches, and a tampered output is reported") {
    const auto ok = tool({"replay", t / "a/manifest.json"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("0 mismatches") != std::string::npos);
    std::ofstream(t / "a/table.csv", std::ios::app) << "tampered\r\n";
    const auto man = nlohmann::json::parse(slurp(t / "a/manifest.json"));
    // Replay rewrites the outputs, so tamper with the recorded checksum.
    auto edited = man;
    edited["outputs"][0]["checksum"] = "0000000000000000";
    std::ofstream(t / "edited.json") << edited.dump(2);
    const auto bad = tool({"replay", t / "edited.json"});
    CHECK(bad.code == cli::kExitData);
    CHECK(bad.err.find("checksum") != std::string::npos);
  }
}
