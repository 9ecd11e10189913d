// Runs the ballharm executable end to end.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = BALLHARM_CLI;
const std::string kData = BALLHARM_TEST_DATA;

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(testing::TempDir()) / ("ballharm_cli_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "'" + kCli + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  json load(const std::string& name) const { return json::parse(slurp(dir_ / name)); }

  fs::path dir_;
};

const std::string kConverged = " --alpha auto --pinv-iters 40";

}  // namespace

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("ingest").code, 2);
  const auto q = run("moments --fixture bandlimited -o " + path("m.json") + " --quad 8,8");
  EXPECT_EQ(q.code, 2);
  EXPECT_NE(q.err.find("--quad"), std::string::npos);
  EXPECT_EQ(run("moments --fixture bandlimited -o " + path("m.json") + " --alpha fast").code, 2);
  EXPECT_EQ(run("moments --fixture bandlimited -o " + path("m.json") + " --nmax 17").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, IngestNormalizesAndWritesSidecar) {
  const auto r = run("ingest " + kData + "/lshape.off -o " + path("l.xyz") + " --points 3000");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto side = load("l.xyz.json");
  EXPECT_NEAR(side["max_radius"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(side["counts"]["output_points"], 3000);
  EXPECT_EQ(side["counts"]["vertices"], 12);
  EXPECT_EQ(side["counts"]["faces"], 20);  // 2 hexagons and 6 quads, fan-triangulated
  EXPECT_EQ(side["centroid"].size(), 3u);
  EXPECT_GT(side["scale"].get<double>(), 0.0);
  EXPECT_EQ(side["config"]["seed"], 1);
}

TEST_F(Cli, IngestIsDeterministic) {
  ASSERT_EQ(run("ingest " + kData + "/lshape.off -o " + path("a.xyz") + " --seed 9").code, 0);
  ASSERT_EQ(run("ingest " + kData + "/lshape.off -o " + path("b.xyz") + " --seed 9").code, 0);
  EXPECT_EQ(slurp(path("a.xyz")), slurp(path("b.xyz")));
  auto a = load("a.xyz.json"), b = load("b.xyz.json");
  a.erase("output");
  b.erase("output");
  EXPECT_EQ(a.dump(), b.dump());
  ASSERT_EQ(run("ingest " + kData + "/lshape.off -o " + path("c.xyz") + " --seed 10").code, 0);
  EXPECT_NE(slurp(path("a.xyz")), slurp(path("c.xyz")));
}

TEST_F(Cli, MissingInput) {
  const auto r = run("ingest " + path("nope.off") + " -o " + path("x.xyz"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("no such input"), std::string::npos);
  EXPECT_EQ(run("descriptor " + path("nope.xyz") + " -o " + path("d.json")).code, 2);
}

TEST_F(Cli, ParseErrorNamesFileAndLine) {
  const auto r = run("ingest " + kData + "/truncated.off -o " + path("t.xyz"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("truncated.off:8"), std::string::npos) << r.err;
}

TEST_F(Cli, MomentsOnBandLimitedFixture) {
  const auto r = run("moments --fixture bandlimited -o " + path("m.json") + " --csv " + path("m.csv") + " --quad 24,24,24" + kConverged);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load("m.json");
  EXPECT_LE(j["lsq"]["reconstruction_error"]["relative"].get<double>(), 1e-6);
  EXPECT_LE(j["direct"]["reconstruction_error"]["relative"].get<double>(), 1e-6);
  EXPECT_EQ(j["lsq"]["moments"]["coeffs"].size(), 56u);
  EXPECT_EQ(j["config"]["alpha"], "auto");
  EXPECT_EQ(slurp(path("m.csv")).rfind("n,l,m,re,im\n", 0), 0u);
}

TEST_F(Cli, MomentsOnRasterizedShape) {
  ASSERT_EQ(run("ingest " + kData + "/lshape.off -o " + path("l.xyz")).code, 0);
  const auto r = run("moments " + path("l.xyz") + " -o " + path("m.json") + kConverged);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load("m.json");
  EXPECT_LT(j["lsq"]["reconstruction_error"]["relative"].get<double>(),
            j["direct"]["reconstruction_error"]["relative"].get<double>());
  EXPECT_EQ(j["provenance"]["input"], path("l.xyz"));
}

TEST_F(Cli, MomentsAtOrderZero) {
  const auto r = run("moments " + kData + "/lshape.off -o " + path("m.json") + " --nmax 0" + kConverged);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load("m.json");
  EXPECT_EQ(j["lsq"]["moments"]["coeffs"].size(), 1u);
  EXPECT_EQ(j["direct"]["moments"]["coeffs"].size(), 1u);
}

TEST_F(Cli, DefaultAlphaWarnsAboutDivergence) {
  const auto r = run("moments " + kData + "/lshape.off -o " + path("m.json") + " --method lsq");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("--alpha auto"), std::string::npos);
  const auto j = load("m.json");
  EXPECT_EQ(j["lsq"]["pinv"]["iterations"], 3);
  EXPECT_EQ(j["lsq"]["pinv"]["alpha"], 0.001);
}

TEST_F(Cli, DescriptorLayoutAndDeterminism) {
  ASSERT_EQ(run("ingest " + kData + "/lshape.off -o " + path("l.xyz")).code, 0);
  const std::string args = " --nmax 3 --quad 24,24,24 --kernel-count 3 --axes 5" + kConverged;
  const auto r = run("descriptor " + path("l.xyz") + " -o " + path("d1.json") + " --csv " + path("d1.csv") + args);
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(run("descriptor " + path("l.xyz") + " -o " + path("d2.json") + args).code, 0);
  EXPECT_EQ(slurp(path("d1.json")), slurp(path("d2.json")));

  const auto j = load("d1.json");
  EXPECT_EQ(j["values"].size(), 3u * 2u * (3u * 16u + 5u));
  std::size_t total = 0;
  for (const auto& s : j["layout"]) total += s["length"].get<std::size_t>();
  EXPECT_EQ(total, j["values"].size());
  EXPECT_EQ(j["axes"].size(), 5u);
  EXPECT_EQ(j["provenance"]["axes"], 5);
  EXPECT_EQ(j["config"]["n_max"], 3);
  EXPECT_GE(j["dropout"]["relative_l2_change"].get<double>(), 0.0);
}

TEST_F(Cli, ConvolveWithKernelFile) {
  ASSERT_EQ(run("moments --fixture bandlimited -o " + path("m.json") + " --nmax 3 --quad 16,16,16" + kConverged).code, 0);
  const auto m = load("m.json")["lsq"]["moments"];
  std::ofstream(path("bank.json")) << json::array({m, m, m}).dump();
  const auto r = run("convolve " + kData + "/lshape.off -o " + path("c.json") + " --kernels " + path("bank.json") +
                     " --nmax 3 --quad 24,24,24" + kConverged);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load("c.json");
  ASSERT_EQ(j["maps"].size(), 3u);
  EXPECT_EQ(j["maps"][0]["map"]["l_max"], 3);
  // Kernel order must match the configured n_max.
  EXPECT_EQ(run("convolve " + kData + "/lshape.off -o " + path("c.json") + " --kernels " + path("bank.json") +
                " --nmax 4 --quad 24,24,24" + kConverged)
                .code,
            2);
}

TEST_F(Cli, SymmetryReportsAxesAndArgmax) {
  const auto r = run("symmetry " + kData + "/lshape.off -o " + path("s.json") + " --axes 6" + kConverged);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = load("s.json");
  EXPECT_EQ(j["axes"].size(), 6u);
  EXPECT_EQ(j["grid_argmax"]["axis"].size(), 3u);
  EXPECT_GE(j["grid_argmax"]["value"].get<double>(), 0.0);
}

TEST_F(Cli, CheckSuiteFilterAndFailure) {
  const auto ok = run("check --suite gram");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("[PASS] gram"), std::string::npos);
  EXPECT_EQ(ok.out.find("roundtrip"), std::string::npos);

  const auto bad = run("check --suite gram --quad 8,8,8 --report " + path("r.json"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("[FAIL] gram"), std::string::npos);
  EXPECT_NE(bad.out.find("off-diagonal Frobenius mass"), std::string::npos);
  const auto rep = load("r.json");
  EXPECT_FALSE(rep["passed"].get<bool>());
  EXPECT_EQ(rep["config"]["quadrature"], json({8, 8, 8}));

  EXPECT_EQ(run("check --suite nonsense").code, 2);
}

TEST_F(Cli, BenchCsvAndSpeedup) {
  const auto r = run("bench --quad 32,32,32 -o " + path("b.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(slurp(path("b.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "stage,median_seconds,min_seconds,max_seconds,runs");
  std::map<std::string, double> median;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string stage, med;
    std::getline(row, stage, ',');
    std::getline(row, med, ',');
    median[stage] = std::stod(med);
    EXPECT_NE(line.find(",5"), std::string::npos);
  }
  ASSERT_EQ(median.size(), 4u);
  EXPECT_GE(median.at("brute_force_conv_200_directions"), 10.0 * median.at("vol_conv_200_directions"));
}
