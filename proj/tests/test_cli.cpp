#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

using namespace qest;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kSamples = QEST_SAMPLES_DIR;

struct Outcome {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const char* name) { return kSamples + "/" + name; }

class TempDir {
public:
  TempDir() : path_(fs::temp_directory_path() / ("qest-cli-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
                                                  ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

private:
  fs::path path_;
};

std::vector<std::vector<double>> read_csv(const std::string& path, std::string* header = nullptr) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST(Validate, Depolarizing) {
  const auto r = run({"validate", sample("depolarizing.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = r.doc();
  EXPECT_TRUE(doc["ok"].get<bool>());
  for (const auto& row : doc["trace_preserving"]) EXPECT_LT(row["residual"].get<double>(), 1e-12);
  EXPECT_LT(doc["first_order_residual"].get<double>(), 1e-12);
}

TEST(Validate, RotationAndGad) {
  EXPECT_EQ(run({"validate", sample("rotation.json")}).code, 0);
  EXPECT_EQ(run({"validate", sample("gad.json")}).code, 0);
}

TEST(Validate, InconsistentFirstOrderDataFails) {
  const auto r = run({"validate", sample("inconsistent_kappa.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.doc()["ok"].get<bool>());
}

TEST(Validate, MalformedJsonIsParseError) {
  const auto r = run({"validate", sample("malformed.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST(Validate, MissingFileIsIoError) { EXPECT_EQ(run({"validate", sample("missing.json")}).code, 4); }

TEST(Validate, ToleranceOverride) {
  TempDir dir;
  // kappa^2 = 1 - 1e-6: fails at the default tolerance, passes at 1e-3.
  const double k = std::sqrt(1.0 - 1e-6);
  const std::string text = R"({"dim": 2, "type": "low_noise", "M": [[[0.5, 0], [0, -0.5]]], "kappa": [)" + cli::format_number(k) +
                           R"(], "N1": [[[)" + cli::format_number(0.125 / k) + ", 0], [0, " + cli::format_number(0.125 / k) + "]]]}";
  const auto path = dir.write("near.json", text);
  EXPECT_EQ(run({"validate", path}).code, 1);
  ::setenv("QEST_TOL", "1e-3", 1);
  const auto relaxed = run({"validate", path});
  ::setenv("QEST_TOL", "garbage", 1);
  const auto bad = run({"validate", path});
  ::unsetenv("QEST_TOL");
  EXPECT_EQ(relaxed.code, 0) << relaxed.out;
  EXPECT_EQ(relaxed.doc()["tolerance"].get<double>(), 1e-3);
  EXPECT_EQ(bad.code, 2);
}

TEST(Eta, CatalogChannels) {
  const auto dep = run({"eta", sample("depolarizing.json")});
  ASSERT_EQ(dep.code, 0) << dep.err;
  EXPECT_NEAR(dep.doc()["eta"].get<double>(), 1.5, 1e-12);
  EXPECT_EQ(dep.doc()["regime"], "J_ZERO");
  const auto closed = run({"eta", sample("depolarizing.json"), "--method", "closed"});
  EXPECT_EQ(closed.doc()["method"], "CLOSED_FORM");
  const auto gad = run({"eta", sample("gad.json"), "--method", "both"});
  ASSERT_EQ(gad.code, 0) << gad.err;
  EXPECT_NEAR(gad.doc()["eta"].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(run({"eta", sample("gad.json"), "--method", "closed"}).code, 3);
}

TEST(Eta, RandomSeed42File) {
  TempDir dir;
  const auto ln = catalog::random_low_noise(42, 4);
  const auto path = dir.write("seed42.json", io::to_json(io::spec_from_low_noise(ln)).dump(2));
  const auto r = run({"eta", path, "--grid", "2000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double eta = r.doc()["eta"].get<double>();
  EXPECT_GE(eta, 1.0 - 1e-9);
  EXPECT_LE(eta, 1.5 + 1e-9);
  EXPECT_NEAR(r.doc()["eta_bruteforce"].get<double>(), eta, 1e-4);
}

TEST(Eta, UnsupportedInputs) {
  TempDir dir;
  const auto qutrit = dir.write("q3.json", R"({"dim": 3, "type": "low_noise", "M": [[[1,0,0],[0,0,0],[0,0,-1]]]})");
  EXPECT_EQ(run({"eta", qutrit}).code, 3);
  EXPECT_EQ(run({"eta", sample("rotation.json")}).code, 3);
  EXPECT_EQ(run({"eta", sample("depolarizing.json"), "--method", "fast"}).code, 2);
  EXPECT_EQ(run({"eta", sample("depolarizing.json"), "--grid", "10"}).code, 1);
  const auto zero = dir.write("zero.json", R"({"dim": 2, "type": "low_noise", "M": [[[0,0],[0,0]]]})");
  EXPECT_EQ(run({"eta", zero}).code, 3);
}

TEST(Qfi, DepolarizingExamples) {
  const auto s = run({"qfi", sample("depolarizing.json"), "--epsilon", "0.1", "--input", "0,0,1"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NEAR(s.doc()["qfi"].get<double>(), 1.0 / (0.1 * 1.9), 1e-6);
  EXPECT_NEAR(s.doc()["estimator_variance"].get<double>(), 0.19, 1e-8);
  const auto sa = run({"qfi", sample("depolarizing.json"), "--epsilon", "0.1", "--input", "bell", "--ancilla"});
  ASSERT_EQ(sa.code, 0) << sa.err;
  EXPECT_NEAR(sa.doc()["qfi"].get<double>(), 3.0 / (0.1 * 3.7), 1e-6);
  EXPECT_EQ(sa.doc()["sld_eigenvalues"].size(), 4u);
  const auto mixed = run({"qfi", sample("depolarizing.json"), "--epsilon", "0.1", "--input", "0,0,0", "--ancilla"});
  EXPECT_NEAR(mixed.doc()["qfi"].get<double>(), 3.0 / (0.1 * 3.7), 1e-6);
}

TEST(Qfi, RotationFamily) {
  const auto r = run({"qfi", sample("rotation.json"), "--epsilon", "0.7", "--input", "1,0,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.doc()["qfi"].get<double>(), 1.0, 1e-6);
}

TEST(Qfi, Errors) {
  const auto zero = run({"qfi", sample("depolarizing.json"), "--epsilon", "0", "--input", "0,0,1"});
  EXPECT_EQ(zero.code, 3);
  EXPECT_NE(zero.err.find("eta"), std::string::npos);
  EXPECT_EQ(run({"qfi", sample("depolarizing.json"), "--epsilon", "1.5", "--input", "0,0,1"}).code, 3);
  EXPECT_EQ(run({"qfi", sample("depolarizing.json"), "--epsilon", "0.1", "--input", "1,1"}).code, 2);
  EXPECT_EQ(run({"qfi", sample("depolarizing.json"), "--epsilon", "0.1", "--input", "1,1,1"}).code, 1);
  EXPECT_EQ(run({"qfi", sample("depolarizing.json"), "--epsilon", "0.1"}).code, 2);
}

TEST(Sweep, DepolarizingLeadingCoefficients) {
  TempDir dir;
  const auto out = dir.file("dep.csv");
  const auto r = run({"sweep", sample("depolarizing.json"), "--eps-start", "1e-3", "--eps-end", "1e-1", "--steps", "20", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = read_csv(out, &header);
  EXPECT_EQ(header, "epsilon,qfi_S,qfi_SA,eps_qfi_S,eps_qfi_SA");
  ASSERT_EQ(rows.size(), 20u);
  EXPECT_NEAR(rows.front()[0], 1e-3, 1e-18);
  EXPECT_EQ(rows.back()[0], 1e-1);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i][0], rows[i - 1][0]);
  for (const auto& row : rows) {
    const double e = row[0];
    EXPECT_NEAR(row[3], 1.0 / (2.0 - e), 1e-6);
    EXPECT_NEAR(row[4], 3.0 / (4.0 - 3.0 * e), 1e-6);
  }
  EXPECT_NEAR(rows.front()[3], 0.5, 1e-3);
  EXPECT_NEAR(rows.front()[4], 0.75, 1e-3);
}

TEST(Sweep, GadRatioTendsToOne) {
  TempDir dir;
  const auto out = dir.file("gad.csv");
  ASSERT_EQ(run({"sweep", sample("gad.json"), "--eps-start", "1e-4", "--eps-end", "1e-2", "--steps", "5", "--out", out}).code, 0);
  const auto rows = read_csv(out);
  EXPECT_NEAR(rows.front()[4] / rows.front()[3], 1.0, 1e-3);
}

TEST(Sweep, SingleStepAndBitExactReruns) {
  TempDir dir;
  const auto one = dir.file("one.csv");
  ASSERT_EQ(run({"sweep", sample("depolarizing.json"), "--eps-start", "0.01", "--eps-end", "0.01", "--steps", "1", "--out", one}).code, 0);
  EXPECT_EQ(read_csv(one).size(), 1u);

  const auto a = dir.file("a.csv"), b = dir.file("b.csv");
  for (const auto& path : {a, b})
    ASSERT_EQ(run({"sweep", sample("dephasing.json"), "--eps-start", "1e-3", "--eps-end", "0.5", "--steps", "7", "--out", path}).code, 0);
  const auto text = slurp(a);
  EXPECT_EQ(text, slurp(b));
  EXPECT_EQ(text.find('\r'), std::string::npos);
}

TEST(Sweep, Errors) {
  TempDir dir;
  EXPECT_EQ(run({"sweep", sample("depolarizing.json"), "--eps-start", "1e-3", "--eps-end", "1e-1", "--steps", "3", "--out",
                 "/nonexistent-dir/x.csv"})
                .code,
            4);
  EXPECT_EQ(run({"sweep", sample("depolarizing.json"), "--eps-start", "0", "--eps-end", "1e-1", "--steps", "3", "--out", dir.file("x")}).code, 3);
  EXPECT_EQ(run({"sweep", sample("depolarizing.json"), "--eps-start", "0.1", "--eps-end", "2", "--steps", "3", "--out", dir.file("x")}).code, 3);
  EXPECT_EQ(run({"sweep", sample("depolarizing.json"), "--eps-start", "0.1", "--eps-end", "0.2", "--steps", "0", "--out", dir.file("x")}).code, 3);
  EXPECT_EQ(run({"sweep", sample("rotation.json"), "--eps-start", "0.1", "--eps-end", "0.2", "--steps", "2", "--out", dir.file("x")}).code, 3);
}

TEST(Demo, AllNamesRun) {
  const auto dep = run({"demo", "depolarizing"});
  ASSERT_EQ(dep.code, 0) << dep.err;
  EXPECT_NEAR(dep.doc()["eta"]["eta"].get<double>(), 1.5, 1e-12);
  EXPECT_NEAR(dep.doc()["qfi_S"].get<double>(), 1.0 / (0.1 * 1.9), 1e-6);
  EXPECT_NEAR(dep.doc()["qfi_SA"].get<double>(), 3.0 / (0.1 * 3.7), 1e-6);
  EXPECT_EQ(run({"demo", "gad"}).code, 0);
  const auto rot = run({"demo", "rotation"});
  ASSERT_EQ(rot.code, 0);
  EXPECT_NEAR(rot.doc()["ratio"].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(run({"demo", "unknown"}).code, 2);
}

TEST(Usage, BadInvocations) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(FormatNumber, SeventeenDigitsDotSeparator) {
  EXPECT_EQ(cli::format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(cli::format_number(1e-3), "0.001");
  EXPECT_EQ(cli::format_number(2.0), "2");
}
