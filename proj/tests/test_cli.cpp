#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "test_support.hpp"
#include "uat/json_io.hpp"
#include "uat/measure.hpp"

using namespace uat;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run uat_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("uat_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }

 private:
  fs::path path_;
};

void write_net(const std::string& path, const Net& net) { write_file_atomic(path, net_to_json(net)); }

Json load(const std::string& path) { return Json::parse(read_text_file(path)); }

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("build exit codes") {
  TempDir dir("build");
  const Run x = uat_run({"build", "--target", "x", "--eps", "0.1", "--out", dir / "x.json"});
  CHECK(x.code == 0);
  const Json cert = load(dir / "x.cert.json");
  CHECK(cert["total_achieved"].get<double>() < 0.1);
  CHECK(cert["mode"] == "certified");
  CHECK(fs::exists(dir / "x.manifest.json"));

  CHECK(uat_run({"build", "--target", "sign", "--eps", "0.05", "--out", dir / "s.json"}).code == 0);

  const Run tiny = uat_run({"build", "--target", "x", "--eps", "1e-12", "--out", dir / "t.json"});
  CHECK(tiny.code == 2);
  CHECK(tiny.err.find("achieved error") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "t.json"));

  CHECK(uat_run({"build", "--target", "nope", "--eps", "0.1", "--out", dir / "n.json"}).code == 2);
  CHECK(uat_run({"build", "--target", "x", "--eps", "-1", "--out", dir / "n.json"}).code == 2);
  CHECK(uat_run({"build", "--target", "x", "--out", dir / "n.json"}).code == 2);
}

TEST_CASE("build from a spec writes a softmax net") {
  TempDir dir("build_spec");
  write_file_atomic(dir / "spec.json", spec_to_json(IndicatorSpec(1, 2, {{0.5}}, {1, 2})));
  CHECK(uat_run({"build", "--spec", dir / "spec.json", "--eps", "0.2", "--out", dir / "net.json"}).code == 0);
  CHECK(net_from_json(read_text_file(dir / "net.json")).softmax_head());
  CHECK(uat_run({"verify", "--net", dir / "net.json", "--spec", dir / "spec.json", "--eps", "0.2"}).code == 0);
}

TEST_CASE("unwritable outputs are internal errors") {
  const Run r = uat_run({"build", "--target", "x", "--eps", "0.1", "--out", "/nonexistent_dir_uat/x.json"});
  CHECK(r.code == 1);
}

TEST_CASE("transform expand, stack and softmax-wrap") {
  TempDir dir("transform");
  std::mt19937_64 rng(1);
  write_net(dir / "s1.json", uat::testing::random_net(rng, 2, 8, 1, ActivationKind::Sigma1));
  const Run e = uat_run({"transform", "--in", dir / "s1.json", "--op", "expand", "--out", dir / "e.json", "--verify"});
  CHECK(e.code == 0);
  CHECK(e.out.find("verify_max_deviation") != std::string::npos);
  const Net expanded = net_from_json(read_text_file(dir / "e.json"));
  CHECK(expanded.hidden_count() == 16);
  CHECK(expanded.activation() == ActivationKind::ReLU);

  write_net(dir / "a.json", uat::testing::random_net(rng, 3, 2, 2, ActivationKind::ReLU));
  write_net(dir / "b.json", uat::testing::random_net(rng, 3, 3, 1, ActivationKind::ReLU));
  CHECK(uat_run({"transform", "--in", dir / "a.json", "--op", "stack", "--with", dir / "b.json", "--out",
                 dir / "ab.json", "--verify"})
            .code == 0);
  const Net ab = net_from_json(read_text_file(dir / "ab.json"));
  CHECK(ab.output_count() == 3);
  CHECK(ab.hidden_count() == 5);

  write_net(dir / "m1.json", uat::testing::random_net(rng, 1, 3, 1, ActivationKind::ReLU));
  const Run wrap1 = uat_run({"transform", "--in", dir / "m1.json", "--op", "softmax-wrap", "--out", dir / "w.json"});
  CHECK(wrap1.code == 2);
  CHECK(wrap1.err.find("precondition failed") != std::string::npos);
  CHECK(uat_run({"transform", "--in", dir / "a.json", "--op", "softmax-wrap", "--out", dir / "w.json", "--verify"})
            .code == 0);
  CHECK(net_from_json(read_text_file(dir / "w.json")).softmax_head());

  CHECK(uat_run({"transform", "--in", dir / "a.json", "--op", "expand", "--out", dir / "x.json"}).code == 2);
  CHECK(uat_run({"transform", "--in", dir / "a.json", "--op", "stack", "--with", dir / "s1.json", "--out",
                 dir / "x.json"})
            .code == 2);
  CHECK(uat_run({"transform", "--in", dir / "missing.json", "--op", "expand"}).code == 2);
  CHECK(uat_run({"transform", "--in", dir / "a.json", "--op", "invert", "--out", dir / "x.json"}).code == 2);
}

TEST_CASE("verify exit codes and methods") {
  TempDir dir("verify");
  REQUIRE(uat_run({"build", "--target", "x", "--eps", "0.1", "--out", dir / "x.json"}).code == 0);
  const Run ok = uat_run({"verify", "--net", dir / "x.json", "--target", "x", "--method", "exact", "--eps", "0.1",
                          "--out", dir / "rep.json"});
  CHECK(ok.code == 0);
  CHECK(load(dir / "rep.json")["method"] == "exact_cpwl");
  CHECK(uat_run({"verify", "--net", dir / "x.json", "--target", "x", "--eps", "1e-9"}).code == 2);

  // Net against its own tabulated samples.
  const Net net = net_from_json(read_text_file(dir / "x.json"));
  const Cpwl1D c = net_to_cpwl_1d(net);
  std::ostringstream csv;
  csv << "x,value\n";
  for (std::size_t i = 0; i < c.breakpoints().size(); ++i) {
    csv << format_double(c.breakpoints()[i]) << ',' << format_double(c.values()[i]) << "\n";
  }
  write_file_atomic(dir / "self.csv", csv.str());
  const Run self = uat_run({"verify", "--net", dir / "x.json", "--samples", dir / "self.csv"});
  CHECK(self.code == 0);
  CHECK(Json::parse(self.out)["value"].get<double>() <= 1e-12);

  REQUIRE(uat_run({"fit", "--target", "prod", "--dim", "2", "--n", "64", "--seed", "3", "--eval-samples", "1000",
                   "--out", dir / "f.json"})
              .code == 0);
  const Run mc = uat_run({"verify", "--net", dir / "f.json", "--target", "prod", "--method", "mc", "--n", "1000000",
                          "--seed", "5"});
  CHECK(mc.code == 0);
  const Json rep = Json::parse(mc.out);
  CHECK(rep["method"] == "monte_carlo");
  CHECK(rep["n"] == 1000000);
  CHECK(rep.contains("ci_halfwidth"));
  CHECK(rep["seed"] == 5);

  CHECK(uat_run({"verify", "--net", dir / "f.json", "--target", "prod", "--method", "exact"}).code == 2);
  CHECK(uat_run({"verify", "--net", dir / "f.json", "--target", "prod", "--method", "grid", "--resolution", "50"})
            .code == 0);
  CHECK(uat_run({"verify", "--net", dir / "f.json"}).code == 2);
}

TEST_CASE("fit commands") {
  TempDir dir("fit");
  CHECK(uat_run({"fit", "--target", "x1", "--n", "32", "--samples", "512", "--seed", "1", "--out", dir / "a.json"})
            .code == 0);
  const Json report = load(dir / "a.report.json");
  CHECK(report["reports"][0]["value"].get<double>() < 0.02);

  write_file_atomic(dir / "spec.json", spec_to_json(IndicatorSpec(2, 2, {{0.5}, {}}, {1, 2})));
  const Run ind = uat_run({"fit", "--spec", dir / "spec.json", "--eps", "0.1", "--n", "256", "--seed", "1",
                           "--eval-samples", "20000", "--out", dir / "i.json"});
  CHECK(ind.code == 0);
  CHECK(load(dir / "i.report.json")["success"] == true);
  const Run tight = uat_run({"fit", "--spec", dir / "spec.json", "--eps", "0.0001", "--n", "8", "--seed", "1",
                             "--eval-samples", "2000", "--out", dir / "j.json"});
  CHECK(tight.code == 2);
  CHECK(load(dir / "j.report.json")["success"] == false);
  CHECK(uat_run({"fit", "--target", "sin2pi", "--dim", "2", "--out", dir / "k.json"}).code == 2);
  CHECK(uat_run({"fit", "--target", "x1", "--n", "64", "--samples", "10", "--ridge", "0", "--eval-samples", "0",
                 "--out", dir / "z.json"})
            .code == 1);
}

TEST_CASE("sweep rows") {
  TempDir dir("sweep");
  const Run r = uat_run({"sweep", "--targets", "x", "--eps", "0.2,0.1,0.05", "--m", "2,5,10", "--out", dir / "s.csv"});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "s.csv");
  REQUIRE(rows.size() == 1 + 3 + 9);
  CHECK(rows[0].size() == 12);
  CHECK(rows[0][0] == "target");
  CHECK(rows[0][11] == "status");
  double last = 1.0;
  for (std::size_t i = 1; i <= 3; ++i) {
    CHECK(rows[i][0] == "x");
    const double v = std::stod(rows[i][3]);
    CHECK(v <= last);
    last = v;
  }
  for (std::size_t i = 4; i < rows.size(); ++i) {
    REQUIRE(rows[i].size() == 12);
    const double closed = std::stod(rows[i][7]);
    const double tail = std::stod(rows[i][8]);
    const double half = std::stod(rows[i][9]);
    CHECK(closed <= tail);
    CHECK(tail <= half);
    CHECK(std::stod(rows[i][3]) < 2.0 * half);
    CHECK(rows[i][11] == "ok");
  }
  CHECK(uat_run({"sweep", "--targets", "x", "--out", dir / "e.csv"}).code == 2);
  CHECK(uat_run({"sweep", "--targets", "x", "--eps", "1e-12", "--out", dir / "f.csv"}).code == 0);
  CHECK(read_csv(dir / "f.csv")[1][11] == "budget_infeasible");

  const Run mc = uat_run({"sweep", "--targets", "sign", "--eps", "0.1", "--method", "mc", "--seeds", "1,2", "--n",
                          "1000", "--out", dir / "m.csv"});
  CHECK(mc.code == 0);
  const auto mrows = read_csv(dir / "m.csv");
  REQUIRE(mrows.size() == 3);
  CHECK(mrows[1][2] == "monte_carlo");
  CHECK_FALSE(mrows[1][4].empty());
}

TEST_CASE("bound and usage errors") {
  const Run b = uat_run({"bound", "--m", "2", "--eps", "0.5"});
  CHECK(b.code == 0);
  CHECK(b.out.find("2,0.5,0.0006709252558050237,0.25") != std::string::npos);
  CHECK(uat_run({"bound", "--m", "1", "--eps", "0.5"}).code == 2);
  CHECK(uat_run({}).code == 2);
  CHECK(uat_run({"frobnicate"}).code == 2);
  CHECK(uat_run({"--help"}).code == 0);
}

TEST_CASE("net files round-trip through transform") {
  TempDir dir("roundtrip");
  std::mt19937_64 rng(9);
  const Net net = uat::testing::random_net(rng, 3, 6, 2, ActivationKind::ReLU);
  write_net(dir / "a.json", net);
  REQUIRE(uat_run({"transform", "--in", dir / "a.json", "--op", "softmax-wrap", "--out", dir / "b.json"}).code == 0);
  const Net back = net_from_json(read_text_file(dir / "b.json"));
  CHECK(back.hidden_weights() == net.hidden_weights());
  CHECK(back.hidden_biases() == net.hidden_biases());
  CHECK(back.output_weights() == net.output_weights());
  CHECK(net_to_json(back.with_softmax_head(false)) == read_text_file(dir / "a.json"));
}

TEST_CASE("manifests reproduce their outputs") {
  TempDir dir("manifest");
  const std::vector<std::string> args{"fit",   "--target", "prod", "--dim",          "2",   "--n",
                                      "40",    "--seed",   "7",    "--eval-samples", "5000", "--out",
                                      dir / "f.json"};
  REQUIRE(uat_run(args).code == 0);
  const std::string net1 = read_text_file(dir / "f.json");
  const std::string rep1 = read_text_file(dir / "f.report.json");
  Json m1 = load(dir / "f.manifest.json");
  CHECK(m1["outputs"].size() == 2);
  CHECK(m1["seeds"][0] == 7);
  CHECK(m1["flags"]["seed"] == "7");
  fs::copy_file(dir / "f.manifest.json", dir / "saved.manifest.json");

  fs::remove(dir / "f.json");
  fs::remove(dir / "f.report.json");
  REQUIRE(uat_run({"replay", dir / "saved.manifest.json"}).code == 0);
  CHECK(read_text_file(dir / "f.json") == net1);
  CHECK(read_text_file(dir / "f.report.json") == rep1);

  Json m2 = load(dir / "f.manifest.json");
  for (Json* m : {&m1, &m2}) {
    m->erase("started");
    m->erase("finished");
  }
  CHECK(m1 == m2);
}
