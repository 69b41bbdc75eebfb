#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace std::string_literals;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string out_path = "cli_out_" + std::to_string(++counter) + ".txt";
  std::string err_path = "cli_err_" + std::to_string(counter) + ".txt";
  std::string cmd =
      OFFLANG_CLI_PATH " "s + args + " >" + out_path + " 2>" + err_path;
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string fixture(const char* name) {
  return OFFLANG_TEST_DATA_DIR "/"s + name;
}

const std::string kQuick = " --model logreg --config quick.cfg";

struct CliFixture {
  CliFixture() {
    std::ofstream("quick.cfg") << "epochs = 15\n";
  }
  ~CliFixture() { std::remove("quick.cfg"); }
};

int count_lines(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST_CASE_FIXTURE(CliFixture, "cli train: artifact, determinism, usage errors") {
  auto r = run_cli("train --task a --data " + fixture("fixture_a.tsv") + kQuick +
                   " --seed 5 --out model1.ofns");
  CHECK(r.exit_code == 0);
  CHECK(std::filesystem::exists("model1.ofns"));
  CHECK(r.out.find("train_accuracy") != std::string::npos);
  CHECK(r.out.find("final_loss") != std::string::npos);

  auto r2 = run_cli("train --task a --data " + fixture("fixture_a.tsv") + kQuick +
                    " --seed 5 --out model2.ofns");
  CHECK(r2.exit_code == 0);
  CHECK(slurp("model1.ofns") == slurp("model2.ofns"));  // byte-identical

  SUBCASE("missing --data is a usage error") {
    auto bad = run_cli("train --task a --model logreg --out x.ofns");
    CHECK(bad.exit_code == 2);
    CHECK(!std::filesystem::exists("x.ofns"));
  }
  SUBCASE("unknown hyperparameter key is a usage error") {
    std::ofstream("bad.cfg") << "not_a_key = 1\n";
    auto bad = run_cli("train --task a --data " + fixture("fixture_a.tsv") +
                       " --model logreg --config bad.cfg --out x.ofns");
    CHECK(bad.exit_code == 2);
    CHECK(!std::filesystem::exists("x.ofns"));
    std::remove("bad.cfg");
  }
  SUBCASE("malformed data file is a data error") {
    std::ofstream("broken.tsv") << "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n"
                                << "1\tonly\tfour\tcolumns\n";
    auto bad = run_cli(
        "train --task a --data broken.tsv --model logreg --out x.ofns");
    CHECK(bad.exit_code == 3);
    std::remove("broken.tsv");
  }
  SUBCASE("bad hyperparameter value is a usage error") {
    std::ofstream("badval.cfg") << "kernel_sizes = 2,x\n";
    auto bad = run_cli("train --task a --data " + fixture("fixture_a.tsv") +
                       " --model cnn --config badval.cfg --out x.ofns");
    CHECK(bad.exit_code == 2);
    std::remove("badval.cfg");
  }
  SUBCASE("training divergence is a training failure") {
    std::ofstream("diverge.cfg") << "learning_rate = 1e200\nclip_norm = 0\n"
                                 << "kernel_sizes = 1\nepochs = 2\n"
                                 << "n_filters = 2\nembed_dim = 4\n";
    auto bad = run_cli("train --task a --data " + fixture("fixture_a.tsv") +
                       " --model cnn --config diverge.cfg --out x.ofns");
    CHECK(bad.exit_code == 4);
    CHECK(!std::filesystem::exists("x.ofns"));
    std::remove("diverge.cfg");
  }
  std::remove("model1.ofns");
  std::remove("model2.ofns");
}

TEST_CASE_FIXTURE(CliFixture, "cli cv: fold lines, mean line, byte-identical reports") {
  std::string base = "cv --task a --data " + fixture("fixture50_a.tsv") + kQuick +
                     " --k 5 --seed 9 --report ";
  auto r1 = run_cli(base + "rep1.txt");
  REQUIRE(r1.exit_code == 0);
  CHECK(count_lines(r1.out, "fold ") == 5);
  CHECK(count_lines(r1.out, "mean:") == 1);

  auto r2 = run_cli(base + "rep2.txt");
  CHECK(r2.exit_code == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp("rep1.txt") == slurp("rep2.txt"));
  CHECK(slurp("rep1.txt").find("mean.macro_f1 = ") != std::string::npos);

  // reported mean equals the mean of the fold lines
  double sum = 0.0, mean = -1.0;
  std::istringstream in(slurp("rep1.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("fold.", 0) == 0 && line.find(".macro_f1 = ") != std::string::npos)
      sum += std::stod(line.substr(line.find("= ") + 2));
    if (line.rfind("mean.macro_f1 = ", 0) == 0)
      mean = std::stod(line.substr(line.find("= ") + 2));
  }
  CHECK(mean == doctest::Approx(sum / 5.0).epsilon(1e-6));

  std::remove("rep1.txt");
  std::remove("rep2.txt");
}

TEST_CASE_FIXTURE(CliFixture, "cli cv: augmentation flag on the task-b fixture") {
  auto r = run_cli("cv --task b --data " + fixture("fixture_b.tsv") + kQuick +
                   " --k 3 --seed 2 --augment");
  CHECK(r.exit_code == 0);
  CHECK(count_lines(r.out, "fold ") == 3);
}

TEST_CASE_FIXTURE(CliFixture, "cli: lemma mode with an external verb table") {
  auto r = run_cli("cv --task a --data " + fixture("fixture_a.tsv") + kQuick +
                   " --k 2 --seed 2 --preprocess lemma --verb-exceptions " +
                   OFFLANG_SOURCE_DIR "/data/verb_exceptions.tsv");
  CHECK(r.exit_code == 0);

  auto bad = run_cli("cv --task a --data " + fixture("fixture_a.tsv") + kQuick +
                     " --k 2 --preprocess lemma --verb-exceptions missing.tsv");
  CHECK(bad.exit_code == 3);
}

TEST_CASE_FIXTURE(CliFixture, "cli gridsearch: product size, best line, singleton = cv") {
  std::ofstream("grid.cfg") << "epochs = 10, 20\nl2 = 0.0001, 0.01\n";
  auto r = run_cli("gridsearch --task a --data " + fixture("fixture50_a.tsv") +
                   " --model logreg --config grid.cfg --k 3 --seed 4 --report g1.txt");
  REQUIRE(r.exit_code == 0);
  CHECK(count_lines(r.out, "config ") == 4);
  CHECK(count_lines(r.out, "best:") == 1);

  // best equals the max of the config lines
  double best = -1.0, max_seen = -1.0;
  std::istringstream in(slurp("g1.txt"));
  std::string line;
  while (std::getline(in, line)) {
    auto at = line.find(".mean_macro_f1 = ");
    if (line.rfind("config.", 0) == 0 && at != std::string::npos)
      max_seen = std::max(max_seen, std::stod(line.substr(at + 17)));
    if (line.rfind("best.mean_macro_f1 = ", 0) == 0)
      best = std::stod(line.substr(21));
  }
  CHECK(best == doctest::Approx(max_seen));

  // byte-identical repeat
  auto r2 = run_cli("gridsearch --task a --data " + fixture("fixture50_a.tsv") +
                    " --model logreg --config grid.cfg --k 3 --seed 4 --report g2.txt");
  CHECK(r2.exit_code == 0);
  CHECK(slurp("g1.txt") == slurp("g2.txt"));

  // singleton grid reproduces the cv mean for that config
  std::ofstream("single.cfg") << "epochs = 10\n";
  auto rg = run_cli("gridsearch --task a --data " + fixture("fixture50_a.tsv") +
                    " --model logreg --config single.cfg --k 3 --seed 4");
  std::string needle = "mean_macro_f1=";
  auto pos = rg.out.find(needle);
  REQUIRE(pos != std::string::npos);
  double grid_score = std::stod(rg.out.substr(pos + needle.size()));

  auto rc = run_cli("cv --task a --data " + fixture("fixture50_a.tsv") +
                    " --model logreg --config single.cfg --k 3 --seed 4");
  auto mpos = rc.out.find("mean: macro_f1=");
  REQUIRE(mpos != std::string::npos);
  double cv_score = std::stod(rc.out.substr(mpos + 15));
  CHECK(grid_score == doctest::Approx(cv_score).epsilon(1e-9));

  SUBCASE("empty grid file is an error") {
    std::ofstream("empty.cfg") << "# nothing\n";
    auto bad = run_cli("gridsearch --task a --data " + fixture("fixture_a.tsv") +
                       " --model logreg --config empty.cfg --k 2");
    CHECK(bad.exit_code == 2);
    std::remove("empty.cfg");
  }
  SUBCASE("--out trains the best config on the full data") {
    auto ro = run_cli("gridsearch --task a --data " + fixture("fixture50_a.tsv") +
                      " --model logreg --config single.cfg --k 3 --seed 4"
                      " --out best.ofns");
    CHECK(ro.exit_code == 0);
    CHECK(std::filesystem::exists("best.ofns"));
    std::remove("best.ofns");
  }
  std::remove("grid.cfg");
  std::remove("single.cfg");
  std::remove("g1.txt");
  std::remove("g2.txt");
}

TEST_CASE_FIXTURE(CliFixture, "cli predict: csv shape, oov safety, round trip") {
  auto t = run_cli("train --task a --data " + fixture("fixture_a.tsv") + kQuick +
                   " --seed 5 --out pm.ofns");
  REQUIRE(t.exit_code == 0);

  // unlabeled.tsv contains words never seen in training (OOV path)
  auto p1 = run_cli("predict --model pm.ofns --data " + fixture("unlabeled.tsv") +
                    " --out pred1.csv");
  REQUIRE(p1.exit_code == 0);
  std::string csv = slurp("pred1.csv");
  CHECK(count_lines(csv, "") == 4);  // header + 3 rows
  CHECK(csv.rfind("id,label\n", 0) == 0);
  CHECK(csv.find("901,") != std::string::npos);

  auto p2 = run_cli("predict --model pm.ofns --data " + fixture("unlabeled.tsv") +
                    " --out pred2.csv");
  CHECK(p2.exit_code == 0);
  CHECK(slurp("pred1.csv") == slurp("pred2.csv"));

  SUBCASE("corrupt artifact is a data error") {
    std::ofstream("junk.ofns") << "this is not an artifact";
    auto bad = run_cli("predict --model junk.ofns --data " +
                       fixture("unlabeled.tsv") + " --out nope.csv");
    CHECK(bad.exit_code == 3);
    CHECK(!std::filesystem::exists("nope.csv"));
    std::remove("junk.ofns");
  }
  std::remove("pm.ofns");
  std::remove("pred1.csv");
  std::remove("pred2.csv");
}

TEST_CASE("cli evaluate: hand fixture, perfect case, diagnostics") {
  std::ofstream("gold.csv") << "id,label\n1,OFF\n2,NOT\n3,OFF\n4,NOT\n";
  std::ofstream("pred.csv") << "id,label\n1,OFF\n2,OFF\n3,OFF\n4,NOT\n";

  auto r = run_cli("evaluate --pred pred.csv --gold gold.csv");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("macro_f1 = 0.733333") != std::string::npos);
  CHECK(r.out.find("accuracy = 0.750000") != std::string::npos);

  auto perfect = run_cli("evaluate --pred gold.csv --gold gold.csv");
  CHECK(perfect.out.find("macro_f1 = 1.000000") != std::string::npos);

  SUBCASE("disjoint id sets are an error") {
    std::ofstream("other.csv") << "id,label\n9,OFF\n8,NOT\n7,OFF\n6,NOT\n";
    auto bad = run_cli("evaluate --pred other.csv --gold gold.csv");
    CHECK(bad.exit_code == 3);
    std::remove("other.csv");
  }
  SUBCASE("duplicate ids are an error") {
    std::ofstream("dup.csv") << "id,label\n1,OFF\n1,NOT\n3,OFF\n4,NOT\n";
    auto bad = run_cli("evaluate --pred dup.csv --gold gold.csv");
    CHECK(bad.exit_code == 3);
    std::remove("dup.csv");
  }
  std::remove("gold.csv");
  std::remove("pred.csv");
}

TEST_CASE("cli gridsearch: default grid when no config is given") {
  auto r = run_cli("gridsearch --task a --data " + fixture("fixture50_a.tsv") +
                   " --model logreg --k 2 --seed 1");
  CHECK(r.exit_code == 0);
  CHECK(count_lines(r.out, "config ") == 2);  // documented logreg default grid
  CHECK(count_lines(r.out, "best:") == 1);
}

TEST_CASE("cli: no subcommand is a usage error, --help succeeds") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);
}
