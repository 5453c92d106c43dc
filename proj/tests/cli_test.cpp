#include <doctest.h>

#include <cstddef>
#include <string>
#include <vector>

#include "support.hpp"

using namespace testsupport;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth, train, detect, eval round trip") {
  const std::string dir = make_temp_dir();

  CliResult r = run_cli("synth --spec gmm-close --n 80 --seed 1 --out " + dir +
                            "/train.csv",
                        dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("# resolved config [synth]") != std::string::npos);
  CHECK(r.out.find("wrote 80 rows") != std::string::npos);
  CHECK(lines_of(read_file(dir + "/train.csv")).size() == 80);

  r = run_cli("train --data " + dir + "/train.csv --out " + dir +
                  "/model.json --c 1 --sigma 1.5 --k 5 --seed 3",
              dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("# resolved config [train]") != std::string::npos);
  CHECK(r.out.find("trained on 80 points") != std::string::npos);
  CHECK(r.out.find("wrote model to") != std::string::npos);

  r = run_cli("detect --model " + dir + "/model.json --data " + dir +
                  "/train.csv --alpha 0 --out " + dir + "/det.csv",
              dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("# flagged 0 of 80") != std::string::npos);
  const std::vector<std::string> det = lines_of(read_file(dir + "/det.csv"));
  REQUIRE(det.size() == 81);
  CHECK(det[0] == "score,rank,is_anomaly");
  for (std::size_t i = 1; i < det.size(); ++i) {
    CHECK(ends_with(det[i], ",0"));
  }

  r = run_cli("synth --spec gmm-close --n 100 --seed 2 --anomaly-n 40 --out " +
                  dir + "/labeled.csv",
              dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("wrote 140 rows (100 nominal, 40 anomalous)") !=
        std::string::npos);

  r = run_cli("eval --model " + dir + "/model.json --data " + dir +
                  "/labeled.csv --alpha 0.05 0.1 --roc-out " + dir +
                  "/roc.csv",
              dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("auc = ") != std::string::npos);
  CHECK(r.out.find("n_nominal = 100, n_anomaly = 40") != std::string::npos);
  CHECK(r.out.find("false_alarm[0.05") != std::string::npos);
  CHECK(r.out.find("false_alarm[0.1") != std::string::npos);
  const std::vector<std::string> roc = lines_of(read_file(dir + "/roc.csv"));
  REQUIRE(roc.size() >= 3);
  CHECK(roc[0] == "threshold,fpr,tpr");
  CHECK(ends_with(roc.back(), ",1,1"));
}

TEST_CASE("usage problems exit with code 1") {
  const std::string dir = make_temp_dir();
  write_file(dir + "/tiny.csv", "1,2\n3,4\n");

  CliResult r = run_cli("train --data " + dir + "/tiny.csv --out " + dir +
                            "/m.json",
                        dir);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("--cv") != std::string::npos);

  r = run_cli("synth --spec martian --n 5 --out " + dir + "/x.csv", dir);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("unknown spec") != std::string::npos);

  r = run_cli("synth --n 5 --out " + dir + "/x.csv --bogus-flag", dir);
  CHECK(r.exit_code == 1);

  r = run_cli("synth", dir);
  CHECK(r.exit_code == 1);

  r = run_cli("", dir);
  CHECK(r.exit_code == 1);
}

TEST_CASE("data problems exit with code 2") {
  const std::string dir = make_temp_dir();

  CliResult r = run_cli("train --data " + dir + "/absent.csv --out " + dir +
                            "/m.json --c 1 --sigma 1",
                        dir);
  CHECK(r.exit_code == 2);

  write_file(dir + "/one.csv", "1,2\n");
  r = run_cli("train --data " + dir + "/one.csv --out " + dir +
                  "/m.json --c 1 --sigma 1",
              dir);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("data error") != std::string::npos);

  // a usable model, then evaluation data without any anomalous rows
  r = run_cli("synth --spec gmm-close --n 40 --seed 4 --out " + dir +
                  "/train.csv",
              dir);
  REQUIRE(r.exit_code == 0);
  r = run_cli("train --data " + dir + "/train.csv --out " + dir +
                  "/m.json --c 1 --sigma 1.5 --k 5",
              dir);
  REQUIRE(r.exit_code == 0);
  r = run_cli("synth --spec gmm-close --n 30 --seed 5 --labels --out " + dir +
                  "/nominal-only.csv",
              dir);
  REQUIRE(r.exit_code == 0);
  r = run_cli("eval --model " + dir + "/m.json --data " + dir +
                  "/nominal-only.csv",
              dir);
  CHECK(r.exit_code == 2);
}

TEST_CASE("config files fill in options and flags beat them") {
  const std::string dir = make_temp_dir();
  write_file(dir + "/synth.conf", "spec=gmm-close\nn=40\nseed=9\n");

  CliResult r = run_cli("synth --config " + dir + "/synth.conf --out " + dir +
                            "/a.csv",
                        dir);
  REQUIRE(r.exit_code == 0);
  CHECK(lines_of(read_file(dir + "/a.csv")).size() == 40);

  r = run_cli("synth --config " + dir + "/synth.conf --n 50 --out " + dir +
                  "/b.csv",
              dir);
  REQUIRE(r.exit_code == 0);
  CHECK(lines_of(read_file(dir + "/b.csv")).size() == 50);
}

TEST_CASE("identical seeds give identical outputs") {
  const std::string dir = make_temp_dir();
  const std::string cmd = "synth --spec gmm-far --n 60 --seed 12 --out ";
  REQUIRE(run_cli(cmd + dir + "/a.csv", dir).exit_code == 0);
  REQUIRE(run_cli(cmd + dir + "/b.csv", dir).exit_code == 0);
  REQUIRE(run_cli("synth --spec gmm-far --n 60 --seed 13 --out " + dir +
                      "/c.csv",
                  dir)
              .exit_code == 0);
  CHECK(read_file(dir + "/a.csv") == read_file(dir + "/b.csv"));
  CHECK(read_file(dir + "/a.csv") != read_file(dir + "/c.csv"));
}

TEST_CASE("help exits cleanly") {
  const std::string dir = make_temp_dir();
  CHECK(run_cli("--help", dir).exit_code == 0);
  CHECK(run_cli("train --help", dir).exit_code == 0);
}

TEST_CASE("cross-validation report") {
  const std::string dir = make_temp_dir();
  REQUIRE(run_cli("synth --spec gmm-close --n 80 --seed 6 --out " + dir +
                      "/train.csv",
                  dir)
              .exit_code == 0);

  CliResult r = run_cli("cv --data " + dir +
                            "/train.csv --k 5 --c-grid 0.1 1 "
                            "--sigma-grid 0.5 1.5 --max-epochs 150 --out " +
                            dir + "/report.csv",
                        dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.err.find("# chosen: c=") != std::string::npos);
  const std::vector<std::string> report =
      lines_of(read_file(dir + "/report.csv"));
  REQUIRE(report.size() == 5);
  CHECK(report[0] == "c,sigma,mean_disagreement,folds_used,converged_all,chosen");
  std::size_t chosen = 0;
  for (std::size_t i = 1; i < report.size(); ++i) {
    if (ends_with(report[i], ",1")) ++chosen;
  }
  CHECK(chosen == 1);

  r = run_cli("train --data " + dir + "/train.csv --out " + dir +
                  "/m.json --cv --k 5 --c-grid 0.1 1 --sigma-grid 1.5 "
                  "--cv-max-epochs 150 --seed 2",
              dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("cv chose c = ") != std::string::npos);
  CHECK(r.out.find("wrote model to") != std::string::npos);
}

TEST_CASE("level grid emits one row per cell") {
  const std::string dir = make_temp_dir();
  REQUIRE(run_cli("synth --spec gmm-close --n 60 --seed 8 --out " + dir +
                      "/train.csv",
                  dir)
              .exit_code == 0);
  REQUIRE(run_cli("train --data " + dir + "/train.csv --out " + dir +
                      "/m.json --c 1 --sigma 1.5 --k 5",
                  dir)
              .exit_code == 0);

  const CliResult r = run_cli("level-grid --model " + dir +
                                  "/m.json --nx 7 --ny 6 --out " + dir +
                                  "/grid.csv",
                              dir);
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> grid = lines_of(read_file(dir + "/grid.csv"));
  REQUIRE(grid.size() == 43);
  CHECK(grid[0] == "x,y,value");
}

TEST_CASE("bench reports medians") {
  const std::string dir = make_temp_dir();
  REQUIRE(run_cli("synth --spec gmm-close --n 60 --seed 10 --out " + dir +
                      "/train.csv",
                  dir)
              .exit_code == 0);
  REQUIRE(run_cli("synth --spec gmm-close --n 40 --seed 11 --out " + dir +
                      "/test.csv",
                  dir)
              .exit_code == 0);
  REQUIRE(run_cli("train --data " + dir + "/train.csv --out " + dir +
                      "/m.json --c 1 --sigma 1.5 --k 5",
                  dir)
              .exit_code == 0);

  const CliResult r = run_cli("bench --model " + dir + "/m.json --train-data " +
                                  dir + "/train.csv --test-data " + dir +
                                  "/test.csv --repeats 3",
                              dir);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("detector_median_us = ") != std::string::npos);
  CHECK(r.out.find("aklpe_median_us = ") != std::string::npos);
  CHECK(r.out.find("repeat 2:") != std::string::npos);
}

}  // TEST_SUITE
