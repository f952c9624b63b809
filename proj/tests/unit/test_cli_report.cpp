#include "mementum/cli_report.hpp"
#include "test_util.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <sys/wait.h>

using namespace mementum;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::string& args, const testing::TempDir& tmp) {
  const fs::path out = tmp / "stdout.txt";
  const fs::path err = tmp / "stderr.txt";
  const std::string cmd = std::string(MEMENTUM_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testing::read_file(out), testing::read_file(err)};
}

// 1-based inclusive rank-1 ranges on a weekday calendar starting 2021-01-04
fs::path regime_file(const fs::path& path, std::initializer_list<std::pair<int, int>> rank1, const std::string& hash,
                     int T = 30, const char* start = "2021-01-04") {
  std::string text = "# config_hash=" + hash + "\n# ticker=MEME\ndate,state,rank,p_rank0,p_rank1,p_rank2\n";
  const auto dates = weekday_calendar(testing::day(start), static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t) {
    bool on = false;
    for (auto [lo, hi] : rank1) on = on || (t >= lo && t <= hi);
    text += format_date(dates[t - 1]) + (on ? ",2,1,0.000000,1.000000,0.000000\n" : ",1,0,1.000000,0.000000,0.000000\n");
  }
  return testing::write_file(path, text);
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  testing::TempDir tmp;
  CHECK(cli("", tmp).code == 2);
  CHECK(cli("detect --pr-tw a.csv --out x", tmp).code == 2);
  CHECK(cli("frobnicate", tmp).code == 2);
  const auto both = cli("estimate --combined a.csv --price b.csv --out " + quoted(tmp / "o"), tmp);
  CHECK(both.code == 2);
  CHECK(both.err.find("not both") != std::string::npos);
  CHECK(cli("estimate --combined a.csv --weekend monday --out " + quoted(tmp / "o"), tmp).code == 2);
  CHECK(cli("--help", tmp).code == 0);
}

TEST_CASE("detect on scripted regimes writes report, masks and summary") {
  testing::TempDir tmp;
  const auto pr = regime_file(tmp / "pr.csv", {{9, 16}}, "abc");
  const auto vol = regime_file(tmp / "vol.csv", {{9, 16}}, "abc");
  const auto res = cli("detect --pr-tw " + quoted(pr) + " --vol-tw " + quoted(vol) + " --out " + quoted(tmp / "out"), tmp);
  REQUIRE(res.code == 0);
  CHECK(res.out == "MEME: 2021-01-14 → 2021-01-25\n");
  CHECK(testing::read_file(tmp / "out" / "summary.txt") == res.out);

  const auto report = nlohmann::json::parse(testing::read_file(tmp / "out" / "report.json"));
  CHECK(report["ticker"] == "MEME");
  CHECK(report["config_hash"] == "abc");
  CHECK(report["periods"] == nlohmann::json::parse(R"([["2021-01-14","2021-01-25"]])"));
  CHECK(report["input_hashes"].size() == 2);
  CHECK(report["masks"]["mementum"].size() == 30);
  CHECK(report["config"]["d_c"] == 2);

  const auto masks = testing::read_file(tmp / "out" / "masks.csv");
  CHECK(masks.rfind("# config_hash=abc\ndate,cond1,cond2,cond3,mementum\n", 0) == 0);
  CHECK(masks.find("2021-01-13,0,0,0,0\n") != std::string::npos);
  CHECK(masks.find("2021-01-14,1,1,1,1\n") != std::string::npos);
  CHECK(masks.find("2021-01-25,1,1,1,1\n") != std::string::npos);
  CHECK(masks.find("2021-01-26,0,0,0,0\n") != std::string::npos);
}

TEST_CASE("detect flags reach the detector") {
  testing::TempDir tmp;
  const auto pr = regime_file(tmp / "pr.csv", {{9, 16}}, "abc");
  const auto vol = regime_file(tmp / "vol.csv", {{9, 16}}, "abc");
  const std::string base = "detect --pr-tw " + quoted(pr) + " --vol-tw " + quoted(vol) + " --out " + quoted(tmp / "o");
  CHECK(cli(base + " --dc 20", tmp).out == "MEME: no period detected\n");
  CHECK(cli(base + " --dp 9", tmp).out == "MEME: no period detected\n");
  CHECK(cli(base + " --ticker GME", tmp).out == "GME: 2021-01-14 → 2021-01-25\n");
  CHECK(cli(base + " --dc 0", tmp).code == 1);
}

TEST_CASE("detect output is byte-identical across runs") {
  testing::TempDir tmp;
  const auto pr = regime_file(tmp / "pr.csv", {{3, 4}, {9, 16}, {26, 28}}, "abc");
  const auto vol = regime_file(tmp / "vol.csv", {{9, 16}, {27, 27}}, "abc");
  const std::string args = "detect --pr-tw " + quoted(pr) + " --vol-tw " + quoted(vol) + " --out ";
  REQUIRE(cli(args + quoted(tmp / "a"), tmp).code == 0);
  REQUIRE(cli(args + quoted(tmp / "b"), tmp).code == 0);
  for (const char* f : {"report.json", "masks.csv", "summary.txt"}) {
    CHECK(testing::read_file(tmp / "a" / f) == testing::read_file(tmp / "b" / f));
  }
}

TEST_CASE("detect refuses mixed configuration hashes unless forced") {
  testing::TempDir tmp;
  const auto pr = regime_file(tmp / "pr.csv", {{9, 16}}, "abc");
  const auto vol = regime_file(tmp / "vol.csv", {{9, 16}}, "def");
  const std::string args = "detect --pr-tw " + quoted(pr) + " --vol-tw " + quoted(vol) + " --out " + quoted(tmp / "o");
  const auto refused = cli(args, tmp);
  CHECK(refused.code == 1);
  CHECK(refused.err.find("--force") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp / "o" / "report.json"));
  CHECK(cli(args + " --force", tmp).code == 0);
}

TEST_CASE("detect names the first date where calendars diverge") {
  testing::TempDir tmp;
  const auto pr = regime_file(tmp / "pr.csv", {{9, 16}}, "abc");
  const auto vol = regime_file(tmp / "vol.csv", {{9, 16}}, "abc", 30, "2021-01-05");
  const auto res = cli("detect --pr-tw " + quoted(pr) + " --vol-tw " + quoted(vol) + " --out " + quoted(tmp / "o"), tmp);
  CHECK(res.code == 1);
  CHECK(res.err.find("2021-01-04") != std::string::npos);

  const auto shorter = regime_file(tmp / "short.csv", {{9, 16}}, "abc", 29);
  const auto res2 =
      cli("detect --pr-tw " + quoted(pr) + " --vol-tw " + quoted(shorter) + " --out " + quoted(tmp / "o"), tmp);
  CHECK(res2.code == 1);
  CHECK(res2.err.find("2021-02-12") != std::string::npos);
}

TEST_CASE("unwritable output directory exits with code 1") {
  testing::TempDir tmp;
  const auto pr = regime_file(tmp / "pr.csv", {{9, 16}}, "abc");
  const auto blocker = testing::write_file(tmp / "blocker", "x");
  const auto res =
      cli("detect --pr-tw " + quoted(pr) + " --vol-tw " + quoted(pr) + " --out " + quoted(blocker / "sub"), tmp);
  CHECK(res.code == 1);
  CHECK(res.err.find("cannot create output directory") != std::string::npos);
}

TEST_CASE("estimate rejects series shorter than the minimum") {
  testing::TempDir tmp;
  std::string text = "date,price,volume,tweets\n";
  for (const auto& d : weekday_calendar(testing::day("2021-01-04"), 8)) text += format_date(d) + ",10,100,5\n";
  const auto csv = testing::write_file(tmp / "short.csv", text);
  const auto res = cli("estimate --combined " + quoted(csv) + " --out " + quoted(tmp / "o"), tmp);
  CHECK(res.code == 1);
  CHECK(res.err.find("below minimum") != std::string::npos);
}

TEST_CASE("bad scenario files fail cleanly") {
  testing::TempDir tmp;
  CHECK(cli("simulate --scenario " + quoted(tmp / "missing.json") + " --out " + quoted(tmp / "o"), tmp).code == 1);
  const auto bad = testing::write_file(tmp / "bad.json", R"({"T": 30, "pr_tw": {}})");
  const auto res = cli("simulate --scenario " + quoted(bad) + " --out " + quoted(tmp / "o"), tmp);
  CHECK(res.code == 1);
  CHECK_FALSE(res.err.empty());
}

TEST_CASE("simulate, estimate and detect recover the scripted meme period") {
  testing::TempDir tmp;
  const std::string scenario = quoted(fs::path(SCENARIO_DIR) / "meme_example.json");
  REQUIRE(cli("simulate --scenario " + scenario + " --out " + quoted(tmp / "sim"), tmp).code == 0);
  for (const char* f : {"price.csv", "volume.csv", "tweets.csv", "combined.csv", "ground_truth.json"}) {
    CHECK(fs::exists(tmp / "sim" / f));
  }

  const std::string run =
      "run --combined " + quoted(tmp / "sim" / "combined.csv") + " --transform level --ticker MEME --out ";
  const auto first = cli(run + quoted(tmp / "a"), tmp);
  REQUIRE(first.code == 0);
  CHECK(first.out == "MEME: 2021-01-14 → 2021-01-25\n");
  for (const char* f : {"pr_tw_regimes.csv", "vol_tw_regimes.csv", "pr_tw_draws.bin", "pr_tw_manifest.json",
                        "report.json", "masks.csv", "summary.txt"}) {
    CHECK(fs::exists(tmp / "a" / f));
  }

  REQUIRE(cli(run + quoted(tmp / "b") + " --no-draws --sequential", tmp).code == 0);
  CHECK_FALSE(fs::exists(tmp / "b" / "pr_tw_draws.bin"));
  for (const char* f : {"pr_tw_regimes.csv", "vol_tw_regimes.csv", "report.json", "masks.csv", "summary.txt"}) {
    CHECK(testing::read_file(tmp / "a" / f) == testing::read_file(tmp / "b" / f));
  }

  const auto regimes = read_regime_csv(tmp / "a" / "pr_tw_regimes.csv");
  CHECK(regimes.ticker == "MEME");
  CHECK(regimes.config_hash.size() == 40);

  // a different seed changes the estimation hash, so mixing runs is refused
  REQUIRE(cli(run + quoted(tmp / "c") + " --seed 9 --no-draws", tmp).code == 0);
  const auto mixed = cli("detect --pr-tw " + quoted(tmp / "a" / "pr_tw_regimes.csv") + " --vol-tw " +
                             quoted(tmp / "c" / "vol_tw_regimes.csv") + " --out " + quoted(tmp / "d"),
                         tmp);
  CHECK(mixed.code == 1);
}
