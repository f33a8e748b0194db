#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "cdscan/cli.hpp"
#include "cdscan/io.hpp"
#include "cdscan/synthetic.hpp"

using namespace cdscan;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cdscan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / "cdscan_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Small synthetic corpora shared by the tests below.
const fs::path& fixtures() {
  static const fs::path dir = [] {
    const auto d = scratch("fixtures");
    const auto [dp, rp] = synthetic::study_plans(30, 220);
    for (const auto& [plan, seed] : {std::pair{&dp, 1u}, std::pair{&rp, 2u}}) {
      std::string body;
      for (const auto& rec : synthetic::generate_cohort(*plan, embedded_lexicon(), seed)) {
        body += format_corpus_line(rec) + "\n";
      }
      write_file_atomic(d / (plan->name + ".jsonl"), body);
    }
    return d;
  }();
  return dir;
}

std::vector<std::string> cohort_args() {
  return {"--depressed", (fixtures() / "depressed.jsonl").string(), "--random", (fixtures() / "random.jsonl").string()};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string first_data_line(const fs::path& p, std::size_t skip = 1) {
  std::istringstream in(read_file(p));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (n++ == skip) return line;
  }
  return {};
}

}  // namespace

TEST_CASE("usage errors") {
  auto r = run({});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("Subcommands") != std::string::npos);

  r = run({"lexicon", "--bogus-flag"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("--bogus-flag") != std::string::npos);

  r = run({"frobnicate"});
  CHECK(r.code == kExitUsage);

  r = run({"bootstrap", "--axis", "sideways"});
  CHECK(r.code == kExitUsage);

  r = run(with({"prevalence", "--category", "optimism", "-o", scratch("badcat").string()}, cohort_args()));
  CHECK(r.code == kExitUsage);

  r = run({"lexicon", "--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("--stats") != std::string::npos);
}

TEST_CASE("the binary exits 1 without arguments") {
  const int status = std::system((std::string(CDSCAN_BIN) + " > /dev/null 2>&1").c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 1);
}

TEST_CASE("data errors") {
  const auto d = scratch("bad");
  write_file_atomic(d / "bad.jsonl", "not json\nstill not\n");
  auto r = run({"ingest", (d / "bad.jsonl").string(), "-o", d.string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("malformed") != std::string::npos);

  // The same corpus on both sides shares every user.
  const auto same = (fixtures() / "depressed.jsonl").string();
  r = run({"prevalence", "--depressed", same, "--random", same, "-o", d.string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("share") != std::string::npos);

  r = run(with({"ks", "--min-posts", "100000", "-o", d.string()}, cohort_args()));
  CHECK(r.code == kExitData);
}

TEST_CASE("lexicon export and statistics") {
  const auto d = scratch("lexicon");
  const auto r = run({"lexicon", "--stats", "-o", d.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(split(read_file(d / "lexicon.tsv"), '\n').size() == 243);
  const auto stats = read_file(d / "lexicon_stats.tsv");
  CHECK(stats.rfind("# cdscan lexicon", 0) == 0);
  CHECK(stats.find("category\tN_CD\tmean_n\tP_r_pct\n") != std::string::npos);
  CHECK(stats.find("Personalizing\t14\t2.429\t100.0\n") != std::string::npos);
}

TEST_CASE("output directory defaults to the environment") {
  const auto d = scratch("env");
  ::setenv("CDSCAN_OUT", d.string().c_str(), 1);
  const auto r = run({"lexicon"});
  ::unsetenv("CDSCAN_OUT");
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(d / "lexicon.tsv"));
}

TEST_CASE("ingest, select, sample and analyse") {
  const auto d = scratch("pipeline");
  // A candidate pool with one user posting a diagnosis statement.
  CorpusRecord rec;
  rec.post.user_id = "d00001";
  rec.post.post_id = "diag";
  rec.post.created_at = *parse_iso8601("2016-06-01T00:00:00Z");
  rec.post.raw_text = "I was in fact just diagnosed with clinical depression";
  rec.account_created_at = parse_iso8601("2012-01-01T00:00:00Z");
  write_file_atomic(d / "extra.jsonl", format_corpus_line(rec) + "\n");
  const auto dep = (fixtures() / "depressed.jsonl").string();
  const auto rnd = (fixtures() / "random.jsonl").string();

  auto r = run({"select", dep, (d / "extra.jsonl").string(), "-o", d.string()});
  REQUIRE(r.code == kExitOk);
  const auto manifest = read_file(d / "depressed.manifest");
  CHECK(manifest.find("#users\t1\nd00001\n") != std::string::npos);

  r = run({"ingest", rnd, "--name", "random", "-o", d.string()});
  REQUIRE(r.code == kExitOk);
  r = run({"ingest", dep, "--name", "depressed", "-o", d.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(read_file(d / "depressed.ingest.tsv").find("users\t30\n") != std::string::npos);

  r = run({"sample", "--candidates", (d / "random.users.tsv").string(), "--reference",
           (d / "depressed.users.tsv").string(), "--size", "12", "--seed", "3", "-o", d.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(read_file(d / "random.manifest").find("#seed\t3\n") != std::string::npos);
  CHECK(fs::exists(d / "sample_bins.tsv"));

  r = run(with({"prevalence", "--random-manifest", (d / "random.manifest").string(), "--min-posts", "50", "-o",
                d.string()},
               cohort_args()));
  REQUIRE(r.code == kExitOk);
  const auto prev = split(first_data_line(d / "prevalence.tsv"), '\t');
  REQUIRE(prev.size() == 10);
  CHECK(prev[0] == "All CDS");
  // The random side is restricted to the sampled manifest.
  const auto m = read_file(d / "random.manifest");
  const auto at = m.find("#users\t") + 7;
  CHECK(prev[5] == m.substr(at, m.find('\n', at) - at));
  CHECK(std::stoi(prev[5]) < 30);
}

TEST_CASE("analysis subcommands") {
  const auto d = scratch("analysis");
  const auto args = cohort_args();
  auto r = run(with({"bootstrap", "-B", "200", "--seed", "4", "--category", "personalizing", "-o", d.string()}, args));
  REQUIRE(r.code == kExitOk);
  const auto boot = read_file(d / "bootstrap.tsv");
  CHECK(boot.find("seed=4") != std::string::npos);
  CHECK(boot.find("Personalizing\tPR\t") != std::string::npos);

  r = run(with({"bootstrap", "-B", "100", "--category", "personalizing", "--exclude-fpp", "-o", d.string()}, args));
  CHECK(r.code == kExitData);  // nothing left to resample

  r = run(with({"bootstrap", "-B", "100", "--axis", "schemata", "-o", d.string()}, args));
  CHECK(r.code == kExitOk);

  r = run(with({"ks", "--min-posts", "50", "-o", d.string()}, args));
  REQUIRE(r.code == kExitOk);
  CHECK(split(first_data_line(d / "ks.tsv", 1), '\t')[0] == "within_subject_prevalence");

  r = run(with({"per-schema", "-B", "100", "-o", d.string()}, args));
  REQUIRE(r.code == kExitOk);
  CHECK(split(read_file(d / "per_schema_ratios.tsv"), '\n').size() == 1 + 1 + 241 + 1);

  r = run(with({"sweep", "--thresholds", "50,100", "-o", d.string()}, args));
  REQUIRE(r.code == kExitOk);
  CHECK(split(read_file(d / "sweep.tsv"), '\n').size() == 5);
  r = run(with({"sweep", "--thresholds", "100,50", "-o", d.string()}, args));
  CHECK(r.code == kExitUsage);

  r = run({"match", (fixtures() / "random.jsonl").string(), "-o", d.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(read_file(d / "matches.tsv").rfind("post_id\tf_c\tschema_ids\n", 0) == 0);

  write_file_atomic(d / "a.txt", "0.0\n0.5\n-0.2\n0.0\n");
  write_file_atomic(d / "b.txt", "0.1\n0.9\n0.7\n");
  r = run({"sentiment", "--values-a", (d / "a.txt").string(), "--values-b", (d / "b.txt").string(), "--lexicon-scores",
           (d / "a.txt").string(), "-o", d.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(read_file(d / "lexicon_sentiment.tsv").find("4\t0.075\t0.500") != std::string::npos);
  CHECK(split(first_data_line(d / "sentiment_ks.tsv", 1), '\t')[0] == "4");
  write_file_atomic(d / "c.txt", "3.0\n");
  r = run({"sentiment", "--values-a", (d / "c.txt").string(), "--values-b", (d / "b.txt").string(), "-o", d.string()});
  CHECK(r.code == kExitData);
  r = run({"sentiment", "-o", d.string()});
  CHECK(r.code == kExitUsage);
}

TEST_CASE("report --all is deterministic across worker counts") {
  const auto a = scratch("report_a");
  const auto b = scratch("report_b");
  const auto base = with({"report", "--all", "-B", "300", "--seed", "9", "--min-posts", "60"}, cohort_args());
  auto r = run(with(base, {"-o", a.string(), "--workers", "1"}));
  REQUIRE(r.code == kExitOk);
  r = run(with(base, {"-o", b.string(), "--workers", "4"}));
  REQUIRE(r.code == kExitOk);

  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CAPTURE(e.path().filename());
    CHECK(e.path().extension() == ".tsv");  // no temporaries left behind
    CHECK(read_file(e.path()) == read_file(b / e.path().filename()));
  }
  CHECK(files >= 10);

  const auto table = read_file(a / "prevalence_ratio.tsv");
  CHECK(table.find("PR_A_median") != std::string::npos);
  CHECK(table.find("PR_1_median") != std::string::npos);
  CHECK(table.find("PR_C_median") != std::string::npos);
  CHECK(table.find("\nPersonalizing\t") != std::string::npos);
  CHECK(table.find("workers") == std::string::npos);
  const auto pos = table.find("\nPersonalizing\t");
  const auto row = split(table.substr(pos + 1, table.find('\n', pos + 1) - pos - 1), '\t');
  REQUIRE(row.size() == 17);
  CHECK(row[8] == "/");
}
