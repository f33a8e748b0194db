// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when a criterion fails that was not named in --expect-fail.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cdscan/cli.hpp"
#include "cdscan/cohort.hpp"
#include "cdscan/io.hpp"
#include "cdscan/report.hpp"
#include "cdscan/synthetic.hpp"
#include "oracles.hpp"

using namespace cdscan;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int decimals = 3) { return format_fixed(x, decimals); }

fs::path workdir() {
  const auto d = fs::temp_directory_path() / "cdscan_acceptance";
  fs::create_directories(d);
  return d;
}

// 1 ---------------------------------------------------------------------------
Outcome lexicon_integrity() {
  const auto t0 = Clock::now();
  const auto lex = load_lexicon();
  const double elapsed = seconds_since(t0);
  const std::array<std::size_t, kCategoryCount> expected{11, 23, 14, 7, 8, 44, 8, 14, 72, 21, 14, 5};
  std::array<std::size_t, kCategoryCount> got{};
  for (const auto& s : lex) ++got[category_index(s.category)];
  const bool ok = lex.size() == 241 && got == expected && elapsed < 1.0;
  std::ostringstream d;
  d << lex.size() << " schemata, counts";
  for (auto n : got) d << ' ' << n;
  d << ", loaded in " << fmt(elapsed * 1000, 1) << " ms";
  return {ok, d.str()};
}

// 2 ---------------------------------------------------------------------------
Outcome pronoun_tagging() {
  const auto st = lexicon_stats(embedded_lexicon());
  const std::vector<std::tuple<Category, std::string, std::size_t>> published{
      {Category::fortune_telling, "87.5", 7},   {Category::emotional_reasoning, "85.7", 6},
      {Category::mindreading, "83.3", 60},      {Category::labeling_and_mislabeling, "36.4", 16},
      {Category::mental_filtering, "50.0", 7},  {Category::personalizing, "100.0", 14},
  };
  bool ok = true;
  std::ostringstream d;
  for (const auto& [c, pct, count] : published) {
    const auto& cs = st.per_category[category_index(c)];
    const auto shown = fmt(*cs.pronoun_pct, 1);
    const auto off = cs.with_pronoun > count ? cs.with_pronoun - count : count - cs.with_pronoun;
    ok = ok && shown == pct && off <= 1;
    d << category_name(c) << ' ' << shown << (shown == pct ? "" : "(!)") << "; ";
  }
  return {ok, d.str()};
}

// 3 ---------------------------------------------------------------------------
Outcome matcher_oracle() {
  const auto& lex = embedded_lexicon();
  const auto index = build_index(lex);
  std::mt19937_64 rng(3);
  std::size_t agree = 0, posts = 0, with_match = 0;
  std::vector<SchemaId> got;
  for (; posts < 20000; ++posts) {
    const auto tokens = normalize_text(synthetic::random_post(rng, lex, 4 + rng() % 36));
    index.scan(tokens, got);
    const auto want = oracle::sliding_window_matches(lex, tokens);
    agree += got == want ? 1 : 0;
    with_match += want.empty() ? 0 : 1;
  }
  return {agree == posts, std::to_string(agree) + "/" + std::to_string(posts) + " posts agree (" +
                              std::to_string(with_match) + " with matches)"};
}

// 4 ---------------------------------------------------------------------------
Outcome table_consistency() {
  const double pr = *prevalence_ratio(0.21838, 0.18407);
  const double pd = prevalence_difference(0.21838, 0.18407);
  const bool ok = std::abs(pr - 1.186) <= 0.001 && std::abs(pd - 3.431) <= 0.001;
  return {ok, "PR " + fmt(pr, 4) + ", PD " + fmt(pd, 4)};
}

// 5 ---------------------------------------------------------------------------
Outcome bootstrap_constant() {
  std::mt19937_64 rng(5);
  const auto d = synthetic::bernoulli_cohort("d", 50, 40, 1.0, 0, rng);
  const auto r = synthetic::bernoulli_cohort("r", 60, 30, 1.0, 0, rng);
  const std::vector<SchemaId> subset{0};
  bool ok = true;
  for (auto axis : {ResampleAxis::users, ResampleAxis::schemata}) {
    BootstrapConfig cfg;
    cfg.axis = axis;
    const auto s = bootstrap_prevalence(d, r, subset, cfg).ratio;
    ok = ok && s.point == 1.0 && s.median == 1.0 && s.ci_low == 1.0 && s.ci_high == 1.0;
  }
  return {ok, "users and schemata axes: point = median = CI = 1.0 with B = 10000"};
}

Outcome bootstrap_coverage() {
  const auto t0 = Clock::now();
  constexpr int kTrials = 200;
  const double truth = 0.22 / 0.18;
  int covered = 0;
  for (int t = 0; t < kTrials; ++t) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(t));
    const auto d = synthetic::bernoulli_cohort("d", 500, 200, 0.22, 0, rng);
    const auto r = synthetic::bernoulli_cohort("r", 500, 200, 0.18, 0, rng);
    BootstrapConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t);
    const auto s = bootstrap_prevalence(d, r, std::vector<SchemaId>{0}, cfg).ratio;
    covered += (s.ci_low <= truth && truth <= s.ci_high) ? 1 : 0;
  }
  const double elapsed = seconds_since(t0);
  const double rate = 100.0 * covered / kTrials;
  const bool ok = rate >= 93.0 && rate <= 97.0 && elapsed < 300.0;
  return {ok, std::to_string(covered) + "/" + std::to_string(kTrials) + " intervals cover " + fmt(truth, 4) + " (" +
                  fmt(rate, 1) + "%), B = 10000, " + fmt(elapsed, 1) + " s"};
}

// 6 ---------------------------------------------------------------------------
Outcome ks_statistic() {
  std::mt19937_64 rng(6);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> a(1 + rng() % 60), b(1 + rng() % 60);
    const bool ties = i % 2 == 0;
    for (auto* v : {&a, &b}) {
      for (auto& x : *v) x = ties ? static_cast<double>(rng() % 10) : std::ldexp(static_cast<double>(rng() >> 11), -53);
    }
    agree += std::abs(ks_two_sample(a, b).statistic - oracle::ks_statistic(a, b)) < 1e-12 ? 1 : 0;
  }
  return {agree == 1000, std::to_string(agree) + "/1000 sample pairs match the brute-force ECDF supremum"};
}

Outcome ks_small_sample_p() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int pairs = 0, within = 0;
  double worst = 1.0;
  std::string worst_at;
  for (std::size_t na = 1; na < 20; ++na) {
    for (std::size_t nb = 1; na + nb <= 20; ++nb) {
      std::vector<double> a(na), b(nb);
      for (auto& x : a) x = u(rng);
      for (auto& x : b) x = u(rng);
      const double asym = ks_two_sample(a, b).p_value;
      const double exact = ks_exact_p_value(a, b);
      const double factor = std::max(asym / exact, exact / asym);
      ++pairs;
      within += factor <= 2.0 ? 1 : 0;
      if (factor > worst) {
        worst = factor;
        worst_at = "(" + std::to_string(na) + "," + std::to_string(nb) + ") asymptotic " + fmt(asym, 4) +
                   " vs exact " + fmt(exact, 4);
      }
    }
  }
  return {within == pairs, std::to_string(within) + "/" + std::to_string(pairs) +
                               " size pairs within a factor of 2; worst factor " + fmt(worst, 2) + " at " + worst_at};
}

// 7 ---------------------------------------------------------------------------
Outcome fpp_analysis() {
  const auto& lex = embedded_lexicon();
  const auto filtered = filter_schemata_by_pronouns(lex, first_person_pronouns());
  const bool empty = schemata_in_category(filtered, Category::personalizing).empty();

  std::mt19937_64 rng(7);
  CohortBuilder bd("d"), br("r");
  for (int u = 0; u < 30; ++u) {
    for (int k = 0; k < 100; ++k) {
      std::vector<SchemaId> hd, hr;
      for (const auto& s : lex) {
        if (std::bernoulli_distribution(0.004)(rng)) hd.push_back(s.id);
        if (std::bernoulli_distribution(0.004)(rng)) hr.push_back(s.id);
      }
      bd.add("d" + std::to_string(u), hd);
      br.add("r" + std::to_string(u), hr);
    }
  }
  StudyConfig cfg;
  cfg.bootstrap.replicates = 500;
  cfg.per_schema = false;
  cfg.min_posts = 50;
  const auto study = run_study(std::move(bd).build(), std::move(br).build(), lex, cfg);
  const auto table = render_ratio_table(study, "");
  std::string row;
  for (const auto& line : split(table, '\n')) {
    if (line.rfind("Personalizing\t", 0) == 0) row = line;
  }
  const auto f = split(row, '\t');
  const bool slashes = f.size() == 17 && f[7] == "/" && f[8] == "/" && f[9] == "/" && f[10] == "/";
  return {empty && slashes, std::string("filtered Personalizing subset ") + (empty ? "empty" : "NOT empty") +
                                "; PR_1 cells: " + (f.size() == 17 ? f[7] + " " + f[8] + " " + f[9] + " " + f[10] : "?")};
}

// 8 ---------------------------------------------------------------------------
int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"cdscan"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Outcome determinism() {
  const auto dir = workdir() / "determinism";
  fs::remove_all(dir);
  const auto [dp, rp] = synthetic::study_plans(40, 250);
  for (const auto& [plan, seed] : {std::pair{&dp, 81u}, std::pair{&rp, 82u}}) {
    std::string body;
    for (const auto& rec : synthetic::generate_cohort(*plan, embedded_lexicon(), seed)) body += format_corpus_line(rec) + "\n";
    write_file_atomic(dir / (plan->name + ".jsonl"), body);
  }
  const std::vector<std::string> base{"report", "--all", "--seed", "8", "-B", "2000", "--min-posts", "100",
                                      "--depressed", (dir / "depressed.jsonl").string(), "--random",
                                      (dir / "random.jsonl").string()};
  auto run_with = [&](const std::string& workers, const fs::path& out) {
    auto args = base;
    args.insert(args.end(), {"--workers", workers, "-o", out.string()});
    return cli(args);
  };
  if (run_with("1", dir / "w1") != 0 || run_with("4", dir / "w4") != 0) return {false, "report --all failed"};
  std::size_t files = 0, identical = 0;
  for (const auto& e : fs::directory_iterator(dir / "w1")) {
    ++files;
    const auto other = dir / "w4" / e.path().filename();
    identical += fs::exists(other) && read_file(e.path()) == read_file(other) ? 1 : 0;
  }
  std::size_t other_files = 0;
  for (const auto& e : fs::directory_iterator(dir / "w4")) other_files += e.is_regular_file() ? 1 : 0;
  return {files > 0 && identical == files && other_files == files,
          std::to_string(identical) + "/" + std::to_string(files) + " report files byte-identical (1 vs 4 workers)"};
}

// 9 ---------------------------------------------------------------------------
Outcome throughput() {
  const auto& lex = embedded_lexicon();
  const auto index = build_index(lex);
  constexpr std::size_t kPosts = 1'000'000;
  constexpr std::size_t kChunk = 50'000;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> length(10, 30);  // mean 20
  double elapsed = 0.0;
  std::size_t tokens_total = 0, matched = 0;
  std::vector<std::string> texts;
  std::vector<std::string> tokens;
  std::vector<SchemaId> ids;
  for (std::size_t done = 0; done < kPosts; done += kChunk) {
    texts.clear();
    for (std::size_t i = 0; i < kChunk; ++i) texts.push_back(synthetic::random_post(rng, lex, length(rng)));
    const auto t0 = Clock::now();
    for (const auto& t : texts) {
      tokens.clear();
      tokenize_into(expand_contractions(t), tokens);
      index.scan(tokens, ids);
      tokens_total += tokens.size();
      matched += ids.empty() ? 0 : 1;
    }
    elapsed += seconds_since(t0);
  }
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  const double rss_mb = static_cast<double>(ru.ru_maxrss) / 1024.0;
  const bool ok = elapsed < 10.0 && rss_mb < 1024.0;
  return {ok, "1,000,000 posts (mean " + fmt(static_cast<double>(tokens_total) / kPosts, 1) + " tokens, " +
                  std::to_string(matched) + " matched) normalized and matched in " + fmt(elapsed, 2) +
                  " s on one thread; peak RSS " + fmt(rss_mb, 0) + " MB"};
}

// 10 --------------------------------------------------------------------------
Outcome end_to_end() {
  const auto dir = workdir() / "study";
  fs::remove_all(dir);
  const auto& lex = embedded_lexicon();
  const auto [dp, rp] = synthetic::study_plans(400, 500);
  std::vector<fs::path> files;
  for (const auto& [plan, seed] : {std::pair{&dp, 101u}, std::pair{&rp, 102u}}) {
    std::string body;
    for (const auto& rec : synthetic::generate_cohort(*plan, lex, seed)) body += format_corpus_line(rec) + "\n";
    files.push_back(dir / (plan->name + ".jsonl"));
    write_file_atomic(files.back(), body);
  }
  const auto index = build_index(lex);
  const std::vector<fs::path> df{files[0]}, rf{files[1]};
  const auto d = match_cohort("depressed", ingest_corpus(df), index);
  const auto r = match_cohort("random", ingest_corpus(rf), index);
  StudyConfig cfg;
  cfg.bootstrap.seed = 10;
  cfg.per_schema = false;
  const auto study = run_study(d, r, lex, cfg);

  const auto& ref = synthetic::reference_rates();
  int checked = 0, recovered = 0;
  std::ostringstream detail;
  for (const auto& row : study.rows) {
    if (!row.category) continue;
    const auto c = category_index(*row.category);
    if (std::min(dp.category_rates[c], rp.category_rates[c]) < 0.001) continue;
    ++checked;
    const auto& s = row.all.ratio;
    const double planted = ref.multiplier[c];
    const bool in = s.defined() && s.ci_low <= planted && planted <= s.ci_high;
    recovered += in ? 1 : 0;
    detail << row.label << ' ' << fmt(planted) << (in ? " in " : " NOT in ") << '[' << fmt(s.ci_low) << ", "
           << fmt(s.ci_high) << "]; ";
  }
  return {checked > 0 && recovered == checked,
          std::to_string(recovered) + "/" + std::to_string(checked) + " categories recovered: " + detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> expect_fail;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--expect-fail" && i + 1 < argc) {
      for (const auto& id : split(argv[++i], ',')) expect_fail.insert(id);
    } else {
      std::cerr << "usage: acceptance [--expect-fail ID[,ID...]]\n";
      return 1;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1", lexicon_integrity},   {"2", pronoun_tagging},     {"3", matcher_oracle},
      {"4", table_consistency},   {"5a", bootstrap_constant}, {"5b", bootstrap_coverage},
      {"6a", ks_statistic},       {"6b", ks_small_sample_p},  {"7", fpp_analysis},
      {"8", determinism},         {"9", throughput},          {"10", end_to_end},
  };
  int unexpected = 0;
  for (const auto& [id, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected = expect_fail.count(id) > 0;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail;
    if (!o.pass && expected) std::cout << " [known failure]";
    std::cout << std::endl;
    if (o.pass == expected) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
