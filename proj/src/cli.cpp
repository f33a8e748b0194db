#include "cdscan/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "cdscan/cohort.hpp"
#include "cdscan/error.hpp"
#include "cdscan/io.hpp"
#include "cdscan/report.hpp"

namespace cdscan {
namespace {

namespace fs = std::filesystem;

const std::vector<std::size_t> kDefaultThresholds{25, 50, 75, 100, 125, 150, 175, 200, 250, 300};

fs::path default_out_dir() {
  if (const char* env = std::getenv("CDSCAN_OUT"); env != nullptr && *env != '\0') return env;
  return ".";
}

struct Options {
  fs::path out = default_out_dir();
  std::uint64_t seed = 0;
  std::size_t replicates = 10000;
  std::size_t min_posts = 150;
  bool exclude_fpp = false;
  std::string axis = "users";
  std::string category;
  double bin_width = 0.05;
  unsigned workers = 1;

  std::string format = "jsonl";
  std::size_t max_timeline = 3200;
  double max_malformed = 0.10;
  std::vector<std::string> inputs;
  std::vector<std::string> depressed;
  std::vector<std::string> random;
  std::string depressed_manifest;
  std::string random_manifest;

  std::string name = "random";
  std::string candidates;
  std::string reference;
  std::string reference_manifest;
  std::size_t size = 0;
  bool require_location = false;

  std::vector<std::size_t> thresholds;
  std::string values_a, values_b;
  std::string lexicon_scores;
  bool stats = false;
  bool all = false;
};

// -- option groups ------------------------------------------------------------

void add_out(CLI::App* app, Options& o) {
  app->add_option("-o,--out", o.out, "Output directory (default: $CDSCAN_OUT or the current directory)");
}

void add_workers(CLI::App* app, Options& o) {
  app->add_option("--workers", o.workers, "Worker threads; results do not depend on it")
      ->capture_default_str()
      ->check(CLI::Range(1u, 256u));
}

void add_corpus_format(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "Corpus format: jsonl or text")
      ->capture_default_str()
      ->check(CLI::IsMember({"jsonl", "text"}));
  app->add_option("--max-timeline", o.max_timeline, "Most recent posts kept per user (0 keeps all)")
      ->capture_default_str();
  app->add_option("--max-malformed", o.max_malformed, "Largest tolerated share of malformed lines per file")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
}

void add_cohorts(CLI::App* app, Options& o) {
  app->add_option("--depressed", o.depressed, "Corpus files of the depressed cohort")->required()->check(
      CLI::ExistingFile);
  app->add_option("--random", o.random, "Corpus files of the random-sample cohort")->required()->check(
      CLI::ExistingFile);
  app->add_option("--depressed-manifest", o.depressed_manifest, "Restrict the depressed cohort to a manifest")
      ->check(CLI::ExistingFile);
  app->add_option("--random-manifest", o.random_manifest, "Restrict the random cohort to a manifest")
      ->check(CLI::ExistingFile);
  add_corpus_format(app, o);
}

void add_min_posts(CLI::App* app, Options& o) {
  app->add_option("--min-posts", o.min_posts, "Minimum posts for within-subject prevalence")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_subset(CLI::App* app, Options& o) {
  app->add_option("--category", o.category, "Restrict to one category (name or slug; default all)");
  app->add_flag("--exclude-fpp", o.exclude_fpp, "Drop schemata containing first-person pronouns");
}

void add_bootstrap(CLI::App* app, Options& o, bool with_axis) {
  app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app->add_option("-B,--replicates", o.replicates, "Bootstrap replicates")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  if (with_axis) {
    app->add_option("--axis", o.axis, "Resampling axis: users or schemata")
        ->capture_default_str()
        ->check(CLI::IsMember({"users", "schemata"}));
  }
}

void add_bin_width(CLI::App* app, Options& o, const char* what) {
  app->add_option("--bin-width", o.bin_width, what)->capture_default_str()->check(CLI::Range(1e-6, 1.0));
}

// -- shared helpers -----------------------------------------------------------

IngestOptions ingest_options(const Options& o) {
  IngestOptions io;
  io.format = *parse_corpus_format(o.format);
  io.max_timeline = o.max_timeline;
  io.max_malformed_rate = o.max_malformed;
  return io;
}

std::vector<fs::path> to_paths(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::string join(const std::vector<std::string>& v, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::vector<std::string> s;
  for (auto x : v) s.push_back(std::to_string(x));
  return join(s);
}

/// Resolved configuration, without the worker count or output directory,
/// neither of which may change a result.
class ConfigLine {
 public:
  explicit ConfigLine(std::string_view subcommand) { s_ = "cdscan " + std::string(subcommand); }
  ConfigLine& add(std::string_view key, const std::string& value) {
    s_ += ' ';
    s_ += key;
    s_ += '=';
    s_ += value.empty() ? "-" : value;
    return *this;
  }
  template <class T>
  ConfigLine& add(std::string_view key, T value) {
    if constexpr (std::is_same_v<T, bool>) return add(key, std::string(value ? "yes" : "no"));
    else if constexpr (std::is_floating_point_v<T>) return add(key, format_exact(value));
    else return add(key, std::to_string(value));
  }
  const std::string& str() const { return s_; }

 private:
  std::string s_;
};

void add_cohort_config(ConfigLine& c, const Options& o) {
  c.add("depressed", join(o.depressed))
      .add("random", join(o.random))
      .add("depressed_manifest", o.depressed_manifest)
      .add("random_manifest", o.random_manifest)
      .add("format", o.format)
      .add("max_timeline", o.max_timeline)
      .add("max_malformed", o.max_malformed);
}

std::vector<Schema> selected_schemata(const Options& o) {
  const auto& lex = embedded_lexicon();
  std::vector<Schema> subset(lex.begin(), lex.end());
  if (!o.category.empty()) {
    const auto c = parse_category(o.category);
    if (!c) throw UsageError("unknown category: " + o.category);
    subset = schemata_in_category(subset, *c);
  }
  if (o.exclude_fpp) subset = filter_schemata_by_pronouns(subset, first_person_pronouns());
  return subset;
}

std::string subset_label(const Options& o) {
  std::string label = "All CDS";
  if (!o.category.empty()) label = std::string(category_name(*parse_category(o.category)));
  if (o.exclude_fpp) label += " (no FPP)";
  return label;
}

struct Cohorts {
  CohortMatches depressed;
  CohortMatches random;
};

CohortManifest manifest_of(std::string name, const IngestResult& corpus) {
  CohortManifest m;
  m.name = std::move(name);
  for (const auto& u : corpus.users) m.users.push_back(u.user_id);
  return m;
}

IngestResult load_corpus(const std::vector<std::string>& files, const std::string& manifest, const Options& o) {
  const auto paths = to_paths(files);
  auto corpus = ingest_corpus(paths, ingest_options(o));
  if (!manifest.empty()) {
    const auto m = read_manifest(manifest);
    corpus = restrict_users(std::move(corpus), m.users);
  }
  return corpus;
}

Cohorts load_cohorts(const Options& o) {
  const auto d = load_corpus(o.depressed, o.depressed_manifest, o);
  const auto r = load_corpus(o.random, o.random_manifest, o);
  check_disjoint(manifest_of("depressed", d), manifest_of("random", r));
  const auto index = build_index(embedded_lexicon());
  return {match_cohort("depressed", d, index, o.workers), match_cohort("random", r, index, o.workers)};
}

BootstrapConfig bootstrap_config(const Options& o) {
  BootstrapConfig b;
  b.replicates = o.replicates;
  b.seed = o.seed;
  b.workers = o.workers;
  b.axis = *parse_axis(o.axis);
  return b;
}

std::size_t density_bins(double width) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / width)));
}

void emit(const Options& o, std::ostream& out, const std::string& file, const std::string& content) {
  const auto path = o.out / file;
  write_file_atomic(path, content);
  out << path.string() << '\n';
}

std::string current_time() {
  return format_iso8601(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

// -- subcommands --------------------------------------------------------------

void cmd_lexicon(const Options& o, std::ostream& out) {
  const auto& lex = embedded_lexicon();
  emit(o, out, "lexicon.tsv", render_lexicon(lex));
  if (o.stats) emit(o, out, "lexicon_stats.tsv", render_lexicon_stats(lex, nullptr, "cdscan lexicon stats=yes"));
}

std::string ingest_summary(const IngestResult& r, const std::string& config) {
  std::ostringstream os;
  os << "# " << config << "\nkey\tvalue\n";
  os << "lines\t" << r.report.lines << "\nmalformed\t" << r.report.malformed << "\nduplicates\t"
     << r.report.duplicates << "\ntruncated\t" << r.report.truncated << "\ningested\t" << r.report.ingested
     << "\nusers\t" << r.users.size() << '\n';
  for (std::size_t i = 0; i < kExclusionKinds; ++i) {
    os << "excluded:" << exclusion_name(static_cast<Exclusion>(i)) << '\t' << r.report.by_reason[i] << '\n';
  }
  for (const auto& s : r.malformed_samples) os << "malformed_sample\t" << s << '\n';
  return os.str();
}

void cmd_ingest(const Options& o, std::ostream& out) {
  const auto r = ingest_corpus(to_paths(o.inputs), ingest_options(o));
  ConfigLine c("ingest");
  c.add("name", o.name).add("input", join(o.inputs)).add("format", o.format).add("max_timeline", o.max_timeline);
  CohortManifest m = manifest_of(o.name, r);
  m.exclusions = r.report.by_reason;
  m.sources = o.inputs;
  m.created_at = current_time();
  emit(o, out, o.name + ".users.tsv", "# " + c.str() + "\n" + format_user_records(r.records));
  emit(o, out, o.name + ".ingest.tsv", ingest_summary(r, c.str()));
  write_manifest(m, o.out / (o.name + ".manifest"));
  out << (o.out / (o.name + ".manifest")).string() << '\n';
}

void cmd_select(const Options& o, std::ostream& out) {
  const auto corpus = ingest_corpus(to_paths(o.inputs), ingest_options(o));
  const auto sel = select_depressed_users(corpus);
  ConfigLine c("select");
  c.add("input", join(o.inputs)).add("format", o.format).add("max_timeline", o.max_timeline);

  std::ostringstream os;
  os << "# " << c.str() << "\nuser_id\tpost_id\tcreated_at\ttext\n";
  for (const auto& s : sel.statements) {
    std::string text = s.text;
    std::replace_if(text.begin(), text.end(), [](char ch) { return ch == '\t' || ch == '\n' || ch == '\r'; }, ' ');
    os << s.user_id << '\t' << s.post_id << '\t' << format_iso8601(s.created_at) << '\t' << text << '\n';
  }
  emit(o, out, "diagnosis_statements.tsv", os.str());

  std::vector<UserRecord> records;
  for (const auto& r : corpus.records) {
    if (std::binary_search(sel.users.begin(), sel.users.end(), r.user_id)) records.push_back(r);
  }
  emit(o, out, "depressed.users.tsv", "# " + c.str() + "\n" + format_user_records(records));

  CohortManifest m;
  m.name = "depressed";
  m.users = sel.users;
  m.exclusions = corpus.report.by_reason;
  m.sources = o.inputs;
  m.created_at = current_time();
  write_manifest(m, o.out / "depressed.manifest");
  out << (o.out / "depressed.manifest").string() << '\n';
}

void cmd_sample(const Options& o, std::ostream& out) {
  const auto candidates = read_user_records(o.candidates);
  auto reference = read_user_records(o.reference);
  if (!o.reference_manifest.empty()) {
    const auto m = read_manifest(o.reference_manifest);
    std::erase_if(reference, [&](const UserRecord& r) {
      return !std::binary_search(m.users.begin(), m.users.end(), r.user_id);
    });
  }
  SampleOptions so;
  so.target_size = o.size;
  so.seed = o.seed;
  so.require_location = o.require_location;
  const auto res = date_matched_sample(candidates, reference, so);

  ConfigLine c("sample");
  c.add("candidates", o.candidates)
      .add("reference", o.reference)
      .add("reference_manifest", o.reference_manifest)
      .add("size", o.size)
      .add("seed", o.seed)
      .add("require_location", o.require_location);
  std::ostringstream os;
  os << "# " << c.str() << "\nmonth\treference\ttarget\tavailable\ttaken\tdeficit\n";
  for (const auto& b : res.bins) {
    char month[16];
    std::snprintf(month, sizeof month, "%04d-%02u", b.year, b.month);
    os << month << '\t' << b.reference << '\t' << b.target << '\t' << b.available << '\t' << b.taken << '\t'
       << b.deficit() << '\n';
  }
  os << "# dropped_overlap=" << res.dropped_overlap << " dropped_undated=" << res.dropped_undated
     << " dropped_no_location=" << res.dropped_no_location << " reference_undated=" << res.reference_undated
     << " total_deficit=" << res.total_deficit() << '\n';
  emit(o, out, "sample_bins.tsv", os.str());

  CohortManifest m;
  m.name = "random";
  m.users = res.users;
  m.seed = o.seed;
  m.sources = {o.candidates};
  m.created_at = current_time();
  write_manifest(m, o.out / "random.manifest");
  out << (o.out / "random.manifest").string() << '\n';
}

void cmd_match(const Options& o, std::ostream& out) {
  const auto corpus = ingest_corpus(to_paths(o.inputs), ingest_options(o));
  std::vector<Post> posts;
  for (const auto& u : corpus.users) posts.insert(posts.end(), u.posts.begin(), u.posts.end());
  const auto index = build_index(embedded_lexicon());
  const auto records = match_corpus(index, posts, o.workers);
  emit(o, out, "matches.tsv", render_matches(records));
}

void cmd_prevalence(const Options& o, std::ostream& out) {
  const auto subset = selected_schemata(o);
  const auto cohorts = load_cohorts(o);
  ConfigLine c("prevalence");
  add_cohort_config(c, o);
  c.add("category", o.category).add("exclude_fpp", o.exclude_fpp).add("min_posts", o.min_posts).add(
      "bin_width", o.bin_width);

  const auto mask = make_mask(subset);
  const double pd = cohort_prevalence(cohorts.depressed, mask);
  const double pr = cohort_prevalence(cohorts.random, mask);
  const auto ratio = prevalence_ratio(pd, pr);
  std::ostringstream os;
  os << "# " << c.str() << "\nsubset\tschemata\tusers_D\tposts_D\tP_D\tusers_R\tposts_R\tP_R\tPR\tPD\n";
  os << subset_label(o) << '\t' << subset.size() << '\t' << cohorts.depressed.users.size() << '\t'
     << cohorts.depressed.total_posts() << '\t' << format_fixed(pd, 6) << '\t' << cohorts.random.users.size()
     << '\t' << cohorts.random.total_posts() << '\t' << format_fixed(pr, 6) << '\t'
     << (ratio ? format_fixed(*ratio, 4) : "/") << '\t' << format_fixed(prevalence_difference(pd, pr), 4) << '\n';
  emit(o, out, "prevalence.tsv", os.str());

  Study study;
  study.within_depressed = within_subject_prevalences(cohorts.depressed, o.min_posts, mask);
  study.within_random = within_subject_prevalences(cohorts.random, o.min_posts, mask);
  emit(o, out, "within_subject.tsv", render_within_subject(study, c.str()));
  emit(o, out, "within_subject_density.tsv", render_within_density(study, density_bins(o.bin_width), c.str()));
}

void cmd_bootstrap(const Options& o, std::ostream& out) {
  const auto subset = selected_schemata(o);
  if (subset.empty()) throw DataError("the selected schema subset is empty");
  const auto cohorts = load_cohorts(o);
  ConfigLine c("bootstrap");
  add_cohort_config(c, o);
  c.add("category", o.category)
      .add("exclude_fpp", o.exclude_fpp)
      .add("axis", o.axis)
      .add("B", o.replicates)
      .add("seed", o.seed)
      .add("bin_width", o.bin_width);
  const auto ids = schema_ids(subset);
  auto result = bootstrap_prevalence(cohorts.depressed, cohorts.random, ids, bootstrap_config(o));
  emit(o, out, "bootstrap.tsv", render_bootstrap({{subset_label(o), result}}, c.str()));
  emit(o, out, "pr_bootstrap_density.tsv", render_replicate_density(result.ratio_replicates, 50, c.str()));
}

void cmd_ks(const Options& o, std::ostream& out) {
  ConfigLine c("ks");
  if (!o.values_a.empty() || !o.values_b.empty()) {
    if (o.values_a.empty() || o.values_b.empty()) throw UsageError("--values-a and --values-b go together");
    const auto a = read_numbers(o.values_a);
    const auto b = read_numbers(o.values_b);
    if (a.empty() || b.empty()) throw DataError("a value file holds no numbers");
    c.add("values_a", o.values_a).add("values_b", o.values_b);
    emit(o, out, "ks.tsv", render_ks(ks_two_sample(a, b), "values", c.str()));
    return;
  }
  if (o.depressed.empty() || o.random.empty()) throw UsageError("ks needs --depressed/--random or --values-a/--values-b");
  const auto subset = selected_schemata(o);
  const auto cohorts = load_cohorts(o);
  add_cohort_config(c, o);
  c.add("category", o.category).add("exclude_fpp", o.exclude_fpp).add("min_posts", o.min_posts);
  const auto mask = make_mask(subset);
  std::vector<double> a, b;
  for (const auto& u : within_subject_prevalences(cohorts.depressed, o.min_posts, mask)) a.push_back(u.prevalence);
  for (const auto& u : within_subject_prevalences(cohorts.random, o.min_posts, mask)) b.push_back(u.prevalence);
  if (a.empty() || b.empty()) throw DataError("no user in one cohort reaches --min-posts");
  emit(o, out, "ks.tsv", render_ks(ks_two_sample(a, b), "within_subject_prevalence", c.str()));
}

void cmd_per_schema(const Options& o, std::ostream& out) {
  const auto subset = selected_schemata(o);
  const auto cohorts = load_cohorts(o);
  ConfigLine c("per-schema");
  add_cohort_config(c, o);
  c.add("category", o.category).add("exclude_fpp", o.exclude_fpp).add("B", o.replicates).add("seed", o.seed);
  Study study;
  study.per_schema = per_schema_prevalence_ratios(cohorts.depressed, cohorts.random, subset, bootstrap_config(o));
  emit(o, out, "per_schema_ratios.tsv", render_per_schema(study, subset, c.str()));
  emit(o, out, "top_schemata.tsv", render_top_schemata(study, subset, 10, c.str()));
}

void cmd_sweep(const Options& o, std::ostream& out) {
  const auto subset = selected_schemata(o);
  const auto cohorts = load_cohorts(o);
  const auto thresholds = o.thresholds.empty() ? kDefaultThresholds : o.thresholds;
  ConfigLine c("sweep");
  add_cohort_config(c, o);
  c.add("category", o.category).add("exclude_fpp", o.exclude_fpp).add("thresholds", join_sizes(thresholds));
  const auto sweep = threshold_sweep(cohorts.depressed, cohorts.random, thresholds, make_mask(subset));
  emit(o, out, "sweep.tsv", render_sweep(sweep, c.str()));
}

void cmd_sentiment(const Options& o, std::ostream& out) {
  ConfigLine c("sentiment");
  c.add("values_a", o.values_a).add("values_b", o.values_b).add("lexicon_scores", o.lexicon_scores).add(
      "bin_width", o.bin_width);
  if (!o.values_a.empty() || !o.values_b.empty()) {
    if (o.values_a.empty() || o.values_b.empty()) throw UsageError("--values-a and --values-b go together");
    const auto a = read_numbers(o.values_a);
    const auto b = read_numbers(o.values_b);
    if (a.empty() || b.empty()) throw DataError("a score file holds no numbers");
    SentimentComparison cmp;
    try {
      cmp = sentiment_distribution_compare(a, b, o.bin_width);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what());
    }
    std::ostringstream hist;
    hist << "# " << c.str() << "\nbin_low\tbin_high\tdensity_a\tdensity_b\tcount_a\tcount_b\n";
    const auto da = cmp.a.density();
    const auto db = cmp.b.density();
    for (std::size_t i = 0; i < cmp.a.bins(); ++i) {
      hist << format_fixed(cmp.a.bin_low(i), 4) << '\t' << format_fixed(cmp.a.bin_low(i) + cmp.a.bin_width, 4)
           << '\t' << format_fixed(da[i], 6) << '\t' << format_fixed(db[i], 6) << '\t' << cmp.a.counts[i] << '\t'
           << cmp.b.counts[i] << '\n';
    }
    emit(o, out, "sentiment_histogram.tsv", hist.str());

    std::ostringstream ks;
    ks << "# " << c.str() << "\nn_a\tn_b\tmean_a\tmean_b\tzero_fraction_a\tzero_fraction_b\tD\tp_value\n";
    char p[32];
    std::snprintf(p, sizeof p, "%.3e", cmp.ks.p_value);
    ks << cmp.summary_a.n << '\t' << cmp.summary_b.n << '\t' << format_fixed(cmp.summary_a.mean, 4) << '\t'
       << format_fixed(cmp.summary_b.mean, 4) << '\t' << format_fixed(cmp.summary_a.zero_fraction, 4) << '\t'
       << format_fixed(cmp.summary_b.zero_fraction, 4) << '\t' << format_fixed(cmp.ks.statistic, 6) << '\t' << p
       << '\n';
    emit(o, out, "sentiment_ks.tsv", ks.str());
  }
  if (!o.lexicon_scores.empty()) {
    const auto s = read_numbers(o.lexicon_scores);
    if (s.empty()) throw DataError("the lexicon score file holds no numbers");
    const auto sum = summarize_scores(s);
    std::ostringstream os;
    os << "# " << c.str() << "\nn\tmean\tzero_fraction\n"
       << sum.n << '\t' << format_fixed(sum.mean, 3) << '\t' << format_fixed(sum.zero_fraction, 3) << '\n';
    emit(o, out, "lexicon_sentiment.tsv", os.str());
  }
  if (o.values_a.empty() && o.lexicon_scores.empty()) {
    throw UsageError("sentiment needs --values-a/--values-b or --lexicon-scores");
  }
}

void cmd_report(const Options& o, std::ostream& out) {
  const auto& lex = embedded_lexicon();
  const auto cohorts = load_cohorts(o);
  StudyConfig sc;
  sc.bootstrap = bootstrap_config(o);
  sc.min_posts = o.min_posts;
  sc.per_schema = o.all;
  sc.density_bins = density_bins(o.bin_width);

  // Sweep thresholds that leave both cohorts with users.
  std::vector<std::size_t> thresholds;
  if (o.all) {
    const auto mask = make_mask(std::span<const Schema>(lex));
    for (auto t : o.thresholds.empty() ? kDefaultThresholds : o.thresholds) {
      if (!within_subject_prevalences(cohorts.depressed, t, mask).empty() &&
          !within_subject_prevalences(cohorts.random, t, mask).empty()) {
        thresholds.push_back(t);
      }
    }
  }
  sc.thresholds = thresholds;

  ConfigLine c("report");
  add_cohort_config(c, o);
  c.add("all", o.all)
      .add("B", o.replicates)
      .add("seed", o.seed)
      .add("min_posts", o.min_posts)
      .add("bin_width", o.bin_width)
      .add("thresholds", join_sizes(thresholds));
  const auto study = run_study(cohorts.depressed, cohorts.random, lex, sc);
  const auto& cfg = c.str();

  emit(o, out, "prevalence_ratio.tsv", render_ratio_table(study, cfg));
  emit(o, out, "prevalence_difference.tsv", render_difference_table(study, cfg));
  emit(o, out, "raw_prevalence.tsv", render_raw_prevalence(study, cfg));
  emit(o, out, "within_subject.tsv", render_within_subject(study, cfg));
  emit(o, out, "within_subject_density.tsv", render_within_density(study, sc.density_bins, cfg));
  if (study.within_ks) emit(o, out, "within_subject_ks.tsv", render_ks(*study.within_ks, "within_subject_prevalence", cfg));
  emit(o, out, "pr_bootstrap_density.tsv", render_replicate_density(study.rows.front().all.ratio_replicates, 50, cfg));
  if (o.all) {
    emit(o, out, "lexicon_stats.tsv", render_lexicon_stats(lex, &study, cfg));
    emit(o, out, "per_schema_ratios.tsv", render_per_schema(study, lex, cfg));
    emit(o, out, "top_schemata.tsv", render_top_schemata(study, lex, 10, cfg));
    emit(o, out, "sweep.tsv", render_sweep(study.sweep, cfg));
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Cognitive distortion schema scanner for short-text corpora", "cdscan"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 usage error, 2 data error.");

  auto* lexicon = app.add_subcommand("lexicon", "Export the embedded lexicon");
  add_out(lexicon, o);
  lexicon->add_flag("--stats", o.stats, "Also write per-category statistics");

  auto* ingest = app.add_subcommand("ingest", "Ingest corpus files into a user table and manifest");
  add_out(ingest, o);
  ingest->add_option("input", o.inputs, "Corpus files")->required()->check(CLI::ExistingFile);
  ingest->add_option("--name", o.name, "Cohort name: depressed or random")
      ->capture_default_str()
      ->check(CLI::IsMember({"depressed", "random"}));
  add_corpus_format(ingest, o);

  auto* select = app.add_subcommand("select", "Select users with a self-reported diagnosis");
  add_out(select, o);
  select->add_option("input", o.inputs, "Corpus files")->required()->check(CLI::ExistingFile);
  add_corpus_format(select, o);

  auto* sample = app.add_subcommand("sample", "Draw a random cohort matched on account-creation month");
  add_out(sample, o);
  sample->add_option("--candidates", o.candidates, "User table of the candidate pool")->required()->check(
      CLI::ExistingFile);
  sample->add_option("--reference", o.reference, "User table of the reference cohort")->required()->check(
      CLI::ExistingFile);
  sample->add_option("--reference-manifest", o.reference_manifest, "Restrict the reference to a manifest")
      ->check(CLI::ExistingFile);
  sample->add_option("--size", o.size, "Target cohort size (0: size of the dated reference)")->capture_default_str();
  sample->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sample->add_flag("--require-location", o.require_location, "Keep only candidates with a location");

  auto* match = app.add_subcommand("match", "Write matched schema ids per post");
  add_out(match, o);
  match->add_option("input", o.inputs, "Corpus files")->required()->check(CLI::ExistingFile);
  add_corpus_format(match, o);
  add_workers(match, o);

  auto* prevalence = app.add_subcommand("prevalence", "Cohort and within-subject prevalence");
  add_out(prevalence, o);
  add_cohorts(prevalence, o);
  add_subset(prevalence, o);
  add_min_posts(prevalence, o);
  add_bin_width(prevalence, o, "Bin width of the within-subject density");
  add_workers(prevalence, o);

  auto* boot = app.add_subcommand("bootstrap", "Bootstrap the prevalence ratio and difference");
  add_out(boot, o);
  add_cohorts(boot, o);
  add_subset(boot, o);
  add_bootstrap(boot, o, true);
  add_workers(boot, o);

  auto* ks = app.add_subcommand("ks", "Two-sample Kolmogorov-Smirnov test");
  add_out(ks, o);
  ks->add_option("--depressed", o.depressed, "Corpus files of the depressed cohort")->check(CLI::ExistingFile);
  ks->add_option("--random", o.random, "Corpus files of the random-sample cohort")->check(CLI::ExistingFile);
  ks->add_option("--depressed-manifest", o.depressed_manifest, "Restrict the depressed cohort to a manifest")
      ->check(CLI::ExistingFile);
  ks->add_option("--random-manifest", o.random_manifest, "Restrict the random cohort to a manifest")
      ->check(CLI::ExistingFile);
  add_corpus_format(ks, o);
  add_subset(ks, o);
  add_min_posts(ks, o);
  ks->add_option("--values-a", o.values_a, "Compare numbers from a file instead")->check(CLI::ExistingFile);
  ks->add_option("--values-b", o.values_b, "Second number file")->check(CLI::ExistingFile);
  add_workers(ks, o);

  auto* per_schema = app.add_subcommand("per-schema", "Bootstrap and rank every schema");
  add_out(per_schema, o);
  add_cohorts(per_schema, o);
  add_subset(per_schema, o);
  add_bootstrap(per_schema, o, false);
  add_workers(per_schema, o);

  auto* sweep = app.add_subcommand("sweep", "KS statistic across minimum-posts thresholds");
  add_out(sweep, o);
  add_cohorts(sweep, o);
  add_subset(sweep, o);
  sweep->add_option("--thresholds", o.thresholds, "Ascending thresholds (default 25,50,...,300)")->delimiter(',');
  add_workers(sweep, o);

  auto* sentiment = app.add_subcommand("sentiment", "Compare sentiment score distributions");
  add_out(sentiment, o);
  sentiment->add_option("--values-a", o.values_a, "Scores in [-1, 1], one per line")->check(CLI::ExistingFile);
  sentiment->add_option("--values-b", o.values_b, "Scores in [-1, 1], one per line")->check(CLI::ExistingFile);
  sentiment->add_option("--lexicon-scores", o.lexicon_scores, "Scores of the schemata themselves")
      ->check(CLI::ExistingFile);
  add_bin_width(sentiment, o, "Histogram bin width over [-1, 1]");

  auto* report = app.add_subcommand("report", "Prevalence ratio and difference tables plus figure data");
  add_out(report, o);
  add_cohorts(report, o);
  add_bootstrap(report, o, false);
  add_min_posts(report, o);
  add_bin_width(report, o, "Bin width of the within-subject density");
  report->add_flag("--all", o.all, "Add lexicon statistics, the per-schema ranking and the threshold sweep");
  report->add_option("--thresholds", o.thresholds, "Sweep thresholds with --all (default 25,50,...,300)")
      ->delimiter(',');
  add_workers(report, o);

  if (argc <= 1) {
    err << app.help();
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "lexicon") cmd_lexicon(o, out);
    else if (sub == "ingest") cmd_ingest(o, out);
    else if (sub == "select") cmd_select(o, out);
    else if (sub == "sample") cmd_sample(o, out);
    else if (sub == "match") cmd_match(o, out);
    else if (sub == "prevalence") cmd_prevalence(o, out);
    else if (sub == "bootstrap") cmd_bootstrap(o, out);
    else if (sub == "ks") cmd_ks(o, out);
    else if (sub == "per-schema") cmd_per_schema(o, out);
    else if (sub == "sweep") cmd_sweep(o, out);
    else if (sub == "sentiment") cmd_sentiment(o, out);
    else if (sub == "report") cmd_report(o, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace cdscan
