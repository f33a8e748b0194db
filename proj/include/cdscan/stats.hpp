#pragma once

// Prevalence estimators and the tests built on them.
//
// A cohort is summarised as per-user timelines: how many non-excluded posts
// each user wrote and, for every post that matched at least one schema, the
// set of matched schema ids as a bit mask. Every estimator below recomputes
// the binary match indicator against a schema subset by intersecting masks.

#include <bitset>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cdscan/lexicon.hpp"
#include "cdscan/matcher.hpp"

namespace cdscan {

inline constexpr std::size_t kMaxSchemata = 256;
using SchemaMask = std::bitset<kMaxSchemata>;

/// Throws std::out_of_range for ids >= kMaxSchemata.
SchemaMask make_mask(std::span<const SchemaId> ids);
SchemaMask make_mask(std::span<const Schema> schemata);
std::vector<SchemaId> mask_ids(const SchemaMask& mask);
std::vector<SchemaId> schema_ids(std::span<const Schema> schemata);

struct UserTimeline {
  std::string user_id;
  std::size_t n_posts = 0;           // non-excluded posts
  std::vector<SchemaMask> matched;   // one entry per post with a match
};

struct CohortMatches {
  std::string name;
  std::vector<UserTimeline> users;   // sorted by user_id

  std::size_t total_posts() const;
};

/// Collects match records into per-user timelines. Users are kept in
/// user_id order; users with zero posts may be added with add_user().
class CohortBuilder {
 public:
  explicit CohortBuilder(std::string name) : name_(std::move(name)) {}
  void add_user(std::string_view user_id);
  void add(std::string_view user_id, const MatchRecord& record);
  void add(std::string_view user_id, std::span<const SchemaId> matched);
  CohortMatches build() &&;

 private:
  UserTimeline& user(std::string_view user_id);
  std::string name_;
  std::vector<UserTimeline> users_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Prevalence

struct UserPrevalence {
  std::string user_id;
  std::size_t n_posts = 0;
  std::size_t n_matched = 0;
  double prevalence = 0.0;
};

/// Within-subject prevalence for users with at least `min_posts` posts.
/// Throws std::invalid_argument when min_posts == 0.
std::vector<UserPrevalence> within_subject_prevalences(const CohortMatches& cohort,
                                                       std::size_t min_posts,
                                                       const SchemaMask& subset);
std::vector<UserPrevalence> within_subject_prevalences(const CohortMatches& cohort,
                                                       std::size_t min_posts = 150);

/// Fraction of the cohort's posts matching any schema in `subset`.
/// Throws DataError when the cohort has no posts.
double cohort_prevalence(const CohortMatches& cohort, const SchemaMask& subset);

/// p_d / p_r, or nullopt when p_r == 0.
std::optional<double> prevalence_ratio(double p_d, double p_r);
std::optional<double> prevalence_ratio(const CohortMatches& depressed, const CohortMatches& random,
                                       const SchemaMask& subset);

/// (p_d - p_r) * 100, in percentage points.
double prevalence_difference(double p_d, double p_r);
double prevalence_difference(const CohortMatches& depressed, const CohortMatches& random,
                             const SchemaMask& subset);

// ---------------------------------------------------------------------------
// Bootstrap

enum class ResampleAxis { users, schemata };

std::string_view axis_name(ResampleAxis axis);
std::optional<ResampleAxis> parse_axis(std::string_view name);

struct BootstrapConfig {
  std::size_t replicates = 10000;
  ResampleAxis axis = ResampleAxis::users;
  std::uint64_t seed = 0;
  unsigned workers = 1;  // affects speed only
};

struct EstimateSummary {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::optional<double> point;     // statistic on the full data
  double median = kNaN;
  double ci_low = kNaN;            // 2.5th percentile
  double ci_high = kNaN;           // 97.5th percentile
  std::size_t replicates = 0;
  std::size_t effective_replicates = 0;
  std::uint64_t seed = 0;

  bool defined() const { return effective_replicates > 0; }
  /// At least half of the replicates produced a value.
  bool reliable() const { return 2 * effective_replicates >= replicates && replicates > 0; }
};

/// Empirical quantile of sorted data with linear interpolation between
/// order statistics (position (n - 1) * q).
double quantile_sorted(std::span<const double> sorted, double q);

/// Median and 95% percentile interval of `values` (sorted in place).
EstimateSummary summarize_replicates(std::vector<double>& values, std::size_t replicates,
                                     std::uint64_t seed, std::optional<double> point);

struct BootstrapResult {
  EstimateSummary ratio;
  EstimateSummary difference;
  std::vector<double> ratio_replicates;       // defined values, sorted
  std::vector<double> difference_replicates;  // defined values, sorted
};

/// Bootstraps the prevalence ratio and difference between two cohorts for
/// one schema subset. axis=users resamples both user sets independently
/// with replacement; axis=schemata resamples the subset itself. Replicates
/// whose ratio is undefined are skipped and counted.
BootstrapResult bootstrap_prevalence(const CohortMatches& depressed, const CohortMatches& random,
                                     std::span<const SchemaId> subset,
                                     const BootstrapConfig& config);

/// User-axis bootstrap of many subsets sharing the same resampled cohorts.
std::vector<BootstrapResult> bootstrap_prevalence_users(const CohortMatches& depressed,
                                                        const CohortMatches& random,
                                                        std::span<const SchemaMask> subsets,
                                                        const BootstrapConfig& config);

enum class Statistic { ratio, difference };

EstimateSummary bootstrap(const CohortMatches& depressed, const CohortMatches& random,
                          std::span<const SchemaId> subset, Statistic statistic,
                          const BootstrapConfig& config);

/// Seed for replicate `index`, independent of how replicates are scheduled.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index);

enum class Significance { none, higher, lower };

/// Whether the interval lies entirely above or below `reference`.
Significance significance(const EstimateSummary& s, double reference);

/// ">>", "<<" or "".
std::string_view significance_marker(Significance s);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Survival function of the Kolmogorov distribution, Q(lambda).
double kolmogorov_survival(double lambda);

/// Two-sample test; p-value from the asymptotic Kolmogorov distribution at
/// sqrt(n_a * n_b / (n_a + n_b)) * D. Throws std::invalid_argument on an
/// empty sample.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Exact permutation p-value of the two-sample statistic: the share of all
/// C(n_a + n_b, n_a) relabellings of the pooled sample whose statistic is
/// at least the observed one. Ties are handled. Costs O(n_a * n_b).
double ks_exact_p_value(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Per-schema ranking

enum class SchemaObservation {
  observed,        // ratio defined
  undefined_ratio, // seen only in the depressed cohort
  not_observed,    // seen in neither cohort
};

std::string_view observation_name(SchemaObservation o);

struct SchemaRatio {
  SchemaId id = 0;
  SchemaObservation status = SchemaObservation::not_observed;
  double p_depressed = 0.0;
  double p_random = 0.0;
  std::optional<EstimateSummary> ratio;      // empty unless observed
  std::optional<EstimateSummary> difference; // empty when not observed
};

/// Bootstraps each schema as a singleton subset (always over users) and
/// ranks observed schemata by median ratio, highest first. Undefined and
/// unobserved schemata follow in id order.
std::vector<SchemaRatio> per_schema_prevalence_ratios(const CohortMatches& depressed,
                                                      const CohortMatches& random,
                                                      std::span<const Schema> schemata,
                                                      const BootstrapConfig& config);

// ---------------------------------------------------------------------------
// Threshold sweep

struct SweepPoint {
  std::size_t threshold = 0;
  KsResult ks;
};

/// KS comparison of within-subject prevalence distributions for each
/// minimum-posts threshold. Thresholds must be positive and strictly
/// ascending (std::invalid_argument); a threshold that leaves a cohort
/// without users throws DataError.
std::vector<SweepPoint> threshold_sweep(const CohortMatches& depressed, const CohortMatches& random,
                                        std::span<const std::size_t> thresholds,
                                        const SchemaMask& subset);

// ---------------------------------------------------------------------------
// Histograms and sentiment

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  double bin_width = 0.05;
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double bin_low(std::size_t i) const { return lo + bin_width * static_cast<double>(i); }
  /// Probability density per bin (integrates to 1 when total > 0).
  std::vector<double> density() const;
};

/// Values outside [lo, hi] throw std::invalid_argument; hi falls in the
/// last bin.
Histogram make_histogram(std::span<const double> values, double lo, double hi, double bin_width);

struct ScoreSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double zero_fraction = 0.0;
};

ScoreSummary summarize_scores(std::span<const double> scores);

struct SentimentComparison {
  Histogram a;
  Histogram b;
  KsResult ks;
  ScoreSummary summary_a;
  ScoreSummary summary_b;
};

/// Aligned histograms over [-1, 1] plus a KS test. Scores outside [-1, 1]
/// throw std::invalid_argument.
SentimentComparison sentiment_distribution_compare(std::span<const double> scores_a,
                                                   std::span<const double> scores_b,
                                                   double bin_width = 0.05);

}  // namespace cdscan
