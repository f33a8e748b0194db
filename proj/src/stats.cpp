#include "cdscan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cdscan/error.hpp"

namespace cdscan {
namespace {

SchemaMask full_mask() { return SchemaMask{}.set(); }

std::size_t matched_count(const UserTimeline& u, const SchemaMask& subset) {
  return static_cast<std::size_t>(std::count_if(u.matched.begin(), u.matched.end(),
                                                [&](const SchemaMask& m) { return (m & subset).any(); }));
}

}  // namespace

SchemaMask make_mask(std::span<const SchemaId> ids) {
  SchemaMask m;
  for (const auto id : ids) {
    if (id >= kMaxSchemata) throw std::out_of_range("schema id " + std::to_string(id) + " exceeds mask width");
    m.set(id);
  }
  return m;
}

SchemaMask make_mask(std::span<const Schema> schemata) {
  const auto ids = schema_ids(schemata);
  return make_mask(ids);
}

std::vector<SchemaId> mask_ids(const SchemaMask& mask) {
  std::vector<SchemaId> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.test(i)) out.push_back(static_cast<SchemaId>(i));
  }
  return out;
}

std::vector<SchemaId> schema_ids(std::span<const Schema> schemata) {
  std::vector<SchemaId> ids;
  ids.reserve(schemata.size());
  for (const auto& s : schemata) ids.push_back(s.id);
  return ids;
}

std::size_t CohortMatches::total_posts() const {
  return std::accumulate(users.begin(), users.end(), std::size_t{0},
                         [](std::size_t acc, const UserTimeline& u) { return acc + u.n_posts; });
}

UserTimeline& CohortBuilder::user(std::string_view user_id) {
  // Records usually arrive grouped by user, so check the last one first.
  if (!users_.empty() && users_.back().user_id == user_id) return users_.back();
  const auto [it, inserted] = index_.try_emplace(std::string(user_id), users_.size());
  if (!inserted) return users_[it->second];
  users_.push_back(UserTimeline{std::string(user_id), 0, {}});
  return users_.back();
}

void CohortBuilder::add_user(std::string_view user_id) { user(user_id); }

void CohortBuilder::add(std::string_view user_id, const MatchRecord& record) {
  add(user_id, record.matched_schema_ids);
}

void CohortBuilder::add(std::string_view user_id, std::span<const SchemaId> matched) {
  auto& u = user(user_id);
  ++u.n_posts;
  if (!matched.empty()) u.matched.push_back(make_mask(matched));
}

CohortMatches CohortBuilder::build() && {
  CohortMatches c;
  c.name = std::move(name_);
  c.users = std::move(users_);
  std::sort(c.users.begin(), c.users.end(),
            [](const UserTimeline& a, const UserTimeline& b) { return a.user_id < b.user_id; });
  index_.clear();
  return c;
}

std::vector<UserPrevalence> within_subject_prevalences(const CohortMatches& cohort,
                                                       std::size_t min_posts,
                                                       const SchemaMask& subset) {
  if (min_posts == 0) throw std::invalid_argument("min_posts must be at least 1");
  std::vector<UserPrevalence> out;
  for (const auto& u : cohort.users) {
    if (u.n_posts < min_posts) continue;
    const auto k = matched_count(u, subset);
    out.push_back({u.user_id, u.n_posts, k, static_cast<double>(k) / static_cast<double>(u.n_posts)});
  }
  return out;
}

std::vector<UserPrevalence> within_subject_prevalences(const CohortMatches& cohort,
                                                       std::size_t min_posts) {
  return within_subject_prevalences(cohort, min_posts, full_mask());
}

double cohort_prevalence(const CohortMatches& cohort, const SchemaMask& subset) {
  std::size_t posts = 0;
  std::size_t matched = 0;
  for (const auto& u : cohort.users) {
    posts += u.n_posts;
    matched += matched_count(u, subset);
  }
  if (posts == 0) throw DataError("cohort '" + cohort.name + "' has no posts; prevalence undefined");
  return static_cast<double>(matched) / static_cast<double>(posts);
}

std::optional<double> prevalence_ratio(double p_d, double p_r) {
  if (p_r == 0.0) return std::nullopt;
  return p_d / p_r;
}

std::optional<double> prevalence_ratio(const CohortMatches& depressed, const CohortMatches& random,
                                       const SchemaMask& subset) {
  return prevalence_ratio(cohort_prevalence(depressed, subset), cohort_prevalence(random, subset));
}

double prevalence_difference(double p_d, double p_r) { return (p_d - p_r) * 100.0; }

double prevalence_difference(const CohortMatches& depressed, const CohortMatches& random,
                             const SchemaMask& subset) {
  return prevalence_difference(cohort_prevalence(depressed, subset), cohort_prevalence(random, subset));
}

std::vector<SweepPoint> threshold_sweep(const CohortMatches& depressed, const CohortMatches& random,
                                        std::span<const std::size_t> thresholds,
                                        const SchemaMask& subset) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (thresholds[i] == 0) throw std::invalid_argument("sweep thresholds must be positive");
    if (i > 0 && thresholds[i] <= thresholds[i - 1])
      throw std::invalid_argument("sweep thresholds must be strictly ascending");
  }
  auto values = [&](const CohortMatches& c, std::size_t t) {
    std::vector<double> v;
    for (const auto& up : within_subject_prevalences(c, t, subset)) v.push_back(up.prevalence);
    return v;
  };
  std::vector<SweepPoint> out;
  for (const auto t : thresholds) {
    const auto a = values(depressed, t);
    const auto b = values(random, t);
    if (a.empty() || b.empty())
      throw DataError("threshold " + std::to_string(t) + " leaves an empty prevalence distribution");
    out.push_back({t, ks_two_sample(a, b)});
  }
  return out;
}

std::vector<double> Histogram::density() const {
  std::vector<double> d(counts.size(), 0.0);
  if (total == 0) return d;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d[i] = static_cast<double>(counts[i]) / (static_cast<double>(total) * bin_width);
  }
  return d;
}

Histogram make_histogram(std::span<const double> values, double lo, double hi, double bin_width) {
  if (!(hi > lo) || !(bin_width > 0.0)) throw std::invalid_argument("bad histogram range or bin width");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.bin_width = bin_width;
  const auto bins = static_cast<std::size_t>(std::max(1.0, std::round((hi - lo) / bin_width)));
  h.counts.assign(bins, 0);
  for (const double x : values) {
    if (!(x >= lo && x <= hi)) throw std::invalid_argument("histogram value out of range");
    auto idx = static_cast<std::size_t>(std::floor((x - lo) / bin_width + 1e-9));
    idx = std::min(idx, bins - 1);
    ++h.counts[idx];
    ++h.total;
  }
  return h;
}

ScoreSummary summarize_scores(std::span<const double> scores) {
  ScoreSummary s;
  s.n = scores.size();
  if (scores.empty()) return s;
  s.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(s.n);
  s.zero_fraction = static_cast<double>(std::count(scores.begin(), scores.end(), 0.0)) /
                    static_cast<double>(s.n);
  return s;
}

SentimentComparison sentiment_distribution_compare(std::span<const double> scores_a,
                                                   std::span<const double> scores_b,
                                                   double bin_width) {
  SentimentComparison out;
  out.a = make_histogram(scores_a, -1.0, 1.0, bin_width);
  out.b = make_histogram(scores_b, -1.0, 1.0, bin_width);
  out.ks = ks_two_sample(scores_a, scores_b);
  out.summary_a = summarize_scores(scores_a);
  out.summary_b = summarize_scores(scores_b);
  return out;
}

}  // namespace cdscan
