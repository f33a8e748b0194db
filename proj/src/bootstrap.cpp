#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "cdscan/stats.hpp"

namespace cdscan {
namespace {

constexpr double kNaN = EstimateSummary::kNaN;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Runs body(r) for r in [0, n) on up to `workers` threads. Each replicate
// writes only its own output slots, so scheduling never changes results.
template <typename Body>
void for_each_replicate(std::size_t n, unsigned workers, Body body) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    for (std::size_t r = 0; r < n; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([=] {
      for (std::size_t r = begin; r < end; ++r) body(r);
    });
  }
  for (auto& t : pool) t.join();
}

// Per-user post counts and sparse per-subset match counts.
struct UserCounts {
  std::vector<std::size_t> posts;
  std::vector<std::size_t> offsets;  // into entries, size users + 1
  std::vector<std::pair<std::uint32_t, std::size_t>> entries;  // (subset, matched)
  std::size_t total_posts = 0;
  std::vector<std::size_t> total_matched;  // per subset
};

UserCounts count_users(const CohortMatches& cohort, std::span<const SchemaMask> subsets) {
  UserCounts c;
  c.total_matched.assign(subsets.size(), 0);
  c.offsets.push_back(0);
  std::vector<std::size_t> scratch(subsets.size());
  for (const auto& u : cohort.users) {
    c.posts.push_back(u.n_posts);
    c.total_posts += u.n_posts;
    std::fill(scratch.begin(), scratch.end(), 0);
    for (const auto& m : u.matched) {
      for (std::size_t s = 0; s < subsets.size(); ++s) {
        if ((m & subsets[s]).any()) ++scratch[s];
      }
    }
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      if (scratch[s] == 0) continue;
      c.entries.emplace_back(static_cast<std::uint32_t>(s), scratch[s]);
      c.total_matched[s] += scratch[s];
    }
    c.offsets.push_back(c.entries.size());
  }
  return c;
}

// Draws users with replacement and accumulates their counts.
std::size_t resample_users(const UserCounts& c, std::mt19937_64& rng, std::vector<std::size_t>& matched) {
  std::fill(matched.begin(), matched.end(), 0);
  const std::size_t n = c.posts.size();
  if (n == 0) return 0;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t posts = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto u = pick(rng);
    posts += c.posts[u];
    for (auto e = c.offsets[u]; e < c.offsets[u + 1]; ++e) matched[c.entries[e].first] += c.entries[e].second;
  }
  return posts;
}

struct ReplicateValue {
  double ratio = kNaN;       // NaN when undefined
  double difference = kNaN;  // NaN when a cohort resample has no posts
};

ReplicateValue replicate_value(std::size_t matched_d, std::size_t posts_d, std::size_t matched_r,
                               std::size_t posts_r) {
  ReplicateValue v;
  if (posts_d == 0 || posts_r == 0) return v;
  const double pd = static_cast<double>(matched_d) / static_cast<double>(posts_d);
  const double pr = static_cast<double>(matched_r) / static_cast<double>(posts_r);
  v.difference = prevalence_difference(pd, pr);
  if (const auto ratio = prevalence_ratio(pd, pr)) v.ratio = *ratio;
  return v;
}

BootstrapResult collect(const std::vector<ReplicateValue>& values, const BootstrapConfig& config,
                        const ReplicateValue& point) {
  BootstrapResult out;
  for (const auto& v : values) {
    if (!std::isnan(v.ratio)) out.ratio_replicates.push_back(v.ratio);
    if (!std::isnan(v.difference)) out.difference_replicates.push_back(v.difference);
  }
  auto opt = [](double x) { return std::isnan(x) ? std::nullopt : std::optional<double>(x); };
  out.ratio = summarize_replicates(out.ratio_replicates, config.replicates, config.seed, opt(point.ratio));
  out.difference =
      summarize_replicates(out.difference_replicates, config.replicates, config.seed, opt(point.difference));
  return out;
}

void check_config(const BootstrapConfig& config) {
  if (config.replicates == 0) throw std::invalid_argument("bootstrap needs at least one replicate");
}

BootstrapResult bootstrap_schemata(const CohortMatches& depressed, const CohortMatches& random,
                                   std::span<const SchemaId> subset, const BootstrapConfig& config) {
  const SchemaMask universe = make_mask(subset);

  // Distinct match masks restricted to the subset, with multiplicities.
  struct Histogram {
    std::vector<std::pair<SchemaMask, std::size_t>> masks;
    std::size_t posts = 0;
  };
  auto histogram = [&](const CohortMatches& c) {
    std::unordered_map<SchemaMask, std::size_t> counts;
    Histogram h;
    for (const auto& u : c.users) {
      h.posts += u.n_posts;
      for (const auto& m : u.matched) {
        const auto restricted = m & universe;
        if (restricted.any()) ++counts[restricted];
      }
    }
    h.masks.assign(counts.begin(), counts.end());
    return h;
  };
  const Histogram hd = histogram(depressed);
  const Histogram hr = histogram(random);
  auto matched = [](const Histogram& h, const SchemaMask& mask) {
    std::size_t k = 0;
    for (const auto& [m, n] : h.masks) {
      if ((m & mask).any()) k += n;
    }
    return k;
  };

  const ReplicateValue point = replicate_value(matched(hd, universe), hd.posts, matched(hr, universe), hr.posts);
  std::vector<ReplicateValue> values(config.replicates);
  for_each_replicate(config.replicates, config.workers, [&](std::size_t r) {
    if (subset.empty()) {
      values[r] = replicate_value(0, hd.posts, 0, hr.posts);
      return;
    }
    std::mt19937_64 rng(replicate_seed(config.seed, r));
    std::uniform_int_distribution<std::size_t> pick(0, subset.size() - 1);
    SchemaMask drawn;
    for (std::size_t k = 0; k < subset.size(); ++k) drawn.set(subset[pick(rng)]);
    values[r] = replicate_value(matched(hd, drawn), hd.posts, matched(hr, drawn), hr.posts);
  });
  return collect(values, config, point);
}

}  // namespace

std::string_view axis_name(ResampleAxis axis) {
  return axis == ResampleAxis::users ? "users" : "schemata";
}

std::optional<ResampleAxis> parse_axis(std::string_view name) {
  if (name == "users") return ResampleAxis::users;
  if (name == "schemata" || name == "schemas") return ResampleAxis::schemata;
  return std::nullopt;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

EstimateSummary summarize_replicates(std::vector<double>& values, std::size_t replicates,
                                     std::uint64_t seed, std::optional<double> point) {
  std::sort(values.begin(), values.end());
  EstimateSummary s;
  s.point = point;
  s.replicates = replicates;
  s.effective_replicates = values.size();
  s.seed = seed;
  s.median = quantile_sorted(values, 0.5);
  s.ci_low = quantile_sorted(values, 0.025);
  s.ci_high = quantile_sorted(values, 0.975);
  return s;
}

std::vector<BootstrapResult> bootstrap_prevalence_users(const CohortMatches& depressed,
                                                        const CohortMatches& random,
                                                        std::span<const SchemaMask> subsets,
                                                        const BootstrapConfig& config) {
  check_config(config);
  const UserCounts cd = count_users(depressed, subsets);
  const UserCounts cr = count_users(random, subsets);
  const std::size_t S = subsets.size();

  std::vector<ReplicateValue> values(config.replicates * S);
  for_each_replicate(config.replicates, config.workers, [&](std::size_t r) {
    std::mt19937_64 rng(replicate_seed(config.seed, r));
    std::vector<std::size_t> md(S), mr(S);
    const auto pd = resample_users(cd, rng, md);
    const auto pr = resample_users(cr, rng, mr);
    for (std::size_t s = 0; s < S; ++s) values[r * S + s] = replicate_value(md[s], pd, mr[s], pr);
  });

  std::vector<BootstrapResult> out;
  out.reserve(S);
  std::vector<ReplicateValue> column(config.replicates);
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t r = 0; r < config.replicates; ++r) column[r] = values[r * S + s];
    const auto point = replicate_value(cd.total_matched[s], cd.total_posts, cr.total_matched[s], cr.total_posts);
    out.push_back(collect(column, config, point));
  }
  return out;
}

BootstrapResult bootstrap_prevalence(const CohortMatches& depressed, const CohortMatches& random,
                                     std::span<const SchemaId> subset, const BootstrapConfig& config) {
  check_config(config);
  if (config.axis == ResampleAxis::schemata) return bootstrap_schemata(depressed, random, subset, config);
  const SchemaMask mask = make_mask(subset);
  return std::move(bootstrap_prevalence_users(depressed, random, std::span(&mask, 1), config).front());
}

EstimateSummary bootstrap(const CohortMatches& depressed, const CohortMatches& random,
                          std::span<const SchemaId> subset, Statistic statistic,
                          const BootstrapConfig& config) {
  auto result = bootstrap_prevalence(depressed, random, subset, config);
  return statistic == Statistic::ratio ? result.ratio : result.difference;
}

Significance significance(const EstimateSummary& s, double reference) {
  if (!s.defined()) return Significance::none;
  if (s.ci_low > reference) return Significance::higher;
  if (s.ci_high < reference) return Significance::lower;
  return Significance::none;
}

std::string_view significance_marker(Significance s) {
  switch (s) {
    case Significance::higher: return ">>";
    case Significance::lower: return "<<";
    case Significance::none: return "";
  }
  return "";
}

std::string_view observation_name(SchemaObservation o) {
  switch (o) {
    case SchemaObservation::observed: return "observed";
    case SchemaObservation::undefined_ratio: return "undefined";
    case SchemaObservation::not_observed: return "not-observed";
  }
  return "observed";
}

std::vector<SchemaRatio> per_schema_prevalence_ratios(const CohortMatches& depressed,
                                                      const CohortMatches& random,
                                                      std::span<const Schema> schemata,
                                                      const BootstrapConfig& config) {
  std::vector<SchemaMask> masks;
  masks.reserve(schemata.size());
  for (const auto& s : schemata) masks.push_back(make_mask(std::span(&s.id, 1)));

  BootstrapConfig users_config = config;
  users_config.axis = ResampleAxis::users;
  const auto results = bootstrap_prevalence_users(depressed, random, masks, users_config);

  std::vector<SchemaRatio> out;
  out.reserve(schemata.size());
  for (std::size_t i = 0; i < schemata.size(); ++i) {
    SchemaRatio sr;
    sr.id = schemata[i].id;
    sr.p_depressed = cohort_prevalence(depressed, masks[i]);
    sr.p_random = cohort_prevalence(random, masks[i]);
    if (sr.p_depressed == 0.0 && sr.p_random == 0.0) {
      sr.status = SchemaObservation::not_observed;
    } else if (sr.p_random == 0.0) {
      sr.status = SchemaObservation::undefined_ratio;
      sr.difference = results[i].difference;
    } else {
      sr.status = SchemaObservation::observed;
      sr.ratio = results[i].ratio;
      sr.difference = results[i].difference;
    }
    out.push_back(std::move(sr));
  }

  auto rank = [](const SchemaRatio& s) {
    switch (s.status) {
      case SchemaObservation::observed: return 0;
      case SchemaObservation::undefined_ratio: return 1;
      case SchemaObservation::not_observed: return 2;
    }
    return 2;
  };
  std::stable_sort(out.begin(), out.end(), [&](const SchemaRatio& a, const SchemaRatio& b) {
    if (rank(a) != rank(b)) return rank(a) < rank(b);
    if (rank(a) == 0) {
      const double ma = a.ratio->defined() ? a.ratio->median : -1.0;
      const double mb = b.ratio->defined() ? b.ratio->median : -1.0;
      if (ma != mb) return ma > mb;
    }
    return a.id < b.id;
  });
  return out;
}

}  // namespace cdscan
