#pragma once

// Synthetic corpora with known, planted schema prevalences.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdscan/corpus.hpp"
#include "cdscan/lexicon.hpp"
#include "cdscan/stats.hpp"

namespace cdscan::synthetic {

/// Words that are not tokens of any schema.
const std::vector<std::string>& filler_words();

/// Schemata whose own token sequence triggers no schema of another
/// category, so planting one raises exactly one category's prevalence.
std::vector<Schema> clean_schemata(std::span<const Schema> lexicon);

struct CohortPlan {
  std::string name;
  std::string user_prefix;
  std::size_t users = 100;
  std::size_t posts_per_user = 200;
  std::size_t min_posts_per_user = 0;  // if set, per-user counts vary in [min, posts_per_user]
  std::array<double, kCategoryCount> category_rates{};  // per retained post
  double retweet_fraction = 0.0;
  double non_english_fraction = 0.0;
  double keyword_fraction = 0.0;
};

struct TextOptions {
  std::size_t mean_filler = 16;
  double contraction_probability = 0.3;
  double decoration_probability = 0.2;  // hashtags, mentions, URLs, casing
};

/// Corpus records for one cohort. Planted categories are drawn
/// independently per retained post; excluded noise posts carry no plants.
std::vector<CorpusRecord> generate_cohort(const CohortPlan& plan, std::span<const Schema> lexicon,
                                          std::uint64_t seed, const TextOptions& text = {});

/// A post of roughly `tokens` words mixing filler with schema fragments,
/// for throughput and oracle tests.
std::string random_post(std::mt19937_64& rng, std::span<const Schema> lexicon, std::size_t tokens);

/// Match-level cohort: each post matches schema `schema` with probability
/// `rate`, independently.
CohortMatches bernoulli_cohort(std::string name, std::size_t users, std::size_t posts_per_user,
                               double rate, SchemaId schema, std::mt19937_64& rng);

/// Per-category post rates of a reference random-sample cohort and the
/// ratios by which a depressed cohort exceeds them, in Category order.
struct PlantedRates {
  std::array<double, kCategoryCount> random{};
  std::array<double, kCategoryCount> multiplier{};
};

const PlantedRates& reference_rates();

/// Depressed and random cohort plans built from reference_rates().
std::pair<CohortPlan, CohortPlan> study_plans(std::size_t users, std::size_t posts_per_user);

/// Expected "any schema" prevalence for independent category rates.
double union_rate(std::span<const double> rates);

}  // namespace cdscan::synthetic
