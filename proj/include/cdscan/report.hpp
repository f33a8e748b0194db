#pragma once

// Study orchestration and tab-separated report rendering.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdscan/lexicon.hpp"
#include "cdscan/matcher.hpp"
#include "cdscan/stats.hpp"

namespace cdscan {

struct StudyConfig {
  BootstrapConfig bootstrap;            // axis is ignored; both axes are run
  std::size_t min_posts = 150;
  std::vector<std::size_t> thresholds;  // sweep; empty skips it
  std::size_t density_bins = 50;        // within-subject histogram over [0, 1]
  bool per_schema = true;
};

/// One subset row of the PR/PD tables: all schemata or one category.
struct SubsetEstimates {
  std::string label;
  std::optional<Category> category;
  std::size_t schemata = 0;
  std::size_t fpp_free_schemata = 0;
  double p_depressed = 0.0;
  double p_random = 0.0;
  BootstrapResult all;                    // users resampled, full subset
  std::optional<BootstrapResult> no_fpp;  // users resampled, FPP-free subset
  BootstrapResult schemata_axis;          // schemata resampled
};

struct Study {
  std::vector<SubsetEstimates> rows;  // "All CDS" first, then categories
  std::vector<SchemaRatio> per_schema;
  std::vector<UserPrevalence> within_depressed;
  std::vector<UserPrevalence> within_random;
  std::optional<KsResult> within_ks;
  std::vector<SweepPoint> sweep;
  double zero_users_depressed = 0.0;  // share of eligible users without any match
  double zero_users_random = 0.0;
};

Study run_study(const CohortMatches& depressed, const CohortMatches& random,
                std::span<const Schema> lexicon, const StudyConfig& config);

/// Estimates for one subset under the users axis and the schemata axis.
SubsetEstimates estimate_subset(const CohortMatches& depressed, const CohortMatches& random,
                                std::string label, std::optional<Category> category,
                                std::span<const Schema> subset, const BootstrapConfig& config);

// Renderers. `config_line` is written first as a '#' comment.

std::string render_lexicon(std::span<const Schema> lexicon);
std::string render_lexicon_stats(std::span<const Schema> lexicon, const Study* study, const std::string& config_line);
std::string render_ratio_table(const Study& study, const std::string& config_line);
std::string render_difference_table(const Study& study, const std::string& config_line);
std::string render_raw_prevalence(const Study& study, const std::string& config_line);
std::string render_per_schema(const Study& study, std::span<const Schema> lexicon, const std::string& config_line);
std::string render_top_schemata(const Study& study, std::span<const Schema> lexicon, std::size_t top,
                                const std::string& config_line);
std::string render_within_subject(const Study& study, const std::string& config_line);
std::string render_within_density(const Study& study, std::size_t bins, const std::string& config_line);
std::string render_ks(const KsResult& ks, const std::string& label, const std::string& config_line);
std::string render_sweep(std::span<const SweepPoint> sweep, const std::string& config_line);
std::string render_replicate_density(std::span<const double> replicates, std::size_t bins,
                                     const std::string& config_line);
std::string render_bootstrap(const std::vector<std::pair<std::string, BootstrapResult>>& rows,
                             const std::string& config_line);
std::string render_matches(std::span<const MatchRecord> records);

/// "1.186" or "/" when undefined.
std::string format_estimate(const EstimateSummary& s, double value);

}  // namespace cdscan
