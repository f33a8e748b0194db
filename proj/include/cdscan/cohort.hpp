#pragma once

// Corpus ingestion, cohort selection and cohort manifests.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdscan/corpus.hpp"
#include "cdscan/matcher.hpp"
#include "cdscan/stats.hpp"
#include "cdscan/textnorm.hpp"

namespace cdscan {

struct UserRecord {
  std::string user_id;
  std::optional<Timestamp> account_created_at;
  std::size_t post_count = 0;  // retained (non-excluded) posts
  bool has_location = false;
  std::vector<std::string> sources;
};

struct UserPosts {
  std::string user_id;
  std::vector<Post> posts;  // oldest first
};

struct IngestOptions {
  CorpusFormat format = CorpusFormat::jsonl;
  std::size_t max_timeline = 3200;  // most recent posts kept per user; 0 keeps all
  double max_malformed_rate = 0.10;
};

struct IngestReport {
  std::size_t lines = 0;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
  std::size_t truncated = 0;
  std::size_t ingested = 0;  // after deduplication and truncation
  std::array<std::size_t, kExclusionKinds> by_reason{};

  std::size_t retained() const { return by_reason[0]; }
};

struct IngestResult {
  std::vector<UserPosts> users;      // sorted by user_id
  std::vector<UserRecord> records;   // parallel to users
  IngestReport report;
  std::vector<std::string> malformed_samples;  // "file:line: reason", first few
};

/// Reads, deduplicates (first occurrence of a post_id per user wins),
/// truncates, filters and normalizes corpus files. Throws DataError for an
/// unreadable file or when more than max_malformed_rate of lines are bad.
IngestResult ingest_corpus(std::span<const std::filesystem::path> paths, const IngestOptions& options = {});

/// Matches every retained post and groups the records by user. Users whose
/// posts were all excluded still appear with zero posts.
CohortMatches match_cohort(std::string name, const IngestResult& corpus, const PatternIndex& index,
                           unsigned workers = 1);

/// Keeps only the listed users.
IngestResult restrict_users(IngestResult corpus, std::span<const std::string> users);

struct DiagnosisStatement {
  std::string user_id;
  std::string post_id;
  Timestamp created_at{};
  std::string text;
};

struct SelectionResult {
  std::vector<std::string> users;  // sorted
  std::vector<DiagnosisStatement> statements;
};

/// Users with at least one diagnosis statement among posts that are not
/// retweets and are in English. The statements are returned for review.
SelectionResult select_depressed_users(const IngestResult& corpus);

struct MonthBin {
  int year = 0;
  unsigned month = 0;
  std::size_t reference = 0;
  std::size_t target = 0;
  std::size_t available = 0;
  std::size_t taken = 0;

  std::size_t deficit() const { return target - taken; }
};

struct SampleResult {
  std::vector<std::string> users;  // sorted
  std::vector<MonthBin> bins;      // chronological
  std::size_t dropped_overlap = 0;
  std::size_t dropped_undated = 0;
  std::size_t dropped_no_location = 0;
  std::size_t reference_undated = 0;

  std::size_t total_deficit() const;
};

struct SampleOptions {
  std::size_t target_size = 0;  // 0 means the dated reference size
  std::uint64_t seed = 0;
  bool require_location = false;
};

/// Samples candidates so their account-creation month histogram is
/// proportional to the reference's (largest-remainder allocation). Months
/// short of candidates contribute all they have. Candidates also present in
/// the reference are dropped. Throws DataError for an empty reference.
SampleResult date_matched_sample(std::span<const UserRecord> candidates,
                                 std::span<const UserRecord> reference, const SampleOptions& options);

// ---------------------------------------------------------------------------
// Manifests and user tables

struct CohortManifest {
  std::string name;                // "depressed" or "random"
  std::vector<std::string> users;  // sorted, unique
  std::array<std::size_t, kExclusionKinds> exclusions{};
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sources;
  std::string created_at;

  /// SHA-256 over everything except created_at.
  std::string digest() const;
};

std::string format_manifest(const CohortManifest& m);

/// Parses and verifies the stored digest. Throws DataError.
CohortManifest parse_manifest(std::string_view text);

void write_manifest(const CohortManifest& m, const std::filesystem::path& path);
CohortManifest read_manifest(const std::filesystem::path& path);

/// Throws DataError when the two cohorts share a user.
void check_disjoint(const CohortManifest& a, const CohortManifest& b);

std::string format_user_records(std::span<const UserRecord> records);
std::vector<UserRecord> read_user_records(const std::filesystem::path& path);

}  // namespace cdscan
