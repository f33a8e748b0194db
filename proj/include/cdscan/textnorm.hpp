#pragma once

// Text normalization shared by posts and schemata: contraction expansion,
// tokenization, corpus exclusion filters and the diagnosis-statement rule.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cdscan {

using Timestamp = std::chrono::sys_seconds;

enum class Exclusion : std::uint8_t {
  none,
  retweet,
  non_english,
  keyword_diagnos_depress,
};

inline constexpr std::size_t kExclusionKinds = 4;

/// "none", "retweet", "non-english", "keyword-diagnos-depress".
std::string_view exclusion_name(Exclusion e);

struct Post {
  std::string post_id;
  std::string user_id;
  Timestamp created_at{};
  std::string raw_text;
  std::string lang = "en";
  bool is_retweet = false;
  std::optional<std::vector<std::string>> tokens;  // set once normalized
  Exclusion excluded = Exclusion::none;
};

/// Expands English contractions ("won't" -> "will not", "she's" -> "she is").
/// Curly apostrophes are treated as ASCII ones. Unmatched text is kept as is.
std::string expand_contractions(std::string_view text);

/// Case-folded word tokens. URLs and @-mentions are removed, '#' is dropped
/// from hashtags, and punctuation, symbols and emoji act as separators.
/// Expects contraction-expanded input.
std::vector<std::string> tokenize(std::string_view text);

/// Same as tokenize() but reuses `out`'s storage.
void tokenize_into(std::string_view text, std::vector<std::string>& out);

/// tokenize(expand_contractions(text)).
std::vector<std::string> normalize_text(std::string_view text);

/// Exclusion reason for a single post; retweet takes precedence over
/// language, language over the keyword rule.
Exclusion exclusion_reason(const Post& post);

/// Marks every post with its exclusion reason. Never drops records.
std::vector<Post> apply_exclusions(std::vector<Post> posts);

/// Fills `tokens` for non-excluded posts and clears them for excluded ones.
void normalize_post(Post& post);

/// True when the tokens contain "i", then a token starting with "diagnos",
/// then one starting with "depres", in that order with any tokens between.
bool detect_diagnosis_statement(std::string_view text);
bool is_diagnosis_sequence(std::span<const std::string> tokens);

/// Lower-cased raw text contains "diagnos" or "depress".
bool contains_diagnosis_keyword(std::string_view raw_text);

}  // namespace cdscan
