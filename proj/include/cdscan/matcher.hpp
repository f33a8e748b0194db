#pragma once

// Simultaneous matching of schema token sequences against post tokens.
//
// Patterns are compiled into an Aho-Corasick automaton over token symbols
// and flattened into a dense transition table, so a post is scanned in one
// pass whose cost depends on its length and not on the number of patterns.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdscan/lexicon.hpp"
#include "cdscan/textnorm.hpp"

namespace cdscan {

struct MatchRecord {
  std::string post_id;
  std::vector<SchemaId> matched_schema_ids;  // ascending, unique
  bool f_c = false;
  std::array<bool, kCategoryCount> per_category{};
};

class PatternIndex {
 public:
  /// An index that matches nothing.
  PatternIndex();

  /// Throws LexiconError on duplicate ids or on two schemata sharing both
  /// token sequence and category. Identical token sequences in different
  /// categories are allowed.
  explicit PatternIndex(std::span<const Schema> schemata);

  std::size_t pattern_count() const { return pattern_count_; }
  std::size_t state_count() const { return parent_.size(); }
  std::size_t vocabulary_size() const { return vocab_.size(); }

  /// Appends ids of all schemata occurring contiguously in `tokens` to
  /// `out` (cleared first), ascending and without duplicates.
  void scan(std::span<const std::string> tokens, std::vector<SchemaId>& out) const;

  MatchRecord match(std::span<const std::string> tokens, std::string_view post_id = {}) const;

  std::optional<Category> category_of(SchemaId id) const;

  /// Token sequences reconstructed from the trie, paired with their ids and
  /// sorted by id.
  std::vector<std::pair<std::vector<std::string>, SchemaId>> patterns() const;

 private:
  struct TransparentHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::uint32_t symbol(std::string_view token) const;

  std::unordered_map<std::string, std::uint32_t, TransparentHash, std::equal_to<>> vocab_;
  std::vector<std::string> symbols_;  // symbol id -> token, [0] unused
  std::size_t alphabet_ = 1;          // vocabulary + the "unknown" symbol 0
  std::vector<std::uint32_t> delta_;  // state * alphabet_ + symbol -> state
  std::vector<std::uint32_t> out_begin_;
  std::vector<SchemaId> outputs_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> parent_symbol_;
  std::vector<std::vector<SchemaId>> terminal_;
  std::unordered_map<SchemaId, Category> categories_;
  std::size_t pattern_count_ = 0;
};

PatternIndex build_index(std::span<const Schema> schemata);

MatchRecord match_post(const PatternIndex& index, std::span<const std::string> tokens,
                       std::string_view post_id = {});

/// One record per non-excluded post, in input order. Posts without tokens
/// are normalized on the fly. `workers` only changes speed, never output.
std::vector<MatchRecord> match_corpus(const PatternIndex& index, std::span<const Post> posts,
                                      unsigned workers = 1);

}  // namespace cdscan
