#pragma once

// Corpus line formats. A JSON-lines record is a flat object:
//   {"post_id": "...", "user_id": "...", "created_at": "2018-09-01T12:00:00Z",
//    "text": "...", "lang": "en", "is_retweet": false}
// with optional user-level keys "account_created_at" and "has_location".
// The plain-text format carries one post per line and nothing else.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "cdscan/textnorm.hpp"

namespace cdscan {

enum class CorpusFormat { jsonl, text };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name);

/// Parses "YYYY-MM-DDTHH:MM:SS" with an optional fraction and a "Z" or
/// "+HH:MM" suffix (also "YYYY-MM-DD"). Returns nullopt when malformed.
std::optional<Timestamp> parse_iso8601(std::string_view s);

/// "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601(Timestamp t);

struct CorpusRecord {
  Post post;
  std::optional<Timestamp> account_created_at;
  bool has_location = false;
};

/// Parses one JSON-lines record. Throws DataError naming the problem.
CorpusRecord parse_corpus_line(std::string_view line);

/// Serializes a record in the JSON-lines format (no trailing newline).
std::string format_corpus_line(const CorpusRecord& rec);

struct CorpusReadStats {
  std::size_t lines = 0;      // non-blank lines seen
  std::size_t malformed = 0;  // lines that failed to parse
};

using RecordSink = std::function<void(CorpusRecord&&)>;
using MalformedSink = std::function<void(std::size_t line_no, const std::string& why)>;

/// Streams a corpus file. Unreadable files and I/O failures throw DataError
/// carrying the path and line number; malformed lines go to `on_malformed`.
CorpusReadStats read_corpus_file(const std::filesystem::path& path, CorpusFormat format,
                                 const RecordSink& on_record,
                                 const MalformedSink& on_malformed = {});

}  // namespace cdscan
