#include "cdscan/corpus.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cdscan/error.hpp"

namespace cdscan {
namespace {

using nlohmann::json;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

const json& require(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing key \"") + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw DataError(std::string("key \"") + key + "\" is not a string");
}

}  // namespace

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) {
  if (name == "jsonl" || name == "json") return CorpusFormat::jsonl;
  if (name == "text" || name == "txt") return CorpusFormat::text;
  return std::nullopt;
}

std::optional<Timestamp> parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!read_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !read_int(s, 5, 2, mo) ||
      s[7] != '-' || !read_int(s, 8, 2, d))
    return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  std::size_t pos = 10;
  long offset_seconds = 0;
  if (pos < s.size()) {
    if ((s[pos] != 'T' && s[pos] != ' ') || !read_int(s, pos + 1, 2, h) || s.size() < pos + 9 ||
        s[pos + 3] != ':' || !read_int(s, pos + 4, 2, mi) || s[pos + 6] != ':' ||
        !read_int(s, pos + 7, 2, sec))
      return std::nullopt;
    if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
    pos += 9;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
    if (pos < s.size()) {
      if (s[pos] == 'Z' && pos + 1 == s.size()) {
        ++pos;
      } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
        int oh = 0, om = 0;
        if (!read_int(s, pos + 1, 2, oh) || !read_int(s, pos + 4, 2, om)) return std::nullopt;
        offset_seconds = (oh * 3600L + om * 60L) * (s[pos] == '+' ? 1 : -1);
        pos = s.size();
      } else {
        return std::nullopt;
      }
    }
  }
  if (pos != s.size()) return std::nullopt;
  return Timestamp{sys_days{ymd}.time_since_epoch()} + hours{h} + minutes{mi} + seconds{sec} -
         seconds{offset_seconds};
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

CorpusRecord parse_corpus_line(std::string_view line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("record is not a JSON object");

  CorpusRecord rec;
  auto& p = rec.post;
  p.post_id = require_string(obj, "post_id");
  p.user_id = require_string(obj, "user_id");
  const auto created = require_string(obj, "created_at");
  const auto ts = parse_iso8601(created);
  if (!ts) throw DataError("bad created_at timestamp \"" + created + "\"");
  p.created_at = *ts;
  const auto& text = require(obj, "text");
  if (!text.is_string()) throw DataError("key \"text\" is not a string");
  p.raw_text = text.get<std::string>();
  p.lang = require_string(obj, "lang");
  const auto& rt = require(obj, "is_retweet");
  if (!rt.is_boolean()) throw DataError("key \"is_retweet\" is not a boolean");
  p.is_retweet = rt.get<bool>();

  if (const auto it = obj.find("account_created_at"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("key \"account_created_at\" is not a string");
    rec.account_created_at = parse_iso8601(it->get<std::string>());
    if (!rec.account_created_at) throw DataError("bad account_created_at timestamp");
  }
  if (const auto it = obj.find("has_location"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) throw DataError("key \"has_location\" is not a boolean");
    rec.has_location = it->get<bool>();
  }
  return rec;
}

std::string format_corpus_line(const CorpusRecord& rec) {
  json obj = {
      {"post_id", rec.post.post_id},
      {"user_id", rec.post.user_id},
      {"created_at", format_iso8601(rec.post.created_at)},
      {"text", rec.post.raw_text},
      {"lang", rec.post.lang},
      {"is_retweet", rec.post.is_retweet},
  };
  if (rec.account_created_at) obj["account_created_at"] = format_iso8601(*rec.account_created_at);
  if (rec.has_location) obj["has_location"] = true;
  return obj.dump();
}

CorpusReadStats read_corpus_file(const std::filesystem::path& path, CorpusFormat format,
                                 const RecordSink& on_record, const MalformedSink& on_malformed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());

  CorpusReadStats stats;
  std::string line;
  std::size_t line_no = 0;
  const std::string stem = path.filename().string();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++stats.lines;
    if (format == CorpusFormat::text) {
      CorpusRecord rec;
      rec.post.post_id = stem + ":" + std::to_string(line_no);
      rec.post.user_id = "-";
      rec.post.raw_text = line;
      on_record(std::move(rec));
      continue;
    }
    std::optional<CorpusRecord> rec;
    try {
      rec = parse_corpus_line(line);
    } catch (const DataError& e) {
      ++stats.malformed;
      if (on_malformed) on_malformed(line_no, e.what());
      continue;
    }
    on_record(std::move(*rec));
  }
  if (in.bad())
    throw DataError("read error in " + path.string() + " after line " + std::to_string(line_no));
  return stats;
}

}  // namespace cdscan
