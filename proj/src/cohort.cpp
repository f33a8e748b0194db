#include "cdscan/cohort.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "cdscan/error.hpp"
#include "cdscan/io.hpp"

namespace cdscan {
namespace {

struct UserAccumulator {
  std::vector<Post> posts;
  std::unordered_set<std::string> post_ids;
  std::optional<Timestamp> account_created_at;
  bool has_location = false;
  std::set<std::string> sources;
};

std::pair<int, unsigned> month_of(Timestamp t) {
  const std::chrono::year_month_day ymd{std::chrono::floor<std::chrono::days>(t)};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
}

constexpr std::string_view kManifestMagic = "#cdscan-manifest\t1";

std::string manifest_body(const CohortManifest& m) {
  std::ostringstream os;
  os << "#name\t" << m.name << '\n';
  os << "#seed\t" << (m.seed ? std::to_string(*m.seed) : "-") << '\n';
  for (const auto& s : m.sources) os << "#source\t" << s << '\n';
  for (std::size_t i = 0; i < kExclusionKinds; ++i) {
    os << "#exclusion\t" << exclusion_name(static_cast<Exclusion>(i)) << '\t' << m.exclusions[i] << '\n';
  }
  os << "#users\t" << m.users.size() << '\n';
  for (const auto& u : m.users) os << u << '\n';
  return os.str();
}

std::size_t parse_size(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw DataError("bad " + std::string(what) + " value '" + std::string(s) + "'");
  return v;
}

}  // namespace

IngestResult ingest_corpus(std::span<const std::filesystem::path> paths, const IngestOptions& options) {
  std::unordered_map<std::string, UserAccumulator> users;
  IngestResult result;
  auto& rep = result.report;

  for (const auto& path : paths) {
    const std::string source = path.string();
    const auto stats = read_corpus_file(
        path, options.format,
        [&](CorpusRecord&& rec) {
          auto& acc = users[rec.post.user_id];
          if (!acc.post_ids.insert(rec.post.post_id).second) {
            ++rep.duplicates;
            return;
          }
          if (!acc.account_created_at) acc.account_created_at = rec.account_created_at;
          acc.has_location = acc.has_location || rec.has_location;
          acc.sources.insert(source);
          acc.posts.push_back(std::move(rec.post));
        },
        [&](std::size_t line_no, const std::string& why) {
          if (result.malformed_samples.size() < 10)
            result.malformed_samples.push_back(source + ":" + std::to_string(line_no) + ": " + why);
        });
    rep.lines += stats.lines;
    rep.malformed += stats.malformed;
    if (stats.lines > 0 &&
        static_cast<double>(stats.malformed) > options.max_malformed_rate * static_cast<double>(stats.lines)) {
      throw DataError(source + ": " + std::to_string(stats.malformed) + " of " + std::to_string(stats.lines) +
                      " lines are malformed; wrong format?");
    }
  }

  std::vector<std::string> ids;
  ids.reserve(users.size());
  for (const auto& [id, acc] : users) ids.push_back(id);
  std::sort(ids.begin(), ids.end());

  for (const auto& id : ids) {
    auto& acc = users[id];
    auto& posts = acc.posts;
    std::stable_sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
      return a.created_at != b.created_at ? a.created_at < b.created_at : a.post_id < b.post_id;
    });
    if (options.max_timeline > 0 && posts.size() > options.max_timeline) {
      const auto drop = posts.size() - options.max_timeline;
      rep.truncated += drop;
      posts.erase(posts.begin(), posts.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    UserRecord rec;
    rec.user_id = id;
    rec.account_created_at = acc.account_created_at;
    rec.has_location = acc.has_location;
    rec.sources.assign(acc.sources.begin(), acc.sources.end());
    for (auto& p : posts) {
      normalize_post(p);
      ++rep.by_reason[static_cast<std::size_t>(p.excluded)];
      if (p.excluded == Exclusion::none) ++rec.post_count;
    }
    rep.ingested += posts.size();
    result.users.push_back(UserPosts{id, std::move(posts)});
    result.records.push_back(std::move(rec));
  }
  return result;
}

CohortMatches match_cohort(std::string name, const IngestResult& corpus, const PatternIndex& index,
                           unsigned workers) {
  CohortMatches cohort;
  cohort.name = std::move(name);
  cohort.users.resize(corpus.users.size());

  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<SchemaId> ids;
    for (std::size_t u = begin; u < end; ++u) {
      const auto& src = corpus.users[u];
      auto& dst = cohort.users[u];
      dst.user_id = src.user_id;
      for (const auto& p : src.posts) {
        if (p.excluded != Exclusion::none) continue;
        ++dst.n_posts;
        if (p.tokens) {
          index.scan(*p.tokens, ids);
        } else {
          index.scan(normalize_text(p.raw_text), ids);
        }
        if (!ids.empty()) dst.matched.push_back(make_mask(ids));
      }
    }
  };

  const std::size_t n = corpus.users.size();
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2 * workers) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(work, b, std::min(n, b + chunk));
    for (auto& t : pool) t.join();
  }
  return cohort;
}

IngestResult restrict_users(IngestResult corpus, std::span<const std::string> users) {
  const std::unordered_set<std::string> keep(users.begin(), users.end());
  IngestResult out;
  out.report = corpus.report;
  out.malformed_samples = std::move(corpus.malformed_samples);
  for (std::size_t i = 0; i < corpus.users.size(); ++i) {
    if (!keep.contains(corpus.users[i].user_id)) continue;
    out.users.push_back(std::move(corpus.users[i]));
    out.records.push_back(std::move(corpus.records[i]));
  }
  return out;
}

SelectionResult select_depressed_users(const IngestResult& corpus) {
  SelectionResult out;
  for (const auto& u : corpus.users) {
    bool selected = false;
    for (const auto& p : u.posts) {
      if (p.excluded == Exclusion::retweet || p.excluded == Exclusion::non_english) continue;
      if (!detect_diagnosis_statement(p.raw_text)) continue;
      out.statements.push_back({u.user_id, p.post_id, p.created_at, p.raw_text});
      selected = true;
    }
    if (selected) out.users.push_back(u.user_id);
  }
  return out;
}

std::size_t SampleResult::total_deficit() const {
  std::size_t d = 0;
  for (const auto& b : bins) d += b.deficit();
  return d;
}

SampleResult date_matched_sample(std::span<const UserRecord> candidates,
                                 std::span<const UserRecord> reference, const SampleOptions& options) {
  SampleResult out;
  std::unordered_set<std::string> reference_ids;
  std::map<std::pair<int, unsigned>, std::size_t> ref_months;
  std::size_t ref_total = 0;
  for (const auto& r : reference) {
    reference_ids.insert(r.user_id);
    if (!r.account_created_at) {
      ++out.reference_undated;
      continue;
    }
    ++ref_months[month_of(*r.account_created_at)];
    ++ref_total;
  }
  if (ref_total == 0) throw DataError("date-matched sampling needs a non-empty, dated reference cohort");

  std::map<std::pair<int, unsigned>, std::vector<std::string>> pool;
  for (const auto& c : candidates) {
    if (reference_ids.contains(c.user_id)) {
      ++out.dropped_overlap;
    } else if (options.require_location && !c.has_location) {
      ++out.dropped_no_location;
    } else if (!c.account_created_at) {
      ++out.dropped_undated;
    } else {
      pool[month_of(*c.account_created_at)].push_back(c.user_id);
    }
  }

  // Largest-remainder allocation of the target over reference months.
  const std::size_t target = options.target_size > 0 ? options.target_size : ref_total;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t allocated = 0;
  for (const auto& [month, count] : ref_months) {
    const double exact = static_cast<double>(target) * static_cast<double>(count) / static_cast<double>(ref_total);
    MonthBin bin;
    bin.year = month.first;
    bin.month = month.second;
    bin.reference = count;
    bin.target = static_cast<std::size_t>(exact);
    allocated += bin.target;
    remainders.emplace_back(exact - static_cast<double>(bin.target), out.bins.size());
    out.bins.push_back(bin);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; allocated < target && k < remainders.size(); ++k, ++allocated) {
    ++out.bins[remainders[k].second].target;
  }

  std::mt19937_64 rng(options.seed);
  for (auto& bin : out.bins) {
    auto it = pool.find({bin.year, bin.month});
    if (it == pool.end()) continue;
    auto& users = it->second;
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    bin.available = users.size();
    std::shuffle(users.begin(), users.end(), rng);
    bin.taken = std::min(bin.target, users.size());
    out.users.insert(out.users.end(), users.begin(), users.begin() + static_cast<std::ptrdiff_t>(bin.taken));
  }
  std::sort(out.users.begin(), out.users.end());
  return out;
}

std::string CohortManifest::digest() const { return "sha256:" + sha256_hex(manifest_body(*this)); }

std::string format_manifest(const CohortManifest& m) {
  if (m.name != "depressed" && m.name != "random")
    throw DataError("cohort name must be 'depressed' or 'random', got '" + m.name + "'");
  std::ostringstream os;
  os << kManifestMagic << '\n';
  os << "#created_at\t" << m.created_at << '\n';
  os << "#digest\t" << m.digest() << '\n';
  os << manifest_body(m);
  return os.str();
}

CohortManifest parse_manifest(std::string_view text) {
  CohortManifest m;
  std::string stored_digest;
  std::optional<std::size_t> declared_users;
  bool magic = false;
  for (const auto& line : split(text, '\n')) {
    if (line.empty()) continue;
    if (!magic) {
      if (line != kManifestMagic) throw DataError("not a cohort manifest");
      magic = true;
      continue;
    }
    if (line.front() != '#') {
      m.users.push_back(line);
      continue;
    }
    const auto f = split(std::string_view(line).substr(1), '\t');
    const auto& key = f[0];
    if (key == "name" && f.size() == 2) {
      m.name = f[1];
    } else if (key == "created_at" && f.size() == 2) {
      m.created_at = f[1];
    } else if (key == "digest" && f.size() == 2) {
      stored_digest = f[1];
    } else if (key == "seed" && f.size() == 2) {
      if (f[1] != "-") m.seed = parse_size(f[1], "seed");
    } else if (key == "source" && f.size() == 2) {
      m.sources.push_back(f[1]);
    } else if (key == "exclusion" && f.size() == 3) {
      bool known = false;
      for (std::size_t i = 0; i < kExclusionKinds; ++i) {
        if (exclusion_name(static_cast<Exclusion>(i)) == f[1]) {
          m.exclusions[i] = parse_size(f[2], "exclusion count");
          known = true;
        }
      }
      if (!known) throw DataError("unknown exclusion reason '" + f[1] + "'");
    } else if (key == "users" && f.size() == 2) {
      declared_users = parse_size(f[1], "user count");
    } else {
      throw DataError("unrecognized manifest header line '" + line + "'");
    }
  }
  if (!magic) throw DataError("empty manifest");
  if (declared_users && *declared_users != m.users.size())
    throw DataError("manifest declares " + std::to_string(*declared_users) + " users but lists " +
                    std::to_string(m.users.size()));
  if (std::adjacent_find(m.users.begin(), m.users.end(), std::greater_equal<>()) != m.users.end())
    throw DataError("manifest users are not sorted and unique");
  if (m.digest() != stored_digest) throw DataError("manifest digest mismatch");
  return m;
}

void write_manifest(const CohortManifest& m, const std::filesystem::path& path) {
  write_file_atomic(path, format_manifest(m));
}

CohortManifest read_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

void check_disjoint(const CohortManifest& a, const CohortManifest& b) {
  std::vector<std::string> shared;
  std::set_intersection(a.users.begin(), a.users.end(), b.users.begin(), b.users.end(),
                        std::back_inserter(shared));
  if (!shared.empty())
    throw DataError("cohorts '" + a.name + "' and '" + b.name + "' share " + std::to_string(shared.size()) +
                    " user(s), e.g. '" + shared.front() + "'");
}

std::string format_user_records(std::span<const UserRecord> records) {
  std::ostringstream os;
  os << "user_id\taccount_created_at\tpost_count\thas_location\tsources\n";
  for (const auto& r : records) {
    os << r.user_id << '\t' << (r.account_created_at ? format_iso8601(*r.account_created_at) : "-") << '\t'
       << r.post_count << '\t' << (r.has_location ? 1 : 0) << '\t';
    for (std::size_t i = 0; i < r.sources.size(); ++i) os << (i ? "," : "") << r.sources[i];
    os << '\n';
  }
  return os.str();
}

std::vector<UserRecord> read_user_records(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<UserRecord> out;
  std::size_t line_no = 0;
  bool header = true;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() < 4) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 5 columns");
    UserRecord r;
    r.user_id = f[0];
    if (f[1] != "-") {
      r.account_created_at = parse_iso8601(f[1]);
      if (!r.account_created_at) throw DataError(path.string() + ":" + std::to_string(line_no) + ": bad timestamp");
    }
    r.post_count = parse_size(f[2], "post_count");
    r.has_location = f[3] == "1";
    if (f.size() > 4 && !f[4].empty()) r.sources = split(f[4], ',');
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cdscan
