#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace beliefmap {

enum class Role { dm, player, bot };

Role parse_role(std::string_view s);  // throws error(malformed) on an unknown role
std::string to_string(Role r);

// One transcript record. norm_text is derived from raw_text and is the only
// text the analytics read; raw_text survives untouched for snippets.
struct Post {
  std::string group_id;
  std::int64_t seq = 0;
  std::optional<std::string> timestamp;  // metadata only, never used for ordering
  std::string author;
  Role role = Role::player;
  std::string raw_text;
  std::string norm_text;

  bool operator==(const Post&) const = default;
};

struct GroupRun {
  std::string group_id;
  std::vector<Post> posts;  // ascending seq
  std::string dm_name;
  std::set<std::string> player_names;

  bool operator==(const GroupRun&) const = default;

  // nullptr when no post has that seq. Posts must be sorted by seq.
  const Post* find_seq(std::int64_t seq) const;
};

// Builds a run from posts: sorts by seq, derives dm_name (author of the first
// dm post) and player_names (authors of player posts).
GroupRun finalize_run(std::string group_id, std::vector<Post> posts);

// Runs keyed by group_id. std::map makes iteration lexicographic, which every
// downstream ordering rule leans on.
struct Corpus {
  std::map<std::string, GroupRun> runs;
  std::map<std::string, std::string> meta;

  bool operator==(const Corpus&) const = default;

  std::size_t post_count() const;
  std::vector<std::string> group_ids() const;
};

// Lowercases ASCII, drops HTML tags, strips leading/trailing '*' and '_'
// markup from each word, removes OOC bracket characters (inner text kept),
// and collapses whitespace. Idempotent and locale-independent.
std::string normalize_text(std::string_view raw);

struct Violation {
  std::string group_id;
  std::optional<std::int64_t> seq;
  std::string rule;

  bool operator==(const Violation&) const = default;
  std::string str() const;
};

// Checks every corpus invariant. Violations are data, not exceptions; an
// empty result means the corpus is well formed.
std::vector<Violation> validate_corpus(const Corpus& c);

}  // namespace beliefmap
