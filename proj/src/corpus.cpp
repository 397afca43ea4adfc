#include "beliefmap/corpus.hpp"

#include <algorithm>

#include "beliefmap/errors.hpp"

namespace beliefmap {

Role parse_role(std::string_view s) {
  if (s == "dm") return Role::dm;
  if (s == "player") return Role::player;
  if (s == "bot") return Role::bot;
  fail(errc::malformed, "unknown role " + std::string(s));
}

std::string to_string(Role r) {
  switch (r) {
    case Role::dm: return "dm";
    case Role::player: return "player";
    case Role::bot: return "bot";
  }
  fail(errc::internal, "bad role value");
}

const Post* GroupRun::find_seq(std::int64_t seq) const {
  auto it = std::lower_bound(posts.begin(), posts.end(), seq,
                             [](const Post& p, std::int64_t s) { return p.seq < s; });
  if (it == posts.end() || it->seq != seq) return nullptr;
  return &*it;
}

GroupRun finalize_run(std::string group_id, std::vector<Post> posts) {
  std::stable_sort(posts.begin(), posts.end(),
                   [](const Post& a, const Post& b) { return a.seq < b.seq; });
  GroupRun run;
  run.group_id = std::move(group_id);
  for (const Post& p : posts) {
    if (run.dm_name.empty() && p.role == Role::dm) run.dm_name = p.author;
    if (p.role == Role::player) run.player_names.insert(p.author);
  }
  run.posts = std::move(posts);
  return run;
}

std::size_t Corpus::post_count() const {
  std::size_t n = 0;
  for (const auto& [gid, run] : runs) n += run.posts.size();
  return n;
}

std::vector<std::string> Corpus::group_ids() const {
  std::vector<std::string> out;
  out.reserve(runs.size());
  for (const auto& [gid, run] : runs) out.push_back(gid);
  return out;
}

namespace {

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  // Pass 1: drop <...> tags, lowercase ASCII, map whitespace to ' '.
  std::string flat;
  flat.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (c == '<') {
      std::size_t close = raw.find('>', i + 1);
      if (close != std::string_view::npos) {
        i = close;
        flat.push_back(' ');  // tag acts as a separator
        continue;
      }
    }
    if (is_ascii_space(c)) {
      flat.push_back(' ');
    } else if (c >= 'A' && c <= 'Z') {
      flat.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      flat.push_back(c);
    }
  }

  // Pass 2: per word, drop bracket characters and strip '*'/'_' wrappers,
  // collapsing whitespace as we go.
  std::string out;
  out.reserve(flat.size());
  std::size_t i = 0;
  while (i < flat.size()) {
    while (i < flat.size() && flat[i] == ' ') ++i;
    std::size_t start = i;
    while (i < flat.size() && flat[i] != ' ') ++i;
    std::string word;
    for (std::size_t k = start; k < i; ++k) {
      char c = flat[k];
      if (c == '[' || c == ']') continue;
      word.push_back(c);
    }
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && (word[b] == '*' || word[b] == '_')) ++b;
    while (e > b && (word[e - 1] == '*' || word[e - 1] == '_')) --e;
    if (e > b) {
      if (!out.empty()) out.push_back(' ');
      out.append(word, b, e - b);
    }
  }
  return out;
}

std::string Violation::str() const {
  std::string s = group_id.empty() ? std::string("-") : group_id;
  s += ':';
  s += seq ? std::to_string(*seq) : std::string("-");
  s += ':';
  s += rule;
  return s;
}

std::vector<Violation> validate_corpus(const Corpus& c) {
  std::vector<Violation> out;
  if (c.runs.empty()) {
    out.push_back({"", std::nullopt, "empty-corpus"});
    return out;
  }
  for (const auto& [gid, run] : c.runs) {
    if (run.group_id != gid) out.push_back({gid, std::nullopt, "run-key-mismatch"});
    bool have_dm = false;
    const Post* prev = nullptr;
    std::set<std::int64_t> seen;
    for (const Post& p : run.posts) {
      if (p.group_id != gid) out.push_back({gid, p.seq, "group-id-mismatch"});
      if (p.seq < 0) out.push_back({gid, p.seq, "negative-seq"});
      if (!seen.insert(p.seq).second) {
        out.push_back({gid, p.seq, "duplicate-seq"});
      } else if (prev && p.seq <= prev->seq) {
        out.push_back({gid, p.seq, "non-increasing-seq"});
      }
      if (p.norm_text != normalize_text(p.raw_text)) out.push_back({gid, p.seq, "norm-text-mismatch"});
      if (p.role == Role::dm && p.author == run.dm_name) have_dm = true;
      prev = &p;
    }
    if (!have_dm) out.push_back({gid, std::nullopt, "no-dm"});
  }
  return out;
}

}  // namespace beliefmap
