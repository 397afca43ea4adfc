#include "beliefmap/lexicon.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "beliefmap/errors.hpp"
#include "beliefmap/utf8.hpp"

namespace beliefmap {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view norm_text) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t scalars = 0;
  bool all_digits = true;
  auto flush = [&] {
    if (!cur.empty() && scalars >= 2 && !all_digits) out.push_back(cur);
    cur.clear();
    scalars = 0;
    all_digits = true;
  };
  for (char ch : norm_text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      cur.push_back(ch);
      if (!utf8::is_continuation(c)) ++scalars;
      if (c < '0' || c > '9') all_digits = false;
    } else {
      flush();
    }
  }
  flush();
  return out;
}

StopWordConfig::StopWordConfig() : guid_patterns_(default_guid_patterns()) { compile(); }

StopWordConfig::StopWordConfig(std::set<std::string> base, std::set<std::string> game_terms,
                               std::vector<std::string> guid_patterns,
                               std::map<std::string, std::set<std::string>> per_player,
                               int n_per_player)
    : base_(std::move(base)),
      game_terms_(std::move(game_terms)),
      guid_patterns_(std::move(guid_patterns)),
      per_player_(std::move(per_player)),
      n_per_player_(n_per_player) {
  compile();
}

void StopWordConfig::compile() {
  effective_ = base_;
  effective_.insert(game_terms_.begin(), game_terms_.end());
  for (const auto& [name, words] : per_player_) effective_.insert(words.begin(), words.end());
  compiled_.clear();
  compiled_.reserve(guid_patterns_.size());
  for (const std::string& p : guid_patterns_) {
    try {
      compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      fail(errc::malformed, "bad guid pattern '" + p + "': " + e.what());
    }
  }
}

bool StopWordConfig::matches_guid(const std::string& token) const {
  for (const std::regex& re : compiled_) {
    if (std::regex_search(token, re)) return true;
  }
  return false;
}

bool StopWordConfig::is_stopped(const std::string& token) const {
  return effective_.count(token) > 0 || matches_guid(token);
}

const std::vector<std::string>& StopWordConfig::default_guid_patterns() {
  // Contiguous hex runs of 8+, and tokens mixing letters with 4+ digits:
  // the shapes of environment-generated id strings, not of real words.
  static const std::vector<std::string> kPatterns = {
      "[0-9a-f]{8,}",
      "^(?=.*[a-z])(?:.*[0-9]){4}",
  };
  return kPatterns;
}

std::string StopWordConfig::to_json_string() const {
  nlohmann::json j;
  j["base"] = base_;
  j["game_terms"] = game_terms_;
  j["guid_patterns"] = guid_patterns_;
  j["n_per_player"] = n_per_player_;
  j["per_player"] = nlohmann::json::object();
  for (const auto& [name, words] : per_player_) j["per_player"][name] = words;
  return j.dump(2) + "\n";
}

StopWordConfig StopWordConfig::from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(errc::malformed, "stopwords: not valid json");
  try {
    std::set<std::string> base = j.at("base").get<std::set<std::string>>();
    std::set<std::string> game = j.at("game_terms").get<std::set<std::string>>();
    std::vector<std::string> patterns = j.at("guid_patterns").get<std::vector<std::string>>();
    int n = j.at("n_per_player").get<int>();
    std::map<std::string, std::set<std::string>> per_player;
    for (const auto& [name, words] : j.at("per_player").items()) {
      per_player[name] = words.get<std::set<std::string>>();
    }
    return StopWordConfig(std::move(base), std::move(game), std::move(patterns),
                          std::move(per_player), n);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed, std::string("stopwords: ") + e.what());
  }
}

void StopWordConfig::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(errc::internal, "cannot write " + file.string());
  out << to_json_string();
}

StopWordConfig StopWordConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(errc::missing_input, "cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

std::map<std::string, std::set<std::string>> build_player_stopwords(const Corpus& c, int n,
                                                                    const StopWordConfig& filters) {
  if (n < 0) fail(errc::usage, "n_per_player must be >= 0");

  std::map<std::string, std::map<std::string, std::int64_t>> counts;
  std::set<std::string> names;
  for (const auto& [gid, run] : c.runs) {
    names.insert(run.player_names.begin(), run.player_names.end());
    for (const Post& p : run.posts) {
      if (p.role != Role::player) continue;
      names.insert(p.author);
      auto& by_token = counts[p.author];
      for (std::string& t : tokenize(p.norm_text)) ++by_token[std::move(t)];
    }
  }

  std::map<std::string, std::set<std::string>> out;
  for (const std::string& name : names) {
    std::set<std::string>& words = out[name];
    for (const std::string& t : tokenize(normalize_text(name))) words.insert(t);
    if (n == 0) continue;
    auto it = counts.find(name);
    if (it == counts.end()) continue;
    std::vector<std::pair<std::string, std::int64_t>> ranked;
    ranked.reserve(it->second.size());
    for (const auto& [tok, cnt] : it->second) {
      if (!filters.is_stopped(tok)) ranked.emplace_back(tok, cnt);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(n)) ranked.resize(n);
    for (auto& [tok, cnt] : ranked) words.insert(std::move(tok));
  }
  return out;
}

namespace {

std::set<std::string> read_word_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(errc::missing_input, "cannot read word list " + file.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w;
    for (char ch : line) {
      if (ch == '\r' || ch == ' ' || ch == '\t') continue;
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      w.push_back(ch);
    }
    if (!w.empty() && w[0] != '#') words.insert(w);
  }
  return words;
}

}  // namespace

StopWordConfig build_stopword_config(const std::filesystem::path& base_file,
                                     const std::filesystem::path& game_file, const Corpus& c,
                                     int n_per_player) {
  std::set<std::string> base = read_word_file(base_file);
  std::set<std::string> game;
  if (!game_file.empty()) game = read_word_file(game_file);
  StopWordConfig filters(base, game, StopWordConfig::default_guid_patterns(), {}, n_per_player);
  auto per_player = build_player_stopwords(c, n_per_player, filters);
  return StopWordConfig(std::move(base), std::move(game), StopWordConfig::default_guid_patterns(),
                        std::move(per_player), n_per_player);
}

}  // namespace beliefmap
