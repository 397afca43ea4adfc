#pragma once

#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "beliefmap/corpus.hpp"

namespace beliefmap {

// Splits normalized text on non-alphanumeric runs. Tokens shorter than two
// scalars and pure-digit tokens are dropped; order is preserved. Bytes >=
// 0x80 count as word characters so non-ASCII words stay intact.
std::vector<std::string> tokenize(std::string_view norm_text);

// Layered ignore list: base English words, game mechanics terms, GUID-shaped
// tokens, and each player's own high-frequency words. Immutable once built.
class StopWordConfig {
 public:
  StopWordConfig();  // default guid patterns, everything else empty

  StopWordConfig(std::set<std::string> base, std::set<std::string> game_terms,
                 std::vector<std::string> guid_patterns,
                 std::map<std::string, std::set<std::string>> per_player, int n_per_player);

  // True when the token is in any layer or matches a guid pattern.
  bool is_stopped(const std::string& token) const;
  bool matches_guid(const std::string& token) const;

  const std::set<std::string>& base() const { return base_; }
  const std::set<std::string>& game_terms() const { return game_terms_; }
  const std::vector<std::string>& guid_patterns() const { return guid_patterns_; }
  const std::map<std::string, std::set<std::string>>& per_player() const { return per_player_; }
  int n_per_player() const { return n_per_player_; }
  const std::set<std::string>& effective() const { return effective_; }

  static const std::vector<std::string>& default_guid_patterns();

  std::string to_json_string() const;  // canonical; reload-then-save is byte identical
  static StopWordConfig from_json_string(const std::string& text);
  void save(const std::filesystem::path& file) const;
  static StopWordConfig load(const std::filesystem::path& file);

 private:
  void compile();

  std::set<std::string> base_;
  std::set<std::string> game_terms_;
  std::vector<std::string> guid_patterns_;
  std::map<std::string, std::set<std::string>> per_player_;
  int n_per_player_ = 1;
  std::set<std::string> effective_;
  std::vector<std::regex> compiled_;
};

// Per-player stop sets: each player's n most frequent tokens (after base,
// game, and guid filtering; ties broken lexicographically) plus the tokens of
// every player display name. filters supplies the base/game/guid layers.
std::map<std::string, std::set<std::string>> build_player_stopwords(const Corpus& c, int n,
                                                                    const StopWordConfig& filters);

// Reads one token per line from base_file (required) and game_file (optional,
// empty path for none), computes player stop words over the corpus, and
// assembles the full config with the default guid patterns.
StopWordConfig build_stopword_config(const std::filesystem::path& base_file,
                                     const std::filesystem::path& game_file, const Corpus& c,
                                     int n_per_player);

}  // namespace beliefmap
