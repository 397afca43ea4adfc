#pragma once

#include <string>
#include <vector>

#include "beliefmap/corpus.hpp"
#include "beliefmap/rng.hpp"

namespace testutil {

inline beliefmap::Post make_post(std::string gid, std::int64_t seq, std::string author,
                                 beliefmap::Role role, std::string text) {
  beliefmap::Post p;
  p.group_id = std::move(gid);
  p.seq = seq;
  p.author = std::move(author);
  p.role = role;
  p.raw_text = std::move(text);
  p.norm_text = beliefmap::normalize_text(p.raw_text);
  return p;
}

inline beliefmap::Corpus corpus_of(std::vector<beliefmap::Post> posts) {
  std::map<std::string, std::vector<beliefmap::Post>> by_group;
  for (beliefmap::Post& p : posts) by_group[p.group_id].push_back(std::move(p));
  beliefmap::Corpus c;
  for (auto& [gid, group_posts] : by_group) {
    c.runs[gid] = beliefmap::finalize_run(gid, std::move(group_posts));
  }
  return c;
}

// Random printable-ish string over a charset that exercises markup, tags,
// brackets, digits, whitespace, and multi-byte UTF-8.
inline std::string random_text(beliefmap::SplitMix64& rng, std::size_t max_len) {
  static const std::vector<std::string> pieces = {
      "a", "b", "z", "Q", "X", "0", "7", " ", "  ", "\t", "\n", "*", "**", "_", "[", "]",
      "<", ">", "<b>", "</b>", "<i>", "!", "'", "-", ".", ",", "\xC3\xA9" /* é */,
      "\xE2\x98\x83" /* snowman */, "word", "Grogg", "d20", "goblin"};
  std::size_t len = rng.below(max_len + 1);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out += pieces[rng.below(pieces.size())];
  return out;
}

}  // namespace testutil
