#include "beliefmap/syngen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "beliefmap/alignment.hpp"
#include "beliefmap/errors.hpp"
#include "beliefmap/lexicon.hpp"
#include "beliefmap/rng.hpp"

namespace beliefmap {

void to_json(nlohmann::json& j, const DungeonScript& s) {
  nlohmann::json sections = nlohmann::json::array();
  for (const ScriptSection& sec : s.sections) {
    sections.push_back({{"marker_text", sec.marker_text},
                        {"place_vocab", sec.place_vocab},
                        {"space_vocab", sec.space_vocab},
                        {"posts_per_bucket", sec.posts_per_bucket}});
  }
  nlohmann::json groups = nlohmann::json::array();
  for (const ScriptGroup& g : s.groups) {
    groups.push_back(
        {{"group_id", g.group_id}, {"dm_name", g.dm_name}, {"player_names", g.player_names}});
  }
  nlohmann::json decoys = nlohmann::json::array();
  for (const ScriptDecoy& d : s.decoys) {
    decoys.push_back({{"section", d.section}, {"text", d.text}, {"replacements", d.replacements}});
  }
  j = nlohmann::json{{"sections", sections},
                     {"final_marker_text", s.final_marker_text},
                     {"groups", groups},
                     {"filler_vocab", s.filler_vocab},
                     {"decoys", decoys},
                     {"tokens_per_post", s.tokens_per_post},
                     {"name_mentions", s.name_mentions},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, DungeonScript& s) {
  s = DungeonScript{};
  for (const auto& js : j.at("sections")) {
    ScriptSection sec;
    js.at("marker_text").get_to(sec.marker_text);
    js.at("place_vocab").get_to(sec.place_vocab);
    if (js.contains("space_vocab")) js.at("space_vocab").get_to(sec.space_vocab);
    js.at("posts_per_bucket").get_to(sec.posts_per_bucket);
    s.sections.push_back(std::move(sec));
  }
  j.at("final_marker_text").get_to(s.final_marker_text);
  for (const auto& jg : j.at("groups")) {
    ScriptGroup g;
    jg.at("group_id").get_to(g.group_id);
    jg.at("dm_name").get_to(g.dm_name);
    jg.at("player_names").get_to(g.player_names);
    s.groups.push_back(std::move(g));
  }
  j.at("filler_vocab").get_to(s.filler_vocab);
  if (j.contains("decoys")) {
    for (const auto& jd : j.at("decoys")) {
      ScriptDecoy d;
      jd.at("section").get_to(d.section);
      jd.at("text").get_to(d.text);
      if (jd.contains("replacements")) jd.at("replacements").get_to(d.replacements);
      s.decoys.push_back(std::move(d));
    }
  }
  if (j.contains("tokens_per_post")) j.at("tokens_per_post").get_to(s.tokens_per_post);
  if (j.contains("name_mentions")) j.at("name_mentions").get_to(s.name_mentions);
  if (j.contains("seed")) j.at("seed").get_to(s.seed);
}

DungeonScript load_script(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(errc::missing_input, "cannot read script " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) fail(errc::malformed, "script " + file.string() + ": not valid json");
  try {
    return j.get<DungeonScript>();
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed, "script " + file.string() + ": " + e.what());
  }
}

void to_json(nlohmann::json& j, const GroundTruth& t) {
  nlohmann::json space = nlohmann::json::object();
  for (const auto& [section, by_group] : t.space_terms) {
    nlohmann::json g = nlohmann::json::object();
    for (const auto& [gid, terms] : by_group) g[gid] = terms;
    space[std::to_string(section)] = std::move(g);
  }
  j = nlohmann::json{{"marker_anchors", t.marker_anchors},
                     {"place_labels", t.place_labels},
                     {"space_terms", space},
                     {"buckets", t.buckets},
                     {"max_decoy_similarity", t.max_decoy_similarity}};
}

void from_json(const nlohmann::json& j, GroundTruth& t) {
  t = GroundTruth{};
  j.at("marker_anchors").get_to(t.marker_anchors);
  j.at("place_labels").get_to(t.place_labels);
  for (const auto& [section, by_group] : j.at("space_terms").items()) {
    for (const auto& [gid, terms] : by_group.items()) {
      t.space_terms[std::stoi(section)][gid] = terms.get<std::set<std::string>>();
    }
  }
  j.at("buckets").get_to(t.buckets);
  j.at("max_decoy_similarity").get_to(t.max_decoy_similarity);
}

namespace {

constexpr double kMarkerTheta = 0.8;
constexpr std::size_t kMarkerMinTokens = 25;

bool is_canonical_token(const std::string& tok) {
  std::vector<std::string> round = tokenize(tok);
  return round.size() == 1 && round[0] == tok && normalize_text(tok) == tok;
}

double text_similarity(const std::string& a, const std::string& b) {
  Post pa;
  pa.norm_text = normalize_text(a);
  Post pb;
  pb.norm_text = normalize_text(b);
  return post_similarity(pa, pb);
}

void check_vocab(const std::map<std::string, std::int64_t>& vocab, const std::string& where,
                 std::vector<std::string>& out) {
  for (const auto& [tok, weight] : vocab) {
    if (!is_canonical_token(tok)) out.push_back("invalid-vocab-token: " + where + " '" + tok + "'");
    if (weight <= 0) out.push_back("non-positive-weight: " + where + " '" + tok + "'");
  }
}

}  // namespace

std::vector<std::string> validate_script(const DungeonScript& script) {
  std::vector<std::string> out;
  if (script.groups.empty()) out.push_back("no-groups");
  if (script.sections.empty()) out.push_back("no-sections");
  if (script.tokens_per_post <= 0) out.push_back("non-positive-tokens-per-post");
  if (script.name_mentions < 0) out.push_back("negative-name-mentions");

  bool any_player_posts = false;
  for (const ScriptSection& sec : script.sections) any_player_posts |= sec.posts_per_bucket > 0;

  std::set<std::string> gids;
  for (const ScriptGroup& g : script.groups) {
    if (g.group_id.empty()) out.push_back("empty-group-id");
    if (!gids.insert(g.group_id).second) out.push_back("duplicate-group-id: " + g.group_id);
    if (g.dm_name.empty()) out.push_back("no-dm-name: " + g.group_id);
    if (any_player_posts && g.player_names.empty()) out.push_back("no-players: " + g.group_id);
    for (const std::string& name : g.player_names) {
      if (name.empty()) out.push_back("empty-player-name: " + g.group_id);
    }
  }

  std::int64_t max_filler = 0;
  check_vocab(script.filler_vocab, "filler", out);
  for (const auto& [tok, w] : script.filler_vocab) max_filler = std::max(max_filler, w);

  std::vector<std::string> all_markers;
  for (const ScriptSection& sec : script.sections) all_markers.push_back(sec.marker_text);
  all_markers.push_back(script.final_marker_text);
  for (std::size_t i = 0; i < all_markers.size(); ++i) {
    if (tokenize(normalize_text(all_markers[i])).size() < kMarkerMinTokens) {
      out.push_back("marker-too-short: marker " + std::to_string(i));
    }
    for (std::size_t j = i + 1; j < all_markers.size(); ++j) {
      if (text_similarity(all_markers[i], all_markers[j]) >= kMarkerTheta) {
        out.push_back("markers-too-similar: markers " + std::to_string(i) + "," +
                      std::to_string(j));
      }
    }
  }

  for (std::size_t si = 0; si < script.sections.size(); ++si) {
    const ScriptSection& sec = script.sections[si];
    const std::string at = "section " + std::to_string(si);
    if (sec.posts_per_bucket < 0) out.push_back("negative-posts-per-bucket: " + at);
    if (sec.posts_per_bucket > 0 && script.name_mentions >= script.tokens_per_post) {
      out.push_back("tokens-per-post-too-small");
    }
    check_vocab(sec.place_vocab, at + " place", out);
    for (const auto& [tok, w] : sec.place_vocab) {
      if (w < 2 * max_filler) out.push_back("place-weight-dominance: " + at + " '" + tok + "'");
      if (script.filler_vocab.count(tok)) out.push_back("vocab-overlap: " + at + " '" + tok + "'");
    }
    std::map<std::string, std::string> space_owner;
    for (const auto& [gid, vocab] : sec.space_vocab) {
      if (!gids.count(gid)) out.push_back("unknown-group-in-space-vocab: " + gid);
      check_vocab(vocab, at + " space " + gid, out);
      for (const auto& [tok, w] : vocab) {
        if (w < 2 * max_filler) {
          out.push_back("space-weight-dominance: " + at + " " + gid + " '" + tok + "'");
        }
        if (script.filler_vocab.count(tok) || sec.place_vocab.count(tok)) {
          out.push_back("vocab-overlap: " + at + " '" + tok + "'");
        }
        auto [it, fresh] = space_owner.emplace(tok, gid);
        if (!fresh) out.push_back("space-vocab-shared: " + at + " '" + tok + "'");
      }
    }
  }

  for (std::size_t di = 0; di < script.decoys.size(); ++di) {
    const ScriptDecoy& d = script.decoys[di];
    const std::string at = "decoy " + std::to_string(di);
    if (d.section < 0 || d.section >= static_cast<int>(script.sections.size())) {
      out.push_back("decoy-section-out-of-range: " + at);
    }
    if (d.replacements < 1) out.push_back("decoy-replacements: " + at);
    if (tokenize(normalize_text(d.text)).size() < kMarkerMinTokens) {
      out.push_back("decoy-too-short: " + at);
    }
    for (std::size_t mi = 0; mi < all_markers.size(); ++mi) {
      if (text_similarity(d.text, all_markers[mi]) >= kMarkerTheta) {
        out.push_back("decoy-similar-to-marker: " + at + " marker " + std::to_string(mi));
      }
    }
  }
  return out;
}

namespace {

struct WeightTable {
  std::vector<std::string> tokens;
  std::vector<std::int64_t> cumulative;
  std::int64_t total = 0;

  void add(const std::map<std::string, std::int64_t>& vocab) {
    for (const auto& [tok, w] : vocab) {
      total += w;
      tokens.push_back(tok);
      cumulative.push_back(total);
    }
  }

  const std::string& pick(SplitMix64& rng) const {
    std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    return tokens[static_cast<std::size_t>(it - cumulative.begin())];
  }
};

// Expected top terms: weight descending, token ascending, cut at k.
std::vector<std::string> top_by_weight(const std::map<std::string, std::int64_t>& vocab,
                                       std::size_t k) {
  std::vector<std::pair<std::string, std::int64_t>> v(vocab.begin(), vocab.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (v.size() > k) v.resize(k);
  std::vector<std::string> out;
  for (auto& [tok, w] : v) out.push_back(tok);
  return out;
}

// Swaps tokens at evenly spread positions, the same positions for every
// group, so each variant pair disagrees on the same windows and similarity
// stays uniform across pairs (about 0.64 for 50 tokens and 2 swaps).
std::vector<std::string> decoy_variant(const std::vector<std::string>& base, int replacements,
                                       std::size_t group_index, std::size_t decoy_index) {
  std::vector<std::string> tokens = base;
  const std::size_t t = tokens.size();
  const std::size_t stride = std::max<std::size_t>(1, t / (static_cast<std::size_t>(replacements) + 1));
  std::set<std::size_t> positions;
  for (int k = 0; k < replacements; ++k) {
    std::size_t pos = (stride * (static_cast<std::size_t>(k) + 1)) % t;
    while (positions.count(pos)) pos = (pos + 1) % t;
    positions.insert(pos);
    tokens[pos] = "offtrail" + std::to_string(decoy_index) + "g" + std::to_string(group_index) +
                  "r" + std::to_string(k);
  }
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

std::pair<Corpus, GroundTruth> generate(const DungeonScript& script) {
  std::vector<std::string> violations = validate_script(script);
  if (!violations.empty()) fail(errc::validation, "invalid script: " + violations.front());

  std::vector<ScriptGroup> groups = script.groups;
  std::sort(groups.begin(), groups.end(),
            [](const ScriptGroup& a, const ScriptGroup& b) { return a.group_id < b.group_id; });

  // Decoy variants, per decoy per group, shared with the corpus and the
  // similarity record below.
  std::vector<std::vector<std::string>> decoy_base;
  for (const ScriptDecoy& d : script.decoys) {
    decoy_base.push_back(tokenize(normalize_text(d.text)));
  }
  std::vector<std::vector<std::vector<std::string>>> decoy_tokens(script.decoys.size());
  for (std::size_t di = 0; di < script.decoys.size(); ++di) {
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      decoy_tokens[di].push_back(
          decoy_variant(decoy_base[di], script.decoys[di].replacements, gi, di));
    }
  }

  SplitMix64 rng(script.seed);
  Corpus corpus;
  GroundTruth truth;

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const ScriptGroup& g = groups[gi];
    std::vector<Post> posts;
    std::int64_t seq = 0;
    auto push = [&](Role role, const std::string& author, std::string text) {
      Post p;
      p.group_id = g.group_id;
      p.seq = seq++;
      p.author = author;
      p.role = role;
      p.raw_text = std::move(text);
      p.norm_text = normalize_text(p.raw_text);
      posts.push_back(std::move(p));
    };

    std::vector<std::vector<std::int64_t>> section_buckets;
    for (std::size_t si = 0; si < script.sections.size(); ++si) {
      const ScriptSection& sec = script.sections[si];
      truth.marker_anchors[g.group_id].push_back(seq);
      push(Role::dm, g.dm_name, sec.marker_text);

      WeightTable table;
      table.add(sec.place_vocab);
      auto sv = sec.space_vocab.find(g.group_id);
      if (sv != sec.space_vocab.end()) table.add(sv->second);
      table.add(script.filler_vocab);

      std::vector<std::int64_t> bucket;
      const int half = sec.posts_per_bucket / 2;
      auto emit_decoys = [&] {
        for (std::size_t di = 0; di < script.decoys.size(); ++di) {
          if (script.decoys[di].section != static_cast<int>(si)) continue;
          bucket.push_back(seq);
          push(Role::dm, g.dm_name, join_tokens(decoy_tokens[di][gi]));
        }
      };
      for (int pi = 0; pi < sec.posts_per_bucket; ++pi) {
        if (pi == half) emit_decoys();
        const std::string& author = g.player_names[pi % g.player_names.size()];
        std::vector<std::string> tokens;
        for (int m = 0; m < script.name_mentions; ++m) tokens.push_back(author);
        const int sampled = script.tokens_per_post - script.name_mentions;
        for (int ti = 0; ti < sampled; ++ti) tokens.push_back(table.pick(rng));
        bucket.push_back(seq);
        push(Role::player, author, join_tokens(tokens));
      }
      if (sec.posts_per_bucket == 0) emit_decoys();
      section_buckets.push_back(std::move(bucket));
    }
    truth.marker_anchors[g.group_id].push_back(seq);
    push(Role::dm, g.dm_name, script.final_marker_text);

    truth.buckets[g.group_id] = std::move(section_buckets);
    corpus.runs[g.group_id] = finalize_run(g.group_id, std::move(posts));
  }

  for (std::size_t si = 0; si < script.sections.size(); ++si) {
    const ScriptSection& sec = script.sections[si];
    truth.place_labels.push_back(top_by_weight(sec.place_vocab, 3));
    for (const ScriptGroup& g : groups) {
      auto sv = sec.space_vocab.find(g.group_id);
      if (sv == sec.space_vocab.end()) continue;
      std::vector<std::string> top = top_by_weight(sv->second, 3);
      truth.space_terms[static_cast<int>(si)][g.group_id] =
          std::set<std::string>(top.begin(), top.end());
    }
  }

  for (std::size_t di = 0; di < script.decoys.size(); ++di) {
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        double sim = text_similarity(join_tokens(decoy_tokens[di][i]),
                                     join_tokens(decoy_tokens[di][j]));
        truth.max_decoy_similarity = std::max(truth.max_decoy_similarity, sim);
      }
    }
  }

  return {std::move(corpus), std::move(truth)};
}

}  // namespace beliefmap
