#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "beliefmap/corpus.hpp"

namespace beliefmap {

// One room of the scripted dungeon: the marker text the dm pastes at its
// entrance, the shared place vocabulary, and each group's own space
// vocabulary. Weights are positive integers.
struct ScriptSection {
  std::string marker_text;
  std::map<std::string, std::int64_t> place_vocab;
  std::map<std::string, std::map<std::string, std::int64_t>> space_vocab;  // group -> token -> weight
  int posts_per_bucket = 0;
};

struct ScriptGroup {
  std::string group_id;
  std::string dm_name;
  std::vector<std::string> player_names;
};

// A near-duplicate dm post dropped into every group's bucket. Each group gets
// a variant with `replacements` tokens swapped at spread positions, pushing
// pairwise similarity well below the marker threshold.
struct ScriptDecoy {
  int section = 0;
  std::string text;
  int replacements = 2;
};

struct DungeonScript {
  std::vector<ScriptSection> sections;
  std::string final_marker_text;  // pasted after the last room
  std::vector<ScriptGroup> groups;
  std::map<std::string, std::int64_t> filler_vocab;
  std::vector<ScriptDecoy> decoys;
  int tokens_per_post = 10;
  int name_mentions = 2;  // leading author-name tokens per player post
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const DungeonScript& s);
void from_json(const nlohmann::json& j, DungeonScript& s);
DungeonScript load_script(const std::filesystem::path& file);

// What the generator planted, recorded for oracle use.
struct GroundTruth {
  std::map<std::string, std::vector<std::int64_t>> marker_anchors;  // group -> marker seqs
  std::vector<std::vector<std::string>> place_labels;               // per section, weight-ranked
  std::map<int, std::map<std::string, std::set<std::string>>> space_terms;  // section -> group -> set
  std::map<std::string, std::vector<std::vector<std::int64_t>>> buckets;    // group -> per-section seqs
  double max_decoy_similarity = 0.0;
};

void to_json(nlohmann::json& j, const GroundTruth& t);
void from_json(const nlohmann::json& j, GroundTruth& t);

// Violated script rules, empty when the script is valid.
std::vector<std::string> validate_script(const DungeonScript& script);

// Deterministic function of the script (including its seed): the same script
// generates byte-identical corpora everywhere. Throws error(validation)
// naming the first violated script rule.
std::pair<Corpus, GroundTruth> generate(const DungeonScript& script);

}  // namespace beliefmap
