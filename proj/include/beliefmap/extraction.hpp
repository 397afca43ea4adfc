#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefmap/alignment.hpp"
#include "beliefmap/corpus.hpp"
#include "beliefmap/lexicon.hpp"

namespace beliefmap {

// Stop-filtered token counts for one bucket; merging is commutative.
struct TermCount {
  std::map<std::string, std::int64_t> counts;

  void merge(const TermCount& other) {
    for (const auto& [tok, n] : other.counts) counts[tok] += n;
  }
  bool operator==(const TermCount&) const = default;
};

struct TermFreq {
  std::string term;
  std::int64_t count = 0;

  bool operator==(const TermFreq&) const = default;
};

// Shared vocabulary of one section: counts summed across all groups, ranked
// by count descending then term ascending, cut at depth. The label is the
// first label_k terms.
struct PlaceProfile {
  int section = 0;
  std::vector<TermFreq> ranked;
  std::vector<std::string> label;

  std::vector<std::string> ranked_terms() const;
  bool operator==(const PlaceProfile&) const = default;
};

// One group's top terms in one section after removing the full place list.
struct SpaceProfile {
  int section = 0;
  std::string group_id;
  std::vector<TermFreq> terms;

  std::vector<std::string> term_list() const;
  bool operator==(const SpaceProfile&) const = default;
};

void to_json(nlohmann::json& j, const TermFreq& t);
void from_json(const nlohmann::json& j, TermFreq& t);

struct ExtractionParams {
  int depth = 20;
  int label_k = 3;
  int space_k = 3;
  bool players_only = false;
  bool parallel = true;
};

// Counts stop-filtered tokens over the given bucket posts of one run. Bot
// posts never count; players_only additionally skips dm narration.
TermCount count_terms(const GroupRun& run, const std::vector<std::int64_t>& bucket,
                      const StopWordConfig& cfg, bool players_only = false);

PlaceProfile place_profile(const std::vector<Section>& sections, const Corpus& c,
                           const StopWordConfig& cfg, int section_index, int depth = 20,
                           int label_k = 3, bool players_only = false);

SpaceProfile space_profile(const std::vector<Section>& sections, const Corpus& c,
                           const StopWordConfig& cfg, int section_index,
                           const std::string& group_id, const PlaceProfile& place, int k = 3,
                           bool players_only = false);

// Everything at once: one PlaceProfile per section plus one SpaceProfile per
// (section, group), with per-bucket counting parallelizable.
struct SectionTerms {
  PlaceProfile place;
  std::vector<SpaceProfile> spaces;  // group_id ascending

  bool operator==(const SectionTerms&) const = default;
};

std::vector<SectionTerms> extract_all(const Corpus& c, const std::vector<Section>& sections,
                                      const StopWordConfig& cfg, const ExtractionParams& params);

void to_json(nlohmann::json& j, const SectionTerms& t);
void from_json(const nlohmann::json& j, SectionTerms& t);

}  // namespace beliefmap
