#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefmap/corpus.hpp"

namespace beliefmap {

// A cross-group anchor: one near-identical DM-pasted post per group.
struct Marker {
  int index = 0;
  std::map<std::string, std::int64_t> anchors;  // group_id -> seq
  std::string canonical_text;                   // normalized text from the first group's anchor
  double min_similarity = 0.0;                  // weakest pairwise similarity in the cluster

  bool operator==(const Marker&) const = default;
};

// Posts strictly between two consecutive markers, per group, bot posts
// excluded. With M markers there are exactly M-1 sections.
struct Section {
  int index = 0;
  std::map<std::string, std::vector<std::int64_t>> buckets;  // group_id -> seqs

  bool operator==(const Section&) const = default;
};

void to_json(nlohmann::json& j, const Marker& m);
void from_json(const nlohmann::json& j, Marker& m);
void to_json(nlohmann::json& j, const Section& s);
void from_json(const nlohmann::json& j, Section& s);

// Jaccard similarity of the 5-token shingle sets of the two normalized
// texts. Posts with fewer than 5 tokens compare by exact text equality.
double post_similarity(const Post& a, const Post& b);

struct MarkerParams {
  double theta = 0.8;
  int min_tokens = 25;
  bool dm_only = true;
  bool parallel = true;
};

// Finds the maximal ordered marker chain: greedy candidate clustering seeded
// from the lexicographically first group, then the longest order-consistent
// chain (ties resolved toward the smallest anchor sequence in that group).
// Throws when fewer than 2 groups are present or no marker is found.
std::vector<Marker> detect_markers(const Corpus& c, const MarkerParams& params = {});

// Splits each run into the M-1 per-group buckets between consecutive
// markers. Requires at least 2 markers.
std::vector<Section> section_corpus(const Corpus& c, const std::vector<Marker>& markers);

}  // namespace beliefmap
