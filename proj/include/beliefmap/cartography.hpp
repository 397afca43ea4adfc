#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "beliefmap/alignment.hpp"
#include "beliefmap/corpus.hpp"
#include "beliefmap/extraction.hpp"

namespace beliefmap {

struct MapPlace {
  int section = 0;
  std::vector<std::string> label;
  std::optional<std::string> snippet;

  bool operator==(const MapPlace&) const = default;
};

struct MapSatellite {
  int section = 0;
  std::string group_id;
  std::vector<std::string> terms;
  std::optional<std::string> snippet;

  bool operator==(const MapSatellite&) const = default;
};

// Directed chain of places in section order; satellites hang off their place
// with undirected edges. Every snippet is at most the configured length and
// contains all of its query terms.
struct BeliefMap {
  std::vector<MapPlace> places;
  std::vector<MapSatellite> satellites;

  bool operator==(const BeliefMap&) const = default;
};

// First post in the section whose raw text contains every term, scanned in
// (group_id, seq) order; group_scope restricts the scan to one group. Each
// term must match case-insensitively on token boundaries and end within the
// first max_len-3 scalars, so truncation can never cut a query term. Posts
// longer than max_len scalars come back truncated with a "..." tail, total
// exactly max_len.
std::optional<std::string> find_snippet(const Corpus& c, const Section& section,
                                        const std::optional<std::string>& group_scope,
                                        const std::vector<std::string>& terms,
                                        std::size_t max_len = 160);

BeliefMap build_map(const Corpus& c, const std::vector<Section>& sections,
                    const std::vector<SectionTerms>& terms, std::size_t snippet_len = 160);

// GraphViz output: places are boxes chained with directed edges, satellites
// are ellipses attached with dir=none edges. Node ids are p<section> and
// s<section>_<group>.
std::string emit_dot(const BeliefMap& m);

// Canonical serialization: sorted keys, stable bytes.
std::string emit_json(const BeliefMap& m);
BeliefMap map_from_json(const std::string& text);

}  // namespace beliefmap
