#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "beliefmap/corpus.hpp"
#include "beliefmap/alignment.hpp"
#include "beliefmap/lexicon.hpp"

namespace beliefmap {

// Place label set per section, computed over a subset of groups.
using SectionLabels = std::vector<std::set<std::string>>;

// Recomputes place labels using only the subset's buckets. Sections come
// from full-corpus markers; the stop config is the full-corpus one.
SectionLabels subset_map_terms(const Corpus& c, const std::vector<Section>& sections,
                               const StopWordConfig& cfg, const std::vector<std::string>& subset,
                               int depth = 20, int label_k = 3, bool players_only = false);

// Term replacements needed to turn one label map into the other: per section
// ceil(|symmetric difference| / 2), summed. A metric on per-section label
// sets. Throws when the section counts differ.
std::int64_t map_difference(const SectionLabels& a, const SectionLabels& b);

struct ConvergenceRow {
  int k = 0;
  std::vector<std::string> subset;  // sorted group ids
  std::int64_t difference = 0;

  bool operator==(const ConvergenceRow&) const = default;
};

struct KAggregate {
  int k = 0;
  std::int64_t min = 0;
  double mean = 0.0;
  std::int64_t max = 0;
};

struct PairRow {
  std::string group_a;
  std::string group_b;
  std::int64_t difference = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // ordered by (k, subset)
  std::vector<KAggregate> aggregates;
  std::vector<PairRow> pairwise;  // single-group comparisons, when requested
};

struct ConvergenceParams {
  int depth = 20;
  int label_k = 3;
  bool players_only = false;
  bool pairwise = false;
  bool parallel = true;
};

// Difference of every non-empty subset's labels against the full-corpus
// labels, with per-k aggregates. Feasible because group counts are small.
ConvergenceReport convergence_report(const Corpus& c, const std::vector<Section>& sections,
                                     const StopWordConfig& cfg,
                                     const ConvergenceParams& params = {});

std::string convergence_csv(const ConvergenceReport& report);
std::string convergence_summary_json(const ConvergenceReport& report);

}  // namespace beliefmap
