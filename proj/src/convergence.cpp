#include "beliefmap/convergence.hpp"

#include <algorithm>
#include <bit>

#include <json.hpp>

#include "beliefmap/errors.hpp"
#include "beliefmap/extraction.hpp"
#include "beliefmap/parallel.hpp"

namespace beliefmap {

namespace {

std::set<std::string> label_from_count(const TermCount& merged, int depth, int label_k) {
  std::vector<TermFreq> ranked;
  ranked.reserve(merged.counts.size());
  for (const auto& [tok, cnt] : merged.counts) ranked.push_back({tok, cnt});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const TermFreq& a, const TermFreq& b) { return a.count > b.count; });
  if (ranked.size() > static_cast<std::size_t>(depth)) ranked.resize(depth);
  std::set<std::string> label;
  for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(label_k); ++i) {
    label.insert(ranked[i].term);
  }
  return label;
}

}  // namespace

SectionLabels subset_map_terms(const Corpus& c, const std::vector<Section>& sections,
                               const StopWordConfig& cfg, const std::vector<std::string>& subset,
                               int depth, int label_k, bool players_only) {
  if (subset.empty()) fail(errc::usage, "subset_map_terms: empty subset");
  for (const std::string& gid : subset) {
    if (!c.runs.count(gid)) fail(errc::usage, "subset_map_terms: unknown group " + gid);
  }
  SectionLabels out;
  out.reserve(sections.size());
  for (const Section& sec : sections) {
    TermCount merged;
    for (const std::string& gid : subset) {
      auto it = sec.buckets.find(gid);
      if (it == sec.buckets.end()) continue;
      merged.merge(count_terms(c.runs.at(gid), it->second, cfg, players_only));
    }
    out.push_back(label_from_count(merged, depth, label_k));
  }
  return out;
}

std::int64_t map_difference(const SectionLabels& a, const SectionLabels& b) {
  if (a.size() != b.size()) fail(errc::validation, "map_difference: section count mismatch");
  std::int64_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::int64_t sym = 0;
    for (const std::string& t : a[i]) sym += b[i].count(t) ? 0 : 1;
    for (const std::string& t : b[i]) sym += a[i].count(t) ? 0 : 1;
    total += (sym + 1) / 2;  // replacements, odd leftovers round up
  }
  return total;
}

ConvergenceReport convergence_report(const Corpus& c, const std::vector<Section>& sections,
                                     const StopWordConfig& cfg, const ConvergenceParams& params) {
  const std::vector<std::string> groups = c.group_ids();
  const std::size_t g = groups.size();
  if (g < 2) fail(errc::validation, "convergence_report: need at least 2 groups");
  if (g > 16) fail(errc::usage, "convergence_report: subset enumeration capped at 16 groups");

  // Count each (section, group) bucket once; subset labels are merges.
  std::vector<std::vector<TermCount>> counts(sections.size(), std::vector<TermCount>(g));
  parallel_for(
      sections.size() * g,
      [&](std::size_t idx) {
        const Section& sec = sections[idx / g];
        const std::string& gid = groups[idx % g];
        auto it = sec.buckets.find(gid);
        if (it == sec.buckets.end()) return;
        counts[idx / g][idx % g] = count_terms(c.runs.at(gid), it->second, cfg, params.players_only);
      },
      params.parallel);

  auto labels_for_mask = [&](std::uint32_t mask) {
    SectionLabels labels;
    labels.reserve(sections.size());
    for (std::size_t si = 0; si < sections.size(); ++si) {
      TermCount merged;
      for (std::size_t gi = 0; gi < g; ++gi) {
        if (mask & (1u << gi)) merged.merge(counts[si][gi]);
      }
      labels.push_back(label_from_count(merged, params.depth, params.label_k));
    }
    return labels;
  };

  const std::uint32_t full_mask = (1u << g) - 1;
  const SectionLabels full_labels = labels_for_mask(full_mask);

  // Masks ordered by (k, lexicographic subset). Group indices are already in
  // lexicographic id order, so sorting subsets as id vectors works.
  std::vector<std::uint32_t> masks;
  masks.reserve(full_mask);
  for (std::uint32_t mask = 1; mask <= full_mask; ++mask) masks.push_back(mask);
  auto subset_of = [&](std::uint32_t mask) {
    std::vector<std::string> ids;
    for (std::size_t gi = 0; gi < g; ++gi) {
      if (mask & (1u << gi)) ids.push_back(groups[gi]);
    }
    return ids;
  };
  std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
    int ka = std::popcount(a);
    int kb = std::popcount(b);
    if (ka != kb) return ka < kb;
    return subset_of(a) < subset_of(b);
  });

  ConvergenceReport report;
  report.rows.resize(masks.size());
  parallel_for(
      masks.size(),
      [&](std::size_t i) {
        std::uint32_t mask = masks[i];
        ConvergenceRow row;
        row.subset = subset_of(mask);
        row.k = static_cast<int>(row.subset.size());
        row.difference = map_difference(labels_for_mask(mask), full_labels);
        report.rows[i] = std::move(row);
      },
      params.parallel);

  for (std::size_t i = 0; i < report.rows.size();) {
    std::size_t j = i;
    std::int64_t sum = 0;
    KAggregate agg;
    agg.k = report.rows[i].k;
    agg.min = report.rows[i].difference;
    agg.max = report.rows[i].difference;
    while (j < report.rows.size() && report.rows[j].k == agg.k) {
      agg.min = std::min(agg.min, report.rows[j].difference);
      agg.max = std::max(agg.max, report.rows[j].difference);
      sum += report.rows[j].difference;
      ++j;
    }
    agg.mean = static_cast<double>(sum) / static_cast<double>(j - i);
    report.aggregates.push_back(agg);
    i = j;
  }

  if (params.pairwise) {
    std::vector<SectionLabels> singles(g);
    for (std::size_t gi = 0; gi < g; ++gi) singles[gi] = labels_for_mask(1u << gi);
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = i + 1; j < g; ++j) {
        report.pairwise.push_back({groups[i], groups[j], map_difference(singles[i], singles[j])});
      }
    }
  }
  return report;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out = "k,subset,difference\n";
  for (const ConvergenceRow& row : report.rows) {
    out += std::to_string(row.k);
    out.push_back(',');
    for (std::size_t i = 0; i < row.subset.size(); ++i) {
      if (i) out.push_back('|');
      out += row.subset[i];
    }
    out.push_back(',');
    out += std::to_string(row.difference);
    out.push_back('\n');
  }
  return out;
}

std::string convergence_summary_json(const ConvergenceReport& report) {
  nlohmann::json per_k = nlohmann::json::array();
  for (const KAggregate& agg : report.aggregates) {
    per_k.push_back({{"k", agg.k}, {"min", agg.min}, {"mean", agg.mean}, {"max", agg.max}});
  }
  nlohmann::json j{{"per_k", per_k}};
  if (!report.pairwise.empty()) {
    nlohmann::json pairs = nlohmann::json::array();
    std::int64_t sum = 0;
    for (const PairRow& p : report.pairwise) {
      pairs.push_back({{"group_a", p.group_a}, {"group_b", p.group_b}, {"difference", p.difference}});
      sum += p.difference;
    }
    j["pairwise"] = pairs;
    j["pairwise_mean"] = static_cast<double>(sum) / static_cast<double>(report.pairwise.size());
  }
  return j.dump(2) + "\n";
}

}  // namespace beliefmap
