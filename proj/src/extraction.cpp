#include "beliefmap/extraction.hpp"

#include <algorithm>
#include <set>

#include "beliefmap/errors.hpp"
#include "beliefmap/parallel.hpp"

namespace beliefmap {

std::vector<std::string> PlaceProfile::ranked_terms() const {
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (const TermFreq& t : ranked) out.push_back(t.term);
  return out;
}

std::vector<std::string> SpaceProfile::term_list() const {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const TermFreq& t : terms) out.push_back(t.term);
  return out;
}

void to_json(nlohmann::json& j, const TermFreq& t) {
  j = nlohmann::json{{"term", t.term}, {"count", t.count}};
}

void from_json(const nlohmann::json& j, TermFreq& t) {
  j.at("term").get_to(t.term);
  j.at("count").get_to(t.count);
}

void to_json(nlohmann::json& j, const SectionTerms& t) {
  nlohmann::json spaces = nlohmann::json::object();
  for (const SpaceProfile& sp : t.spaces) spaces[sp.group_id] = sp.terms;
  j = nlohmann::json{{"section", t.place.section},
                     {"label", t.place.label},
                     {"place_terms", t.place.ranked},
                     {"space_terms", spaces}};
}

void from_json(const nlohmann::json& j, SectionTerms& t) {
  j.at("section").get_to(t.place.section);
  j.at("label").get_to(t.place.label);
  j.at("place_terms").get_to(t.place.ranked);
  t.spaces.clear();
  for (const auto& [gid, terms] : j.at("space_terms").items()) {
    SpaceProfile sp;
    sp.section = t.place.section;
    sp.group_id = gid;
    terms.get_to(sp.terms);
    t.spaces.push_back(std::move(sp));
  }
}

namespace {

// count desc, then term asc; cut at limit, skipping excluded terms.
std::vector<TermFreq> rank_terms(const TermCount& tc, std::size_t limit,
                                 const std::set<std::string>* exclude = nullptr) {
  std::vector<TermFreq> out;
  out.reserve(tc.counts.size());
  for (const auto& [tok, cnt] : tc.counts) {
    if (exclude && exclude->count(tok)) continue;
    out.push_back({tok, cnt});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TermFreq& a, const TermFreq& b) { return a.count > b.count; });
  if (out.size() > limit) out.resize(limit);
  return out;
}

const Section& section_at(const std::vector<Section>& sections, int index) {
  for (const Section& s : sections) {
    if (s.index == index) return s;
  }
  fail(errc::usage, "no section with index " + std::to_string(index));
}

}  // namespace

TermCount count_terms(const GroupRun& run, const std::vector<std::int64_t>& bucket,
                      const StopWordConfig& cfg, bool players_only) {
  TermCount tc;
  for (std::int64_t seq : bucket) {
    const Post* p = run.find_seq(seq);
    if (!p) fail(errc::validation, "bucket seq " + std::to_string(seq) + " not in group " + run.group_id);
    if (p->role == Role::bot) continue;
    if (players_only && p->role != Role::player) continue;
    for (std::string& t : tokenize(p->norm_text)) ++tc.counts[std::move(t)];
  }
  // Filter once per distinct token; guid patterns are the expensive part.
  for (auto it = tc.counts.begin(); it != tc.counts.end();) {
    if (cfg.is_stopped(it->first)) {
      it = tc.counts.erase(it);
    } else {
      ++it;
    }
  }
  return tc;
}

PlaceProfile place_profile(const std::vector<Section>& sections, const Corpus& c,
                           const StopWordConfig& cfg, int section_index, int depth, int label_k,
                           bool players_only) {
  const Section& sec = section_at(sections, section_index);
  TermCount merged;
  for (const auto& [gid, bucket] : sec.buckets) {
    merged.merge(count_terms(c.runs.at(gid), bucket, cfg, players_only));
  }
  PlaceProfile out;
  out.section = section_index;
  out.ranked = rank_terms(merged, static_cast<std::size_t>(depth));
  for (std::size_t i = 0; i < out.ranked.size() && i < static_cast<std::size_t>(label_k); ++i) {
    out.label.push_back(out.ranked[i].term);
  }
  return out;
}

SpaceProfile space_profile(const std::vector<Section>& sections, const Corpus& c,
                           const StopWordConfig& cfg, int section_index,
                           const std::string& group_id, const PlaceProfile& place, int k,
                           bool players_only) {
  if (place.section != section_index) {
    fail(errc::usage, "space_profile: place profile is for a different section");
  }
  const Section& sec = section_at(sections, section_index);
  auto it = sec.buckets.find(group_id);
  if (it == sec.buckets.end()) fail(errc::usage, "space_profile: unknown group " + group_id);
  TermCount tc = count_terms(c.runs.at(group_id), it->second, cfg, players_only);
  std::set<std::string> exclude;
  for (const TermFreq& t : place.ranked) exclude.insert(t.term);
  SpaceProfile out;
  out.section = section_index;
  out.group_id = group_id;
  out.terms = rank_terms(tc, static_cast<std::size_t>(k), &exclude);
  return out;
}

std::vector<SectionTerms> extract_all(const Corpus& c, const std::vector<Section>& sections,
                                      const StopWordConfig& cfg, const ExtractionParams& params) {
  const std::vector<std::string> groups = c.group_ids();
  const std::size_t s_count = sections.size();
  const std::size_t g_count = groups.size();

  // One bucket count per (section, group), each slot independent.
  std::vector<TermCount> bucket_counts(s_count * g_count);
  parallel_for(
      s_count * g_count,
      [&](std::size_t idx) {
        const Section& sec = sections[idx / g_count];
        const std::string& gid = groups[idx % g_count];
        auto it = sec.buckets.find(gid);
        if (it == sec.buckets.end()) return;
        bucket_counts[idx] = count_terms(c.runs.at(gid), it->second, cfg, params.players_only);
      },
      params.parallel);

  std::vector<SectionTerms> out(s_count);
  for (std::size_t si = 0; si < s_count; ++si) {
    TermCount merged;
    for (std::size_t gi = 0; gi < g_count; ++gi) merged.merge(bucket_counts[si * g_count + gi]);
    PlaceProfile place;
    place.section = sections[si].index;
    place.ranked = rank_terms(merged, static_cast<std::size_t>(params.depth));
    for (std::size_t i = 0; i < place.ranked.size() && i < static_cast<std::size_t>(params.label_k); ++i) {
      place.label.push_back(place.ranked[i].term);
    }
    std::set<std::string> exclude;
    for (const TermFreq& t : place.ranked) exclude.insert(t.term);

    SectionTerms st;
    st.place = std::move(place);
    for (std::size_t gi = 0; gi < g_count; ++gi) {
      SpaceProfile sp;
      sp.section = sections[si].index;
      sp.group_id = groups[gi];
      sp.terms = rank_terms(bucket_counts[si * g_count + gi], static_cast<std::size_t>(params.space_k),
                            &exclude);
      st.spaces.push_back(std::move(sp));
    }
    out[si] = std::move(st);
  }
  return out;
}

}  // namespace beliefmap
