#include "beliefmap/alignment.hpp"

#include <algorithm>
#include <set>

#include "beliefmap/errors.hpp"
#include "beliefmap/lexicon.hpp"
#include "beliefmap/parallel.hpp"

namespace beliefmap {

void to_json(nlohmann::json& j, const Marker& m) {
  j = nlohmann::json{{"index", m.index},
                     {"anchors", m.anchors},
                     {"canonical_text", m.canonical_text},
                     {"min_similarity", m.min_similarity}};
}

void from_json(const nlohmann::json& j, Marker& m) {
  j.at("index").get_to(m.index);
  j.at("anchors").get_to(m.anchors);
  j.at("canonical_text").get_to(m.canonical_text);
  j.at("min_similarity").get_to(m.min_similarity);
}

void to_json(nlohmann::json& j, const Section& s) {
  j = nlohmann::json{{"index", s.index}, {"buckets", s.buckets}};
}

void from_json(const nlohmann::json& j, Section& s) {
  j.at("index").get_to(s.index);
  j.at("buckets").get_to(s.buckets);
}

namespace {

constexpr std::size_t kShingleLen = 5;

std::set<std::string> shingle_set(const std::vector<std::string>& tokens) {
  std::set<std::string> out;
  if (tokens.size() < kShingleLen) return out;
  for (std::size_t i = 0; i + kShingleLen <= tokens.size(); ++i) {
    std::string s = tokens[i];
    for (std::size_t k = 1; k < kShingleLen; ++k) {
      s.push_back('\x1F');
      s.append(tokens[i + k]);
    }
    out.insert(std::move(s));
  }
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia == *ib) {
      ++inter;
      ++ia;
      ++ib;
    } else if (*ia < *ib) {
      ++ia;
    } else {
      ++ib;
    }
  }
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct Candidate {
  const Post* post = nullptr;
  std::set<std::string> shingles;
};

}  // namespace

double post_similarity(const Post& a, const Post& b) {
  std::vector<std::string> ta = tokenize(a.norm_text);
  std::vector<std::string> tb = tokenize(b.norm_text);
  if (ta.size() < kShingleLen || tb.size() < kShingleLen) {
    return a.norm_text == b.norm_text ? 1.0 : 0.0;
  }
  return jaccard(shingle_set(ta), shingle_set(tb));
}

std::vector<Marker> detect_markers(const Corpus& c, const MarkerParams& params) {
  if (c.runs.size() < 2) fail(errc::validation, "detect_markers: need at least 2 groups");
  if (params.min_tokens < static_cast<int>(kShingleLen)) {
    fail(errc::usage, "detect_markers: min_tokens must be >= 5");
  }

  const std::vector<std::string> groups = c.group_ids();
  const std::string& first = groups.front();

  // Marker candidates per group, in seq order.
  std::map<std::string, std::vector<Candidate>> candidates;
  for (const auto& [gid, run] : c.runs) {
    auto& list = candidates[gid];
    for (const Post& p : run.posts) {
      if (p.role == Role::bot) continue;
      if (params.dm_only && p.role != Role::dm) continue;
      std::vector<std::string> toks = tokenize(p.norm_text);
      if (toks.size() < static_cast<std::size_t>(params.min_tokens)) continue;
      list.push_back({&p, shingle_set(toks)});
    }
  }

  // Greedy clustering: each candidate of the first group seeds a cluster and
  // takes the best unused match >= theta from every other group.
  struct Cluster {
    std::map<std::string, std::int64_t> anchors;
    std::string canonical;
    double min_sim = 1.0;
  };
  std::vector<Cluster> clusters;
  std::map<std::string, std::set<std::int64_t>> used;
  for (const std::string& gid : groups) used[gid];  // pre-create: the parallel scan only reads

  for (const Candidate& seed : candidates[first]) {
    std::vector<const Candidate*> members(groups.size(), nullptr);
    members[0] = &seed;
    std::vector<double> best_sims(groups.size(), 0.0);
    parallel_for(
        groups.size() - 1,
        [&](std::size_t idx) {
          const std::string& gid = groups[idx + 1];
          const Candidate* best = nullptr;
          double best_sim = 0.0;
          const auto& taken = used.at(gid);
          for (const Candidate& cand : candidates.at(gid)) {
            if (taken.count(cand.post->seq)) continue;
            double sim = jaccard(seed.shingles, cand.shingles);
            if (sim > best_sim) {
              best_sim = sim;
              best = &cand;
            }
          }
          if (best && best_sim >= params.theta) {
            members[idx + 1] = best;
            best_sims[idx + 1] = best_sim;
          }
        },
        params.parallel);
    if (std::any_of(members.begin(), members.end(), [](const Candidate* m) { return !m; })) {
      continue;  // markers exist in every run by construction
    }

    double min_sim = 1.0;
    for (std::size_t i = 0; i < members.size() && min_sim >= params.theta; ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        double sim = jaccard(members[i]->shingles, members[j]->shingles);
        min_sim = std::min(min_sim, sim);
        if (min_sim < params.theta) break;
      }
    }
    if (min_sim < params.theta) continue;

    Cluster cl;
    for (std::size_t i = 0; i < groups.size(); ++i) cl.anchors[groups[i]] = members[i]->post->seq;
    cl.canonical = seed.post->norm_text;
    cl.min_sim = min_sim;
    clusters.push_back(std::move(cl));
    for (std::size_t i = 1; i < groups.size(); ++i) used[groups[i]].insert(members[i]->post->seq);
  }

  // Clusters are already ordered by the first group's seq. Keep the longest
  // chain whose anchors increase in every group; among equal-length chains
  // the greedy front-to-back reconstruction picks the one with the smallest
  // anchor sequence in the first group.
  const std::size_t n = clusters.size();
  auto precedes = [&](std::size_t i, std::size_t j) {
    for (const std::string& gid : groups) {
      if (clusters[i].anchors.at(gid) >= clusters[j].anchors.at(gid)) return false;
    }
    return true;
  };
  std::vector<int> chain_from(n, 1);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (precedes(i, j)) chain_from[i] = std::max(chain_from[i], 1 + chain_from[j]);
    }
  }
  int best_len = 0;
  for (std::size_t i = 0; i < n; ++i) best_len = std::max(best_len, chain_from[i]);

  std::vector<Marker> markers;
  std::size_t prev = n;  // none yet
  for (int need = best_len; need > 0; --need) {
    for (std::size_t i = (prev == n ? 0 : prev + 1); i < n; ++i) {
      if (chain_from[i] != need) continue;
      if (prev != n && !precedes(prev, i)) continue;
      Marker m;
      m.index = static_cast<int>(markers.size());
      m.anchors = clusters[i].anchors;
      m.canonical_text = clusters[i].canonical;
      m.min_similarity = clusters[i].min_sim;
      markers.push_back(std::move(m));
      prev = i;
      break;
    }
  }

  if (markers.empty()) fail(errc::validation, "no common markers");
  return markers;
}

std::vector<Section> section_corpus(const Corpus& c, const std::vector<Marker>& markers) {
  if (markers.size() < 2) fail(errc::validation, "section_corpus: need at least 2 markers");
  std::vector<Section> sections;
  sections.reserve(markers.size() - 1);
  for (std::size_t i = 0; i + 1 < markers.size(); ++i) {
    Section s;
    s.index = static_cast<int>(i);
    for (const auto& [gid, run] : c.runs) {
      auto lo = markers[i].anchors.find(gid);
      auto hi = markers[i + 1].anchors.find(gid);
      if (lo == markers[i].anchors.end() || hi == markers[i + 1].anchors.end()) {
        fail(errc::validation, "section_corpus: marker missing anchor for group " + gid);
      }
      std::vector<std::int64_t>& bucket = s.buckets[gid];
      for (const Post& p : run.posts) {
        if (p.seq <= lo->second) continue;
        if (p.seq >= hi->second) break;
        if (p.role == Role::bot) continue;
        bucket.push_back(p.seq);
      }
    }
    sections.push_back(std::move(s));
  }
  return sections;
}

}  // namespace beliefmap
