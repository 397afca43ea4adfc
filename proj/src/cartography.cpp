#include "beliefmap/cartography.hpp"

#include <algorithm>

#include <json.hpp>

#include "beliefmap/errors.hpp"
#include "beliefmap/utf8.hpp"

namespace beliefmap {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Case-insensitive token-boundary match whose end lies within the first
// window scalars of text. Boundaries are judged in the full text, so a term
// never matches half of a longer word at the window edge.
bool term_within(const std::string& text, const std::string& term, std::size_t window) {
  if (term.empty() || term.size() > text.size()) return false;
  for (std::size_t pos = 0; pos + term.size() <= text.size(); ++pos) {
    bool hit = true;
    for (std::size_t k = 0; k < term.size() && hit; ++k) {
      hit = fold(text[pos + k]) == fold(term[k]);
    }
    if (!hit) continue;
    if (pos > 0 && is_token_byte(static_cast<unsigned char>(text[pos - 1]))) continue;
    std::size_t end = pos + term.size();
    if (end < text.size() && is_token_byte(static_cast<unsigned char>(text[end]))) continue;
    if (utf8::scalar_count(std::string_view(text).substr(0, end)) <= window) return true;
  }
  return false;
}

}  // namespace

std::optional<std::string> find_snippet(const Corpus& c, const Section& section,
                                        const std::optional<std::string>& group_scope,
                                        const std::vector<std::string>& terms,
                                        std::size_t max_len) {
  if (terms.empty()) fail(errc::usage, "find_snippet: no query terms");
  if (max_len < 4) fail(errc::usage, "find_snippet: max_len must be >= 4");
  const std::size_t window = max_len - 3;

  for (const auto& [gid, bucket] : section.buckets) {
    if (group_scope && gid != *group_scope) continue;
    auto run_it = c.runs.find(gid);
    if (run_it == c.runs.end()) continue;
    for (std::int64_t seq : bucket) {
      const Post* p = run_it->second.find_seq(seq);
      if (!p) continue;
      bool all = true;
      for (const std::string& t : terms) {
        if (!term_within(p->raw_text, t, window)) {
          all = false;
          break;
        }
      }
      if (!all) continue;
      if (utf8::scalar_count(p->raw_text) <= max_len) return p->raw_text;
      return std::string(utf8::scalar_prefix(p->raw_text, window)) + "...";
    }
  }
  return std::nullopt;
}

BeliefMap build_map(const Corpus& c, const std::vector<Section>& sections,
                    const std::vector<SectionTerms>& terms, std::size_t snippet_len) {
  BeliefMap m;
  for (const SectionTerms& st : terms) {
    const Section* sec = nullptr;
    for (const Section& s : sections) {
      if (s.index == st.place.section) sec = &s;
    }
    if (!sec) fail(errc::validation, "build_map: no section " + std::to_string(st.place.section));

    MapPlace place;
    place.section = st.place.section;
    place.label = st.place.label;
    if (!place.label.empty()) {
      place.snippet = find_snippet(c, *sec, std::nullopt, place.label, snippet_len);
    }
    m.places.push_back(std::move(place));

    for (const SpaceProfile& sp : st.spaces) {
      MapSatellite sat;
      sat.section = sp.section;
      sat.group_id = sp.group_id;
      sat.terms = sp.term_list();
      if (!sat.terms.empty()) {
        sat.snippet = find_snippet(c, *sec, sat.group_id, sat.terms, snippet_len);
      }
      m.satellites.push_back(std::move(sat));
    }
  }
  std::stable_sort(m.places.begin(), m.places.end(),
                   [](const MapPlace& a, const MapPlace& b) { return a.section < b.section; });
  std::stable_sort(m.satellites.begin(), m.satellites.end(),
                   [](const MapSatellite& a, const MapSatellite& b) {
                     if (a.section != b.section) return a.section < b.section;
                     return a.group_id < b.group_id;
                   });
  return m;
}

namespace {

std::string dot_id(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    out.push_back(is_token_byte(static_cast<unsigned char>(c)) && static_cast<unsigned char>(c) < 0x80
                      ? c
                      : '_');
  }
  return out;
}

std::string dot_escape(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string join_dash(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out.push_back('-');
    out += p;
  }
  return out;
}

}  // namespace

std::string emit_dot(const BeliefMap& m) {
  std::string out = "// belief map: directed place chain with per-group space satellites\n";
  if (m.places.empty() && m.satellites.empty()) {
    out += "digraph beliefmap { }\n";
    return out;
  }
  out += "digraph beliefmap {\n";
  out += "  rankdir=LR;\n";
  for (const MapPlace& p : m.places) {
    out += "  p" + std::to_string(p.section) + " [shape=box, label=\"" +
           dot_escape(join_dash(p.label)) + "\"];\n";
  }
  for (std::size_t i = 0; i + 1 < m.places.size(); ++i) {
    out += "  p" + std::to_string(m.places[i].section) + " -> p" +
           std::to_string(m.places[i + 1].section) + ";\n";
  }
  for (const MapSatellite& s : m.satellites) {
    std::string id = "s" + std::to_string(s.section) + "_" + dot_id(s.group_id);
    std::string label = s.group_id;
    if (!s.terms.empty()) label += ": " + join_dash(s.terms);
    out += "  " + id + " [shape=ellipse, label=\"" + dot_escape(label) + "\"];\n";
    out += "  p" + std::to_string(s.section) + " -> " + id + " [dir=none];\n";
  }
  out += "}\n";
  return out;
}

std::string emit_json(const BeliefMap& m) {
  nlohmann::json places = nlohmann::json::array();
  for (const MapPlace& p : m.places) {
    nlohmann::json jp{{"section", p.section}, {"label", p.label}};
    jp["snippet"] = p.snippet ? nlohmann::json(*p.snippet) : nlohmann::json(nullptr);
    places.push_back(std::move(jp));
  }
  nlohmann::json sats = nlohmann::json::array();
  for (const MapSatellite& s : m.satellites) {
    nlohmann::json js{{"section", s.section}, {"group_id", s.group_id}, {"terms", s.terms}};
    js["snippet"] = s.snippet ? nlohmann::json(*s.snippet) : nlohmann::json(nullptr);
    sats.push_back(std::move(js));
  }
  nlohmann::json j{{"places", places}, {"satellites", sats}};
  return j.dump(2) + "\n";
}

BeliefMap map_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(errc::malformed, "map: not valid json");
  BeliefMap m;
  try {
    for (const auto& jp : j.at("places")) {
      MapPlace p;
      jp.at("section").get_to(p.section);
      jp.at("label").get_to(p.label);
      if (!jp.at("snippet").is_null()) p.snippet = jp.at("snippet").get<std::string>();
      m.places.push_back(std::move(p));
    }
    for (const auto& js : j.at("satellites")) {
      MapSatellite s;
      js.at("section").get_to(s.section);
      js.at("group_id").get_to(s.group_id);
      js.at("terms").get_to(s.terms);
      if (!js.at("snippet").is_null()) s.snippet = js.at("snippet").get<std::string>();
      m.satellites.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::malformed, std::string("map: ") + e.what());
  }
  return m;
}

}  // namespace beliefmap
