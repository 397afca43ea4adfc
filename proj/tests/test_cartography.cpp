#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "beliefmap/cartography.hpp"
#include "beliefmap/errors.hpp"
#include "beliefmap/syngen.hpp"
#include "beliefmap/utf8.hpp"
#include "helpers.hpp"

using namespace beliefmap;
using testutil::corpus_of;
using testutil::make_post;

namespace {

struct SnippetWorld {
  Corpus corpus;
  Section section;

  explicit SnippetWorld(const std::vector<std::pair<std::string, std::string>>& group_texts) {
    std::vector<Post> posts;
    std::map<std::string, std::int64_t> next;
    for (const auto& [gid, text] : group_texts) {
      std::int64_t seq = next[gid]++;
      posts.push_back(make_post(gid, seq, "Ann", Role::player, text));
      section.buckets[gid].push_back(seq);
    }
    corpus = corpus_of(std::move(posts));
    section.index = 0;
  }
};

}  // namespace

TEST_CASE("find_snippet returns a short qualifying post verbatim") {
  std::string text = "The rope dangles over the pit while the gate stands shut.";  // 58 chars
  SnippetWorld w({{"g1", text}});
  auto got = find_snippet(w.corpus, w.section, std::nullopt, {"rope", "gate", "pit"});
  REQUIRE(got.has_value());
  CHECK(*got == text);
}

TEST_CASE("find_snippet returns none when no post has all terms") {
  SnippetWorld w({{"g1", "the rope and the gate"}, {"g1", "the pit and the gate"}});
  CHECK_FALSE(find_snippet(w.corpus, w.section, std::nullopt, {"rope", "gate", "pit"}).has_value());
}

TEST_CASE("find_snippet truncates a 300-char post to exactly 160 with terms intact") {
  std::string text =
      "The rope creaks as Cricket tests the gate mechanism above the yawning pit, ";  // 76
  text +=
      "counting each knot twice before committing, while the rest of the party argues about "
      "whether the lever on the wall resets the whole contraption or merely locks it tighter.";
  REQUIRE(text.size() >= 300 - 20);
  SnippetWorld w({{"g1", text}});
  auto got = find_snippet(w.corpus, w.section, std::nullopt, {"rope", "gate", "pit"});
  REQUIRE(got.has_value());
  CHECK(utf8::scalar_count(*got) == 160);
  CHECK(got->substr(got->size() - 3) == "...");
  for (const char* term : {"rope", "gate", "pit"}) {
    CAPTURE(term);
    CHECK(got->find(term) != std::string::npos);
  }
}

TEST_CASE("find_snippet ignores posts whose terms sit beyond the truncation window") {
  std::string padding(200, 'x');
  std::string late = padding + " rope gate pit";
  std::string early = "rope gate pit here, nice and early";
  SnippetWorld w({{"g1", late}, {"g1", early}});
  auto got = find_snippet(w.corpus, w.section, std::nullopt, {"rope", "gate", "pit"});
  REQUIRE(got.has_value());
  CHECK(*got == early);
}

TEST_CASE("find_snippet matches terms only on token boundaries, case-insensitive") {
  SnippetWorld w({{"g1", "the ropes and gates over pits"}, {"g1", "Rope! Gate? PIT."}});
  auto got = find_snippet(w.corpus, w.section, std::nullopt, {"rope", "gate", "pit"});
  REQUIRE(got.has_value());
  CHECK(*got == "Rope! Gate? PIT.");
}

TEST_CASE("find_snippet scans groups lexicographically and respects scope") {
  SnippetWorld w({{"g2", "rope gate pit in g2"}, {"g1", "rope gate pit in g1"}});
  auto any = find_snippet(w.corpus, w.section, std::nullopt, {"rope", "gate", "pit"});
  REQUIRE(any.has_value());
  CHECK(*any == "rope gate pit in g1");
  auto scoped = find_snippet(w.corpus, w.section, std::string("g2"), {"rope", "gate", "pit"});
  REQUIRE(scoped.has_value());
  CHECK(*scoped == "rope gate pit in g2");
}

TEST_CASE("find_snippet counts scalars, not bytes") {
  // 100 two-byte scalars, then the terms; total 117 scalars, 217 bytes.
  std::string text;
  for (int i = 0; i < 100; ++i) text += "\xC3\xA9";
  text += " rope gate pit xx";
  SnippetWorld w({{"g1", text}});
  auto got = find_snippet(w.corpus, w.section, std::nullopt, {"rope", "gate", "pit"});
  REQUIRE(got.has_value());
  CHECK(*got == text);  // 117 scalars, no truncation
}

namespace {

BeliefMap tiny_map() {
  SnippetWorld w({{"g1", "the rope gate pit post"}});
  SectionTerms st;
  st.place.section = 0;
  st.place.ranked = {{"rope", 3}, {"gate", 2}, {"pit", 1}};
  st.place.label = {"rope", "gate", "pit"};
  SpaceProfile sp;
  sp.section = 0;
  sp.group_id = "g1";
  sp.terms = {{"knot", 1}};  // never appears in the corpus, so no snippet
  st.spaces = {sp};
  return build_map(w.corpus, {w.section}, {st});
}

// Minimal DOT grammar check: header comment, digraph block, node statements
// with attributes, edge statements. Returns (node count, edge count).
std::pair<int, int> dot_parse_oracle(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  REQUIRE(cur.empty());  // must end with newline
  REQUIRE(lines.size() >= 2);
  REQUIRE(lines[0].substr(0, 2) == "//");
  if (lines[1] == "digraph beliefmap { }") return {0, 0};
  REQUIRE(lines[1] == "digraph beliefmap {");
  REQUIRE(lines.back() == "}");
  int nodes = 0;
  int edges = 0;
  std::set<std::string> declared;
  for (std::size_t i = 2; i + 1 < lines.size(); ++i) {
    std::string line = lines[i];
    REQUIRE(line.substr(0, 2) == "  ");
    line = line.substr(2);
    REQUIRE(!line.empty());
    REQUIRE(line.back() == ';');
    line.pop_back();
    if (line == "rankdir=LR") continue;
    std::size_t arrow = line.find(" -> ");
    if (arrow == std::string::npos) {
      std::size_t bracket = line.find(" [");
      REQUIRE(bracket != std::string::npos);
      REQUIRE(line.find("label=\"") != std::string::npos);
      REQUIRE(line.back() == ']');
      declared.insert(line.substr(0, bracket));
      ++nodes;
    } else {
      std::string from = line.substr(0, arrow);
      std::string to = line.substr(arrow + 4);
      std::size_t bracket = to.find(" [");
      if (bracket != std::string::npos) to = to.substr(0, bracket);
      REQUIRE(declared.count(from));
      REQUIRE(declared.count(to));
      ++edges;
    }
  }
  return {nodes, edges};
}

}  // namespace

TEST_CASE("build_map with one section and one group") {
  BeliefMap m = tiny_map();
  REQUIRE(m.places.size() == 1);
  REQUIRE(m.satellites.size() == 1);
  CHECK(m.places[0].label == std::vector<std::string>{"rope", "gate", "pit"});
  REQUIRE(m.places[0].snippet.has_value());
  CHECK(*m.places[0].snippet == "the rope gate pit post");
  CHECK(m.satellites[0].group_id == "g1");
  CHECK_FALSE(m.satellites[0].snippet.has_value());  // "knot" never appears
}

TEST_CASE("a five-group four-section corpus yields 20 satellites in a chain") {
  DungeonScript script;
  const char* texts[] = {
      "the gatehouse smells of oiled hinges and wet rope while the gatekeeper recites the rules "
      "of passage to every visitor who dares approach the winch",
      "the long bridge sways over the chasm as wind sings through its cables and loose planks "
      "rattle a warning under every hesitant step forward",
      "the toll chamber glitters with stacked coins behind iron bars while a bored clerk stamps "
      "papers and waves the next group toward the weighing scales",
      "the far platform overlooks a sea of clouds where gulls wheel between broken statues and "
      "a bell rings somewhere below the drifting mist",
  };
  const char* places[4][3] = {{"winch", "hinge", "rule"},
                              {"bridge", "cable", "plank"},
                              {"toll", "clerk", "scale"},
                              {"bell", "gull", "mist"}};
  for (int si = 0; si < 4; ++si) {
    ScriptSection sec;
    sec.marker_text = texts[si];
    sec.place_vocab = {{places[si][0], 8}, {places[si][1], 6}, {places[si][2], 4}};
    sec.posts_per_bucket = 12;
    script.sections.push_back(std::move(sec));
  }
  script.final_marker_text =
      "the crossing complete the five travelers sign the ledger at the far gate and descend the "
      "spiral stair toward the valley lights far below";
  for (int gi = 0; gi < 5; ++gi) {
    script.groups.push_back({"party" + std::to_string(gi), "Keeper",
                             {"One" + std::to_string(gi), "Two" + std::to_string(gi)}});
  }
  script.filler_vocab = {{"torch", 1}, {"dust", 1}, {"floor", 1}, {"stone", 1}};
  script.tokens_per_post = 10;
  script.name_mentions = 2;
  script.seed = 404;
  auto [corpus, truth] = generate(script);
  std::vector<Section> sections = section_corpus(corpus, detect_markers(corpus));
  StopWordConfig cfg;
  auto all = extract_all(corpus, sections, cfg, ExtractionParams{});
  BeliefMap m = build_map(corpus, sections, all);
  CHECK(m.places.size() == 4);
  CHECK(m.satellites.size() == 20);

  std::string dot = emit_dot(m);
  auto [nodes, edges] = dot_parse_oracle(dot);
  CHECK(nodes == 24);           // 4 places + 20 satellites
  CHECK(edges == 3 + 20);       // chain edges + satellite links
  CHECK(dot.find("p0 -> p1;") != std::string::npos);
  CHECK(dot.find("[dir=none]") != std::string::npos);
}

TEST_CASE("emit_dot empty map") {
  BeliefMap empty;
  std::string dot = emit_dot(empty);
  CHECK(dot.find("digraph beliefmap { }") != std::string::npos);
  auto [nodes, edges] = dot_parse_oracle(dot);
  CHECK(nodes == 0);
  CHECK(edges == 0);
}

TEST_CASE("emit_dot two-place map has exactly one chain edge") {
  BeliefMap m;
  m.places.push_back({0, {"rope", "gate", "orb"}, std::nullopt});
  m.places.push_back({1, {"troll", "grogg", "box"}, std::nullopt});
  std::string dot = emit_dot(m);
  auto [nodes, edges] = dot_parse_oracle(dot);
  CHECK(nodes == 2);
  CHECK(edges == 1);
  CHECK(dot.find("p0 -> p1;") != std::string::npos);
}

TEST_CASE("emit_dot escapes quotes and sanitizes ids") {
  BeliefMap m;
  m.places.push_back({0, {"a\"b"}, std::nullopt});
  m.satellites.push_back({0, "odd group!", {"x\\y"}, std::nullopt});
  std::string dot = emit_dot(m);
  CHECK(dot.find("s0_odd_group_") != std::string::npos);
  CHECK(dot.find("a\\\"b") != std::string::npos);
  auto [nodes, edges] = dot_parse_oracle(dot);
  CHECK(nodes == 2);
  CHECK(edges == 1);
}

TEST_CASE("emit_json is deterministic and round-trips") {
  BeliefMap m = tiny_map();
  std::string a = emit_json(m);
  std::string b = emit_json(m);
  CHECK(a == b);
  BeliefMap parsed = map_from_json(a);
  CHECK(parsed == m);
  CHECK(emit_json(parsed) == a);
}

TEST_CASE("find_snippet input validation") {
  SnippetWorld w({{"g1", "anything"}});
  CHECK_THROWS_AS(static_cast<void>(find_snippet(w.corpus, w.section, std::nullopt, {})), error);
  CHECK_THROWS_AS(static_cast<void>(find_snippet(w.corpus, w.section, std::nullopt, {"x"}, 3)),
                  error);
}
