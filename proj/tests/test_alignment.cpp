#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "beliefmap/alignment.hpp"
#include "beliefmap/errors.hpp"
#include "beliefmap/lexicon.hpp"
#include "beliefmap/rng.hpp"
#include "beliefmap/syngen.hpp"
#include "helpers.hpp"

using namespace beliefmap;
using testutil::corpus_of;
using testutil::make_post;

namespace {

Post post_of(const std::string& text) {
  return make_post("g", 0, "X", Role::dm, text);
}

// Exhaustive shingle enumeration, separate from the production code path.
double oracle_similarity(const std::string& a, const std::string& b) {
  auto shingles = [](const std::string& text) {
    std::vector<std::string> toks = tokenize(normalize_text(text));
    std::set<std::string> out;
    for (std::size_t i = 0; i + 5 <= toks.size(); ++i) {
      std::string s;
      for (std::size_t k = 0; k < 5; ++k) s += toks[i + k] + "/";
      out.insert(s);
    }
    return out;
  };
  std::set<std::string> sa = shingles(a);
  std::set<std::string> sb = shingles(b);
  std::set<std::string> inter;
  for (const auto& s : sa) {
    if (sb.count(s)) inter.insert(s);
  }
  std::size_t uni = sa.size() + sb.size() - inter.size();
  return uni == 0 ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
}

std::string spaced(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

TEST_CASE("post_similarity identity and disjoint cases") {
  std::string long_text =
      "the ancient gate stands silent beyond the mossy courtyard where seven statues guard the "
      "broken fountain of the forgotten goddess of luck and shadows";
  CHECK(post_similarity(post_of(long_text), post_of(long_text)) == doctest::Approx(1.0));
  std::string other =
      "deep beneath winding tunnels crawl nameless vermin chewing endless roots while blind fish "
      "swim through flooded cellars under collapsed towers near drowned archives";
  CHECK(post_similarity(post_of(long_text), post_of(other)) == doctest::Approx(0.0));
}

TEST_CASE("post_similarity short posts fall back to exact equality") {
  CHECK(post_similarity(post_of("same four tokens here"), post_of("same four tokens here")) == 1.0);
  CHECK(post_similarity(post_of("same four tokens here"), post_of("same four tokens nope")) == 0.0);
}

TEST_CASE("post_similarity equals brute-force shingle jaccard on a perturbed text") {
  std::vector<std::string> words;
  const char* base[] = {"amber", "bridge", "candle", "dagger", "ember",  "falcon", "grotto",
                        "harbor", "ivory",  "jasper", "kettle", "lantern", "marble", "nectar",
                        "onyx",   "parchment", "quiver", "raven", "saddle", "timber"};
  for (int rep = 0; rep < 2; ++rep) {
    for (const char* w : base) words.push_back(w);
  }
  REQUIRE(words.size() == 40);
  std::vector<std::string> mutated = words;
  mutated[7] = "changed";
  mutated[15] = "swapped";
  mutated[23] = "altered";
  mutated[31] = "edited";
  std::string a = spaced(words);
  std::string b = spaced(mutated);
  double expected = oracle_similarity(a, b);
  CHECK(post_similarity(post_of(a), post_of(b)) == doctest::Approx(expected));
  CHECK(post_similarity(post_of(b), post_of(a)) == doctest::Approx(expected));
}

namespace {

// Two groups sharing one pasted intro plus unrelated chatter.
Corpus two_group_intro_corpus() {
  std::string intro =
      "welcome brave adventurers to the temple of testing where four rooms and their magical "
      "gates will measure your courage your wit and your luck before the goddess herself";
  return corpus_of({
      make_post("g1", 0, "Dana", Role::dm, intro),
      make_post("g1", 1, "Ann", Role::player, "lets move slowly"),
      make_post("g1", 2, "Ann", Role::player, "I check the walls"),
      make_post("g2", 0, "Dana", Role::dm, intro),
      make_post("g2", 1, "Bex", Role::player, "forward then"),
  });
}

}  // namespace

TEST_CASE("detect_markers finds a single planted identical intro") {
  std::vector<Marker> markers = detect_markers(two_group_intro_corpus());
  REQUIRE(markers.size() == 1);
  CHECK(markers[0].index == 0);
  CHECK(markers[0].anchors.at("g1") == 0);
  CHECK(markers[0].anchors.at("g2") == 0);
  CHECK(markers[0].min_similarity == doctest::Approx(1.0));
}

TEST_CASE("posts below min_tokens never become markers even when identical") {
  std::string intro =
      "welcome brave adventurers to the temple of testing where four rooms and their magical "
      "gates will measure your courage your wit and your luck before the goddess herself";
  std::string short_paste = "the same ten tokens pasted into both groups here";
  Corpus c = corpus_of({
      make_post("g1", 0, "Dana", Role::dm, intro),
      make_post("g1", 1, "Dana", Role::dm, short_paste),
      make_post("g2", 0, "Dana", Role::dm, intro),
      make_post("g2", 1, "Dana", Role::dm, short_paste),
  });
  std::vector<Marker> markers = detect_markers(c);
  REQUIRE(markers.size() == 1);
  CHECK(markers[0].anchors.at("g1") == 0);

  SUBCASE("and a corpus with only short pastes has no markers at all") {
    Corpus none = corpus_of({
        make_post("g1", 0, "Dana", Role::dm, short_paste),
        make_post("g2", 0, "Dana", Role::dm, short_paste),
    });
    CHECK_THROWS_WITH_AS(static_cast<void>(detect_markers(none)), "no common markers", error);
  }
}

TEST_CASE("detect_markers requires two groups") {
  Corpus c = corpus_of({make_post("g1", 0, "Dana", Role::dm, "alone")});
  CHECK_THROWS_AS(static_cast<void>(detect_markers(c)), error);
}

namespace {

DungeonScript small_script(std::uint64_t seed) {
  DungeonScript script;
  const char* markers[] = {
      "the antechamber yawns wide with tangled vines over the archway and slick stairs winding "
      "down toward the lazy goblin and the hulking orc on watch",
      "a vaulted hall of pale stone holds a humming silver orb on a pedestal with rope bridges "
      "spanning the yawning pit before the sealed far door",
      "the mossy cavern echoes with troll snores beside a sturdy iron box while crude letters "
      "smeared on the wall spell out a warning for visitors",
  };
  const char* fillers[] = {"torch", "dust",  "echo",  "stone", "floor", "step",
                           "hand",  "sword", "pack",  "boots", "cloak", "breath",
                           "noise", "corner", "edge", "light", "dark",  "silence"};
  const char* places[3][3] = {{"goblin", "orc", "stairs"}, {"rope", "gate", "orb"},
                              {"troll", "grogg", "box"}};
  for (int si = 0; si < 3; ++si) {
    ScriptSection sec;
    sec.marker_text = markers[si];
    sec.place_vocab = {{places[si][0], 8}, {places[si][1], 6}, {places[si][2], 4}};
    sec.posts_per_bucket = 20;
    script.sections.push_back(std::move(sec));
  }
  script.final_marker_text =
      "the temple fades into golden mist as the goddess tallies her wager and the survivors "
      "stumble back onto the dusty road with their spoils";
  for (int gi = 0; gi < 3; ++gi) {
    ScriptGroup g;
    g.group_id = "band" + std::to_string(gi + 1);
    g.dm_name = "Keeper";
    g.player_names = {"Pia" + std::to_string(gi), "Rook" + std::to_string(gi)};
    script.groups.push_back(std::move(g));
  }
  for (const char* f : fillers) script.filler_vocab[f] = 1;
  script.tokens_per_post = 12;
  script.name_mentions = 2;
  script.seed = seed;
  return script;
}

}  // namespace

TEST_CASE("detect_markers recovers planted markers exactly, ignoring decoys") {
  DungeonScript script = small_script(11);
  ScriptDecoy decoy;
  decoy.section = 1;
  decoy.text =
      "a wandering merchant spreads a moth eaten blanket covered with trinkets and bones and "
      "beckons the party closer promising whispered fortunes and maps to vaults unknown while "
      "his crooked smile never reaches his tired watchful eyes";
  decoy.replacements = 2;
  script.decoys.push_back(decoy);

  auto [corpus, truth] = generate(script);
  REQUIRE(truth.max_decoy_similarity > 0.4);
  REQUIRE(truth.max_decoy_similarity < 0.8);

  std::vector<Marker> markers = detect_markers(corpus);
  REQUIRE(markers.size() == 4);
  for (std::size_t mi = 0; mi < markers.size(); ++mi) {
    for (const auto& [gid, anchors] : truth.marker_anchors) {
      CHECK(markers[mi].anchors.at(gid) == anchors[mi]);
    }
  }
}

TEST_CASE("marker detection is invariant to group insertion order") {
  Corpus sorted = two_group_intro_corpus();
  std::vector<Post> scrambled;
  for (auto it = sorted.runs.rbegin(); it != sorted.runs.rend(); ++it) {
    for (const Post& p : it->second.posts) scrambled.push_back(p);
  }
  Corpus rebuilt = corpus_of(std::move(scrambled));
  CHECK(detect_markers(sorted) == detect_markers(rebuilt));
}

TEST_CASE("raising theta never increases the marker count") {
  DungeonScript script = small_script(23);
  ScriptDecoy decoy;  // mid-similarity cluster that low thetas will admit
  decoy.section = 0;
  decoy.text =
      "a dusty signpost leans against the cracked pillar listing distances to towns nobody in "
      "the party has ever heard of while faded ribbons flutter from its arm and a tin cup "
      "rattles beneath it whenever anyone steps too close";
  decoy.replacements = 2;
  script.decoys.push_back(decoy);
  auto [corpus, truth] = generate(script);

  std::size_t prev = SIZE_MAX;
  std::set<std::size_t> distinct;
  for (double theta : {0.3, 0.5, 0.7, 0.9, 1.0}) {
    MarkerParams params;
    params.theta = theta;
    std::size_t count = 0;
    try {
      count = detect_markers(corpus, params).size();
    } catch (const error&) {
      count = 0;
    }
    CHECK(count <= prev);
    prev = count;
    distinct.insert(count);
  }
  CHECK(distinct.size() >= 2);  // the decoy cluster appears below ~0.64 and vanishes above
}

TEST_CASE("section_corpus buckets exclude anchors and bot posts") {
  std::string intro =
      "welcome brave adventurers to the temple of testing where four rooms and their magical "
      "gates will measure your courage your wit and your luck before the goddess herself";
  std::string outro =
      "the trial concludes in a blaze of golden light as the goddess announces her verdict and "
      "returns the weary party to the road outside the temple walls";
  std::vector<Post> posts;
  auto add = [&](const std::string& gid, std::int64_t seq, Role role, const std::string& text) {
    posts.push_back(make_post(
        gid, seq, role == Role::dm ? "Dana" : (role == Role::bot ? "Robo" : "Ann"), role, text));
  };
  add("g1", 0, Role::dm, intro);
  for (int i = 1; i <= 9; ++i) {
    add("g1", i, i == 4 ? Role::bot : Role::player, "chatter number " + std::to_string(i));
  }
  add("g1", 10, Role::dm, outro);
  add("g2", 0, Role::dm, intro);
  add("g2", 1, Role::dm, outro);  // adjacent markers: empty bucket
  Corpus c = corpus_of(std::move(posts));

  std::vector<Marker> markers = detect_markers(c);
  REQUIRE(markers.size() == 2);
  std::vector<Section> sections = section_corpus(c, markers);
  REQUIRE(sections.size() == 1);
  CHECK(sections[0].buckets.at("g1") ==
        std::vector<std::int64_t>{1, 2, 3, 5, 6, 7, 8, 9});  // seq 4 is the bot
  CHECK(sections[0].buckets.at("g2").empty());

  SUBCASE("fewer than two markers is an error") {
    CHECK_THROWS_AS(static_cast<void>(section_corpus(c, {markers[0]})), error);
  }
}

TEST_CASE("sections reproduce the generator's planted buckets") {
  DungeonScript script = small_script(31);
  auto [corpus, truth] = generate(script);
  std::vector<Marker> markers = detect_markers(corpus);
  std::vector<Section> sections = section_corpus(corpus, markers);
  REQUIRE(sections.size() == script.sections.size());
  for (std::size_t si = 0; si < sections.size(); ++si) {
    for (const auto& [gid, expected] : truth.buckets) {
      CHECK(sections[si].buckets.at(gid) == expected[si]);
    }
  }
}

TEST_CASE("every post is in exactly one region of the marker partition") {
  DungeonScript script = small_script(47);
  auto [corpus, truth] = generate(script);
  std::vector<Marker> markers = detect_markers(corpus);
  std::vector<Section> sections = section_corpus(corpus, markers);

  for (const auto& [gid, run] : corpus.runs) {
    std::int64_t first_anchor = markers.front().anchors.at(gid);
    std::int64_t last_anchor = markers.back().anchors.at(gid);
    for (const Post& p : run.posts) {
      int regions = 0;
      if (p.seq < first_anchor) ++regions;
      if (p.seq > last_anchor) ++regions;
      for (const Marker& m : markers) {
        if (m.anchors.at(gid) == p.seq) ++regions;
      }
      for (const Section& s : sections) {
        const auto& bucket = s.buckets.at(gid);
        bool in_bucket = std::find(bucket.begin(), bucket.end(), p.seq) != bucket.end();
        bool between = p.seq > markers[s.index].anchors.at(gid) &&
                       p.seq < markers[s.index + 1].anchors.at(gid);
        // bot posts are dropped from buckets yet still live between anchors
        if (in_bucket || (p.role == Role::bot && between)) ++regions;
      }
      CAPTURE(gid);
      CAPTURE(p.seq);
      CHECK(regions == 1);
    }
  }
}

TEST_CASE("marker and section json round-trips") {
  DungeonScript script = small_script(5);
  auto [corpus, truth] = generate(script);
  std::vector<Marker> markers = detect_markers(corpus);
  std::vector<Section> sections = section_corpus(corpus, markers);
  nlohmann::json jm = markers;
  nlohmann::json js = sections;
  CHECK(jm.get<std::vector<Marker>>() == markers);
  CHECK(js.get<std::vector<Section>>() == sections);
}
