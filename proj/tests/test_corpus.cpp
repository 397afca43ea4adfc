#include <doctest.h>

#include <utility>
#include <vector>

#include "beliefmap/corpus.hpp"
#include "beliefmap/errors.hpp"
#include "beliefmap/rng.hpp"
#include "beliefmap/utf8.hpp"
#include "helpers.hpp"

using namespace beliefmap;
using testutil::corpus_of;
using testutil::make_post;

TEST_CASE("normalize_text strips markup and collapses whitespace") {
  CHECK(normalize_text("*Cricket sneaks*  forward") == "cricket sneaks forward");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text("<b>HELLO</b> Grogg!") == "hello grogg!");
}

TEST_CASE("normalize_text matches a hand-normalized 20-post fixture") {
  // Expected values worked out by hand from the documented rules.
  const std::vector<std::pair<std::string, std::string>> fixture = {
      {"*Cricket sneaks*  forward", "cricket sneaks forward"},
      {"", ""},
      {"<b>HELLO</b> Grogg!", "hello grogg!"},
      {"_whispers_ the TORCH is lit", "whispers the torch is lit"},
      {"[OOC: back in 5] I attack the orc", "ooc: back in 5 i attack the orc"},
      {"Roll   the\tdice", "roll the dice"},
      {"<i>rolls</i> 1d20+5 = 17", "rolls 1d20+5 = 17"},
      {"**bold** and __under__", "bold and under"},
      {"mixed *case* TeXt", "mixed case text"},
      {"a < b and c > d", "a d"},
      {"5 > 3", "5 > 3"},
      {"unclosed <tag stays", "unclosed <tag stays"},
      {"  leading and trailing   ", "leading and trailing"},
      {"multi\nline\r\ntext", "multi line text"},
      {"\xC3\xA9migr\xC3\xA9 Caf\xC3\xA9", "\xC3\xA9migr\xC3\xA9 caf\xC3\xA9"},
      {"*action* [tag] _em_ <b>html</b> plain", "action tag em html plain"},
      {"he said *hi*", "he said hi"},
      {"snake_case stays", "snake_case stays"},
      {"***", ""},
      {"Grogg SMASH!!! <img src=\"troll.png\"> #teamgrogg", "grogg smash!!! #teamgrogg"},
  };
  for (const auto& [raw, expected] : fixture) {
    CAPTURE(raw);
    CHECK(normalize_text(raw) == expected);
  }
}

TEST_CASE("normalize_text is idempotent on random strings") {
  SplitMix64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    std::string raw = testutil::random_text(rng, 40);
    std::string once = normalize_text(raw);
    CAPTURE(raw);
    CHECK(normalize_text(once) == once);
  }
}

TEST_CASE("utf8 scalar helpers") {
  CHECK(utf8::scalar_count("") == 0);
  CHECK(utf8::scalar_count("abc") == 3);
  CHECK(utf8::scalar_count("caf\xC3\xA9") == 4);
  CHECK(utf8::scalar_count("\xE2\x98\x83\xE2\x98\x83") == 2);
  CHECK(utf8::scalar_prefix("caf\xC3\xA9 x", 4) == "caf\xC3\xA9");
  CHECK(utf8::scalar_prefix("abc", 10) == "abc");
}

TEST_CASE("roles parse and print") {
  CHECK(parse_role("dm") == Role::dm);
  CHECK(parse_role("player") == Role::player);
  CHECK(parse_role("bot") == Role::bot);
  CHECK(to_string(Role::bot) == "bot");
  CHECK_THROWS_AS(parse_role("gm"), error);
}

namespace {

Corpus two_group_corpus() {
  return corpus_of({
      make_post("g1", 0, "Dana", Role::dm, "the troll snores in the corner"),
      make_post("g1", 1, "Ann", Role::player, "I sneak past"),
      make_post("g1", 2, "Robo", Role::bot, "1d20 = 14"),
      make_post("g2", 0, "Dana", Role::dm, "the troll snores in the corner"),
      make_post("g2", 1, "Bex", Role::player, "sing to it"),
  });
}

}  // namespace

TEST_CASE("validate_corpus passes a well-formed corpus") {
  CHECK(validate_corpus(two_group_corpus()).empty());
}

TEST_CASE("validate_corpus flags a duplicate seq") {
  Corpus c = two_group_corpus();
  Post dup = c.runs["g1"].posts[1];
  dup.raw_text = "another";
  dup.norm_text = normalize_text(dup.raw_text);
  c.runs["g1"].posts.push_back(dup);  // seq 1 again, at the end
  auto v = validate_corpus(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == Violation{"g1", 1, "duplicate-seq"});
}

TEST_CASE("validate_corpus flags a run without a dm post") {
  Corpus c = two_group_corpus();
  c.runs["g2"].posts[0].role = Role::player;
  auto v = validate_corpus(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].group_id == "g2");
  CHECK_FALSE(v[0].seq.has_value());
  CHECK(v[0].rule == "no-dm");
}

TEST_CASE("validate_corpus flags the remaining invariants") {
  SUBCASE("empty corpus") {
    auto v = validate_corpus(Corpus{});
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "empty-corpus");
  }
  SUBCASE("negative seq") {
    Corpus c = two_group_corpus();
    c.runs["g1"].posts[0].seq = -3;
    auto v = validate_corpus(c);
    bool found = false;
    for (const auto& violation : v) found |= violation.rule == "negative-seq";
    CHECK(found);
  }
  SUBCASE("group id mismatch") {
    Corpus c = two_group_corpus();
    c.runs["g1"].posts[1].group_id = "g9";
    auto v = validate_corpus(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "group-id-mismatch");
  }
  SUBCASE("norm text not derived from raw") {
    Corpus c = two_group_corpus();
    c.runs["g2"].posts[1].norm_text = "SOMETHING ELSE";
    auto v = validate_corpus(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "norm-text-mismatch");
  }
  SUBCASE("out of order seq") {
    Corpus c = two_group_corpus();
    std::swap(c.runs["g1"].posts[0], c.runs["g1"].posts[2]);
    auto v = validate_corpus(c);
    bool found = false;
    for (const auto& violation : v) found |= violation.rule == "non-increasing-seq";
    CHECK(found);
  }
}

TEST_CASE("finalize_run sorts posts and derives names") {
  std::vector<Post> posts = {
      make_post("g1", 5, "Ann", Role::player, "later"),
      make_post("g1", 0, "Dana", Role::dm, "intro"),
      make_post("g1", 2, "Bex", Role::player, "middle"),
  };
  GroupRun run = finalize_run("g1", std::move(posts));
  CHECK(run.posts[0].seq == 0);
  CHECK(run.posts[2].seq == 5);
  CHECK(run.dm_name == "Dana");
  CHECK(run.player_names == std::set<std::string>{"Ann", "Bex"});
  CHECK(run.find_seq(2)->author == "Bex");
  CHECK(run.find_seq(3) == nullptr);
}

TEST_CASE("corpus iteration is lexicographic regardless of insertion order") {
  Corpus a = corpus_of({
      make_post("zeta", 0, "D", Role::dm, "x"),
      make_post("alpha", 0, "D", Role::dm, "x"),
      make_post("mid", 0, "D", Role::dm, "x"),
  });
  CHECK(a.group_ids() == std::vector<std::string>{"alpha", "mid", "zeta"});
}
