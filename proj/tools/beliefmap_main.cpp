#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "beliefmap/errors.hpp"
#include "beliefmap/workspace.hpp"

namespace {

int exit_code_for(beliefmap::errc code) {
  switch (code) {
    case beliefmap::errc::usage:
    case beliefmap::errc::missing_input:
      return 2;
    case beliefmap::errc::malformed:
    case beliefmap::errc::validation:
      return 3;
    case beliefmap::errc::internal:
      return 1;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  using beliefmap::PipelineOptions;
  PipelineOptions opt;

  CLI::App app{"beliefmap: turn multi-group rpg transcripts into a belief map"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read parameters from a TOML/INI config file");
  app.fallthrough();  // global flags usable after the subcommand

  std::string workspace = ".";
  app.add_option("-w,--workspace", workspace, "workspace directory")->capture_default_str();
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "override the generator seed");
  bool no_parallel = false;
  app.add_flag("--no-parallel", no_parallel, "disable intra-stage parallelism");

  auto add_stopword_options = [&](CLI::App* cmd) {
    cmd->add_option("--base", opt.base_stopwords, "base stop word list, one token per line");
    cmd->add_option("--game", opt.game_stopwords, "game term list, one token per line");
    cmd->add_option("--n-per-player", opt.n_per_player, "top tokens stopped per player")
        ->capture_default_str();
  };
  auto add_align_options = [&](CLI::App* cmd) {
    cmd->add_option("--theta", opt.theta, "marker similarity threshold")->capture_default_str();
    cmd->add_option("--min-tokens", opt.min_tokens, "minimum marker length in tokens")
        ->capture_default_str();
    cmd->add_flag("--dm-only,!--any-author", opt.dm_only, "marker candidates must be dm posts")
        ->capture_default_str();
  };
  auto add_extract_options = [&](CLI::App* cmd) {
    cmd->add_option("--depth", opt.depth, "place term depth")->capture_default_str();
    cmd->add_option("--label-k", opt.label_k, "place label size")->capture_default_str();
    cmd->add_option("--space-k", opt.space_k, "space terms per group")->capture_default_str();
    cmd->add_flag("--players-only", opt.players_only, "exclude dm narration from counts");
  };
  auto add_map_options = [&](CLI::App* cmd) {
    cmd->add_option("--snippet-len", opt.snippet_len, "snippet length cap")->capture_default_str();
  };
  auto add_converge_options = [&](CLI::App* cmd) {
    cmd->add_flag("--pairwise", opt.pairwise, "also compare single groups pairwise");
  };

  CLI::App* generate = app.add_subcommand("generate", "generate a synthetic corpus from a script");
  std::string script_path;
  generate->add_option("--script", script_path, "dungeon script json")->required();

  CLI::App* ingest = app.add_subcommand("ingest", "parse transcripts into the canonical corpus");
  std::string format;
  std::string group;
  std::string input_path;
  std::string user_map_path;
  ingest->add_option("--format", format, "canonical | chat-export | bbs-csv")
      ->required()
      ->check(CLI::IsMember({"canonical", "chat-export", "bbs-csv"}));
  ingest->add_option("input", input_path, "source file or directory")->required();
  ingest->add_option("--group", group, "group id for the ingested run");
  ingest->add_option("--user-map", user_map_path, "user map jsonl {id, name, role}");

  app.add_subcommand("validate", "check corpus invariants");

  CLI::App* stopwords = app.add_subcommand("stopwords", "build the layered stop word config");
  add_stopword_options(stopwords);

  CLI::App* align = app.add_subcommand("align", "detect markers and cut sections");
  add_align_options(align);

  CLI::App* extract = app.add_subcommand("extract", "rank place and space terms per section");
  add_extract_options(extract);

  CLI::App* map_cmd = app.add_subcommand("map", "assemble the belief map with snippets");
  add_map_options(map_cmd);

  CLI::App* converge = app.add_subcommand("converge", "subset convergence report");
  add_converge_options(converge);

  CLI::App* run_all_cmd = app.add_subcommand("run-all", "run every stage in order");
  run_all_cmd->add_option("--script", script_path, "generate this script first");
  add_stopword_options(run_all_cmd);
  add_align_options(run_all_cmd);
  add_extract_options(run_all_cmd);
  add_map_options(run_all_cmd);
  add_converge_options(run_all_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  opt.workspace = workspace;
  opt.seed = seed;
  opt.parallel = !no_parallel;
  if (!script_path.empty()) opt.script = script_path;

  try {
    beliefmap::Workspace ws(opt.workspace);
    if (generate->parsed()) {
      beliefmap::stage_generate(ws, opt);
      std::cout << "generate: wrote corpus.jsonl, truth.json\n";
    } else if (ingest->parsed()) {
      beliefmap::stage_ingest(ws, format, input_path, group, user_map_path);
      std::cout << "ingest: wrote corpus.jsonl\n";
    } else if (app.get_subcommand("validate")->parsed()) {
      auto violations = beliefmap::validate_workspace_corpus(ws);
      for (const auto& v : violations) std::cout << v.str() << '\n';
      if (!violations.empty()) {
        std::cerr << "validate: " << violations.size() << " violation(s)\n";
        return 3;
      }
      std::cout << "validate: corpus ok\n";
    } else if (stopwords->parsed()) {
      beliefmap::stage_stopwords(ws, opt);
      std::cout << "stopwords: wrote stopwords.json\n";
    } else if (align->parsed()) {
      beliefmap::stage_align(ws, opt);
      std::cout << "align: wrote markers.json, sections.json\n";
    } else if (extract->parsed()) {
      beliefmap::stage_extract(ws, opt);
      std::cout << "extract: wrote terms.json\n";
    } else if (map_cmd->parsed()) {
      beliefmap::stage_map(ws, opt);
      std::cout << "map: wrote map.json, map.dot\n";
    } else if (converge->parsed()) {
      beliefmap::stage_converge(ws, opt);
      std::cout << "converge: wrote convergence.csv, convergence_summary.json\n";
    } else if (run_all_cmd->parsed()) {
      beliefmap::run_all(ws, opt);
      std::cout << "run-all: complete\n";
    }
  } catch (const beliefmap::error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
