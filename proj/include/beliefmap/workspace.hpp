#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefmap/corpus.hpp"

namespace beliefmap {

// Workspace artifact names.
namespace artifact {
inline constexpr const char* corpus = "corpus.jsonl";
inline constexpr const char* truth = "truth.json";
inline constexpr const char* stopwords = "stopwords.json";
inline constexpr const char* markers = "markers.json";
inline constexpr const char* sections = "sections.json";
inline constexpr const char* terms = "terms.json";
inline constexpr const char* map_json = "map.json";
inline constexpr const char* map_dot = "map.dot";
inline constexpr const char* convergence = "convergence.csv";
inline constexpr const char* convergence_summary = "convergence_summary.json";
inline constexpr const char* manifest = "manifest.json";
}  // namespace artifact

std::string fnv1a64_hex(const std::string& bytes);

// All pipeline parameters in one place. The CLI fills this from flags and an
// optional config file.
struct PipelineOptions {
  std::filesystem::path workspace = ".";
  // stopwords
  std::filesystem::path base_stopwords;
  std::filesystem::path game_stopwords;
  int n_per_player = 1;
  // align
  double theta = 0.8;
  int min_tokens = 25;
  bool dm_only = true;
  // extract
  int depth = 20;
  int label_k = 3;
  int space_k = 3;
  bool players_only = false;
  // map
  std::size_t snippet_len = 160;
  // converge
  bool pairwise = false;
  // generate / run-all
  std::optional<std::filesystem::path> script;
  std::optional<std::uint64_t> seed;
  bool parallel = true;
};

// A directory of pipeline artifacts plus a manifest recording each stage's
// parameters and input/output content hashes. Stages write outputs through a
// temp-file rename so a failed stage leaves nothing behind, and refuse to run
// when a declared input is missing.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path(const std::string& name) const { return root_ / name; }
  bool has(const std::string& name) const;
  std::string read(const std::string& name) const;

  // inputs: artifact names resolved inside the workspace; extra_inputs:
  // external files recorded under their full path. produce() returns
  // artifact name -> content.
  void run_stage(const std::string& stage, const std::vector<std::string>& inputs,
                 const std::vector<std::filesystem::path>& extra_inputs,
                 const nlohmann::json& params,
                 const std::function<std::map<std::string, std::string>()>& produce);

 private:
  std::filesystem::path root_;
};

// canonical: replaces the corpus artifact. chat-export / bbs-csv: parses one
// group run and merges it into the existing corpus (error when the group is
// already present).
void stage_ingest(Workspace& ws, const std::string& format, const std::filesystem::path& input,
                  const std::string& group, const std::filesystem::path& user_map_file);

void stage_generate(Workspace& ws, const PipelineOptions& opt);
void stage_stopwords(Workspace& ws, const PipelineOptions& opt);
void stage_align(Workspace& ws, const PipelineOptions& opt);
void stage_extract(Workspace& ws, const PipelineOptions& opt);
void stage_map(Workspace& ws, const PipelineOptions& opt);
void stage_converge(Workspace& ws, const PipelineOptions& opt);

// stopwords -> align -> extract -> map -> converge, generating first when a
// script is configured. Each stage uses only the artifacts of earlier ones.
void run_all(Workspace& ws, const PipelineOptions& opt);

// Violations found in the workspace corpus.
std::vector<Violation> validate_workspace_corpus(const Workspace& ws);

}  // namespace beliefmap
