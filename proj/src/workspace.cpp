#include "beliefmap/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "beliefmap/alignment.hpp"
#include "beliefmap/cartography.hpp"
#include "beliefmap/convergence.hpp"
#include "beliefmap/errors.hpp"
#include "beliefmap/extraction.hpp"
#include "beliefmap/ingest.hpp"
#include "beliefmap/lexicon.hpp"
#include "beliefmap/syngen.hpp"

namespace beliefmap {

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string read_file(const std::filesystem::path& p, const std::string& stage) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(errc::missing_input, stage + ": missing " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::internal, "cannot write " + tmp.string());
    out << content;
    if (!out) fail(errc::internal, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace

Workspace::Workspace(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) fail(errc::usage, "cannot create workspace " + root_.string());
}

bool Workspace::has(const std::string& name) const {
  return std::filesystem::exists(path(name));
}

std::string Workspace::read(const std::string& name) const {
  return read_file(path(name), "workspace");
}

void Workspace::run_stage(const std::string& stage, const std::vector<std::string>& inputs,
                          const std::vector<std::filesystem::path>& extra_inputs,
                          const nlohmann::json& params,
                          const std::function<std::map<std::string, std::string>()>& produce) {
  nlohmann::json input_hashes = nlohmann::json::object();
  for (const std::string& name : inputs) {
    if (!has(name)) fail(errc::missing_input, stage + ": missing " + name);
    input_hashes[name] = fnv1a64_hex(read(name));
  }
  for (const std::filesystem::path& p : extra_inputs) {
    input_hashes[p.string()] = fnv1a64_hex(read_file(p, stage));
  }

  std::map<std::string, std::string> outputs = produce();

  nlohmann::json output_hashes = nlohmann::json::object();
  for (const auto& [name, content] : outputs) {
    write_file_atomic(path(name), content);
    output_hashes[name] = fnv1a64_hex(content);
  }

  nlohmann::json manifest = nlohmann::json::object();
  if (has(artifact::manifest)) {
    manifest = nlohmann::json::parse(read(artifact::manifest), nullptr, false);
    if (manifest.is_discarded()) manifest = nlohmann::json::object();
  }
  manifest["stages"][stage] = {
      {"params", params}, {"inputs", input_hashes}, {"outputs", output_hashes}};
  write_file_atomic(path(artifact::manifest), manifest.dump(2) + "\n");
}

namespace {

// Hash for manifest records; directories hash as the sorted sequence of
// (name, content) of their regular files.
std::string hash_path(const std::filesystem::path& p, const std::string& stage) {
  if (std::filesystem::is_directory(p)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(p)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::string acc;
    for (const auto& f : files) {
      acc += f.filename().string();
      acc.push_back('\0');
      acc += read_file(f, stage);
      acc.push_back('\0');
    }
    return fnv1a64_hex(acc);
  }
  return fnv1a64_hex(read_file(p, stage));
}

}  // namespace

void stage_ingest(Workspace& ws, const std::string& format, const std::filesystem::path& input,
                  const std::string& group, const std::filesystem::path& user_map_file) {
  if (!std::filesystem::exists(input)) {
    fail(errc::missing_input, "ingest: missing input " + input.string());
  }
  nlohmann::json params{{"format", format}, {"input", input.string()}, {"group", group}};
  if (!user_map_file.empty()) params["user_map"] = user_map_file.string();

  std::vector<std::string> inputs;
  const bool merging = format != "canonical" && ws.has(artifact::corpus);
  if (merging) inputs.push_back(artifact::corpus);

  nlohmann::json extra_params = params;
  extra_params["input_hash"] = hash_path(input, "ingest");

  ws.run_stage("ingest", inputs, {}, extra_params, [&] {
    Corpus corpus;
    if (format == "canonical") {
      corpus = load_corpus(input);
    } else {
      GroupRun run;
      if (format == "chat-export") {
        if (group.empty()) fail(errc::usage, "ingest: chat-export requires --group");
        if (user_map_file.empty()) fail(errc::usage, "ingest: chat-export requires --user-map");
        run = ingest_chat_export(input, load_user_map(user_map_file), group);
      } else if (format == "bbs-csv") {
        run = ingest_bbs_csv(input);
        if (!group.empty() && group != run.group_id) {
          for (Post& p : run.posts) p.group_id = group;
          run.group_id = group;
        }
      } else {
        fail(errc::usage, "ingest: unknown format " + format);
      }
      if (merging) corpus = load_corpus(ws.path(artifact::corpus));
      if (corpus.runs.count(run.group_id)) {
        fail(errc::validation, "ingest: group " + run.group_id + " already in corpus");
      }
      corpus.runs[run.group_id] = std::move(run);
    }
    std::ostringstream lines;
    emit_canonical(corpus, lines);
    return std::map<std::string, std::string>{{artifact::corpus, lines.str()}};
  });
}

void stage_generate(Workspace& ws, const PipelineOptions& opt) {
  if (!opt.script) fail(errc::usage, "generate: no script configured");
  DungeonScript script = load_script(*opt.script);
  if (opt.seed) script.seed = *opt.seed;
  nlohmann::json params{{"script", opt.script->string()}, {"seed", script.seed}};
  ws.run_stage("generate", {}, {*opt.script}, params, [&] {
    auto [corpus, truth] = generate(script);
    std::ostringstream lines;
    emit_canonical(corpus, lines);
    std::map<std::string, std::string> out;
    out[artifact::corpus] = lines.str();
    out[artifact::truth] = nlohmann::json(truth).dump(2) + "\n";
    return out;
  });
}

void stage_stopwords(Workspace& ws, const PipelineOptions& opt) {
  if (opt.base_stopwords.empty()) fail(errc::usage, "stopwords: --base is required");
  std::vector<std::filesystem::path> extra = {opt.base_stopwords};
  if (!opt.game_stopwords.empty()) extra.push_back(opt.game_stopwords);
  nlohmann::json params{{"base", opt.base_stopwords.string()},
                        {"game", opt.game_stopwords.string()},
                        {"n_per_player", opt.n_per_player}};
  ws.run_stage("stopwords", {artifact::corpus}, extra, params, [&] {
    Corpus corpus = load_corpus(ws.path(artifact::corpus));
    StopWordConfig cfg =
        build_stopword_config(opt.base_stopwords, opt.game_stopwords, corpus, opt.n_per_player);
    return std::map<std::string, std::string>{{artifact::stopwords, cfg.to_json_string()}};
  });
}

void stage_align(Workspace& ws, const PipelineOptions& opt) {
  nlohmann::json params{
      {"theta", opt.theta}, {"min_tokens", opt.min_tokens}, {"dm_only", opt.dm_only}};
  ws.run_stage("align", {artifact::corpus}, {}, params, [&] {
    Corpus corpus = load_corpus(ws.path(artifact::corpus));
    MarkerParams mp;
    mp.theta = opt.theta;
    mp.min_tokens = opt.min_tokens;
    mp.dm_only = opt.dm_only;
    mp.parallel = opt.parallel;
    std::vector<Marker> markers = detect_markers(corpus, mp);
    std::vector<Section> sections = section_corpus(corpus, markers);
    std::map<std::string, std::string> out;
    out[artifact::markers] = nlohmann::json(markers).dump(2) + "\n";
    out[artifact::sections] = nlohmann::json(sections).dump(2) + "\n";
    return out;
  });
}

void stage_extract(Workspace& ws, const PipelineOptions& opt) {
  nlohmann::json params{{"depth", opt.depth},
                        {"label_k", opt.label_k},
                        {"space_k", opt.space_k},
                        {"players_only", opt.players_only}};
  ws.run_stage("extract", {artifact::corpus, artifact::stopwords, artifact::sections}, {}, params,
               [&] {
                 Corpus corpus = load_corpus(ws.path(artifact::corpus));
                 StopWordConfig cfg = StopWordConfig::load(ws.path(artifact::stopwords));
                 auto sections =
                     nlohmann::json::parse(ws.read(artifact::sections)).get<std::vector<Section>>();
                 ExtractionParams ep;
                 ep.depth = opt.depth;
                 ep.label_k = opt.label_k;
                 ep.space_k = opt.space_k;
                 ep.players_only = opt.players_only;
                 ep.parallel = opt.parallel;
                 std::vector<SectionTerms> terms = extract_all(corpus, sections, cfg, ep);
                 return std::map<std::string, std::string>{
                     {artifact::terms, nlohmann::json(terms).dump(2) + "\n"}};
               });
}

void stage_map(Workspace& ws, const PipelineOptions& opt) {
  nlohmann::json params{{"snippet_len", opt.snippet_len}};
  ws.run_stage("map", {artifact::corpus, artifact::sections, artifact::terms}, {}, params, [&] {
    Corpus corpus = load_corpus(ws.path(artifact::corpus));
    auto sections = nlohmann::json::parse(ws.read(artifact::sections)).get<std::vector<Section>>();
    auto terms = nlohmann::json::parse(ws.read(artifact::terms)).get<std::vector<SectionTerms>>();
    BeliefMap map = build_map(corpus, sections, terms, opt.snippet_len);
    std::map<std::string, std::string> out;
    out[artifact::map_json] = emit_json(map);
    out[artifact::map_dot] = emit_dot(map);
    return out;
  });
}

void stage_converge(Workspace& ws, const PipelineOptions& opt) {
  nlohmann::json params{
      {"depth", opt.depth}, {"label_k", opt.label_k}, {"pairwise", opt.pairwise}};
  ws.run_stage("converge", {artifact::corpus, artifact::stopwords, artifact::sections}, {}, params,
               [&] {
                 Corpus corpus = load_corpus(ws.path(artifact::corpus));
                 StopWordConfig cfg = StopWordConfig::load(ws.path(artifact::stopwords));
                 auto sections =
                     nlohmann::json::parse(ws.read(artifact::sections)).get<std::vector<Section>>();
                 ConvergenceParams cp;
                 cp.depth = opt.depth;
                 cp.label_k = opt.label_k;
                 cp.players_only = opt.players_only;
                 cp.pairwise = opt.pairwise;
                 cp.parallel = opt.parallel;
                 ConvergenceReport report = convergence_report(corpus, sections, cfg, cp);
                 std::map<std::string, std::string> out;
                 out[artifact::convergence] = convergence_csv(report);
                 out[artifact::convergence_summary] = convergence_summary_json(report);
                 return out;
               });
}

void run_all(Workspace& ws, const PipelineOptions& opt) {
  if (opt.script) stage_generate(ws, opt);
  stage_stopwords(ws, opt);
  stage_align(ws, opt);
  stage_extract(ws, opt);
  stage_map(ws, opt);
  stage_converge(ws, opt);
}

std::vector<Violation> validate_workspace_corpus(const Workspace& ws) {
  if (!ws.has(artifact::corpus)) {
    fail(errc::missing_input, std::string("validate: missing ") + artifact::corpus);
  }
  Corpus corpus = load_corpus(ws.path(artifact::corpus));
  return validate_corpus(corpus);
}

}  // namespace beliefmap
