#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "beliefmap/corpus.hpp"

namespace beliefmap {

// Platform user id -> display name and role, for chat exports where posts
// carry opaque ids.
struct UserMap {
  struct Entry {
    std::string name;
    Role role = Role::player;
  };
  std::map<std::string, Entry> entries;
};

// Line-delimited records {id, name, role}.
UserMap load_user_map(const std::filesystem::path& file);

// Canonical corpus format: one record per line with fields
// {group_id, seq, timestamp?, author, role, text}, UTF-8.
Corpus ingest_canonical(std::istream& in);
Corpus load_corpus(const std::filesystem::path& file);
void emit_canonical(const Corpus& c, std::ostream& out);
void save_corpus(const Corpus& c, const std::filesystem::path& file);

// Directory of per-day json files, each an array of {ts, user, text}
// messages. Messages are ordered by ts (exact decimal comparison) with file
// order breaking ties; unresolved users become players under their raw id.
GroupRun ingest_chat_export(const std::filesystem::path& dir, const UserMap& users,
                            const std::string& group_id);

// CSV dump of one forum thread with header
// thread_id,post_id,author,role,timestamp,body_html. Quoted fields may embed
// commas, quotes, and newlines. Posts are ordered by post_id.
GroupRun ingest_bbs_csv(const std::filesystem::path& file);

}  // namespace beliefmap
