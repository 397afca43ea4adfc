#include "beliefmap/ingest.hpp"

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "beliefmap/errors.hpp"

namespace beliefmap {

namespace {

using nlohmann::json;

std::string line_tag(std::size_t line_no) { return "line " + std::to_string(line_no); }

const json& require_field(const json& record, const char* field, std::size_t line_no) {
  auto it = record.find(field);
  if (it == record.end()) {
    fail(errc::malformed, line_tag(line_no) + ": missing field " + field);
  }
  return *it;
}

std::string string_field(const json& record, const char* field, std::size_t line_no) {
  const json& v = require_field(record, field, line_no);
  if (!v.is_string()) fail(errc::malformed, line_tag(line_no) + ": field " + field + " must be a string");
  return v.get<std::string>();
}

}  // namespace

UserMap load_user_map(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(errc::missing_input, "cannot read user map " + file.string());
  UserMap users;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      fail(errc::malformed, "user map " + line_tag(line_no) + ": malformed record");
    }
    std::string id = string_field(record, "id", line_no);
    UserMap::Entry entry;
    entry.name = string_field(record, "name", line_no);
    entry.role = parse_role(string_field(record, "role", line_no));
    if (!users.entries.emplace(std::move(id), std::move(entry)).second) {
      fail(errc::malformed, "user map " + line_tag(line_no) + ": duplicate id");
    }
  }
  return users;
}

Corpus ingest_canonical(std::istream& in) {
  std::map<std::string, std::vector<Post>> by_group;
  std::set<std::pair<std::string, std::int64_t>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      fail(errc::malformed, line_tag(line_no) + ": malformed record");
    }
    Post p;
    p.group_id = string_field(record, "group_id", line_no);
    const json& seq = require_field(record, "seq", line_no);
    if (!seq.is_number_integer()) {
      fail(errc::malformed, line_tag(line_no) + ": field seq must be an integer");
    }
    p.seq = seq.get<std::int64_t>();
    if (p.seq < 0) fail(errc::malformed, line_tag(line_no) + ": negative seq");
    if (record.contains("timestamp") && !record["timestamp"].is_null()) {
      p.timestamp = string_field(record, "timestamp", line_no);
    }
    p.author = string_field(record, "author", line_no);
    try {
      p.role = parse_role(string_field(record, "role", line_no));
    } catch (const error& e) {
      fail(errc::malformed, line_tag(line_no) + ": " + e.what());
    }
    p.raw_text = string_field(record, "text", line_no);
    p.norm_text = normalize_text(p.raw_text);
    if (!seen.emplace(p.group_id, p.seq).second) {
      fail(errc::malformed, line_tag(line_no) + ": duplicate seq " + std::to_string(p.seq) +
                                " in group " + p.group_id);
    }
    by_group[p.group_id].push_back(std::move(p));
  }
  Corpus c;
  for (auto& [gid, posts] : by_group) c.runs[gid] = finalize_run(gid, std::move(posts));
  return c;
}

Corpus load_corpus(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(errc::missing_input, "cannot read corpus " + file.string());
  return ingest_canonical(in);
}

void emit_canonical(const Corpus& c, std::ostream& out) {
  for (const auto& [gid, run] : c.runs) {
    for (const Post& p : run.posts) {
      json record{{"group_id", p.group_id},
                  {"seq", p.seq},
                  {"author", p.author},
                  {"role", to_string(p.role)},
                  {"text", p.raw_text}};
      if (p.timestamp) record["timestamp"] = *p.timestamp;
      out << record.dump() << '\n';
    }
  }
}

void save_corpus(const Corpus& c, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(errc::internal, "cannot write corpus " + file.string());
  emit_canonical(c, out);
}

namespace {

// Exact decimal comparison of chat timestamps like "1503435956.000247";
// doubles would lose microsecond ties on 16+ digit values.
struct DecimalTs {
  std::string int_part;
  std::string frac_part;

  static DecimalTs parse(const std::string& raw, const std::string& where) {
    DecimalTs ts;
    std::size_t dot = raw.find('.');
    ts.int_part = raw.substr(0, dot);
    if (dot != std::string::npos) ts.frac_part = raw.substr(dot + 1);
    if (ts.int_part.empty()) ts.int_part = "0";
    auto all_digits = [](const std::string& s) {
      return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!all_digits(ts.int_part) || !all_digits(ts.frac_part)) {
      fail(errc::malformed, where + ": bad ts '" + raw + "'");
    }
    while (ts.int_part.size() > 1 && ts.int_part.front() == '0') ts.int_part.erase(0, 1);
    while (!ts.frac_part.empty() && ts.frac_part.back() == '0') ts.frac_part.pop_back();
    return ts;
  }

  bool operator<(const DecimalTs& o) const {
    if (int_part.size() != o.int_part.size()) return int_part.size() < o.int_part.size();
    if (int_part != o.int_part) return int_part < o.int_part;
    return frac_part < o.frac_part;
  }
};

std::string iso8601_utc(const std::string& epoch_seconds) {
  long long secs = std::strtoll(epoch_seconds.c_str(), nullptr, 10);
  std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  if (!gmtime_r(&t, &tm)) return epoch_seconds;
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

}  // namespace

GroupRun ingest_chat_export(const std::filesystem::path& dir, const UserMap& users,
                            const std::string& group_id) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) fail(errc::missing_input, "cannot read chat export directory " + dir.string());
  if (files.empty()) fail(errc::missing_input, "chat export: no .json files in " + dir.string());
  std::sort(files.begin(), files.end());

  struct Message {
    DecimalTs ts;
    std::string ts_raw;
    std::string user;
    std::string text;
  };
  std::vector<Message> messages;
  for (const std::filesystem::path& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(errc::missing_input, "cannot read chat export file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    json day = json::parse(buf.str(), nullptr, false);
    if (day.is_discarded() || !day.is_array()) {
      fail(errc::malformed, "chat export " + file.filename().string() + ": expected a json array");
    }
    for (std::size_t i = 0; i < day.size(); ++i) {
      const json& msg = day[i];
      const std::string where = file.filename().string() + " message " + std::to_string(i);
      if (!msg.is_object()) fail(errc::malformed, where + ": not an object");
      if (!msg.contains("ts")) fail(errc::malformed, where + ": missing field ts");
      if (!msg.contains("user")) fail(errc::malformed, where + ": missing field user");
      if (!msg.contains("text")) fail(errc::malformed, where + ": missing field text");
      Message m;
      m.ts_raw = msg["ts"].is_string() ? msg["ts"].get<std::string>() : msg["ts"].dump();
      m.ts = DecimalTs::parse(m.ts_raw, where);
      if (!msg["user"].is_string() || !msg["text"].is_string()) {
        fail(errc::malformed, where + ": user and text must be strings");
      }
      m.user = msg["user"].get<std::string>();
      m.text = msg["text"].get<std::string>();
      messages.push_back(std::move(m));
    }
  }

  std::stable_sort(messages.begin(), messages.end(),
                   [](const Message& a, const Message& b) { return a.ts < b.ts; });

  std::vector<Post> posts;
  posts.reserve(messages.size());
  std::int64_t seq = 0;
  for (Message& m : messages) {
    Post p;
    p.group_id = group_id;
    p.seq = seq++;
    p.timestamp = iso8601_utc(m.ts.int_part);
    auto it = users.entries.find(m.user);
    if (it != users.entries.end()) {
      p.author = it->second.name;
      p.role = it->second.role;
    } else {
      p.author = m.user;
      p.role = Role::player;
    }
    p.raw_text = std::move(m.text);
    p.norm_text = normalize_text(p.raw_text);
    posts.push_back(std::move(p));
  }
  return finalize_run(group_id, std::move(posts));
}

namespace {

// RFC 4180 style: quoted fields may contain commas, escaped quotes, and
// newlines.
std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                const std::string& where) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (row.size() > 1 || !row[0].empty()) rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (in_quotes) fail(errc::malformed, where + ": unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

}  // namespace

GroupRun ingest_bbs_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(errc::missing_input, "cannot read bbs csv " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string where = "bbs csv " + file.filename().string();

  std::vector<std::vector<std::string>> rows = parse_csv(buf.str(), where);
  if (rows.empty()) fail(errc::malformed, where + ": empty file");

  const std::vector<std::string> required = {"thread_id", "post_id",   "author",
                                             "role",      "timestamp", "body_html"};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
  for (const std::string& name : required) {
    if (!col.count(name)) fail(errc::malformed, where + ": missing column " + name);
  }

  std::string thread_id;
  struct Row {
    std::int64_t post_id;
    Post post;
  };
  std::vector<Row> parsed;
  std::set<std::int64_t> post_ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::vector<std::string>& cells = rows[r];
    const std::string at = where + " row " + std::to_string(r);
    if (cells.size() < rows[0].size()) fail(errc::malformed, at + ": too few fields");
    const std::string& tid = cells[col["thread_id"]];
    if (thread_id.empty()) {
      thread_id = tid;
    } else if (thread_id != tid) {
      fail(errc::malformed, at + ": multiple thread ids (" + thread_id + ", " + tid + ")");
    }
    Row row;
    try {
      row.post_id = std::stoll(cells[col["post_id"]]);
    } catch (const std::exception&) {
      fail(errc::malformed, at + ": bad post_id '" + cells[col["post_id"]] + "'");
    }
    if (!post_ids.insert(row.post_id).second) {
      fail(errc::malformed, at + ": duplicate post_id " + std::to_string(row.post_id));
    }
    row.post.author = cells[col["author"]];
    try {
      row.post.role = parse_role(cells[col["role"]]);
    } catch (const error& e) {
      fail(errc::malformed, at + ": " + e.what());
    }
    if (!cells[col["timestamp"]].empty()) row.post.timestamp = cells[col["timestamp"]];
    row.post.raw_text = cells[col["body_html"]];
    row.post.norm_text = normalize_text(row.post.raw_text);
    parsed.push_back(std::move(row));
  }
  if (parsed.empty()) fail(errc::malformed, where + ": no data rows");

  std::sort(parsed.begin(), parsed.end(),
            [](const Row& a, const Row& b) { return a.post_id < b.post_id; });
  std::vector<Post> posts;
  posts.reserve(parsed.size());
  std::int64_t seq = 0;
  for (Row& row : parsed) {
    row.post.group_id = thread_id;
    row.post.seq = seq++;
    posts.push_back(std::move(row.post));
  }
  return finalize_run(thread_id, std::move(posts));
}

}  // namespace beliefmap
