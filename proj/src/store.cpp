#include "irap/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <zlib.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "irap/error.hpp"
#include "irap/fault.hpp"
#include "irap/ntriples.hpp"

namespace irap {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// TripleStore

std::optional<std::uint32_t> TripleStore::find_id(const Term& t) const {
  auto it = ids_.find(t.nt());
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t TripleStore::intern(const Term& t) {
  auto [it, inserted] = ids_.try_emplace(t.nt(), static_cast<std::uint32_t>(terms_.size()));
  if (inserted) terms_.push_back(t);
  return it->second;
}

bool TripleStore::contains(const Triple& t) const {
  auto s = find_id(t.subject);
  auto p = find_id(t.predicate);
  auto o = find_id(t.object);
  return s && p && o && spo_.contains(Key{*s, *p, *o});
}

bool TripleStore::scan(const Term* s, const Term* p, const Term* o, Visitor visit) const {
  std::uint32_t sid = 0, pid = 0, oid = 0;
  auto resolve_id = [&](const Term* t, std::uint32_t& out) {
    if (!t) return true;
    auto id = find_id(*t);
    if (!id) return false;
    out = *id;
    return true;
  };
  if (!resolve_id(s, sid) || !resolve_id(p, pid) || !resolve_id(o, oid)) return true;

  auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    return visit(Triple(terms_[a], terms_[b], terms_[c]));
  };
  // Walks keys of `index` that start with the given prefix; `order` maps the
  // key back to subject, predicate, object positions.
  auto range = [&](const absl::btree_set<Key>& index, Key lo, int prefix, std::array<int, 3> order) {
    for (auto it = index.lower_bound(lo); it != index.end(); ++it) {
      const Key& k = *it;
      bool in_range = true;
      for (int d = 0; d < prefix; ++d) in_range = in_range && k[d] == lo[d];
      if (!in_range) break;
      Key spo{};
      for (int d = 0; d < 3; ++d) spo[order[d]] = k[d];
      if (!emit(spo[0], spo[1], spo[2])) return false;
    }
    return true;
  };
  constexpr std::array<int, 3> kSpo{0, 1, 2}, kPos{1, 2, 0}, kOsp{2, 0, 1};

  if (s && p && o) return !spo_.contains(Key{sid, pid, oid}) || emit(sid, pid, oid);
  if (s && p) return range(spo_, {sid, pid, 0}, 2, kSpo);
  if (s && o) return range(osp_, {oid, sid, 0}, 2, kOsp);
  if (p && o) return range(pos_, {pid, oid, 0}, 2, kPos);
  if (s) return range(spo_, {sid, 0, 0}, 1, kSpo);
  if (p) return range(pos_, {pid, 0, 0}, 1, kPos);
  if (o) return range(osp_, {oid, 0, 0}, 1, kOsp);
  return range(spo_, {0, 0, 0}, 0, kSpo);
}

Graph TripleStore::snapshot() const {
  Graph g;
  scan(nullptr, nullptr, nullptr, [&](const Triple& t) {
    g.insert(t);
    return true;
  });
  return g;
}

bool TripleStore::insert_unlocked(const Triple& t) {
  std::uint32_t s = intern(t.subject), p = intern(t.predicate), o = intern(t.object);
  if (!spo_.insert(Key{s, p, o}).second) return false;
  pos_.insert(Key{p, o, s});
  osp_.insert(Key{o, s, p});
  return true;
}

bool TripleStore::erase_unlocked(const Triple& t) {
  auto s = find_id(t.subject), p = find_id(t.predicate), o = find_id(t.object);
  if (!s || !p || !o || spo_.erase(Key{*s, *p, *o}) == 0) return false;
  pos_.erase(Key{*p, *o, *s});
  osp_.erase(Key{*o, *s, *p});
  return true;
}

ApplyCounts TripleStore::apply(const Graph& removed, const Graph& added) {
  std::unique_lock lock(mutex_);
  ApplyCounts counts;
  for (const auto& t : removed) counts.removed += erase_unlocked(t);
  for (const auto& t : added) counts.added += insert_unlocked(t);
  return counts;
}

void TripleStore::load(const Graph& g) {
  std::unique_lock lock(mutex_);
  for (const auto& t : g) insert_unlocked(t);
}

void TripleStore::clear() {
  std::unique_lock lock(mutex_);
  terms_.clear();
  ids_.clear();
  spo_.clear();
  pos_.clear();
  osp_.clear();
}

std::vector<std::pair<Triple, Binding>> TripleStore::match_pattern(const TriplePattern& tp, const Binding& mu) const {
  std::vector<std::pair<Triple, Binding>> out;
  scan(resolve(tp.subject, mu), resolve(tp.predicate, mu), resolve(tp.object, mu), [&](const Triple& t) {
    if (auto ext = unify(tp, t, mu)) out.emplace_back(t, std::move(*ext));
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// File helpers

namespace {

class Fd {
 public:
  Fd(const fs::path& path, int flags) : fd_(::open(path.c_str(), flags | O_CLOEXEC, 0644)) {
    if (fd_ < 0) throw StoreError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  void write_all(std::string_view data) {
    while (!data.empty()) {
      ssize_t n = ::write(fd_, data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        throw StoreError(std::string("write failed: ") + std::strerror(errno));
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
  }
  void sync() {
    if (::fsync(fd_) != 0) throw StoreError(std::string("fsync failed: ") + std::strerror(errno));
  }

 private:
  int fd_;
};

void sync_dir(const fs::path& dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string crc_hex(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", crc);
  return buf;
}

// "- " and "+ " prefixed lines for a delta.
void append_delta(std::string& out, const Graph& removed, const Graph& added) {
  for (const auto& t : removed) out += "- " + t.to_ntriples() + "\n";
  for (const auto& t : added) out += "+ " + t.to_ntriples() + "\n";
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  // Next complete line (without newline); nullopt at end or on a torn line.
  std::optional<std::string_view> next() {
    if (pos_ >= text_.size()) return std::nullopt;
    auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) return std::nullopt;
    auto line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    return line;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < line.size()) {
    auto end = line.find(' ', start);
    if (end == std::string_view::npos) end = line.size();
    if (end > start) out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

// Reads `count` delta lines with the given sign; false on any mismatch.
bool read_delta_lines(LineReader& in, char sign, std::size_t count, Graph& out, std::string& raw) {
  for (std::size_t k = 0; k < count; ++k) {
    auto line = in.next();
    if (!line || line->size() < 2 || (*line)[0] != sign || (*line)[1] != ' ') return false;
    try {
      out.insert(parse_ntriples_line(line->substr(2), "journal"));
    } catch (const ParseError&) {
      return false;
    }
    raw.append(*line).push_back('\n');
  }
  return true;
}

constexpr std::string_view kSnapshotHeader = "# irap-snapshot seq=";

}  // namespace

void write_file_durably(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    Fd fd(tmp, O_WRONLY | O_CREAT | O_TRUNC);
    fd.write_all(content);
    fd.sync();
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError("cannot rename " + tmp.string() + ": " + ec.message());
  sync_dir(path.has_parent_path() ? path.parent_path() : fs::path("."));
}

// ---------------------------------------------------------------------------
// DurableStore

DurableStore::DurableStore(fs::path dir) : dir_(std::move(dir)) {
  if (!persistent()) return;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw StoreError("cannot create " + dir_.string() + ": " + ec.message());
  recover();
}

void DurableStore::recover() {
  std::uint64_t covered = 0;
  fs::path snap = dir_ / "snapshot.nt";
  if (fs::exists(snap)) {
    std::string text = read_file(snap);
    snapshot_bytes_ = text.size();
    if (text.starts_with(kSnapshotHeader)) {
      auto nl = text.find('\n');
      parse_number(std::string_view(text).substr(kSnapshotHeader.size(), nl - kSnapshotHeader.size()), covered);
    }
    try {
      data_.load(parse_ntriples(text, {.mode = ParseMode::kStrict, .doc_id = "snapshot"}).graph);
    } catch (const ParseError& e) {
      throw StoreError("corrupt snapshot " + snap.string() + ": " + e.what());
    }
  }
  next_seq_ = covered + 1;

  fs::path journal = dir_ / "journal.log";
  if (!fs::exists(journal)) return;
  std::string text = read_file(journal);
  LineReader in(text);
  std::size_t valid_end = 0;
  while (auto line = in.next()) {
    auto head = split_spaces(*line);
    std::uint64_t seq = 0;
    std::size_t nrem = 0, nadd = 0;
    if (head.size() != 4 || head[0] != "BEGIN" || !parse_number(head[1], seq) || !parse_number(head[2], nrem) ||
        !parse_number(head[3], nadd)) {
      break;
    }
    std::string raw(*line);
    raw.push_back('\n');
    Graph removed, added;
    if (!read_delta_lines(in, '-', nrem, removed, raw) || !read_delta_lines(in, '+', nadd, added, raw)) break;
    auto tail = in.next();
    if (!tail) break;
    auto commit = split_spaces(*tail);
    std::uint64_t commit_seq = 0;
    if (commit.size() != 3 || commit[0] != "COMMIT" || !parse_number(commit[1], commit_seq) || commit_seq != seq ||
        commit[2] != crc_hex(raw)) {
      break;
    }
    if (seq > covered) data_.apply(removed, added);
    next_seq_ = std::max(next_seq_, seq + 1);
    valid_end = in.pos();
  }
  if (valid_end < text.size()) {
    // Torn tail from an interrupted append.
    std::error_code ec;
    fs::resize_file(journal, valid_end, ec);
    if (ec) throw StoreError("cannot truncate " + journal.string() + ": " + ec.message());
  }
  journal_bytes_ = valid_end;
}

ApplyCounts DurableStore::commit(const Graph& removed, const Graph& added) {
  if (persistent() && (!removed.empty() || !added.empty())) {
    std::uint64_t seq = next_seq_++;
    std::string record =
        "BEGIN " + std::to_string(seq) + " " + std::to_string(removed.size()) + " " + std::to_string(added.size()) + "\n";
    append_delta(record, removed, added);
    record += "COMMIT " + std::to_string(seq) + " " + crc_hex(record) + "\n";
    Fd fd(dir_ / "journal.log", O_WRONLY | O_CREAT | O_APPEND);
    fd.write_all(record);
    fd.sync();
    journal_bytes_ += record.size();
  }
  ApplyCounts counts = data_.apply(removed, added);
  if (persistent() && journal_bytes_ > std::max<std::uintmax_t>(std::uintmax_t{1} << 20, snapshot_bytes_)) compact();
  return counts;
}

void DurableStore::compact() {
  if (!persistent()) return;
  std::string text = std::string(kSnapshotHeader) + std::to_string(next_seq_ - 1) + "\n";
  {
    auto lock = data_.read_lock();
    text += serialize_ntriples(data_.snapshot());
  }
  write_file_durably(dir_ / "snapshot.nt", text);
  snapshot_bytes_ = text.size();
  std::error_code ec;
  fs::resize_file(dir_ / "journal.log", 0, ec);
  journal_bytes_ = 0;
}

void DurableStore::reset(const Graph& g) {
  data_.clear();
  data_.load(g);
  // The snapshot's sequence number covers every older journal record.
  compact();
}

// ---------------------------------------------------------------------------
// StorePair

StorePair::StorePair(fs::path target_dir, fs::path pi_dir)
    : target_(std::move(target_dir)), pi_(std::move(pi_dir)) {
  redo_pending();
}

fs::path StorePair::intent_path() const { return pi_.dir() / "pending.txn"; }

void StorePair::redo_pending() {
  if (!pi_.persistent()) return;
  fs::path path = intent_path();
  if (!fs::exists(path)) return;
  std::string text = read_file(path);
  LineReader in(text);
  std::string raw;
  Changeset target_delta, pi_delta;
  bool ok = true;
  for (auto [tag, cs] : {std::pair{"T", &target_delta}, std::pair{"P", &pi_delta}}) {
    auto line = in.next();
    auto head = line ? split_spaces(*line) : std::vector<std::string_view>{};
    std::size_t nrem = 0, nadd = 0;
    if (head.size() != 3 || head[0] != tag || !parse_number(head[1], nrem) || !parse_number(head[2], nadd)) {
      ok = false;
      break;
    }
    raw.append(*line).push_back('\n');
    if (!read_delta_lines(in, '-', nrem, cs->removed, raw) || !read_delta_lines(in, '+', nadd, cs->added, raw)) {
      ok = false;
      break;
    }
  }
  auto tail = ok ? in.next() : std::nullopt;
  auto end = tail ? split_spaces(*tail) : std::vector<std::string_view>{};
  if (ok && end.size() == 2 && end[0] == "END" && end[1] == crc_hex(raw)) {
    target_.commit(target_delta.removed, target_delta.added);
    pi_.commit(pi_delta.removed, pi_delta.added);
  }
  fs::remove(path);
  sync_dir(pi_.dir());
}

StorePair::Commit StorePair::commit(const Changeset& target_delta, const Changeset& pi_delta) {
  std::lock_guard lock(writer_);
  const bool durable = target_.persistent() && pi_.persistent();
  if (durable) {
    std::string body = "T " + std::to_string(target_delta.removed.size()) + " " +
                       std::to_string(target_delta.added.size()) + "\n";
    append_delta(body, target_delta.removed, target_delta.added);
    body += "P " + std::to_string(pi_delta.removed.size()) + " " + std::to_string(pi_delta.added.size()) + "\n";
    append_delta(body, pi_delta.removed, pi_delta.added);
    body += "END " + crc_hex(body) + "\n";
    write_file_durably(intent_path(), body);
    fault::point("intent-written");
  }
  Commit out;
  out.target = target_.commit(target_delta.removed, target_delta.added);
  fault::point("target-committed");
  out.pi = pi_.commit(pi_delta.removed, pi_delta.added);
  fault::point("pi-committed");
  if (durable) {
    fs::remove(intent_path());
    sync_dir(pi_.dir());
  }
  return out;
}

void StorePair::reset(const Graph& target, const Graph& pi) {
  std::lock_guard lock(writer_);
  if (pi_.persistent()) fs::remove(intent_path());
  target_.reset(target);
  pi_.reset(pi);
}

// ---------------------------------------------------------------------------
// Update stream

std::string export_update_stream(const Changeset& interesting) {
  return "DELETE DATA {\n" + serialize_ntriples(interesting.removed) + "};\nINSERT DATA {\n" +
         serialize_ntriples(interesting.added) + "}\n";
}

Changeset parse_update_stream(std::string_view text) {
  Changeset out;
  Graph* section = nullptr;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  int blocks = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!section && line == "DELETE DATA {" && blocks == 0) {
      section = &out.removed;
    } else if (!section && line == "INSERT DATA {" && blocks == 1) {
      section = &out.added;
    } else if (section && (line == "};" || line == "}")) {
      section = nullptr;
      ++blocks;
    } else if (section) {
      section->insert(parse_ntriples_line(line, "update", line_no));
    } else {
      throw ParseError(line_no, 1, "unexpected line in update stream");
    }
  }
  if (section || blocks != 2) throw ParseError(line_no, 1, "incomplete update stream");
  return out;
}

}  // namespace irap
