#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"

namespace fs = std::filesystem;

namespace spamfilter {
namespace {

std::optional<std::string> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return std::move(ss).str();
}

void require_directory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw LoadError("not a directory: " + dir.string());
}

struct PendingFile {
  std::string sort_key;
  std::string id;
  fs::path path;
  Label label;
};

std::vector<fs::path> regular_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file()) out.push_back(entry.path());
  }
  return out;
}

template <typename Tokenizer>
LoadResult materialize(std::vector<PendingFile> files, Tokenizer&& to_tokens) {
  std::sort(files.begin(), files.end(), [](const PendingFile& a, const PendingFile& b) {
    return std::tie(a.sort_key, a.id) < std::tie(b.sort_key, b.id);
  });
  LoadResult result;
  std::vector<Document> docs;
  docs.reserve(files.size());
  for (auto& f : files) {
    auto bytes = read_bytes(f.path);
    if (!bytes) {
      ++result.skipped;
      result.warnings.push_back("unreadable file skipped: " + f.path.string());
      continue;
    }
    Document d;
    d.id = std::move(f.id);
    d.label = f.label;
    d.tokens = to_tokens(*bytes);
    d.arrival_index = docs.size();
    docs.push_back(std::move(d));
  }
  result.corpus = LabeledCorpus(std::move(docs));
  return result;
}

}  // namespace

LoadResult load_enron(const fs::path& dir, const StopList& stoplist) {
  require_directory(dir);
  std::vector<PendingFile> files;
  for (auto [sub, label] : {std::pair{"spam", Label::Spam}, std::pair{"ham", Label::Legitimate}}) {
    const fs::path subdir = dir / sub;
    require_directory(subdir);
    for (const auto& p : regular_files(subdir)) {
      const std::string name = p.filename().string();
      files.push_back({name, std::string(sub) + "/" + name, p, label});
    }
  }
  return materialize(std::move(files), [&](std::string_view text) { return preprocess(text, stoplist); });
}

LoadResult load_pu(const fs::path& dir, const PuOptions& options, const StopList& stoplist) {
  require_directory(dir);
  if (options.spam_marker.empty() || options.legit_marker.empty())
    throw InvalidArgument("PU filename markers must be non-empty");
  std::vector<PendingFile> files;
  std::vector<std::string> unmatched;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    const std::string name = entry.path().filename().string();
    Label label;
    if (name.find(options.spam_marker) != std::string::npos) {
      label = Label::Spam;
    } else if (name.find(options.legit_marker) != std::string::npos) {
      label = Label::Legitimate;
    } else {
      unmatched.push_back(rel);
      continue;
    }
    files.push_back({rel, rel, entry.path(), label});
  }
  std::sort(unmatched.begin(), unmatched.end());

  LoadResult result;
  if (options.encoded_tokens) {
    result = materialize(std::move(files), [](std::string_view text) {
      std::vector<std::string> tokens;
      std::string cur;
      for (unsigned char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
          cur.push_back(static_cast<char>(c));
        } else if (c >= 'A' && c <= 'Z') {
          cur.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (!cur.empty()) {
          tokens.push_back(std::move(cur));
          cur.clear();
        }
      }
      if (!cur.empty()) tokens.push_back(std::move(cur));
      return tokens;
    });
  } else {
    result = materialize(std::move(files), [&](std::string_view text) { return preprocess(text, stoplist); });
  }
  for (const auto& rel : unmatched) {
    ++result.skipped;
    result.warnings.push_back("filename matches neither class marker, skipped: " + rel);
  }
  return result;
}

LabeledCorpus parse_ecml(std::string_view text, std::string_view source_name) {
  const std::string source(source_name);
  std::vector<Document> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }

    Document d;
    const std::string_view label = fields.front();
    if (label == "1" || label == "+1") {
      d.label = Label::Spam;
    } else if (label == "-1") {
      d.label = Label::Legitimate;
    } else if (label == "0") {
      d.label = Label::Unlabeled;
    } else {
      throw ParseError(source, line_no, "bad label '" + std::string(label) + "'");
    }
    for (std::size_t f = 1; f < fields.size(); ++f) {
      const std::string_view pair = fields[f];
      const auto colon = pair.find(':');
      if (colon == std::string_view::npos || colon == 0 || colon + 1 == pair.size())
        throw ParseError(source, line_no, "malformed pair '" + std::string(pair) + "'");
      std::int64_t count = 0;
      try {
        count = text::parse_i64(pair.substr(colon + 1));
      } catch (const InvalidArgument&) {
        throw ParseError(source, line_no, "malformed count in '" + std::string(pair) + "'");
      }
      if (count < 0) throw ParseError(source, line_no, "negative count in '" + std::string(pair) + "'");
      const std::string token(pair.substr(0, colon));
      for (std::int64_t c = 0; c < count; ++c) d.tokens.push_back(token);
    }
    d.id = source + ":" + std::to_string(line_no);
    d.arrival_index = docs.size();
    docs.push_back(std::move(d));
  }
  return LabeledCorpus(std::move(docs));
}

LoadResult load_ecml(const fs::path& file) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) throw LoadError("not a file: " + file.string());
  auto bytes = read_bytes(file);
  if (!bytes) throw LoadError("cannot read " + file.string());
  LoadResult result;
  result.corpus = parse_ecml(*bytes, file.filename().string());
  return result;
}

void write_enron_layout(const LabeledCorpus& corpus, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "spam", ec);
  fs::create_directories(dir / "ham", ec);
  if (!fs::is_directory(dir / "spam") || !fs::is_directory(dir / "ham"))
    throw IoError("cannot create corpus directories under " + dir.string());
  for (const auto& d : corpus) {
    if (d.label == Label::Unlabeled) throw InvalidArgument("cannot write unlabeled document " + d.id);
    const bool spam = d.label == Label::Spam;
    char name[48];
    std::snprintf(name, sizeof name, "%08zu.%s.txt", d.arrival_index, spam ? "spam" : "ham");
    std::ofstream out(dir / (spam ? "spam" : "ham") / name, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / name).string());
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) out << ' ';
      out << d.tokens[i];
    }
    out << '\n';
  }
}

}  // namespace spamfilter
