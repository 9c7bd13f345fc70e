#include <fstream>
#include <sstream>

#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"

namespace spamfilter {

namespace detail {
extern const char* const kEnglishStopwords;
}

const StopList& StopList::english() {
  static const StopList list = StopList::parse(detail::kEnglishStopwords);
  return list;
}

StopList StopList::parse(std::string_view text) {
  std::unordered_set<std::string> words;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text::trim(text.substr(pos, nl - pos));
    if (!line.empty() && line.front() != '#') words.emplace(line);
    pos = nl + 1;
  }
  return StopList(std::move(words));
}

StopList StopList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open stop-list file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

bool is_alnum_ascii(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

bool keep_token(std::string_view t, const StopList& stoplist) {
  return t.size() >= 2 && !stoplist.contains(t);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw_text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= 2 && !all_digits(current)) out.push_back(current);
    current.clear();
  };
  for (unsigned char c : raw_text) {
    if (is_alnum_ascii(c)) {
      current.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopList& stoplist) {
  std::erase_if(tokens, [&](const std::string& t) { return stoplist.contains(t); });
  return tokens;
}

std::vector<std::string> preprocess(std::string_view raw_text, const StopList& stoplist) {
  std::vector<std::string> out;
  for (auto& token : remove_stopwords(tokenize(raw_text), stoplist)) {
    // Porter is not idempotent ("agreed" -> "agre" -> "agr"), so iterate to
    // a fixed point; a handful of rounds always suffices.
    std::string s = std::move(token);
    for (int round = 0; round < 16; ++round) {
      std::string next = stem(s);
      if (next == s) break;
      s = std::move(next);
    }
    if (keep_token(s, stoplist)) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace spamfilter
