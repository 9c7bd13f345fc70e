#include <algorithm>
#include <set>

#include "doctest.h"
#include "spamfilter/corpus.hpp"
#include "spamfilter/error.hpp"
#include "temp_dir.hpp"

using namespace spamfilter;
using Tokens = std::vector<std::string>;

namespace {

Document doc(std::string id, Label label, Tokens tokens, std::size_t arrival) {
  return {std::move(id), label, std::move(tokens), arrival};
}

LabeledCorpus numbered(std::size_t n) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i)
    docs.push_back(doc("d" + std::to_string(i), i % 3 == 0 ? Label::Spam : Label::Legitimate, {"t"}, i));
  return LabeledCorpus(std::move(docs));
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(tokenize("Buy VIAGRA now!!") == Tokens{"buy", "viagra", "now"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("123 456").empty());
  CHECK(tokenize("a b cd x1 9z") == Tokens{"cd", "x1", "9z"});
  CHECK(tokenize("caf\xc3\xa9 ol\xe9") == Tokens{"caf", "ol"});
}

TEST_CASE("remove_stopwords") {
  const StopList just_the({"the"});
  CHECK(remove_stopwords({"the", "cat"}, just_the) == Tokens{"cat"});
  CHECK(remove_stopwords({}, just_the).empty());
  CHECK(remove_stopwords({"a", "an", "offer"}, StopList::english()) == Tokens{"offer"});
}

TEST_CASE("the shipped stop list") {
  const auto& sl = StopList::english();
  CHECK(sl.size() == 300);
  for (const char* w : {"the", "and", "of", "you", "would", "which"}) CHECK(sl.contains(w));
  for (const char* w : {"offer", "money", "viagra"}) CHECK_FALSE(sl.contains(w));
}

TEST_CASE("Porter reference vectors") {
  const std::pair<const char*, const char*> vectors[] = {
      {"caresses", "caress"},   {"ponies", "poni"},         {"ties", "ti"},
      {"caress", "caress"},     {"cats", "cat"},            {"cat", "cat"},
      {"feed", "feed"},         {"agreed", "agre"},         {"plastered", "plaster"},
      {"bled", "bled"},         {"motoring", "motor"},      {"sing", "sing"},
      {"conflated", "conflat"}, {"troubled", "troubl"},     {"sized", "size"},
      {"hopping", "hop"},       {"tanned", "tan"},          {"falling", "fall"},
      {"hissing", "hiss"},      {"fizzed", "fizz"},         {"failing", "fail"},
      {"filing", "file"},       {"happy", "happi"},         {"sky", "sky"},
      {"relational", "relat"},  {"conditional", "condit"},  {"rational", "ration"},
      {"valenci", "valenc"},    {"hesitanci", "hesit"},     {"digitizer", "digit"},
      {"conformabli", "conform"}, {"radicalli", "radic"},   {"differentli", "differ"},
      {"vileli", "vile"},       {"analogousli", "analog"},  {"vietnamization", "vietnam"},
      {"predication", "predic"}, {"operator", "oper"},      {"feudalism", "feudal"},
      {"decisiveness", "decis"}, {"hopefulness", "hope"},   {"callousness", "callous"},
      {"formaliti", "formal"},  {"sensitiviti", "sensit"},  {"sensibiliti", "sensibl"},
      {"triplicate", "triplic"}, {"formative", "form"},     {"formalize", "formal"},
      {"electriciti", "electr"}, {"electrical", "electr"},  {"hopeful", "hope"},
      {"goodness", "good"},     {"revival", "reviv"},       {"allowance", "allow"},
      {"inference", "infer"},   {"airliner", "airlin"},     {"gyroscopic", "gyroscop"},
      {"adjustable", "adjust"}, {"defensible", "defens"},   {"irritant", "irrit"},
      {"replacement", "replac"}, {"adjustment", "adjust"},  {"dependent", "depend"},
      {"adoption", "adopt"},    {"homologou", "homolog"},   {"communism", "commun"},
      {"activate", "activ"},    {"angulariti", "angular"},  {"homologous", "homolog"},
      {"effective", "effect"},  {"bowdlerize", "bowdler"},  {"probate", "probat"},
      {"rate", "rate"},         {"cease", "ceas"},          {"controll", "control"},
      {"roll", "roll"},         {"generalizations", "gener"}, {"oscillators", "oscil"},
      {"is", "is"},             {"as", "as"},
  };
  for (const auto& [in, out] : vectors) {
    CAPTURE(in);
    CHECK(stem(in) == out);
  }
  CHECK(stem("x1y") == "x1y");
  CHECK(stem("Caresses") == "Caresses");
}

TEST_CASE("preprocess pipeline") {
  const Tokens out = preprocess("The offers are EXCLUSIVELY for you: click now, 1000 winners!");
  // "exclusively" -> "exclus" -> "exclu": stemming runs to a fixed point.
  CHECK(out == Tokens{"offer", "exclu", "click", "winner"});
  SUBCASE("idempotent on its own output") {
    std::string joined;
    for (const auto& t : out) joined += t + " ";
    CHECK(preprocess(joined) == out);
  }
}

TEST_CASE("LabeledCorpus sorts by arrival and rejects duplicates") {
  LabeledCorpus c({doc("b", Label::Spam, {}, 5), doc("a", Label::Legitimate, {}, 2), doc("u", Label::Unlabeled, {}, 9)});
  CHECK(c[0].id == "a");
  CHECK(c.spam_count() == 1);
  CHECK(c.legit_count() == 1);
  CHECK(c.labeled_count() == 2);
  CHECK_THROWS_AS(LabeledCorpus({doc("x", Label::Spam, {}, 1), doc("y", Label::Spam, {}, 1)}), InvalidArgument);
}

TEST_CASE("partition_stream arithmetic") {
  SUBCASE("30 docs, a third, ten batches") {
    const auto p = partition_stream(numbered(30), 1.0 / 3.0, 10, true);
    CHECK(p.training.size() == 10);
    REQUIRE(p.test_batches.size() == 10);
    for (const auto& b : p.test_batches) CHECK(b.size() == 2);
  }
  SUBCASE("10 docs, half, one batch") {
    const auto p = partition_stream(numbered(10), 0.5, 1, true);
    CHECK(p.training.size() == 5);
    CHECK(p.test_batches.at(0).size() == 5);
  }
  SUBCASE("Enron-sized stream") {
    const auto p = partition_stream(numbered(5172), 1.0 / 3.0, 10, true);
    CHECK(p.training.size() == 1724);
    // 3448 test documents: eight batches of 345 then two of 344.
    for (std::size_t b = 0; b < 10; ++b) CHECK(p.test_batches[b].size() == (b < 8 ? 345u : 344u));
  }
  SUBCASE("chronological order") {
    const auto p = partition_stream(numbered(50), 0.3, 4, true);
    std::size_t last = 0;
    for (const auto& d : p.training) last = std::max(last, d.arrival_index);
    for (const auto& b : p.test_batches)
      for (const auto& d : b) CHECK(d.arrival_index > last);
  }
  SUBCASE("shuffled mode conserves documents and depends on the seed") {
    const auto c = numbered(40);
    const auto p = partition_stream(c, 0.25, 3, false, 11);
    std::set<std::string> ids;
    for (const auto& d : p.training) ids.insert(d.id);
    for (const auto& b : p.test_batches)
      for (const auto& d : b) CHECK(ids.insert(d.id).second);
    CHECK(ids.size() == 40);
    CHECK(p.total_size() == 40);
    CHECK(partition_stream(c, 0.25, 3, false, 11).checksum() == p.checksum());
    CHECK(partition_stream(c, 0.25, 3, false, 12).checksum() != p.checksum());
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(partition_stream(numbered(10), 0.0, 1, true), InvalidArgument);
    CHECK_THROWS_AS(partition_stream(numbered(10), 0.5, 6, true), InvalidArgument);
    CHECK_THROWS_AS(partition_stream(LabeledCorpus(), 0.5, 1, true), InvalidArgument);
  }
}

TEST_CASE("split_batches") {
  const auto batches = split_batches(numbered(7), 3);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 3);
  CHECK(batches[1].size() == 2);
  CHECK(batches[2].size() == 2);
  CHECK(batches[1][0].arrival_index == 3);
}

TEST_CASE("load_enron") {
  testing::TempDir dir;
  SUBCASE("two ham and one spam") {
    testing::write_text(dir / "spam/0003.spam.txt", "Subject: cheap pills\nBuy cheap pills now");
    testing::write_text(dir / "ham/0001.ham.txt", "Subject: meeting\nThe meeting moved to Tuesday");
    testing::write_text(dir / "ham/0002.ham.txt", "Subject: lunch\nLunch at noon?");
    const auto r = load_enron(dir.path());
    CHECK(r.corpus.spam_count() == 1);
    CHECK(r.corpus.legit_count() == 2);
    CHECK(r.corpus[0].id == "ham/0001.ham.txt");
    CHECK(r.corpus[2].id == "spam/0003.spam.txt");
    CHECK(r.corpus[2].tokens == Tokens{"subject", "cheap", "pill", "bui", "cheap", "pill"});
  }
  SUBCASE("empty spam folder") {
    std::filesystem::create_directories(dir / "spam");
    testing::write_text(dir / "ham/1.txt", "hello there friend");
    const auto r = load_enron(dir.path());
    CHECK(r.corpus.spam_count() == 0);
    CHECK(r.corpus.legit_count() == 1);
  }
  SUBCASE("Enron1 proportions at 1:100") {
    for (int i = 0; i < 15; ++i) testing::write_text(dir / ("spam/" + std::to_string(1000 + i) + ".txt"), "win money");
    for (int i = 0; i < 37; ++i) testing::write_text(dir / ("ham/" + std::to_string(2000 + i) + ".txt"), "project notes");
    const auto r = load_enron(dir.path());
    CHECK(r.corpus.spam_count() == 15);
    CHECK(r.corpus.legit_count() == 37);
  }
  SUBCASE("missing class folder") {
    std::filesystem::create_directories(dir / "ham");
    CHECK_THROWS_AS(load_enron(dir.path()), LoadError);
  }
  SUBCASE("write_enron_layout round trip") {
    const LabeledCorpus c({doc("x", Label::Spam, {"cheap", "pill"}, 0), doc("y", Label::Legitimate, {"meet"}, 1)});
    write_enron_layout(c, dir / "out");
    const auto r = load_enron(dir / "out");
    REQUIRE(r.corpus.size() == 2);
    CHECK(r.corpus[0].tokens == c[0].tokens);
    CHECK(r.corpus[1].tokens == c[1].tokens);
    CHECK(r.corpus[0].label == Label::Spam);
  }
}

TEST_CASE("load_pu") {
  testing::TempDir dir;
  SUBCASE("one spam file") {
    testing::write_text(dir / "part1/3spmsg1.txt", "Subject: 12 34\n\n56 12");
    const auto r = load_pu(dir.path());
    CHECK(r.corpus.spam_count() == 1);
    CHECK(r.corpus[0].tokens == Tokens{"subject", "12", "34", "56", "12"});
  }
  SUBCASE("unmatched names are skipped with a warning") {
    testing::write_text(dir / "part1/1legit2.txt", "1 2 3");
    testing::write_text(dir / "part1/readme.txt", "notes");
    const auto r = load_pu(dir.path());
    CHECK(r.corpus.legit_count() == 1);
    CHECK(r.skipped == 1);
    CHECK(r.warnings.size() == 1);
  }
  SUBCASE("folds sorted by relative path") {
    testing::write_text(dir / "part2/1legit1.txt", "5");
    testing::write_text(dir / "part1/2spmsg1.txt", "6");
    const auto r = load_pu(dir.path());
    CHECK(r.corpus[0].id == "part1/2spmsg1.txt");
  }
}

TEST_CASE("parse_ecml") {
  const auto c = parse_ecml("1 12:3 47:1\n-1\n0 5:2\n", "train");
  REQUIRE(c.size() == 3);
  CHECK(c[0].label == Label::Spam);
  CHECK(c[0].tokens == Tokens{"12", "12", "12", "47"});
  CHECK(c[1].label == Label::Legitimate);
  CHECK(c[1].tokens.empty());
  CHECK(c[2].label == Label::Unlabeled);
  CHECK(c[0].id == "train:1");
  try {
    parse_ecml("1 1:1\n1 12:x\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_ecml("2 1:1"), ParseError);
  CHECK_THROWS_AS(parse_ecml("1 1-1"), ParseError);
}

TEST_CASE("synth_drift") {
  SynthParams p;
  p.n_docs = 400;
  p.drift_point = 200;
  auto spam_vocab = [](const LabeledCorpus& c, bool after, std::size_t drift) {
    std::set<std::string> v;
    for (const auto& d : c)
      if (d.label == Label::Spam && (d.arrival_index >= drift) == after)
        for (const auto& t : d.tokens)
          if (t.rfind("sp", 0) == 0 || t.rfind("sn", 0) == 0) v.insert(t);
    return v;
  };
  SUBCASE("full overlap keeps the spam vocabulary") {
    p.overlap = 1.0;
    const auto c = synth_drift(3, p);
    for (const auto& t : spam_vocab(c, true, p.drift_point)) CHECK(t.rfind("sp", 0) == 0);
  }
  SUBCASE("zero overlap shares no spam tokens") {
    p.overlap = 0.0;
    const auto c = synth_drift(3, p);
    const auto before = spam_vocab(c, false, p.drift_point);
    for (const auto& t : spam_vocab(c, true, p.drift_point)) CHECK_FALSE(before.contains(t));
  }
  SUBCASE("deterministic and balanced") {
    const auto a = synth_drift(5, p);
    CHECK(a == synth_drift(5, p));
    CHECK(a.checksum() != synth_drift(6, p).checksum());
    CHECK(a.spam_count() == 200);
    CHECK(a.size() == 400);
  }
  SUBCASE("parameter checks") {
    p.overlap = 1.5;
    CHECK_THROWS_AS(synth_drift(1, p), InvalidArgument);
  }
}
