#include <cmath>
#include <limits>

#include "doctest.h"
#include "spamfilter/error.hpp"
#include "spamfilter/random.hpp"
#include "spamfilter/text_format.hpp"

using namespace spamfilter;

TEST_CASE("format_double emits the shortest round-trip form") {
  CHECK(text::format_double(0.1) == "0.1");
  CHECK(text::format_double(1.0) == "1");
  CHECK(text::format_double(-2.5) == "-2.5");
  CHECK(text::format_double(1.0 / 3.0) == "0.3333333333333333");
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    CHECK(text::parse_double(text::format_double(v)) == v);
  }
}

TEST_CASE("strict number parsing") {
  CHECK(text::parse_double(" 2.5 ") == 2.5);
  CHECK_THROWS_AS(text::parse_double("2.5x"), InvalidArgument);
  CHECK_THROWS_AS(text::parse_double(""), InvalidArgument);
  CHECK(text::parse_u64("42") == 42u);
  CHECK_THROWS_AS(text::parse_u64("-1"), InvalidArgument);
  CHECK(text::parse_i64("-7") == -7);
}

TEST_CASE("token escaping round-trips awkward ids") {
  for (std::string s : {std::string("plain"), std::string("with space"), std::string("tab\there"),
                        std::string("100%"), std::string(), std::string(1, '\0'), std::string("%"),
                        std::string("line\nbreak")}) {
    const std::string e = text::escape_token(s);
    CHECK(e.find_first_of(" \t\n") == std::string::npos);
    CHECK(!e.empty());
    CHECK(text::unescape_token(e) == s);
  }
}

TEST_CASE("fnv1a matches the published test vector") {
  text::Fnv1a h;
  h.update("a");
  CHECK(h.digest() == 0xaf63dc4c8601ec8cULL);
  CHECK(text::hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("rng draws are reproducible and in range") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(a.below(7) < 7u);
    b.below(7);
  }
}
