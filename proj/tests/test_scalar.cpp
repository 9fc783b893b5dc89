#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pbv/scalar.hpp"

using pbv::Qi;
using pbv::Rat;

namespace {

// deterministic small-rational generator (xorshift over fixed seed)
struct Rng {
  uint64_t s;
  explicit Rng(uint64_t seed) : s(seed) {}
  uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  int small(int lo, int hi) { return lo + static_cast<int>(next() % (hi - lo + 1)); }
  Qi value() {
    return Qi(Rat(small(-9, 9), small(1, 7)), Rat(small(-9, 9), small(1, 7)));
  }
};

}  // namespace

TEST_CASE("field axioms on deterministic random values") {
  Rng rng(20260814u);
  for (int t = 0; t < 200; ++t) {
    Qi a = rng.value(), b = rng.value(), c = rng.value();
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("conjugation and norm") {
  Qi z(Rat(3), Rat(-4));
  CHECK(z.conj() == Qi(Rat(3), Rat(4)));
  CHECK(z.norm() == Rat(25));
  CHECK((z * z.conj()) == Qi(Rat(25)));
  CHECK(Qi::i() * Qi::i() == Qi(-1));
}

TEST_CASE("string round trip is canonical") {
  Rng rng(77u);
  for (int t = 0; t < 200; ++t) {
    Qi a = rng.value();
    CHECK(Qi::parse(a.str()) == a);
    CHECK(Qi::parse(a.str()).str() == a.str());
  }
  CHECK(Qi(0).str() == "0");
  CHECK(Qi::frac(-6, 4).str() == "-3/2");
  CHECK(Qi(Rat(0), Rat(1)).str() == "0,1");
}

TEST_CASE("gaussian integer detection and exact division") {
  CHECK(Qi(Rat(5), Rat(-2)).is_gaussian_integer());
  CHECK(!Qi(Rat(1, 2), Rat(0)).is_gaussian_integer());
  Qi a(Rat(7), Rat(1)), b(Rat(1), Rat(1));
  Qi q = a / b;  // (7+i)/(1+i) = 4-3i
  CHECK(q == Qi(Rat(4), Rat(-3)));
}
