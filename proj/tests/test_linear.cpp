#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "pbv/graded.hpp"
#include "pbv/sparse_map.hpp"

using namespace pbv;

namespace {

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
};

SpacePtr plain(int n, const std::string& nm) {
  auto s = std::make_shared<GradedSpace>(nm);
  for (int i = 0; i < n; ++i) s->add(nm + std::to_string(i), Bidegree{0, 0});
  return s;
}

SparseMap random_map(Rng& rng, int rows, int cols, int density_pct) {
  SparseMap m(plain(cols, "s"), plain(rows, "t"), Bidegree{0, 0}, false);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      if (rng.small(0, 99) < density_pct)
        m.set(i, j, Qi(Rat(rng.small(-5, 5), rng.small(1, 3)),
                       Rat(rng.small(-5, 5), rng.small(1, 3))));
  return m;
}

}  // namespace

TEST_CASE("fraction-free elimination matches the naive Gaussian oracle") {
  Rng rng(123456789u);
  for (int t = 0; t < 100; ++t) {
    int rows = rng.small(1, 12), cols = rng.small(1, 12);
    SparseMap m = random_map(rng, rows, cols, rng.small(20, 90));
    CHECK(rank(m) == rank_gauss_oracle(m));
  }
}

TEST_CASE("rank equals rank of transpose") {
  Rng rng(42u);
  for (int t = 0; t < 50; ++t) {
    SparseMap m = random_map(rng, rng.small(1, 15), rng.small(1, 15), 40);
    CHECK(rank(m) == rank(m.transposed()));
  }
}

TEST_CASE("kernel vectors are exact kernel elements of the right count") {
  Rng rng(7u);
  for (int t = 0; t < 60; ++t) {
    int rows = rng.small(1, 10), cols = rng.small(1, 10);
    SparseMap m = random_map(rng, rows, cols, 50);
    auto ker = kernel_basis(m);
    CHECK(static_cast<int>(ker.size()) == cols - rank(m));
    for (const auto& v : ker) {
      for (int i = 0; i < rows; ++i) {
        Qi acc(0);
        for (int j = 0; j < cols; ++j)
          if (!v[j].is_zero()) acc += m.get(i, j) * v[j];
        CHECK(acc.is_zero());
      }
    }
    // independence: rank of kernel matrix equals its count
    if (!ker.empty()) {
      SparseMap km = apply_to_columns(SparseMap::identity(m.src()), ker,
                                      plain(static_cast<int>(ker.size()), "k"));
      CHECK(rank(km) == static_cast<int>(ker.size()));
    }
  }
}

TEST_CASE("cokernel representatives complement the image") {
  Rng rng(99u);
  for (int t = 0; t < 40; ++t) {
    int rows = rng.small(1, 10), cols = rng.small(1, 10);
    SparseMap m = random_map(rng, rows, cols, 40);
    auto reps = cokernel_rep_indices(m);
    CHECK(static_cast<int>(reps.size()) == rows - rank(m));
    // image + span(reps) = full target
    CHECK(image_intersection_dim(m, reps) == 0);
  }
}

TEST_CASE("compose and tensor respect shapes and Koszul signs") {
  auto odd = std::make_shared<GradedSpace>("o");
  odd->add("f", Bidegree{0, 1});
  auto even = std::make_shared<GradedSpace>("e");
  even->add("b", Bidegree{0, 0});

  SparseMap A(odd, even, Bidegree{0, 1});  // odd map f -> b
  A.set(0, 0, Qi(1));
  SparseMap B(odd, even, Bidegree{0, 1});
  B.set(0, 0, Qi(1));

  // (A (x) B)(f (x) f) = (-1)^{|B||f|} Af (x) Bf = -(b (x) b)
  SparseMap AB = SparseMap::tensor(A, B);
  CHECK(AB.get(0, 0) == Qi(-1));

  // braiding on two odd lines is -swap
  SparseMap tau = SparseMap::braiding(odd, odd);
  CHECK(tau.get(0, 0) == Qi(-1));
  // braiding is an involution (tau_{VU} tau_{UV} = id)
  SparseMap tau2 = SparseMap::braiding(odd, odd).compose(tau);
  CHECK(tau2.get(0, 0) == Qi(1));
}

TEST_CASE("graded commutator of odd operators is the anticommutator") {
  auto s = plain(2, "x");
  SparseMap a(s, s, Bidegree{1, 0}, false);
  a.set(1, 0, Qi(1));
  SparseMap b(s, s, Bidegree{1, 0}, false);
  b.set(1, 0, Qi(2));
  SparseMap c = SparseMap::commutator(a, b);
  // both odd (totalized parity 1): [a,b] = ab + ba; here products vanish
  CHECK(c.is_zero());
}

TEST_CASE("wedge-multiplication symbol has the Koszul sequence ranks") {
  // on a 6-dim space, exterior multiplication by a covector xi != 0:
  // rank on Lambda^1 -> Lambda^2 is 5 (kernel is the xi line)
  const int n = 6;
  auto l1 = plain(n, "w");
  auto l2 = plain(n * (n - 1) / 2, "w2");
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  Qi xi[n] = {Qi(1), Qi(2), Qi(3), Qi(-1), Qi(5), Qi(7)};
  SparseMap wedge(l1, l2, Bidegree{0, 0}, false);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
      auto [a, b] = pairs[k];
      if (b == j) wedge.add_to(k, j, xi[a]);
      if (a == j) wedge.add_to(k, j, -xi[b]);
    }
  CHECK(rank(wedge) == 5);
  auto ker = kernel_basis(wedge);
  REQUIRE(ker.size() == 1);
  // kernel spanned by xi itself
  bool proportional = true;
  Qi ratio;
  bool have = false;
  for (int j = 0; j < n; ++j) {
    if (ker[0][j].is_zero() != xi[j].is_zero()) proportional = false;
    if (!xi[j].is_zero()) {
      Qi r = ker[0][j] / xi[j];
      if (!have) {
        ratio = r;
        have = true;
      } else if (!(r == ratio)) {
        proportional = false;
      }
    }
  }
  CHECK(proportional);
}
