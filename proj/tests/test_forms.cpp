#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <fmt/core.h>

#include "pbv/forms.hpp"
#include "pbv/operators.hpp"

using namespace pbv;

TEST_CASE("exterior fiber dimensions") {
  Exterior e6(real_chart(6));
  CHECK(e6.lambda(0)->dim() == 1);
  CHECK(e6.lambda(1)->dim() == 6);
  CHECK(e6.lambda(3)->dim() == 20);
  CHECK(e6.lambda(6)->dim() == 1);
  Exterior c3(complex_chart(3));
  CHECK(c3.lambda(2)->dim() == 15);
  FiberPiece d11 = piece_dolbeault(c3, 1, 1, "w");
  CHECK(d11.space->dim() == 9);
}

TEST_CASE("hodge star squares with the right sign") {
  // on R^6: star star = (-1)^{k(6-k)} on Lambda^k
  Exterior e(real_chart(6));
  for (int k = 0; k <= 6; ++k) {
    SparseMap ss = e.star(6 - k).compose(e.star(k));
    int expect = (k * (6 - k)) % 2 ? -1 : 1;
    SparseMap want = SparseMap::identity(e.lambda(k)).scaled(Qi(expect));
    CHECK((ss - want.with_spaces(ss.src(), ss.tgt(), ss.bidegree())).is_zero());
  }
  CHECK(e.star(0).get(0, 0) == Qi(1));  // star 1 = vol
}

TEST_CASE("complexification transport is involutive and matches conventions") {
  Exterior c(complex_chart(3));
  for (int k : {0, 1, 2, 3}) {
    SparseMap round = c.from_real(k).compose(c.to_real(k));
    SparseMap id = SparseMap::identity(c.lambda(k));
    CHECK((round - id.with_spaces(round.src(), round.tgt(), round.bidegree()))
              .is_zero());
  }
  // dx1 ^ dx2 = (i/2) dz1 ^ dzb1
  Exterior r(real_chart(6));
  SparseMap fr = c.from_real(2);
  int dx12 = r.mono_index(2, {0, 1});
  int dz1zb1 = c.mono_index(2, {0, 3});
  CHECK(fr.get(dz1zb1, dx12) == Qi(Rat(0), Rat(1, 2)));
  // vol coefficient: dz1^dz2^dz3^dzb1^dzb2^dzb3 = -8i vol
  // (odd shuffle to (dz1^dzb1)(dz2^dzb2)(dz3^dzb3) = (-2i)^3 vol)
  CHECK(c.top_coefficient().get(0, 0) == Qi(Rat(0), Rat(-8)));
}

TEST_CASE("kaehler wedge matches its real-model form and adjoint identities") {
  Exterior c(complex_chart(3));
  Exterior r(real_chart(6));
  // transported Lefschetz equals the real Lefschetz
  SparseMap lc = c.to_real(2).compose(c.lefschetz(0)).compose(c.from_real(0));
  SparseMap lr = r.lefschetz(0);
  CHECK((lc.with_spaces(lr.src(), lr.tgt(), lr.bidegree()) - lr).is_zero());
  // commutator [dual_lefschetz, lefschetz] = (n - k) on Lambda^k (n = 3)
  for (int k = 0; k <= 3; ++k) {
    SparseMap a = c.dual_lefschetz(k + 2).compose(c.lefschetz(k));
    SparseMap b = k >= 2 ? c.lefschetz(k - 2).compose(c.dual_lefschetz(k))
                         : SparseMap::zero(c.lambda(k), c.lambda(k), Bidegree{0, 0});
    SparseMap want = SparseMap::identity(c.lambda(k)).scaled(Qi(3 - k));
    SparseMap got = a.with_spaces(c.lambda(k), c.lambda(k), Bidegree{0, 0}) -
                    b.with_spaces(c.lambda(k), c.lambda(k), Bidegree{0, 0});
    CHECK((got - want).is_zero());
  }
}

TEST_CASE("selfdual three-form eigenspaces on flat six-space") {
  Exterior e(real_chart(6));
  FiberPiece plus = piece_selfdual(e, +1, "sd+");
  FiberPiece minus = piece_selfdual(e, -1, "sd-");
  CHECK(plus.space->dim() == 10);
  CHECK(minus.space->dim() == 10);
  // star restricted to the plus piece acts by +i
  SparseMap st = e.star(3).with_spaces(e.lambda(3), e.lambda(3), Bidegree{0, 0});
  SparseMap on_plus = plus.projection.compose(st).compose(plus.section);
  SparseMap want = SparseMap::identity(plus.space).scaled(Qi::i());
  CHECK((on_plus - want.with_spaces(plus.space, plus.space, Bidegree{0, 0}))
            .is_zero());
  // projection kills the minus piece
  CHECK(plus.projection.compose(minus.section).is_zero());
  // projection o section = id
  SparseMap ps = plus.projection.compose(plus.section);
  CHECK((ps - SparseMap::identity(plus.space)
                  .with_spaces(plus.space, plus.space, Bidegree{0, 0}))
            .is_zero());
}

TEST_CASE("primitive/omega split of middle Dolbeault fibers") {
  Exterior c(complex_chart(3));
  FiberPiece perp21 = piece_primitive_perp(c, 2, 1, "p21");
  FiberPiece om21 = piece_omega_image(c, 2, 1, "o21");
  CHECK(perp21.space->dim() == 6);
  CHECK(om21.space->dim() == 3);
  // mutual annihilation of projections
  CHECK(perp21.projection.compose(om21.section).is_zero());
  CHECK(om21.projection.compose(perp21.section).is_zero());
  FiberPiece perp11 = piece_primitive_perp(c, 1, 1, "p11");
  FiberPiece om11 = piece_omega_image(c, 1, 1, "o11");
  CHECK(perp11.space->dim() == 8);
  CHECK(om11.space->dim() == 1);
}

TEST_CASE("exterior derivative squares to zero and splits by letter type") {
  Exterior c(complex_chart(3));
  for (int k = 0; k < 5; ++k) {
    ConstCoeffOp d1 = op_d(c, k, LetterSet::All);
    ConstCoeffOp d2 = op_d(c, k + 1, LetterSet::All);
    CHECK(d2.compose(d1).is_zero());
    ConstCoeffOp del = op_d(c, k, LetterSet::Holo);
    ConstCoeffOp delb = op_d(c, k, LetterSet::Anti);
    CHECK((d1 - del - delb).is_zero());
    ConstCoeffOp delb2 = op_d(c, k + 1, LetterSet::Anti);
    CHECK(delb2.compose(delb).is_zero());
  }
}

TEST_CASE("operators act on polynomial sections correctly") {
  Exterior r(real_chart(2));
  ConstCoeffOp d = op_d(r, 0, LetterSet::All);
  // f = x1^2 x2 -> df = 2 x1 x2 dx1 + x1^2 dx2
  PolySection f;
  f.letters = 2;
  f.space = r.lambda(0);
  f.add({2, 1}, 0, Qi(1));
  PolySection df = apply_op(d, f);
  PolySection want;
  want.letters = 2;
  want.space = r.lambda(1);
  want.add({1, 1}, 0, Qi(2));  // dx1 component
  want.add({2, 0}, 1, Qi(1));  // dx2 component
  CHECK((df - want).is_zero());
}

TEST_CASE("bundle assembly respects offsets degrees and routes") {
  Exterior e(real_chart(6));
  FormBundle b(real_chart(6), "sd2");
  auto val = trivial_space("1");
  for (int k = 0; k <= 2; ++k)
    b.add_summand(BundleSummand{fmt::format("om{}", k), piece_full(e, k, "f"),
                                val, -2, 0, weight_zero()});
  b.add_summand(BundleSummand{"om3p", piece_selfdual(e, +1, "sd"), val, -2, 0,
                              weight_zero()});
  CHECK(b.fiber()->dim() == 1 + 6 + 15 + 10);
  // degrees: -2 .. +1
  auto dims = b.fiber()->dim_by_degree();
  CHECK(dims.at(-2) == 1);
  CHECK(dims.at(-1) == 6);
  CHECK(dims.at(0) == 15);
  CHECK(dims.at(1) == 10);

  // assemble d with the selfdual projection at the top
  std::vector<OpRoute> routes;
  routes.push_back(route(b, "om0", b, "om1", op_d(e, 0, LetterSet::All)));
  routes.push_back(route(b, "om1", b, "om2", op_d(e, 1, LetterSet::All)));
  routes.push_back(route(b, "om2", b, "om3p", op_d(e, 2, LetterSet::All)));
  ConstCoeffOp q = assemble_op(b, b, Bidegree{1, 0}, routes);
  CHECK(q.compose(q).is_zero());  // d_+ d = projection of d d = 0
}
