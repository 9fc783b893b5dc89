#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "pbv/pairing.hpp"

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
  Qi scalar() {
    return Qi(Rat(small(-4, 4), small(1, 3)), Rat(small(-4, 4), small(1, 3)));
  }
};

// two-component fiber of a scalar field and its conjugate slot
SpacePtr scalar_fiber() {
  auto s = std::make_shared<GradedSpace>("E");
  s->add("phi", Bidegree{0, 0});
  s->add("phi+", Bidegree{1, 0});
  return s;
}

// fiber with no bidegree discipline, for plumbing tests
SpacePtr plain(int n) {
  auto s = std::make_shared<GradedSpace>("P");
  for (int i = 0; i < n; ++i) s->add("p" + std::to_string(i), Bidegree{0, 0});
  return s;
}

BilinearDensity random_density(Rng& rng, int letters, SpacePtr sp, int entries) {
  BilinearDensity b(letters, sp, sp, Bidegree{0, 0}, false);
  for (int t = 0; t < entries; ++t) {
    Mono a = mono_zero(letters), d = mono_zero(letters);
    for (int l = 0; l < letters; ++l) {
      a[l] = rng.small(0, 2);
      d[l] = rng.small(0, 2);
    }
    b.add(a, d, rng.small(0, sp->dim() - 1), rng.small(0, sp->dim() - 1),
          rng.scalar());
  }
  return b;
}

PolySection random_section(Rng& rng, int letters, SpacePtr sp, int deg) {
  PolySection s;
  s.letters = letters;
  s.space = sp;
  for (int t = 0; t < 8; ++t) {
    Mono m = mono_zero(letters);
    int budget = rng.small(0, deg);
    for (int c = 0; c < budget; ++c) m[rng.small(0, letters - 1)]++;
    s.add(m, rng.small(0, sp->dim() - 1), rng.scalar());
  }
  return s;
}

bool same_profiles(const BilinearDensity& a, const BilinearDensity& b) {
  for (int i = 0; i < a.left()->dim(); ++i)
    for (int j = 0; j < a.right()->dim(); ++j) {
      Poly pa = a.plane_wave_profile(i, j);
      Poly pb = b.plane_wave_profile(i, j);
      if (!poly_is_zero(poly_add(pa, poly_scaled(pb, Qi(-1))))) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("polynomial helpers") {
  // d/dx1 (x1^3 x2) = 3 x1^2 x2 on two letters
  Poly p{{{3, 1}, Qi(1)}};
  Poly dp = poly_derive(p, {1, 0});
  CHECK(dp.size() == 1);
  CHECK(dp.at({2, 1}) == Qi(3));
  // second derivative uses falling factorials
  Poly d2 = poly_derive(p, {2, 0});
  CHECK(d2.at({1, 1}) == Qi(6));
  Poly q{{{1, 0}, Qi(1)}, {{0, 1}, Qi(1)}};
  Poly sq = poly_mul(q, q);
  CHECK(sq.at({1, 1}) == Qi(2));
  CHECK(sq.at({2, 0}) == Qi(1));
  CHECK(poly_is_zero(poly_add(sq, poly_scaled(sq, Qi(-1)))));
}

TEST_CASE("normal form integrates by parts exactly") {
  Rng rng(415926);
  auto sp = plain(3);
  int letters = 2;

  // the plane-wave profile is a complete invariant preserved by normal_form
  for (int rep = 0; rep < 25; ++rep) {
    BilinearDensity b = random_density(rng, letters, sp, 12);
    BilinearDensity nf = b.normal_form();
    CHECK(same_profiles(b, nf));
    // all left derivatives are gone, and the map is idempotent
    for (const auto& [k, block] : nf.terms()) CHECK(mono_total(k.first) == 0);
    CHECK((nf.normal_form() - nf).is_zero());
  }

  // a total derivative (Leibniz pair) has vanishing normal form
  for (int rep = 0; rep < 25; ++rep) {
    BilinearDensity c = random_density(rng, letters, sp, 10);
    int l = rng.small(0, letters - 1);
    BilinearDensity td(letters, sp, sp, Bidegree{0, 0}, false);
    for (const auto& [k, block] : c.terms())
      for (const auto& [ij, v] : block) {
        td.add(mono_add(k.first, mono_unit(letters, l)), k.second, ij.first,
               ij.second, v);
        td.add(k.first, mono_add(k.second, mono_unit(letters, l)), ij.first,
               ij.second, v);
      }
    CHECK(td.normal_form().is_zero());
  }

  // single integration by parts: (d1 a) b -> -a (d1 b)
  BilinearDensity one(letters, sp, sp, Bidegree{0, 0}, false);
  one.add(mono_unit(letters, 0), mono_zero(letters), 0, 1, Qi(1));
  BilinearDensity nf = one.normal_form();
  CHECK(nf.terms().size() == 1);
  CHECK(nf.terms().at({mono_zero(letters), mono_unit(letters, 0)}).at({0, 1}) ==
        Qi(-1));
}

TEST_CASE("evaluation and composition against polynomial sections") {
  Rng rng(8979323);
  auto sp = plain(3);
  int letters = 3;
  for (int rep = 0; rep < 10; ++rep) {
    BilinearDensity b = random_density(rng, letters, sp, 10);
    PolySection P = random_section(rng, letters, sp, 3);
    PolySection R = random_section(rng, letters, sp, 3);

    // a first-order random operator
    ConstCoeffOp q(letters, sp, sp, Bidegree{0, 0});
    for (int l = 0; l < letters; ++l) {
      SparseMap m(sp, sp, Bidegree{0, 0}, false);
      for (int t = 0; t < 4; ++t)
        m.add_to(rng.small(0, 2), rng.small(0, 2), rng.scalar());
      q.add_term(mono_unit(letters, l), m);
    }

    Poly lhs = b.compose_left(q).eval(P, R);
    Poly rhs = b.eval(apply_op(q, P), R);
    CHECK(poly_is_zero(poly_add(lhs, poly_scaled(rhs, Qi(-1)))));

    Poly lhs2 = b.compose_right(q, false).eval(P, R);
    Poly rhs2 = b.eval(P, apply_op(q, R));
    CHECK(poly_is_zero(poly_add(lhs2, poly_scaled(rhs2, Qi(-1)))));

    // normal form also evaluates consistently through plane-wave profiles,
    // and the swap is an involution
    CHECK(same_profiles(b.swapped().swapped(), b));
  }
}

TEST_CASE("graded swap sign") {
  // odd x odd block picks up a sign, even x odd does not
  auto sp = std::make_shared<GradedSpace>("S");
  sp->add("even", Bidegree{0, 0});
  sp->add("odd", Bidegree{1, 0});
  sp->add("odd2", Bidegree{0, 1});
  int letters = 1;
  BilinearDensity b(letters, sp, sp, Bidegree{0, 0}, false);
  b.add({0}, {0}, 1, 2, Qi(5));
  b.add({0}, {0}, 0, 1, Qi(7));
  BilinearDensity s = b.swapped();
  CHECK(s.terms().at({Mono{0}, Mono{0}}).at({2, 1}) == Qi(-5));
  CHECK(s.terms().at({Mono{0}, Mono{0}}).at({1, 0}) == Qi(7));
}

TEST_CASE("free scalar field pairing: skewness and invariance") {
  int letters = 2;
  auto E = scalar_fiber();
  BilinearDensity omega(letters, E, E, Bidegree{-1, 0});
  omega.add(mono_zero(letters), mono_zero(letters), 0, 1, Qi(1));
  omega.add(mono_zero(letters), mono_zero(letters), 1, 0, Qi(-1));

  CHECK(is_graded_skew(omega));
  CHECK(!pairing_symmetry_holds(omega, 1));

  // Q = Laplacian from the field slot to the conjugate slot
  ConstCoeffOp q(letters, E, E, Bidegree{1, 0});
  for (int l = 0; l < letters; ++l) {
    SparseMap m(E, E, Bidegree{1, 0});
    m.set(1, 0, Qi(1));
    Mono d = mono_zero(letters);
    d[l] = 2;
    q.add_term(d, m);
  }
  CHECK(ConstCoeffOp::commutator(q, q).is_zero());
  CHECK(is_q_compatible(omega, q));
  CHECK(!pairing_invariance_holds(omega, q, -1));
  CHECK(omega.weight_balanced(real_chart(2)));

  // currying the pairing gives the order-zero hook with the right matrix
  auto dual = std::make_shared<GradedSpace>("E!");
  dual->add("phi!", Bidegree{1, 0});
  dual->add("phi+!", Bidegree{0, 0});
  ConstCoeffOp hook = omega.as_operator(dual, Bidegree{0, 0});
  CHECK(hook.max_order() == 0);
  CHECK(hook.terms().at(mono_zero(letters)).get(1, 0) == Qi(1));
  CHECK(hook.terms().at(mono_zero(letters)).get(0, 1) == Qi(-1));
}

TEST_CASE("chiral boson pairing on the complex line") {
  Chart ch = complex_chart(1);
  Exterior ext(ch);
  int letters = ch.letters();

  FormBundle bundle(ch, "boson");
  BundleSummand s0;
  s0.tag = "w0";
  s0.piece = piece_dolbeault(ext, 0, 0, "w0");
  s0.value = trivial_space("one");
  bundle.add_summand(s0);
  BundleSummand s1;
  s1.tag = "w1";
  s1.piece = piece_dolbeault(ext, 0, 1, "w1");
  s1.value = trivial_space("one");
  bundle.add_summand(s1);

  // omega(a, b) = integral of (del a) ^ b; only the cross blocks survive,
  // with the derivative of the left argument along z.
  BilinearDensity omega(letters, bundle.fiber(), bundle.fiber(),
                        Bidegree{-1, 0});
  Qi top = Qi(0) - Qi(0, 2);  // dz ^ dzb = -2i vol
  // left = w0 (function f): del f ^ g dzb = (dz f) g dz^dzb
  omega.add(mono_unit(letters, 0), mono_zero(letters), 0, 1, top);
  // left = w1 (g dzb): del(g dzb) ^ f = (dz g) f dz^dzb ^ ... = (dz g) f top
  omega.add(mono_unit(letters, 0), mono_zero(letters), 1, 0, top);

  CHECK(is_graded_skew(omega));
  CHECK(!pairing_symmetry_holds(omega, 1));
  CHECK(omega.weight_balanced(ch));

  // Q = delbar is compatible with omega
  ConstCoeffOp q(letters, bundle.fiber(), bundle.fiber(), Bidegree{1, 0});
  {
    SparseMap m(bundle.fiber(), bundle.fiber(), Bidegree{1, 0});
    m.set(1, 0, Qi(1));
    q.add_term(mono_unit(letters, 1), m);
  }
  CHECK(is_q_compatible(omega, q));
}

TEST_CASE("wedge pairing through bundle summands") {
  Chart ch = complex_chart(1);
  Exterior ext(ch);
  FormBundle bundle(ch, "toy");
  BundleSummand b0;
  b0.tag = "b";
  b0.piece = piece_dolbeault(ext, 0, 0, "b");
  b0.value = trivial_space("one");
  bundle.add_summand(b0);
  BundleSummand c0;
  c0.tag = "c";
  c0.piece = piece_dolbeault(ext, 1, 1, "c");
  c0.value = trivial_space("one");
  c0.deg_offset = -1;
  bundle.add_summand(c0);

  auto h = [](int, int) { return Qi(1); };
  BilinearDensity bc = pairing_wedge(bundle, "b", "c", h, Qi(1), Bidegree{-1, 0});
  BilinearDensity cb = pairing_wedge(bundle, "c", "b", h, Qi(1), Bidegree{-1, 0});

  Mono z = mono_zero(ch.letters());
  CHECK(bc.terms().at({z, z}).at({0, 1}) == Qi(0, -2));
  CHECK(cb.terms().at({z, z}).at({1, 0}) == Qi(0, -2));

  // 1 ^ (dz^dzb) = (dz^dzb) ^ 1: the symmetrized total is graded symmetric
  BilinearDensity total = bc + cb;
  CHECK(pairing_symmetry_holds(total, 1));

  // blocks of non-complementary degree vanish
  BilinearDensity bb = pairing_wedge(bundle, "b", "b", h, Qi(1), Bidegree{0, 0});
  CHECK(bb.is_zero());
}

TEST_CASE("second-order wave operator pairing is symmetric") {
  // B(a, b) = integral h(a, d*d b) on one-forms over R^3, via star wedges
  Chart ch = real_chart(3);
  Exterior ext(ch);
  int letters = ch.letters();

  FormBundle bundle(ch, "p1");
  BundleSummand s1;
  s1.tag = "a";
  s1.piece = piece_full(ext, 1, "a");
  s1.value = trivial_space("one");
  bundle.add_summand(s1);
  BundleSummand s2;
  s2.tag = "sa";
  s2.piece = piece_full(ext, 2, "sa");
  s2.value = trivial_space("one");
  bundle.add_summand(s2);

  auto h = [](int, int) { return Qi(1); };
  BilinearDensity w =
      pairing_wedge(bundle, "a", "sa", h, Qi(1), Bidegree{-3, 0});

  // route a |-> d star d a into the 2-form slot of the bundle
  ConstCoeffOp lift(letters, bundle.fiber(), bundle.fiber(), Bidegree{1, 0});
  {
    ConstCoeffOp first = op_d(ext, 1, LetterSet::All);       // 1 -> 2
    ConstCoeffOp mid = op_fiber(ext, ext.star(2));           // 2 -> 1
    ConstCoeffOp full = first.compose(mid).compose(first);   // d star d
    for (const auto& [m, mat] : full.terms()) {
      SparseMap blk(bundle.fiber(), bundle.fiber(), Bidegree{1, 0}, false);
      for (int j = 0; j < 3; ++j)
        for (const auto& [r, v] : mat.col(j))
          blk.add_to(bundle.offset(1) + r, bundle.offset(0) + j, v);
      lift.add_term(m, blk);
    }
  }

  // the values are symmetric (two integrations by parts and a ^ *b = b ^ *a)
  // while both slots are totalized odd, so the pairing is graded skew
  BilinearDensity action = w.compose_right(lift, false);
  CHECK(!action.is_zero());
  CHECK(is_graded_skew(action));
  CHECK(!pairing_symmetry_holds(action, 1));
}
