#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>

#include "pbv/spinors.hpp"

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
  Qi rat() {
    int num = static_cast<int>(next() % 11) - 5;
    int den = 1 + static_cast<int>(next() % 3);
    return Qi(Rat(num, den));
  }
  DenseVec vec(int n) {
    DenseVec v(n);
    for (int i = 0; i < n; ++i) v[i] = rat();
    return v;
  }
};

DenseVec act(const SparseMap& m, const DenseVec& v) {
  DenseVec out(m.tgt()->dim(), Qi(0));
  for (int j = 0; j < m.src()->dim(); ++j) {
    if (v[j].is_zero()) continue;
    for (const auto& [i, c] : m.col(j)) out[i] = out[i] + c * v[j];
  }
  return out;
}

DenseVec tensor_vec(const DenseVec& a, const DenseVec& b) {
  DenseVec out(a.size() * b.size(), Qi(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

bool is_zero_vec(const DenseVec& v) {
  for (const Qi& c : v)
    if (!c.is_zero()) return false;
  return true;
}

Qi g_of(const SpinorModel& m, const DenseVec& a, const DenseVec& b) {
  return act(m.g_V, tensor_vec(a, b))[0];
}

// random traceless endomorphism of S+
SparseMap random_sl4(const SpinorModel& m, Rng& rng) {
  std::array<std::array<Qi, 4>, 4> e;
  Qi tr(0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      e[i][j] = rng.rat();
      if (i == j) tr = tr + e[i][j];
    }
  SparseMap out(m.S_plus, m.S_plus, Bidegree{0, 0}, false);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Qi v = e[i][j];
      if (i == j) v = v - tr * Qi(Rat(1, 4));
      if (!v.is_zero()) out.set(i, j, v);
    }
  return out;
}

}  // namespace

TEST_CASE("model shapes and perfect pairings") {
  const SpinorModel& m = spinor_model();
  CHECK(m.S_plus->dim() == 4);
  CHECK(m.S_minus->dim() == 4);
  CHECK(m.V->dim() == 6);
  CHECK(m.L2V->dim() == 15);
  CHECK(m.L3V->dim() == 20);
  CHECK(m.W->dim() == 5);
  CHECK(m.R2->dim() == 4);

  // pairing S+ (x) S- is perfect: as a matrix it is a permutation
  SparseMap p(m.S_plus, m.S_minus, Bidegree{0, 0}, false);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Qi v = m.pair_SS.get(0, i * 4 + j);
      if (!v.is_zero()) p.set(j, i, v);
    }
  CHECK(rank(p) == 4);

  // the metric on bivectors is symmetric of full rank
  SparseMap gm(m.V, m.V, Bidegree{0, 0}, false);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      Qi v = m.g_V.get(0, a * 6 + b);
      CHECK(v == m.g_V.get(0, b * 6 + a));
      if (!v.is_zero()) gm.set(a, b, v);
    }
  CHECK(rank(gm) == 6);

  // the symplectic forms and h are nondegenerate
  SparseMap om(m.R2, m.R2, Bidegree{0, 0}, false);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Qi v = m.omega_R2.get(0, a * 4 + b);
      CHECK(v == -m.omega_R2.get(0, b * 4 + a));
      if (!v.is_zero()) om.set(a, b, v);
    }
  CHECK(rank(om) == 4);
  SparseMap hm(m.W, m.W, Bidegree{0, 0}, false);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      Qi v = m.h_W.get(0, a * 5 + b);
      CHECK(v == m.h_W.get(0, b * 5 + a));
      if (!v.is_zero()) hm.set(a, b, v);
    }
  CHECK(rank(hm) == 5);
}

TEST_CASE("Clifford multiplication") {
  const SpinorModel& m = spinor_model();

  // basis example: (e1^e2) . e3 lands on the fourth dual vector
  DenseVec v12(6, Qi(0));
  v12[0] = Qi(1);
  DenseVec e3(4, Qi(0));
  e3[2] = Qi(1);
  DenseVec r = act(m.c_plus, tensor_vec(v12, e3));
  CHECK(r[3] == Qi(1));
  CHECK(r[0].is_zero());
  CHECK(r[1].is_zero());
  CHECK(r[2].is_zero());

  // Clifford relation, both chiralities, 20 random pairs
  Rng rng(20260814u);
  for (int t = 0; t < 20; ++t) {
    DenseVec v = rng.vec(6);
    Qi gvv = g_of(m, v, v);
    DenseVec s = rng.vec(4);
    DenseVec cs = act(m.c_plus, tensor_vec(v, s));
    DenseVec ccs = act(m.c_minus, tensor_vec(v, cs));
    for (int k = 0; k < 4; ++k) CHECK(ccs[k] == gvv * s[k]);
    DenseVec f = rng.vec(4);
    DenseVec cf = act(m.c_minus, tensor_vec(v, f));
    DenseVec ccf = act(m.c_plus, tensor_vec(v, cf));
    for (int k = 0; k < 4; ++k) CHECK(ccf[k] == gvv * f[k]);
  }
}

TEST_CASE("coordinate dictionary is an isometry") {
  const SpinorModel& m = spinor_model();

  auto vr = v_of_letters(real_chart(6));
  for (int l = 0; l < 6; ++l)
    for (int k = 0; k < 6; ++k)
      CHECK(g_of(m, vr[l], vr[k]) == (l == k ? Qi(1) : Qi(0)));

  Chart cx = complex_chart(3);
  auto vc = v_of_letters(cx);
  for (int l = 0; l < 6; ++l)
    for (int k = 0; k < 6; ++k) {
      Qi want(0);
      if (cx.kind(l) != cx.kind(k) && cx.pair_of(l) == cx.pair_of(k))
        want = Qi(Rat(1, 2));
      CHECK(g_of(m, vc[l], vc[k]) == want);
    }

  // every structure map is weight-preserving
  for (const SparseMap* sm :
       {&m.pair_SS, &m.g_V, &m.c_plus, &m.c_minus, &m.gamma3, &m.spin_rep2,
        &m.bispinor2, &m.omega_R1, &m.omega_R2, &m.h_W, &m.incl_W, &m.proj_W2,
        &m.c_five, &m.bracket1, &m.bracket2, &m.star_map, &m.proj_c, &m.incl_c,
        &m.proj_w, &m.incl_w, &m.proj_2form, &m.incl_2form, &m.incl_R1,
        &m.incl_R1p})
    CHECK(weight_zero_entries(*sm));
}

TEST_CASE("supercharge pairings") {
  const SpinorModel& m = spinor_model();
  Rng rng(271828u);

  // rank-one supercharges square to zero and have vanishing star
  for (int t = 0; t < 5; ++t) {
    DenseVec q = tensor_vec(rng.vec(4), rng.vec(4));
    CHECK(is_zero_vec(act(m.bracket2, tensor_vec(q, q))));
    CHECK(is_zero_vec(act(m.star_map, tensor_vec(q, q))));
  }

  // orthogonal R-lines: bracket vanishes, star does not
  DenseVec e1(4, Qi(0)), e2(4, Qi(0)), r1(4, Qi(0)), r1p(4, Qi(0));
  e1[0] = Qi(1);
  e2[1] = Qi(1);
  r1[0] = Qi(1);
  r1p[2] = Qi(1);
  DenseVec q1 = tensor_vec(e1, r1), q2 = tensor_vec(e2, r1p);
  CHECK(is_zero_vec(act(m.bracket2, tensor_vec(q1, q2))));
  DenseVec st = act(m.star_map, tensor_vec(q1, q2));
  CHECK(!is_zero_vec(st));
  // the star lands on v12 (x) u1
  CHECK(st[0 * 5 + 0] == Qi(1));

  // bilinearity and symmetry of both pairings on random pairs
  for (int t = 0; t < 20; ++t) {
    DenseVec a = rng.vec(16), b = rng.vec(16);
    DenseVec br_ab = act(m.bracket2, tensor_vec(a, b));
    DenseVec br_ba = act(m.bracket2, tensor_vec(b, a));
    for (int k = 0; k < 6; ++k) CHECK(br_ab[k] == br_ba[k]);
    DenseVec st_ab = act(m.star_map, tensor_vec(a, b));
    DenseVec st_ba = act(m.star_map, tensor_vec(b, a));
    for (int k = 0; k < 30; ++k) CHECK(st_ab[k] == st_ba[k]);
  }

  // nullhomotopy surrogate: [e1 (x) r1, xi' (x) r2] spans e1 ^ xi'
  DenseVec r2v(4, Qi(0));
  r2v[1] = Qi(1);
  DenseVec q = tensor_vec(e1, r1);
  for (int i = 0; i < 4; ++i) {
    DenseVec xi(4, Qi(0));
    xi[i] = Qi(1);
    DenseVec br = act(m.bracket2, tensor_vec(q, tensor_vec(xi, r2v)));
    if (i == 0) {
      CHECK(is_zero_vec(br));
    } else {
      for (int k = 0; k < 6; ++k)
        CHECK(br[k] == (k == i - 1 ? Qi(1) : Qi(0)));  // v(1,1+i) slots first
    }
  }
}

TEST_CASE("decomposition of the mixed-chirality square") {
  const SpinorModel& m = spinor_model();

  CHECK(rank(m.incl_c) == 1);
  CHECK(rank(m.incl_2form) == 15);
  CHECK(rank(m.incl_w) == 5);

  // round trips are exactly the identity
  CHECK(m.proj_c.compose(m.incl_c).get(0, 0) == Qi(1));
  SparseMap r2f = m.proj_2form.compose(m.incl_2form);
  SparseMap rw = m.proj_w.compose(m.incl_w);
  for (int j = 0; j < 15; ++j)
    for (int i = 0; i < 15; ++i)
      CHECK(r2f.get(i, j) == (i == j ? Qi(1) : Qi(0)));
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) CHECK(rw.get(i, j) == (i == j ? Qi(1) : Qi(0)));

  // cross terms vanish
  CHECK(m.proj_c.compose(m.incl_2form).is_zero());
  CHECK(m.proj_c.compose(m.incl_w).is_zero());
  CHECK(m.proj_2form.compose(m.incl_c).is_zero());
  CHECK(m.proj_2form.compose(m.incl_w).is_zero());
  CHECK(m.proj_w.compose(m.incl_c).is_zero());
  CHECK(m.proj_w.compose(m.incl_2form).is_zero());

  // the invariant element is purely scalar
  DenseVec inv(m.DD->dim(), Qi(0));
  for (const auto& [i, c] : m.incl_c.col(0)) inv[i] = c;
  CHECK(act(m.proj_c, inv)[0] == Qi(1));
  CHECK(is_zero_vec(act(m.proj_2form, inv)));
  CHECK(is_zero_vec(act(m.proj_w, inv)));

  // a random element decomposes: the remainder is invisible to all three
  Rng rng(31415u);
  DenseVec t = rng.vec(256);
  DenseVec rem = t;
  for (const auto& [pr, in] :
       {std::pair<const SparseMap*, const SparseMap*>{&m.proj_c, &m.incl_c},
        {&m.proj_2form, &m.incl_2form},
        {&m.proj_w, &m.incl_w}}) {
    DenseVec part = act(*in, act(*pr, t));
    for (int k = 0; k < 256; ++k) rem[k] = rem[k] - part[k];
  }
  CHECK(is_zero_vec(act(m.proj_c, rem)));
  CHECK(is_zero_vec(act(m.proj_2form, rem)));
  CHECK(is_zero_vec(act(m.proj_w, rem)));

  // the bivector spin action is traceless and induces the metric derivation
  Qi lambda(0);
  for (int b = 0; b < 15; ++b) {
    SparseMap e(m.S_plus, m.S_plus, Bidegree{0, 0}, false);
    Qi tr(0);
    for (int j = 0; j < 4; ++j)
      for (const auto& [i, c] : m.spin_rep2.col(b * 4 + j)) {
        e.set(i, j, c);
        if (i == j) tr = tr + c;
      }
    CHECK(tr.is_zero());
    SparseMap dv = wedge_derivation(m.V, m.S_plus, m.V_subsets, e);
    // metric action of the bivector v_X ^ v_Y
    int X = m.L2V_subsets[b][0], Y = m.L2V_subsets[b][1];
    SparseMap a(m.V, m.V, Bidegree{0, 0}, false);
    for (int k = 0; k < 6; ++k) {
      DenseVec vk(6, Qi(0)), vx(6, Qi(0)), vy(6, Qi(0));
      vk[k] = Qi(1);
      vx[X] = Qi(1);
      vy[Y] = Qi(1);
      Qi gy = g_of(m, vy, vk), gx = g_of(m, vx, vk);
      if (!gy.is_zero()) a.add_to(X, k, gy);
      if (!gx.is_zero()) a.add_to(Y, k, -gx);
    }
    for (int j = 0; j < 6; ++j)
      for (int i = 0; i < 6; ++i) {
        Qi lhs = dv.get(i, j), rhs = a.get(i, j);
        if (lambda.is_zero() && !rhs.is_zero() && !lhs.is_zero())
          lambda = lhs / rhs;
        CHECK(lhs == lambda * rhs);
      }
  }
  CHECK(lambda == Qi(1));
}

TEST_CASE("duality on 3-vectors and the odd projection") {
  const SpinorModel& m = spinor_model();

  // squares to -1, eigenspaces have dimension ten
  SparseMap sq = m.star3.compose(m.star3);
  for (int j = 0; j < 20; ++j)
    for (int i = 0; i < 20; ++i)
      CHECK(sq.get(i, j) == (i == j ? Qi(-1) : Qi(0)));
  CHECK(m.sd_basis.size() == 10);
  CHECK(m.asd_basis.size() == 10);

  // the metric real structure (antilinear, v(1,1+a) <-> complementary
  // bivector) exchanges the eigenspaces
  static const int tau[6] = {5, 4, 3, 2, 1, 0};
  const Qi sig_coef[6] = {Qi(Rat(1, 2)), Qi(Rat(-1, 2)), Qi(Rat(1, 2)),
                          Qi(2),         Qi(-2),         Qi(2)};
  auto sigma3 = [&](const DenseVec& v) {
    DenseVec out(20, Qi(0));
    for (int idx = 0; idx < 20; ++idx) {
      if (v[idx].is_zero()) continue;
      const auto& sub = m.L3V_subsets[idx];
      std::vector<int> img = {tau[sub[0]], tau[sub[1]], tau[sub[2]]};
      Qi coef = sig_coef[sub[0]] * sig_coef[sub[1]] * sig_coef[sub[2]];
      int sg = 1;
      std::vector<int> srt = img;
      for (size_t a = 0; a < srt.size(); ++a)
        for (size_t b = a + 1; b < srt.size(); ++b)
          if (srt[a] > srt[b]) {
            std::swap(srt[a], srt[b]);
            sg = -sg;
          }
      int tgt = -1;
      for (int t2 = 0; t2 < 20; ++t2)
        if (m.L3V_subsets[t2] == srt) tgt = t2;
      out[tgt] = out[tgt] + v[idx].conj() * (sg > 0 ? coef : -coef);
    }
    return out;
  };
  for (const DenseVec& b : m.sd_basis) {
    DenseVec cb = sigma3(b);
    CHECK(!is_zero_vec(cb));
    DenseVec scb = act(m.star3, cb);
    for (int k = 0; k < 20; ++k) CHECK(scb[k] == Qi(Rat(0), Rat(-1)) * cb[k]);
  }

  // gamma vanishes on the +i eigenspace and is onto from the -i one
  DenseVec e(4, Qi(0));
  for (const DenseVec& b : m.sd_basis)
    for (int k = 0; k < 4; ++k) {
      e.assign(4, Qi(0));
      e[k] = Qi(1);
      DenseVec t = tensor_vec(b, e);
      CHECK(is_zero_vec(act(m.gamma3, t)));
    }
  auto asd_sp = std::make_shared<GradedSpace>("asd*S+");
  for (int c = 0; c < 40; ++c)
    asd_sp->add("c" + std::to_string(c), Bidegree{0, 0});
  SparseMap onto(asd_sp, m.S_minus, Bidegree{0, 0}, false);
  for (int b = 0; b < 10; ++b)
    for (int k = 0; k < 4; ++k) {
      e.assign(4, Qi(0));
      e[k] = Qi(1);
      DenseVec img = act(m.gamma3, tensor_vec(m.asd_basis[b], e));
      for (int i = 0; i < 4; ++i)
        if (!img[i].is_zero()) onto.set(i, b * 4 + k, img[i]);
    }
  CHECK(rank(onto) == 4);  // kernel of the 40-dimensional source is 36

  // asd_project: linear, and rejects self-dual input
  Rng rng(16180u);
  DenseVec q = rng.vec(4);
  DenseVec a(20, Qi(0));
  for (int k = 0; k < 10; ++k)
    for (int j = 0; j < 20; ++j)
      a[j] = a[j] + m.asd_basis[k][j] * Qi(k + 1);
  DenseVec pa = asd_project(m, q, a);
  DenseVec q2(4);
  for (int k = 0; k < 4; ++k) q2[k] = q[k] * Qi(7);
  DenseVec pa2 = asd_project(m, q2, a);
  for (int k = 0; k < 4; ++k) CHECK(pa2[k] == Qi(7) * pa[k]);
  CHECK_THROWS(asd_project(m, q, m.sd_basis[0]));

  // equivariance under ten random traceless endomorphisms
  for (int t = 0; t < 10; ++t) {
    SparseMap E = random_sl4(m, rng);
    SparseMap EV = wedge_derivation(m.V, m.S_plus, m.V_subsets, E);
    SparseMap EL3 = wedge_derivation(m.L3V, m.V, m.L3V_subsets, EV);
    SparseMap lhs = m.gamma3.compose(
        SparseMap::tensor(EL3, SparseMap::identity(m.S_plus)) +
        SparseMap::tensor(SparseMap::identity(m.L3V), E));
    SparseMap rhs = dual_action(m.S_minus, E).compose(m.gamma3);
    CHECK((lhs - rhs).is_zero());
  }

  // the induced symmetric pairing identifies -i 3-vectors with symmetric
  // squares: each gamma matrix is symmetric and the 10x10 block is perfect
  for (int a3 = 0; a3 < 20; ++a3) {
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < k; ++l) {
        Qi mkl = m.gamma3.get(l, a3 * 4 + k);
        Qi mlk = m.gamma3.get(k, a3 * 4 + l);
        CHECK(mkl == mlk);
      }
  }
  auto sym_sp = std::make_shared<GradedSpace>("sym");
  for (int c = 0; c < 10; ++c) sym_sp->add("s" + std::to_string(c), {0, 0});
  auto asd10 = std::make_shared<GradedSpace>("asd");
  for (int c = 0; c < 10; ++c) asd10->add("a" + std::to_string(c), {0, 0});
  SparseMap perfect(asd10, sym_sp, Bidegree{0, 0}, false);
  for (int b = 0; b < 10; ++b) {
    int col = 0;
    for (int k = 0; k < 4; ++k)
      for (int l = k; l < 4; ++l) {
        e.assign(4, Qi(0));
        e[k] = Qi(1);
        Qi val = act(m.gamma3, tensor_vec(m.asd_basis[b], e))[l];
        if (!val.is_zero()) perfect.set(col, b, val);
        ++col;
      }
  }
  CHECK(rank(perfect) == 10);
}

TEST_CASE("rank-two symplectic structure") {
  const SpinorModel& m = spinor_model();

  // wedge square of R2 splits off the invariant line
  CHECK(m.proj_W2.compose(m.incl_W).is_zero() == false);
  SparseMap r = m.proj_W2.compose(m.incl_W);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) CHECK(r.get(i, j) == (i == j ? Qi(1) : Qi(0)));
  CHECK(is_zero_vec(act(m.proj_W2, m.omega_inv)));

  // five-dimensional Clifford relation with the recorded constant
  Rng rng(14142u);
  Qi c5sq = m.conventions.at("c_five_square");
  CHECK(c5sq == Qi(Rat(1, 2)));
  for (int t = 0; t < 20; ++t) {
    DenseVec w = rng.vec(5), rv = rng.vec(4);
    DenseVec hw = act(m.h_W, tensor_vec(w, w));
    DenseVec once = act(m.c_five, tensor_vec(w, rv));
    DenseVec twice = act(m.c_five, tensor_vec(w, once));
    for (int k = 0; k < 4; ++k) CHECK(twice[k] == c5sq * hw[0] * rv[k]);
  }

  // the two planes are symplectic complements
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      DenseVec x(4, Qi(0)), y(4, Qi(0));
      for (const auto& [i, c] : m.incl_R1.col(a)) x[i] = c;
      for (const auto& [i, c] : m.incl_R1p.col(b)) y[i] = c;
      CHECK(act(m.omega_R2, tensor_vec(x, y))[0].is_zero());
    }
}

TEST_CASE("branch tables") {
  const SpinorModel& m = spinor_model();

  auto bs = branch(*m.S_plus, branch_mu3());
  CHECK(bs.at({3}).size() == 1);
  CHECK(bs.at({-1}).size() == 3);
  CHECK(bs.size() == 2);

  auto b1 = branch(*m.Sigma1, branch_twist10());
  CHECK(b1.at({2, 0}).size() == 1);    // the scalar supercharge
  CHECK(b1.at({2, -4}).size() == 3);
  CHECK(b1.at({-2, 2}).size() == 3);
  CHECK(b1.at({-2, 6}).size() == 1);
  CHECK(b1.size() == 4);

  auto b2 = branch(*m.Sigma2, branch_twist20());
  CHECK(b2.at({2, 0, 0}).size() == 1);
  CHECK(b2.at({2, -4, 0}).size() == 3);
  CHECK(b2.at({-2, 2, 0}).size() == 3);
  CHECK(b2.at({-2, 6, 0}).size() == 1);
  CHECK(b2.at({0, 3, 2}).size() == 1);
  CHECK(b2.at({0, 3, -2}).size() == 1);
  CHECK(b2.at({0, -1, 2}).size() == 3);
  CHECK(b2.at({0, -1, -2}).size() == 3);
  CHECK(b2.size() == 8);

  auto br = branch(*m.R2, branch_twist20());
  CHECK(br.at({2, -3, 0}).size() == 1);   // half-determinant inverse
  CHECK(br.at({-2, 3, 0}).size() == 1);   // half-determinant
  CHECK(br.at({0, 0, 2}).size() == 1);    // polarised residual plane
  CHECK(br.at({0, 0, -2}).size() == 1);
  auto bw = branch(*m.W, branch_twist20());
  CHECK(bw.at({0, 0, 0}).size() == 1);
  CHECK(bw.at({2, -3, 2}).size() == 1);
  CHECK(bw.at({2, -3, -2}).size() == 1);
  CHECK(bw.at({-2, 3, 2}).size() == 1);
  CHECK(bw.at({-2, 3, -2}).size() == 1);

  // the polarised rank-two data assigns even ghost number throughout
  for (const auto& [w, idx] : branch(*m.Sigma2, branch_twist20_alt()))
    CHECK(w[0] % 2 == 0);

  // non-integral combinations are rejected
  CHECK_THROWS(branch_weight(branch_twist10(), Weight{0, 0, 0, 1, 0}));

  // every branching sees every structure map as weight zero
  for (const auto& data :
       {branch_mu3(), branch_twist10(), branch_twist20(), branch_twist20_alt(),
        branch_top(), branch_so4(), branch_sp11()}) {
    for (const SparseMap* sm : {&m.c_plus, &m.gamma3, &m.bracket2, &m.star_map,
                                &m.proj_w, &m.incl_2form, &m.c_five}) {
      for (int j = 0; j < sm->src()->dim(); ++j)
        for (const auto& [i, c] : sm->col(j)) {
          (void)c;
          CHECK(branch_weight(data, sm->src()->at(j).wt) ==
                branch_weight(data, sm->tgt()->at(i).wt));
        }
    }
  }
}
