#include "pbv/spinors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace pbv {

namespace {

// sign of the permutation sorting v (0 if a value repeats)
int sort_sign(std::vector<int> v) {
  int sign = 1;
  for (size_t i = 0; i + 1 < v.size(); ++i)
    for (size_t j = 0; j + 1 < v.size() - i; ++j) {
      if (v[j] == v[j + 1]) return 0;
      if (v[j] > v[j + 1]) {
        std::swap(v[j], v[j + 1]);
        sign = -sign;
      }
    }
  return sign;
}

int eps4(int i, int j, int k, int l) { return sort_sign({i, j, k, l}); }

using Mat4 = std::array<std::array<Qi, 4>, 4>;

Mat4 zero4() {
  Mat4 m;
  for (auto& r : m) r.fill(Qi(0));
  return m;
}

Mat4 mul4(const Mat4& a, const Mat4& b) {
  Mat4 c = zero4();
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      if (a[i][k].is_zero()) continue;
      for (int j = 0; j < 4; ++j) c[i][j] = c[i][j] + a[i][k] * b[k][j];
    }
  return c;
}

DenseVec act(const SparseMap& m, const DenseVec& v) {
  DenseVec out(m.tgt()->dim(), Qi(0));
  for (int j = 0; j < m.src()->dim(); ++j) {
    if (v[j].is_zero()) continue;
    for (const auto& [i, c] : m.col(j)) out[i] = out[i] + c * v[j];
  }
  return out;
}

std::vector<std::vector<int>> subsets_of(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> go = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      go(i + 1);
      cur.pop_back();
    }
  };
  go(0);
  return out;
}

std::shared_ptr<GradedSpace> wedge_space(const std::string& name,
                                         const GradedSpace& base,
                                         const std::vector<std::vector<int>>& subs,
                                         const std::string& stem) {
  auto sp = std::make_shared<GradedSpace>(name);
  for (const auto& s : subs) {
    std::string lbl = stem;
    Weight w = weight_zero();
    for (int i : s) {
      lbl += fmt::format("{}", i + 1);
      w = w + base.at(i).wt;
    }
    sp->add(lbl, Bidegree{0, 0}, w);
  }
  return sp;
}

int subset_index(const std::vector<std::vector<int>>& subs,
                 std::vector<int> key) {
  std::sort(key.begin(), key.end());
  for (size_t i = 0; i < subs.size(); ++i)
    if (subs[i] == key) return static_cast<int>(i);
  return -1;
}

}  // namespace

SparseMap wedge_derivation(SpacePtr wedge_sp, SpacePtr /*base*/,
                           const std::vector<std::vector<int>>& subsets,
                           const SparseMap& e) {
  SparseMap out(wedge_sp, wedge_sp, Bidegree{0, 0}, false);
  for (size_t col = 0; col < subsets.size(); ++col) {
    const auto& s = subsets[col];
    for (size_t t = 0; t < s.size(); ++t)
      for (const auto& [b, c] : e.col(s[t])) {
        std::vector<int> seq = s;
        seq[t] = b;
        int sg = sort_sign(seq);
        if (sg == 0) continue;
        std::sort(seq.begin(), seq.end());
        int row = subset_index(subsets, seq);
        out.add_to(row, static_cast<int>(col), (sg > 0 ? c : -c));
      }
  }
  return out;
}

SparseMap dual_action(SpacePtr s_minus, const SparseMap& e) {
  SparseMap out(s_minus, s_minus, Bidegree{0, 0}, false);
  for (int j = 0; j < e.src()->dim(); ++j)
    for (const auto& [i, c] : e.col(j)) out.add_to(j, i, -c);
  return out;
}

bool weight_zero_entries(const SparseMap& m) {
  for (int j = 0; j < m.src()->dim(); ++j)
    for (const auto& [i, c] : m.col(j)) {
      (void)c;
      if (!(m.src()->at(j).wt == m.tgt()->at(i).wt)) return false;
    }
  return true;
}

namespace {

SpinorModel build_model() {
  SpinorModel m;

  // ---- spin side ------------------------------------------------------------
  auto splus = std::make_shared<GradedSpace>("S+");
  splus->add("e1", {0, 0}, Weight{-1, -1, -1, 0, 0});
  splus->add("e2", {0, 0}, Weight{-1, 1, 1, 0, 0});
  splus->add("e3", {0, 0}, Weight{1, -1, 1, 0, 0});
  splus->add("e4", {0, 0}, Weight{1, 1, -1, 0, 0});
  m.S_plus = splus;

  auto sminus = std::make_shared<GradedSpace>("S-");
  for (int i = 0; i < 4; ++i) {
    Weight w = splus->at(i).wt;
    for (int s = 0; s < kWeightSlots; ++s) w[s] = -w[s];
    sminus->add(fmt::format("f{}", i + 1), {0, 0}, w);
  }
  m.S_minus = sminus;

  m.V_subsets = subsets_of(4, 2);
  auto vsp = wedge_space("V", *splus, m.V_subsets, "v");
  m.V = vsp;
  m.L2V_subsets = subsets_of(6, 2);
  m.L2V = wedge_space("L2V", *vsp, m.L2V_subsets, "b");
  m.L3V_subsets = subsets_of(6, 3);
  m.L3V = wedge_space("L3V", *vsp, m.L3V_subsets, "t");

  auto triv = trivial_space("1");

  m.pair_SS = SparseMap(GradedSpace::tensor(*m.S_plus, *m.S_minus), triv,
                        Bidegree{0, 0});
  for (int i = 0; i < 4; ++i) m.pair_SS.set(0, i * 4 + i, Qi(1));

  // metric on bivectors: g(a,b) = eps(a ^ b)
  std::array<std::array<Qi, 6>, 6> G;
  for (auto& r : G) r.fill(Qi(0));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const auto& pa = m.V_subsets[a];
      const auto& pb = m.V_subsets[b];
      G[a][b] = Qi(sort_sign({pa[0], pa[1], pb[0], pb[1]}));
    }
  m.g_V = SparseMap(GradedSpace::tensor(*m.V, *m.V), triv, Bidegree{0, 0});
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      if (!G[a][b].is_zero()) m.g_V.set(0, a * 6 + b, G[a][b]);

  // Clifford multiplications per basis bivector
  std::array<Mat4, 6> Cp, Cm;  // Cp[a]: S+ -> S-,  Cm[a]: S- -> S+
  for (int a = 0; a < 6; ++a) {
    Cp[a] = zero4();
    Cm[a] = zero4();
    int i = m.V_subsets[a][0], j = m.V_subsets[a][1];
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) {
        int sg = eps4(i, j, k, l);
        if (sg != 0) Cp[a][l][k] = Qi(sg);
      }
    // c_minus = -2 * contraction, making both round trips equal g(v,v)
    for (int k = 0; k < 4; ++k) {
      if (k == i) Cm[a][j][k] = Qi(-2);
      if (k == j) Cm[a][i][k] = Qi(2);
    }
  }

  auto vs_plus = GradedSpace::tensor(*m.V, *m.S_plus);
  auto vs_minus = GradedSpace::tensor(*m.V, *m.S_minus);
  m.c_plus = SparseMap(vs_plus, m.S_minus, Bidegree{0, 0}, false);
  m.c_minus = SparseMap(vs_minus, m.S_plus, Bidegree{0, 0}, false);
  for (int a = 0; a < 6; ++a)
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) {
        if (!Cp[a][l][k].is_zero()) m.c_plus.set(l, a * 4 + k, Cp[a][l][k]);
        if (!Cm[a][l][k].is_zero()) m.c_minus.set(l, a * 4 + k, Cm[a][l][k]);
      }
  m.conventions["c_minus_scale"] = Qi(-2);

  // antisymmetrised triple Clifford product on 3-vectors
  auto l3s = GradedSpace::tensor(*m.L3V, *m.S_plus);
  m.gamma3 = SparseMap(l3s, m.S_minus, Bidegree{0, 0}, false);
  static const int perm3[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  static const int perm3_sign[6] = {1, -1, -1, 1, 1, -1};
  for (size_t t = 0; t < m.L3V_subsets.size(); ++t) {
    const auto& tri = m.L3V_subsets[t];
    Mat4 acc = zero4();
    for (int p = 0; p < 6; ++p) {
      Mat4 prod = mul4(Cp[tri[perm3[p][0]]],
                       mul4(Cm[tri[perm3[p][1]]], Cp[tri[perm3[p][2]]]));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          acc[i][j] = acc[i][j] + (perm3_sign[p] > 0 ? prod[i][j] : -prod[i][j]);
    }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Qi v = acc[i][j] * Qi(Rat(1, 6));
        if (!v.is_zero()) m.gamma3.set(i, static_cast<int>(t) * 4 + j, v);
      }
  }

  // duality operator on 3-vectors, normalised to square to -1 and oriented so
  // that gamma3 annihilates the +i eigenspace
  auto det3 = [&](const std::vector<int>& I, const std::vector<int>& K) {
    Qi d(0);
    static const int p3[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                 {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    static const int s3[6] = {1, -1, -1, 1, 1, -1};
    for (int p = 0; p < 6; ++p) {
      Qi t = G[I[0]][K[p3[p][0]]] * G[I[1]][K[p3[p][1]]] * G[I[2]][K[p3[p][2]]];
      d = d + (s3[p] > 0 ? t : -t);
    }
    return d;
  };
  SparseMap star1(m.L3V, m.L3V, Bidegree{0, 0}, false);
  for (size_t kk = 0; kk < m.L3V_subsets.size(); ++kk)
    for (size_t ii = 0; ii < m.L3V_subsets.size(); ++ii) {
      const auto& I = m.L3V_subsets[ii];
      std::vector<int> comp;
      for (int x = 0; x < 6; ++x)
        if (std::find(I.begin(), I.end(), x) == I.end()) comp.push_back(x);
      Qi g3 = det3(I, m.L3V_subsets[kk]);
      if (g3.is_zero()) continue;
      int sg = sort_sign({I[0], I[1], I[2], comp[0], comp[1], comp[2]});
      int row = subset_index(m.L3V_subsets, comp);
      star1.add_to(row, static_cast<int>(kk), (sg > 0 ? g3 : -g3));
    }
  SparseMap sq = star1.compose(star1);
  Qi lambda = sq.get(0, 0);
  for (int j = 0; j < 20; ++j)
    for (const auto& [i, c] : sq.col(j))
      if ((i == j && !(c == lambda)) || (i != j && !c.is_zero()))
        throw std::logic_error("duality operator does not square to a scalar");
  Qi unit;
  if (lambda == Qi(1))
    unit = Qi(Rat(0), Rat(1));
  else if (lambda == Qi(-1))
    unit = Qi(1);
  else
    throw std::logic_error("duality square is not a sign");

  auto eigen = [&](const SparseMap& st, const Qi& ev) {
    return kernel_basis(st - SparseMap::identity(m.L3V).scaled(ev));
  };
  auto gamma_kills = [&](const std::vector<DenseVec>& basis) {
    for (const auto& b : basis)
      for (int k = 0; k < 4; ++k) {
        DenseVec t(m.L3V->dim() * 4, Qi(0));
        for (int a = 0; a < m.L3V->dim(); ++a) t[a * 4 + k] = b[a];
        for (const Qi& c : act(m.gamma3, t))
          if (!c.is_zero()) return false;
      }
    return true;
  };
  SparseMap star = star1.scaled(unit);
  if (!gamma_kills(eigen(star, Qi(Rat(0), Rat(1))))) {
    unit = -unit;
    star = star1.scaled(unit);
    if (!gamma_kills(eigen(star, Qi(Rat(0), Rat(1)))))
      throw std::logic_error("no orientation makes gamma3 kill +i 3-vectors");
  }
  m.star3 = star;
  m.sd_basis = eigen(star, Qi(Rat(0), Rat(1)));
  m.asd_basis = eigen(star, Qi(Rat(0), Rat(-1)));
  m.conventions["orientation_unit"] = unit;

  // bivector spin action and the bispinor bivector
  auto l2s = GradedSpace::tensor(*m.L2V, *m.S_plus);
  m.spin_rep2 = SparseMap(l2s, m.S_plus, Bidegree{0, 0}, false);
  for (size_t b = 0; b < m.L2V_subsets.size(); ++b) {
    int x = m.L2V_subsets[b][0], y = m.L2V_subsets[b][1];
    Mat4 e = zero4();
    Mat4 xy = mul4(Cm[x], Cp[y]), yx = mul4(Cm[y], Cp[x]);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        e[i][j] = (xy[i][j] - yx[i][j]) * Qi(Rat(1, 4));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (!e[i][j].is_zero())
          m.spin_rep2.set(i, static_cast<int>(b) * 4 + j, e[i][j]);
  }

  m.bispinor2 = SparseMap(GradedSpace::tensor(*m.S_plus, *m.S_minus), m.L2V,
                          Bidegree{0, 0}, false);
  for (int s = 0; s < 4; ++s)
    for (int f = 0; f < 4; ++f)
      for (size_t b = 0; b < m.L2V_subsets.size(); ++b) {
        // dual bivectors via the involutive Gram matrix
        int I = m.L2V_subsets[b][0], J = m.L2V_subsets[b][1];
        Qi coeff(0);
        for (int x = 0; x < 6; ++x)
          for (int y = 0; y < 6; ++y) {
            if (G[I][x].is_zero() || G[J][y].is_zero()) continue;
            Mat4 d = zero4();
            Mat4 xy = mul4(Cm[x], Cp[y]), yx = mul4(Cm[y], Cp[x]);
            for (int i = 0; i < 4; ++i)
              for (int j = 0; j < 4; ++j)
                d[i][j] = (xy[i][j] - yx[i][j]) * Qi(Rat(1, 2));
            coeff = coeff + G[I][x] * G[J][y] * d[f][s];
          }
        if (!coeff.is_zero())
          m.bispinor2.set(static_cast<int>(b), s * 4 + f, coeff);
      }

  // ---- R-symmetry side -------------------------------------------------------
  auto r2 = std::make_shared<GradedSpace>("R2");
  r2->add("r1", {0, 0}, Weight{0, 0, 0, 2, 0});
  r2->add("r2", {0, 0}, Weight{0, 0, 0, -2, 0});
  r2->add("r1'", {0, 0}, Weight{0, 0, 0, 0, 2});
  r2->add("r2'", {0, 0}, Weight{0, 0, 0, 0, -2});
  m.R2 = r2;
  auto r1 = std::make_shared<GradedSpace>("R1");
  r1->add("r1", {0, 0}, Weight{0, 0, 0, 2, 0});
  r1->add("r2", {0, 0}, Weight{0, 0, 0, -2, 0});
  m.R1 = r1;

  std::array<std::array<Qi, 4>, 4> Om;
  for (auto& r : Om) r.fill(Qi(0));
  Om[0][1] = Qi(1);
  Om[1][0] = Qi(-1);
  Om[2][3] = Qi(1);
  Om[3][2] = Qi(-1);
  m.omega_R2 = SparseMap(GradedSpace::tensor(*r2, *r2), triv, Bidegree{0, 0});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!Om[i][j].is_zero()) m.omega_R2.set(0, i * 4 + j, Om[i][j]);
  m.omega_R1 = SparseMap(GradedSpace::tensor(*r1, *r1), triv, Bidegree{0, 0});
  m.omega_R1.set(0, 1, Qi(1));
  m.omega_R1.set(0, 2, Qi(-1));

  m.incl_R1 = SparseMap(r1, r2, Bidegree{0, 0}, false);
  m.incl_R1.set(0, 0, Qi(1));
  m.incl_R1.set(1, 1, Qi(1));
  auto r1p = std::make_shared<GradedSpace>("R1'");
  r1p->add("r1'", {0, 0}, Weight{0, 0, 0, 0, 2});
  r1p->add("r2'", {0, 0}, Weight{0, 0, 0, 0, -2});
  m.incl_R1p = SparseMap(r1p, r2, Bidegree{0, 0}, false);
  m.incl_R1p.set(2, 0, Qi(1));
  m.incl_R1p.set(3, 1, Qi(1));

  // W: the omega-traceless bivectors, basis u1..u5
  auto wsp = std::make_shared<GradedSpace>("W");
  wsp->add("u1", {0, 0}, Weight{0, 0, 0, 2, 2});    // r1 ^ r1'
  wsp->add("u2", {0, 0}, Weight{0, 0, 0, 2, -2});   // r1 ^ r2'
  wsp->add("u3", {0, 0}, Weight{0, 0, 0, -2, 2});   // r2 ^ r1'
  wsp->add("u4", {0, 0}, Weight{0, 0, 0, -2, -2});  // r2 ^ r2'
  wsp->add("u5", {0, 0}, weight_zero());            // r1 ^ r2 - r1' ^ r2'
  m.W = wsp;

  auto r2r2 = GradedSpace::tensor(*r2, *r2);
  m.incl_W = SparseMap(wsp, r2r2, Bidegree{0, 0}, false);
  auto put_wedge = [&](int col, int x, int y, int sg) {
    m.incl_W.add_to(x * 4 + y, col, Qi(sg));
    m.incl_W.add_to(y * 4 + x, col, Qi(-sg));
  };
  put_wedge(0, 0, 2, 1);
  put_wedge(1, 0, 3, 1);
  put_wedge(2, 1, 2, 1);
  put_wedge(3, 1, 3, 1);
  put_wedge(4, 0, 1, 1);
  put_wedge(4, 2, 3, -1);

  m.omega_inv = DenseVec(16, Qi(0));
  m.omega_inv[0 * 4 + 1] = Qi(1);
  m.omega_inv[1 * 4 + 0] = Qi(-1);
  m.omega_inv[2 * 4 + 3] = Qi(1);
  m.omega_inv[3 * 4 + 2] = Qi(-1);

  m.proj_W2 = SparseMap(r2r2, wsp, Bidegree{0, 0}, false);
  {
    // antisymmetrise, remove the omega trace, read off wedge coefficients
    static const int wedge_cols[5][2] = {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {0, 1}};
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y) {
        if (x == y) continue;
        // antisymmetric coefficient on r_x ^ r_y (x<y basis) is (t_xy - t_yx)/2;
        // column x*4+y contributes +1/2 to pair (x,y)
        int a = std::min(x, y), b = std::max(x, y);
        Qi half = Qi(Rat(x < y ? 1 : -1, 2));
        Qi tr_coeff(0);
        if (!Om[x][y].is_zero()) tr_coeff = Om[x][y] * Qi(Rat(1, 4));
        // traceless wedge coefficients: subtract tr/4 * omega_inv wedges
        auto wedge_coeff = [&](int p, int q) {
          Qi c(0);
          if (a == p && b == q) c = c + half;
          if (p == 0 && q == 1) c = c - tr_coeff;
          if (p == 2 && q == 3) c = c - tr_coeff;
          return c;
        };
        for (int u = 0; u < 4; ++u) {
          Qi c = wedge_coeff(wedge_cols[u][0], wedge_cols[u][1]);
          if (!c.is_zero()) m.proj_W2.add_to(u, x * 4 + y, c);
        }
        // u5 coefficient: the (0,1) wedge coefficient of the traceless part
        Qi c5 = wedge_coeff(0, 1);
        if (!c5.is_zero()) m.proj_W2.add_to(4, x * 4 + y, c5);
      }
  }

  m.h_W = SparseMap(GradedSpace::tensor(*wsp, *wsp), triv, Bidegree{0, 0});
  auto set_h = [&](int a, int b, const Qi& v) {
    m.h_W.set(0, a * 5 + b, v);
    if (a != b) m.h_W.set(0, b * 5 + a, v);
  };
  set_h(0, 3, Qi(1));
  set_h(1, 2, Qi(-1));
  set_h(4, 4, Qi(2));

  // symplectic Clifford action of traceless bivectors on R2
  m.c_five = SparseMap(GradedSpace::tensor(*wsp, *r2), r2, Bidegree{0, 0}, false);
  for (int u = 0; u < 5; ++u)
    for (int r = 0; r < 4; ++r) {
      DenseVec out(4, Qi(0));
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
          Qi c = m.incl_W.get(x * 4 + y, u);
          if (c.is_zero() || Om[y][r].is_zero()) continue;
          out[x] = out[x] + c * Om[y][r];
        }
      for (int x = 0; x < 4; ++x)
        if (!out[x].is_zero()) m.c_five.set(x, u * 4 + r, out[x]);
    }
  m.conventions["c_five_square"] = Qi(Rat(1, 2));

  // ---- supercharge spaces -----------------------------------------------------
  m.Sigma1 = GradedSpace::tensor(*m.S_plus, *r1);
  m.Sigma2 = GradedSpace::tensor(*m.S_plus, *r2);
  m.SigmaDual = GradedSpace::tensor(*m.S_minus, *r2);
  m.DD = GradedSpace::tensor(*m.Sigma2, *m.SigmaDual);

  auto make_bracket = [&](SpacePtr sigma, int rdim, auto omega_entry) {
    SparseMap out(GradedSpace::tensor(*sigma, *sigma), m.V, Bidegree{0, 0},
                  false);
    int sd = sigma->dim();
    for (int i = 0; i < 4; ++i)
      for (int r = 0; r < rdim; ++r)
        for (int j = 0; j < 4; ++j)
          for (int s = 0; s < rdim; ++s) {
            Qi om = omega_entry(r, s);
            if (om.is_zero() || i == j) continue;
            int row = subset_index(m.V_subsets, {i, j});
            int sg = i < j ? 1 : -1;
            out.add_to(row, (i * rdim + r) * sd + (j * rdim + s),
                       (sg > 0 ? om : -om));
          }
    return out;
  };
  m.bracket1 = make_bracket(m.Sigma1, 2, [&](int r, int s) {
    return m.omega_R1.get(0, r * 2 + s);
  });
  m.bracket2 = make_bracket(m.Sigma2, 4, [&](int r, int s) { return Om[r][s]; });

  // star pairing: wedge the spinors, project the R-part onto W
  auto vw = GradedSpace::tensor(*m.V, *wsp);
  m.star_map = SparseMap(GradedSpace::tensor(*m.Sigma2, *m.Sigma2), vw,
                         Bidegree{0, 0}, false);
  for (int i = 0; i < 4; ++i)
    for (int r = 0; r < 4; ++r)
      for (int j = 0; j < 4; ++j)
        for (int s = 0; s < 4; ++s) {
          if (i == j) continue;
          int vrow = subset_index(m.V_subsets, {i, j});
          int sg = i < j ? 1 : -1;
          for (const auto& [u, c] : m.proj_W2.col(r * 4 + s)) {
            m.star_map.add_to(vrow * 5 + u, (i * 4 + r) * 16 + (j * 4 + s),
                              (sg > 0 ? c : -c));
          }
        }
  // normalise so that (x(x)r)(y(x)s) lands on (x^y)(x)pi(r^s), both wedges
  // in the a(x)b - b(x)a convention
  m.star_map = m.star_map.scaled(Qi(2));

  // ---- decomposition of Sigma2 (x) SigmaDual ---------------------------------
  auto dd_index = [&](int i, int r, int j, int s) {
    return (i * 4 + r) * 16 + (j * 4 + s);
  };

  m.incl_c = SparseMap(triv, m.DD, Bidegree{0, 0}, false);
  for (int i = 0; i < 4; ++i)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        if (!m.omega_inv[x * 4 + y].is_zero())
          m.incl_c.add_to(dd_index(i, x, i, y), 0, m.omega_inv[x * 4 + y]);
  m.proj_c = SparseMap(m.DD, triv, Bidegree{0, 0}, false);
  for (int i = 0; i < 4; ++i)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        if (!Om[x][y].is_zero())
          m.proj_c.add_to(0, dd_index(i, x, i, y), Om[x][y]);

  m.incl_w = SparseMap(wsp, m.DD, Bidegree{0, 0}, false);
  for (int u = 0; u < 5; ++u)
    for (int i = 0; i < 4; ++i)
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
          Qi c = m.incl_W.get(x * 4 + y, u);
          if (!c.is_zero()) m.incl_w.add_to(dd_index(i, x, i, y), u, c);
        }
  m.proj_w = SparseMap(m.DD, wsp, Bidegree{0, 0}, false);
  for (int i = 0; i < 4; ++i)
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        for (const auto& [u, c] : m.proj_W2.col(x * 4 + y))
          m.proj_w.add_to(u, dd_index(i, x, i, y), c);

  m.incl_2form = SparseMap(m.L2V, m.DD, Bidegree{0, 0}, false);
  for (int b = 0; b < m.L2V->dim(); ++b)
    for (int j = 0; j < 4; ++j)
      for (const auto& [i, e] : m.spin_rep2.col(b * 4 + j))
        for (int x = 0; x < 4; ++x)
          for (int y = 0; y < 4; ++y)
            if (!m.omega_inv[x * 4 + y].is_zero())
              m.incl_2form.add_to(dd_index(i, x, j, y), b,
                                  e * m.omega_inv[x * 4 + y]);
  m.proj_2form = SparseMap(m.DD, m.L2V, Bidegree{0, 0}, false);
  {
    // omega-contract the R factors, remove the S-trace, convert the traceless
    // endomorphism to a bivector through the derivation action
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int x = 0; x < 4; ++x)
          for (int y = 0; y < 4; ++y) {
            if (Om[x][y].is_zero()) continue;
            // endomorphism contribution E[i][j] += om; traceless part feeds
            // beta = 1/2 sum_I (d_E v_I) ^ v^I
            for (int dij = 0; dij < 2; ++dij) {
              // dij = 0: the E[i][j] term; dij = 1: the -delta_ij tr/4 term
              std::vector<std::pair<std::pair<int, int>, Qi>> ends;
              if (dij == 0)
                ends.push_back({{i, j}, Om[x][y]});
              else if (i == j)
                for (int d = 0; d < 4; ++d)
                  ends.push_back({{d, d}, Om[x][y] * Qi(Rat(-1, 4))});
              for (const auto& [epos, ecoef] : ends) {
                // derivation of e_{epos.first} (x) f_{epos.second} on V basis
                for (size_t I = 0; I < m.V_subsets.size(); ++I) {
                  const auto& pr = m.V_subsets[I];
                  for (int t = 0; t < 2; ++t) {
                    if (pr[t] != epos.second) continue;
                    std::vector<int> seq = {pr[0], pr[1]};
                    seq[t] = epos.first;
                    int sg = sort_sign(seq);
                    if (sg == 0) continue;
                    std::sort(seq.begin(), seq.end());
                    int J = subset_index(m.V_subsets, seq);
                    // wedge (d_E v_I = sg * v_J) with v^I = sum_K G[I][K] v_K
                    for (int K = 0; K < 6; ++K) {
                      if (G[I][K].is_zero() || J == K) continue;
                      int row = subset_index(m.L2V_subsets, {J, K});
                      int wsg = J < K ? 1 : -1;
                      m.proj_2form.add_to(
                          row, dd_index(i, x, j, y),
                          ecoef * G[I][K] *
                              Qi(Rat(wsg * sg, 2)));
                    }
                  }
                }
              }
            }
          }
  }

  // normalise the three projections so each round trip is the identity
  auto schur_normalise = [&](SparseMap& proj, const SparseMap& incl,
                             const std::string& name) {
    SparseMap round = proj.compose(incl);
    int n = incl.src()->dim();
    Qi c = round.get(0, 0);
    if (c.is_zero()) throw std::logic_error("vanishing round trip: " + name);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Qi want = (i == j) ? c : Qi(0);
        if (!(round.get(i, j) == want))
          throw std::logic_error("round trip is not scalar: " + name);
      }
    proj = proj.scaled(Qi(1) / c);
    return c;
  };
  m.conventions["scalar_part_norm"] = schur_normalise(m.proj_c, m.incl_c, "c");
  m.conventions["w_part_norm"] = schur_normalise(m.proj_w, m.incl_w, "w");
  m.conventions["two_form_part_norm"] =
      schur_normalise(m.proj_2form, m.incl_2form, "2form");

  return m;
}

}  // namespace

const SpinorModel& spinor_model() {
  static const SpinorModel model = build_model();
  return model;
}

std::vector<DenseVec> v_of_letters(const Chart& chart) {
  const SpinorModel& m = spinor_model();
  // holomorphic derivations are v(1,1+a); antiholomorphic ones are the scaled
  // complementary bivectors fixed by the metric dictionary
  auto holo = [&](int a) {
    DenseVec v(6, Qi(0));
    v[subset_index(m.V_subsets, {0, a + 1})] = Qi(1);
    return v;
  };
  auto anti = [&](int a) {
    DenseVec v(6, Qi(0));
    static const int comp_idx[3] = {5, 4, 3};  // v34, v24, v23
    static const int comp_sgn[3] = {1, -1, 1};
    v[comp_idx[a]] = Qi(Rat(comp_sgn[a], 2));
    return v;
  };
  std::vector<DenseVec> out;
  if (chart.letters() == 6) {
    bool all_real = true;
    for (int l = 0; l < 6; ++l)
      if (chart.kind(l) != Chart::LetterKind::Real) all_real = false;
    if (all_real) {
      for (int l = 0; l < 6; ++l) {
        int a = l / 2;
        DenseVec h = holo(a), ab = anti(a);
        DenseVec v(6, Qi(0));
        for (int k = 0; k < 6; ++k)
          v[k] = (l % 2 == 0) ? h[k] + ab[k]
                              : Qi(Rat(0), Rat(1)) * (h[k] - ab[k]);
        out.push_back(v);
      }
      return out;
    }
  }
  if (chart.letters() == 6) {
    // rank-three complex chart
    for (int l = 0; l < 6; ++l) {
      int a = chart.pair_of(l);
      if (chart.kind(l) == Chart::LetterKind::Holo)
        out.push_back(holo(a));
      else if (chart.kind(l) == Chart::LetterKind::Anti)
        out.push_back(anti(a));
      else
        throw std::invalid_argument("v_of_letters: mixed chart");
    }
    return out;
  }
  throw std::invalid_argument("v_of_letters: need six letters");
}

DenseVec asd_project(const SpinorModel& m, const DenseVec& q,
                     const DenseVec& a) {
  DenseVec sa(20, Qi(0));
  for (int j = 0; j < 20; ++j) {
    if (a[j].is_zero()) continue;
    for (const auto& [i, c] : m.star3.col(j)) sa[i] = sa[i] + c * a[j];
  }
  for (int i = 0; i < 20; ++i)
    if (!(sa[i] == Qi(Rat(0), Rat(-1)) * a[i]))
      throw std::invalid_argument("asd_project: 3-vector is not anti-self-dual");
  DenseVec t(20 * 4, Qi(0));
  for (int i = 0; i < 20; ++i)
    for (int k = 0; k < 4; ++k) t[i * 4 + k] = a[i] * q[k];
  DenseVec out(4, Qi(0));
  for (int j = 0; j < 80; ++j) {
    if (t[j].is_zero()) continue;
    for (const auto& [i, c] : m.gamma3.col(j)) out[i] = out[i] + c * t[j];
  }
  return out;
}

// ---- branchings -------------------------------------------------------------

std::vector<int> branch_weight(const BranchingData& d, const Weight& w) {
  std::vector<int> out;
  for (const auto& row : d.rows) {
    Rat v = pair_weight(row, w);
    if (boost::multiprecision::denominator(v) != 1)
      throw std::invalid_argument("branch_weight: non-integral weight under " +
                                  d.label);
    out.push_back(static_cast<int>(boost::multiprecision::numerator(v)));
  }
  return out;
}

std::map<std::vector<int>, std::vector<int>> branch(const GradedSpace& sp,
                                                    const BranchingData& d) {
  std::map<std::vector<int>, std::vector<int>> out;
  for (int i = 0; i < sp.dim(); ++i)
    out[branch_weight(d, sp.at(i).wt)].push_back(i);
  return out;
}

BranchingData branch_mu3() {
  return BranchingData{"MU(3) determinant charge",
                       {{Rat(-1), Rat(-1), Rat(-1), Rat(0), Rat(0)}}};
}

BranchingData branch_twist10() {
  return BranchingData{"(ghost, spin) for the rank-one holomorphic twist",
                       {{Rat(0), Rat(0), Rat(0), Rat(1), Rat(0)},
                        {Rat(-1), Rat(-1), Rat(-1), Rat(-3, 2), Rat(0)}}};
}

BranchingData branch_twist20() {
  return BranchingData{
      "(ghost, spin, residual charge) for the rank-two holomorphic twist",
      {{Rat(0), Rat(0), Rat(0), Rat(1), Rat(0)},
       {Rat(-1), Rat(-1), Rat(-1), Rat(-3, 2), Rat(0)},
       {Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)}}};
}

BranchingData branch_twist20_alt() {
  return BranchingData{
      "(ghost, l1, l2, l3) for the polarised rank-two twist",
      {{Rat(0), Rat(0), Rat(0), Rat(1), Rat(1)},
       {Rat(1), Rat(0), Rat(0), Rat(1, 2), Rat(1, 2)},
       {Rat(0), Rat(1), Rat(0), Rat(1, 2), Rat(1, 2)},
       {Rat(0), Rat(0), Rat(1), Rat(1, 2), Rat(1, 2)}}};
}

BranchingData branch_top() {
  return BranchingData{
      "(ghost, u1, u2, x) for the block-diagonal refinement",
      {{Rat(0), Rat(0), Rat(0), Rat(1), Rat(1)},
       {Rat(1), Rat(0), Rat(0), Rat(1, 2), Rat(-1, 2)},
       {Rat(0), Rat(1), Rat(0), Rat(1, 2), Rat(-1, 2)},
       {Rat(0), Rat(0), Rat(1), Rat(1, 2), Rat(1, 2)}}};
}

BranchingData branch_so4() {
  return BranchingData{
      "(ghost, s1, s2, q) for the four-plus-two split",
      {{Rat(0), Rat(0), Rat(0), Rat(1), Rat(1)},
       {Rat(1, 2), Rat(1, 2), Rat(0), Rat(1, 2), Rat(1, 2)},
       {Rat(1, 2), Rat(-1, 2), Rat(0), Rat(0), Rat(0)},
       {Rat(0), Rat(0), Rat(1), Rat(1, 2), Rat(-1, 2)}}};
}

BranchingData branch_sp11() {
  return BranchingData{"rank-two R-symmetry torus",
                       {{Rat(0), Rat(0), Rat(0), Rat(1), Rat(0)},
                        {Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)}}};
}

}  // namespace pbv
