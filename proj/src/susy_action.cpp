#include "pbv/susy_action.hpp"

#include <array>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "pbv/spinors.hpp"

namespace pbv {

namespace {

using Mat = std::vector<std::vector<Qi>>;

Mat mat_zero(int rows, int cols) {
  return Mat(rows, std::vector<Qi>(cols, Qi(0)));
}

// Gauss-Jordan inverse of a square matrix over Q(i)
Mat mat_inverse(Mat a) {
  int n = static_cast<int>(a.size());
  Mat inv = mat_zero(n, n);
  for (int i = 0; i < n; ++i) inv[i][i] = Qi(1);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("mat_inverse: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    Qi d = Qi(1) / a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] *= d;
      inv[col][j] *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      Qi f = a[r][col];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

// determinant of the k x k submatrix of P with the given rows and columns
Qi minor_det(const Mat& P, const std::vector<int>& rows,
             const std::vector<int>& cols) {
  int k = static_cast<int>(rows.size());
  if (k == 1) return P[rows[0]][cols[0]];
  if (k == 2)
    return P[rows[0]][cols[0]] * P[rows[1]][cols[1]] -
           P[rows[0]][cols[1]] * P[rows[1]][cols[0]];
  Qi det(0);
  static const int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1},
                                 {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  for (int p = 0; p < 6; ++p) {
    Qi term = P[rows[0]][cols[perm[p][0]]] * P[rows[1]][cols[perm[p][1]]] *
              P[rows[2]][cols[perm[p][2]]];
    det = (p < 3) ? det + term : det - term;
  }
  return det;
}

// incremental exact row reduction with labelled rows
struct Eliminator {
  int n = 0;
  struct Row {
    std::vector<Qi> c;
    Qi rhs;
    std::string label;
    int pivot = -1;
  };
  std::vector<Row> rows;
  std::string contradiction;

  explicit Eliminator(int n_) : n(n_) {}

  bool add(std::vector<Qi> c, Qi rhs, const std::string& label) {
    for (const Row& r : rows) {
      if (c[r.pivot].is_zero()) continue;
      Qi f = c[r.pivot];
      for (int i = 0; i < n; ++i) c[i] -= f * r.c[i];
      rhs -= f * r.rhs;
    }
    int p = -1;
    for (int i = 0; i < n; ++i)
      if (!c[i].is_zero()) {
        p = i;
        break;
      }
    if (p < 0) {
      if (!rhs.is_zero()) {
        if (contradiction.empty()) contradiction = label;
        return false;
      }
      return true;
    }
    Qi d = Qi(1) / c[p];
    for (int i = 0; i < n; ++i) c[i] *= d;
    rhs *= d;
    for (Row& r : rows) {
      if (r.c[p].is_zero()) continue;
      Qi f = r.c[p];
      for (int i = 0; i < n; ++i) r.c[i] -= f * c[i];
      r.rhs -= f * rhs;
    }
    rows.push_back(Row{std::move(c), rhs, label, p});
    return true;
  }

  bool pivoted(int var) const {
    for (const Row& r : rows)
      if (r.pivot == var) return true;
    return false;
  }

  // for a homogeneous system: variables whose reduced row has no other
  // support, i.e. the constraints force them to vanish outright
  std::vector<std::pair<int, std::string>> forced_zero() const {
    std::vector<std::pair<int, std::string>> out;
    for (const Row& r : rows) {
      bool lone = r.rhs.is_zero();
      for (int i = 0; lone && i < n; ++i)
        if (i != r.pivot && !r.c[i].is_zero()) lone = false;
      if (lone && r.rhs.is_zero()) out.push_back({r.pivot, r.label});
    }
    return out;
  }

  std::vector<std::vector<Qi>> nullspace() const {
    std::vector<std::vector<Qi>> basis;
    for (int f = 0; f < n; ++f) {
      if (pivoted(f)) continue;
      std::vector<Qi> v(n, Qi(0));
      v[f] = Qi(1);
      for (const Row& r : rows) v[r.pivot] = -r.c[f];
      basis.push_back(std::move(v));
    }
    return basis;
  }

  // unique solution of an inhomogeneous system (requires full rank)
  bool solve(std::vector<Qi>& out) const {
    out.assign(n, Qi(0));
    for (int i = 0; i < n; ++i)
      if (!pivoted(i)) return false;
    for (const Row& r : rows) out[r.pivot] = r.rhs;
    return true;
  }
};

std::string mono_name(const Chart& chart, const Mono& m) {
  std::string s;
  for (size_t l = 0; l < m.size(); ++l)
    for (int k = 0; k < m[l]; ++k) {
      if (!s.empty()) s += " ";
      s += "d/d" + chart.letter_name(static_cast<int>(l));
    }
  return s.empty() ? "1" : s;
}

std::string first_entry(const Chart& chart, const ConstCoeffOp& op) {
  for (const auto& [m, mat] : op.terms())
    for (int j = 0; j < mat.src()->dim(); ++j)
      for (const auto& [i, c] : mat.col(j))
        return mono_name(chart, m) + ": " + mat.tgt()->at(i).label + " <- " +
               mat.src()->at(j).label + " = " + c.str();
  return "";
}

}  // namespace

// Everything fixed about the action before scalars are chosen: the multiplet,
// index tables for the wedge functor of the letters-to-bivectors isometry,
// and the unit-scalar route operator of every equivariant map.
struct ActionData {
  TheoryPresentation t;
  const SpinorModel* sm = nullptr;
  int nl = 6;
  bool wrong_eigenspace = false;

  int s_o0 = 0, s_o1 = 0, s_o2 = 0, s_sd = 0;
  int s_psim = 0, s_psip = 0, s_lo0 = 0, s_hi6 = 0;

  Mat P, Pinv;          // 6x6, bivector coords x letters
  Mat L2P, L2Pinv;      // 15x15
  Mat L3P, L3Pinv;      // 20x20
  Mat G3inv;            // inverse Gram of the cubed pairing
  SparseMap star4;      // middle-adjacent Hodge star Lambda^4 -> Lambda^2

  static constexpr int kNR1 = 8;
  static constexpr int kNR2 = 6;
  // unit-scalar linear-layer routes per basis charge
  std::array<std::array<ConstCoeffOp, 16>, kNR1> r1;

  static const char* r1_name(int x) {
    static const char* names[kNR1] = {
        "rho1[o2->psim]",  "rho1[psim->lo0]", "rho1[psim->o2]",
        "rho1[lo0->psim]", "rho1[psip->hi6]", "rho1[hi6->psip]",
        "rho1[sd->psip]",  "rho1[psip->sd]"};
    return names[x];
  }
  static const char* r2_name(int y) {
    static const char* names[kNR2] = {
        "rho2[o1->o0]",           "rho2[o2->o1]",
        "rho2[sd->o2]",           "rho2[psip->psim:star]",
        "rho2[psip->psim:bracket]", "rho2[lo0->o1]"};
    return names[y];
  }

  int ix(int summand, int fi, int vi) const {
    return t.bundle->offset(summand) +
           fi * t.bundle->summand(summand).value->dim() + vi;
  }

  DenseVec bracket_v(const DenseVec& A, const DenseVec& B) const {
    DenseVec X(6, Qi(0));
    for (int v = 0; v < 6; ++v)
      for (int k1 = 0; k1 < 16; ++k1) {
        if (A[k1].is_zero()) continue;
        for (int k2 = 0; k2 < 16; ++k2) {
          if (B[k2].is_zero()) continue;
          Qi c = sm->bracket2.get(v, k1 * 16 + k2);
          if (!c.is_zero()) X[v] += c * A[k1] * B[k2];
        }
      }
    return X;
  }

  DenseVec to_letters(const DenseVec& X_v) const {
    DenseVec X(nl, Qi(0));
    for (int l = 0; l < nl; ++l)
      for (int v = 0; v < 6; ++v) X[l] += Pinv[l][v] * X_v[v];
    return X;
  }

  DenseVec star_vw(const DenseVec& A, const DenseVec& B) const {
    DenseVec S(30, Qi(0));
    for (int k1 = 0; k1 < 16; ++k1) {
      if (A[k1].is_zero()) continue;
      for (int k2 = 0; k2 < 16; ++k2) {
        if (B[k2].is_zero()) continue;
        for (int u = 0; u < 30; ++u) {
          Qi c = sm->star_map.get(u, k1 * 16 + k2);
          if (!c.is_zero()) S[u] += c * A[k1] * B[k2];
        }
      }
    }
    return S;
  }

  ConstCoeffOp translation_op(const DenseVec& x_letters) const {
    ConstCoeffOp op(nl, t.bundle->fiber(), t.bundle->fiber(), Bidegree{0, 0});
    int dim = t.bundle->fiber()->dim();
    for (int l = 0; l < nl; ++l) {
      if (x_letters[l].is_zero()) continue;
      SparseMap M(t.bundle->fiber(), t.bundle->fiber(), Bidegree{0, 0}, true);
      for (int i = 0; i < dim; ++i) M.set(i, i, x_letters[l]);
      op.add_term(mono_unit(nl, l), M);
    }
    return op;
  }

  // unit-scalar quadratic-layer route y evaluated on two charge vectors
  ConstCoeffOp r2_family(int y, const DenseVec& A, const DenseVec& B) const {
    const Exterior& ext = t.bundle->ext();
    const SpacePtr& fib = t.bundle->fiber();
    ConstCoeffOp op(nl, fib, fib, Bidegree{-1, 0});
    SparseMap M(fib, fib, Bidegree{-1, 0}, true);
    if (y <= 2) {
      DenseVec X = to_letters(bracket_v(A, B));
      bool any = false;
      for (const Qi& c : X)
        if (!c.is_zero()) any = true;
      if (!any) return op;
      if (y == 0) {
        SparseMap c1 = ext.contraction(1, X);
        for (int j = 0; j < c1.src()->dim(); ++j)
          for (const auto& [i, c] : c1.col(j))
            M.add_to(ix(s_o0, i, 0), ix(s_o1, j, 0), c);
      } else if (y == 1) {
        SparseMap c2 = ext.contraction(2, X);
        for (int j = 0; j < c2.src()->dim(); ++j)
          for (const auto& [i, c] : c2.col(j))
            M.add_to(ix(s_o1, i, 0), ix(s_o2, j, 0), c);
      } else {
        SparseMap c3 = ext.contraction(3, X);
        const SparseMap& sec = t.bundle->summand(s_sd).piece.section;
        for (int a = 0; a < 10; ++a)
          for (const auto& [f3, sv] : sec.col(a))
            for (const auto& [f2, c] : c3.col(f3))
              M.add_to(ix(s_o2, f2, 0), ix(s_sd, a, 0), c * sv);
      }
    } else if (y == 3) {
      DenseVec S = star_vw(A, B);
      for (int sp = 0; sp < 4; ++sp)
        for (int rp = 0; rp < 4; ++rp)
          for (int tm = 0; tm < 4; ++tm)
            for (int ro = 0; ro < 4; ++ro) {
              Qi acc(0);
              for (int v = 0; v < 6; ++v) {
                Qi cp = sm->c_plus.get(tm, v * 4 + sp);
                if (cp.is_zero()) continue;
                for (int w = 0; w < 5; ++w) {
                  const Qi& sv = S[v * 5 + w];
                  if (sv.is_zero()) continue;
                  Qi cf = sm->c_five.get(ro, w * 4 + rp);
                  if (!cf.is_zero()) acc += sv * cp * cf;
                }
              }
              if (!acc.is_zero())
                M.add_to(ix(s_psim, 0, tm * 4 + ro), ix(s_psip, 0, sp * 4 + rp),
                         acc);
            }
    } else if (y == 4) {
      DenseVec X_v = bracket_v(A, B);
      for (int sp = 0; sp < 4; ++sp)
        for (int tm = 0; tm < 4; ++tm) {
          Qi acc(0);
          for (int v = 0; v < 6; ++v) {
            if (X_v[v].is_zero()) continue;
            acc += X_v[v] * sm->c_plus.get(tm, v * 4 + sp);
          }
          if (acc.is_zero()) continue;
          for (int rp = 0; rp < 4; ++rp)
            M.add_to(ix(s_psim, 0, tm * 4 + rp), ix(s_psip, 0, sp * 4 + rp),
                     acc);
        }
    } else {
      DenseVec S = star_vw(A, B);
      const auto& ext1 = ext;
      for (int wphi = 0; wphi < 5; ++wphi)
        for (int l = 0; l < nl; ++l) {
          Qi acc(0);
          for (int v = 0; v < 6; ++v) {
            if (Pinv[l][v].is_zero()) continue;
            for (int w = 0; w < 5; ++w) {
              const Qi& sv = S[v * 5 + w];
              if (sv.is_zero()) continue;
              acc += sv * Pinv[l][v] * sm->h_W.get(0, w * 5 + wphi);
            }
          }
          if (!acc.is_zero())
            M.add_to(ix(s_o1, ext1.mono_index(1, FormMono{l}), 0),
                     ix(s_lo0, 0, wphi), acc);
        }
    }
    if (!M.is_zero()) op.add_term(mono_zero(nl), M);
    return op;
  }

  ConstCoeffOp rho1_combined(const DenseVec& q,
                             const std::array<Qi, kNR1>& scalars) const {
    ConstCoeffOp out(nl, t.bundle->fiber(), t.bundle->fiber(), Bidegree{0, 1});
    for (int x = 0; x < kNR1; ++x) {
      if (scalars[x].is_zero()) continue;
      for (int k = 0; k < 16; ++k) {
        if (q[k].is_zero()) continue;
        out = out + r1[x][k].scaled(scalars[x] * q[k]);
      }
    }
    return out;
  }
};

namespace {

std::shared_ptr<const ActionData> make_action_data(bool wrong_eigenspace) {
  auto dp = std::make_shared<ActionData>();
  ActionData& d = *dp;
  d.t = make_tensor_multiplet(2);
  d.sm = &spinor_model();
  d.wrong_eigenspace = wrong_eigenspace;
  const SpinorModel& m = *d.sm;
  const FormBundle& b = *d.t.bundle;
  const Exterior& ext = b.ext();
  d.nl = d.t.chart.letters();

  d.s_o0 = b.summand_by_tag("o0");
  d.s_o1 = b.summand_by_tag("o1");
  d.s_o2 = b.summand_by_tag("o2");
  d.s_sd = b.summand_by_tag("sd");
  d.s_psim = b.summand_by_tag("psim");
  d.s_psip = b.summand_by_tag("psip");
  d.s_lo0 = b.summand_by_tag("lo0");
  d.s_hi6 = b.summand_by_tag("hi6");
  for (int s : {d.s_o0, d.s_o1, d.s_o2, d.s_sd, d.s_psim, d.s_psip, d.s_lo0,
                d.s_hi6})
    if (s < 0) throw std::logic_error("rank-two multiplet summand missing");

  // letters -> bivector model isometry and its wedge powers
  auto vl = v_of_letters(d.t.chart);
  d.P = mat_zero(6, 6);
  for (int l = 0; l < 6; ++l)
    for (int v = 0; v < 6; ++v) d.P[v][l] = vl[l][v];
  d.Pinv = mat_inverse(d.P);

  const auto& m2 = ext.monos(2);
  const auto& m3 = ext.monos(3);
  d.L2P = mat_zero(15, 15);
  for (size_t A = 0; A < m.L2V_subsets.size(); ++A)
    for (size_t S = 0; S < m2.size(); ++S)
      d.L2P[A][S] = minor_det(d.P, m.L2V_subsets[A], m2[S]);
  d.L2Pinv = mat_inverse(d.L2P);
  d.L3P = mat_zero(20, 20);
  for (size_t A = 0; A < m.L3V_subsets.size(); ++A)
    for (size_t S = 0; S < m3.size(); ++S)
      d.L3P[A][S] = minor_det(d.P, m.L3V_subsets[A], m3[S]);
  d.L3Pinv = mat_inverse(d.L3P);

  // Gram matrix of the pairing on cubed bivectors, and its inverse
  Mat g = mat_zero(6, 6);
  for (int a = 0; a < 6; ++a)
    for (int c = 0; c < 6; ++c) g[a][c] = m.g_V.get(0, a * 6 + c);
  Mat G3 = mat_zero(20, 20);
  for (size_t A = 0; A < m.L3V_subsets.size(); ++A)
    for (size_t B = 0; B < m.L3V_subsets.size(); ++B) {
      Mat sub = mat_zero(3, 3);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          sub[i][j] = g[m.L3V_subsets[A][i]][m.L3V_subsets[B][j]];
      G3[A][B] = minor_det(sub, {0, 1, 2}, {0, 1, 2});
    }
  d.G3inv = mat_inverse(G3);

  d.star4 = ext.star(4);

  const SparseMap& sec = b.summand(d.s_sd).piece.section;
  const SparseMap& prj = b.summand(d.s_sd).piece.projection;

  // sanity: the triple Clifford product annihilates the image of the
  // multiplet's self-dual three-forms inside the bivector model
  {
    bool killed = true;
    for (int a = 0; a < 10 && killed; ++a)
      for (int s = 0; s < 4 && killed; ++s)
        for (int t = 0; t < 4 && killed; ++t) {
          Qi acc(0);
          for (const auto& [f3, sv] : sec.col(a))
            for (int A = 0; A < 20; ++A) {
              Qi g3 = m.gamma3.get(t, A * 4 + s);
              if (!g3.is_zero()) acc += sv * d.L3P[A][f3] * g3;
            }
          if (!acc.is_zero()) killed = false;
        }
    if (!killed)
      throw std::logic_error(
          "triple Clifford product does not annihilate the self-dual piece");
  }

  // precomputed contractions
  // CL[l][tm][s]: Clifford action of the l-th coordinate direction
  std::array<std::array<std::array<Qi, 4>, 4>, 6> CL{};
  for (int l = 0; l < 6; ++l)
    for (int tm = 0; tm < 4; ++tm)
      for (int s = 0; s < 4; ++s) {
        Qi acc(0);
        for (int v = 0; v < 6; ++v) {
          Qi c = m.c_plus.get(tm, v * 4 + s);
          if (!c.is_zero()) acc += d.P[v][l] * c;
        }
        CL[l][tm][s] = acc;
      }
  // G1[t][s][f3]: triple product after the cube of the isometry; the wrong
  // variant first projects three-forms onto the self-dual eigenspace (which
  // the triple product kills, so the route degenerates)
  std::vector<std::array<std::array<Qi, 4>, 4>> G1(20);
  for (int f3 = 0; f3 < 20; ++f3)
    for (int t = 0; t < 4; ++t)
      for (int s = 0; s < 4; ++s) {
        Qi acc(0);
        for (int A = 0; A < 20; ++A) {
          Qi g3 = m.gamma3.get(t, A * 4 + s);
          if (!g3.is_zero()) acc += d.L3P[A][f3] * g3;
        }
        G1[f3][t][s] = acc;
      }
  if (wrong_eigenspace) {
    // P_plus on Lambda^3 in letter coordinates
    Mat Ppl = mat_zero(20, 20);
    for (int a = 0; a < 10; ++a)
      for (const auto& [f3, sv] : sec.col(a))
        for (int g3i = 0; g3i < 20; ++g3i) {
          Qi pv = prj.get(a, g3i);
          if (!pv.is_zero()) Ppl[f3][g3i] += sv * pv;
        }
    std::vector<std::array<std::array<Qi, 4>, 4>> G1w(20);
    for (int f3 = 0; f3 < 20; ++f3)
      for (int t = 0; t < 4; ++t)
        for (int s = 0; s < 4; ++s) {
          Qi acc(0);
          for (int f3p = 0; f3p < 20; ++f3p)
            if (!Ppl[f3p][f3].is_zero())
              acc += G1[f3p][t][s] * Ppl[f3p][f3];
          G1w[f3][t][s] = acc;
        }
    G1 = std::move(G1w);
  }
  // B2[f2][s][tm]: bispinor bivector pulled back to letter two-forms
  std::vector<std::array<std::array<Qi, 4>, 4>> B2(15);
  for (int f2 = 0; f2 < 15; ++f2)
    for (int s = 0; s < 4; ++s)
      for (int tm = 0; tm < 4; ++tm) {
        Qi acc(0);
        for (int G = 0; G < 15; ++G) {
          Qi bc = m.bispinor2.get(G, s * 4 + tm);
          if (!bc.is_zero()) acc += d.L2Pinv[f2][G] * bc;
        }
        B2[f2][s][tm] = acc;
      }
  // SP2[so][s][f2]: bivector spin action pulled back to letter two-forms
  std::vector<std::array<std::array<Qi, 15>, 4>> SP2(4);
  for (int so = 0; so < 4; ++so)
    for (int s = 0; s < 4; ++s)
      for (int f2 = 0; f2 < 15; ++f2) {
        Qi acc(0);
        for (int G = 0; G < 15; ++G) {
          Qi sc = m.spin_rep2.get(so, G * 4 + s);
          if (!sc.is_zero()) acc += d.L2P[G][f2] * sc;
        }
        SP2[so][s][f2] = acc;
      }
  // H8[s][sp][a]: dualize the triple-product functional of two chiral spinors
  // against the cubed pairing, land in the self-dual summand coordinates
  std::array<std::array<std::array<Qi, 10>, 4>, 4> H8{};
  for (int s = 0; s < 4; ++s)
    for (int sp = 0; sp < 4; ++sp) {
      std::vector<Qi> T3(20, Qi(0));
      for (int A = 0; A < 20; ++A) {
        Qi acc(0);
        for (int tm = 0; tm < 4; ++tm) {
          Qi pc = m.pair_SS.get(0, s * 4 + tm);
          if (!pc.is_zero()) acc += pc * m.gamma3.get(tm, A * 4 + sp);
        }
        T3[A] = acc;
      }
      std::vector<Qi> h(20, Qi(0));
      for (int B = 0; B < 20; ++B)
        for (int A = 0; A < 20; ++A)
          if (!T3[A].is_zero()) h[B] += d.G3inv[B][A] * T3[A];
      std::vector<Qi> letter3(20, Qi(0));
      for (int f3 = 0; f3 < 20; ++f3)
        for (int B = 0; B < 20; ++B)
          if (!h[B].is_zero()) letter3[f3] += d.L3Pinv[f3][B] * h[B];
      for (int a = 0; a < 10; ++a) {
        Qi acc(0);
        for (int f3 = 0; f3 < 20; ++f3) {
          Qi pv = prj.get(a, f3);
          if (!pv.is_zero()) acc += pv * letter3[f3];
        }
        H8[s][sp][a] = acc;
      }
    }

  // PC[l][s][sp]: chiral pairing against the Clifford action (Dirac routes)
  std::array<std::array<std::array<Qi, 4>, 4>, 6> PC{};
  for (int l = 0; l < 6; ++l)
    for (int s = 0; s < 4; ++s)
      for (int sp = 0; sp < 4; ++sp) {
        Qi acc(0);
        for (int tm = 0; tm < 4; ++tm) {
          Qi pc = m.pair_SS.get(0, s * 4 + tm);
          if (!pc.is_zero()) acc += pc * CL[l][tm][sp];
        }
        PC[l][s][sp] = acc;
      }

  const SpacePtr& fib = b.fiber();
  auto ix = [&](int summand, int fi, int vi) { return d.ix(summand, fi, vi); };

  for (int k = 0; k < 16; ++k) {
    int s = k / 4, r = k % 4;

    // family 0: two-form -> fermion, d then triple Clifford product
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      for (int l = 0; l < 6; ++l) {
        SparseMap M(fib, fib, Bidegree{0, 1}, true);
        for (int f2 = 0; f2 < 15; ++f2) {
          auto [sg, f3] = ext.wedge_letter(2, f2, l);
          if (sg == 0) continue;
          for (int t = 0; t < 4; ++t) {
            Qi c = G1[f3][t][s];
            if (c.is_zero()) continue;
            M.add_to(ix(d.s_psim, 0, t * 4 + r), ix(d.s_o2, f2, 0),
                     sg < 0 ? -c : c);
          }
        }
        if (!M.is_zero()) op.add_term(mono_unit(d.nl, l), M);
      }
      d.r1[0][k] = op;
    }
    // family 1: fermion -> scalar, chiral pairing (x) symmetric projection
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      SparseMap M(fib, fib, Bidegree{0, 1}, true);
      for (int tm = 0; tm < 4; ++tm) {
        Qi pc = m.pair_SS.get(0, s * 4 + tm);
        if (pc.is_zero()) continue;
        for (int rp = 0; rp < 4; ++rp)
          for (int w = 0; w < 5; ++w) {
            Qi pw = m.proj_W2.get(w, r * 4 + rp);
            if (!pw.is_zero())
              M.add_to(ix(d.s_lo0, 0, w), ix(d.s_psim, 0, tm * 4 + rp),
                       pc * pw);
          }
      }
      if (!M.is_zero()) op.add_term(mono_zero(d.nl), M);
      d.r1[1][k] = op;
    }
    // family 2: fermion -> two-form, bispinor bivector (x) symplectic trace
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      SparseMap M(fib, fib, Bidegree{0, 1}, true);
      for (int tm = 0; tm < 4; ++tm)
        for (int rp = 0; rp < 4; ++rp) {
          Qi om = m.omega_R2.get(0, r * 4 + rp);
          if (om.is_zero()) continue;
          for (int f2 = 0; f2 < 15; ++f2) {
            Qi c = B2[f2][s][tm];
            if (!c.is_zero())
              M.add_to(ix(d.s_o2, f2, 0), ix(d.s_psim, 0, tm * 4 + rp),
                       c * om);
          }
        }
      if (!M.is_zero()) op.add_term(mono_zero(d.nl), M);
      d.r1[2][k] = op;
    }
    // family 3: scalar -> fermion, d then Clifford (x) rank-two Clifford
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      for (int l = 0; l < 6; ++l) {
        SparseMap M(fib, fib, Bidegree{0, 1}, true);
        for (int tm = 0; tm < 4; ++tm) {
          Qi cl = CL[l][tm][s];
          if (cl.is_zero()) continue;
          for (int w = 0; w < 5; ++w)
            for (int ro = 0; ro < 4; ++ro) {
              Qi cf = m.c_five.get(ro, w * 4 + r);
              if (!cf.is_zero())
                M.add_to(ix(d.s_psim, 0, tm * 4 + ro), ix(d.s_lo0, 0, w),
                         cl * cf);
            }
        }
        if (!M.is_zero()) op.add_term(mono_unit(d.nl, l), M);
      }
      d.r1[3][k] = op;
    }
    // family 4: anti-fermion -> anti-scalar, Dirac then pairing
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      for (int l = 0; l < 6; ++l) {
        SparseMap M(fib, fib, Bidegree{0, 1}, true);
        for (int sp = 0; sp < 4; ++sp) {
          Qi pc = PC[l][s][sp];
          if (pc.is_zero()) continue;
          for (int rp = 0; rp < 4; ++rp)
            for (int w = 0; w < 5; ++w) {
              Qi pw = m.proj_W2.get(w, r * 4 + rp);
              if (!pw.is_zero())
                M.add_to(ix(d.s_hi6, 0, w), ix(d.s_psip, 0, sp * 4 + rp),
                         pc * pw);
            }
        }
        if (!M.is_zero()) op.add_term(mono_unit(d.nl, l), M);
      }
      d.r1[4][k] = op;
    }
    // family 5: anti-scalar -> anti-fermion, rank-two Clifford, order zero
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      SparseMap M(fib, fib, Bidegree{0, 1}, true);
      for (int w = 0; w < 5; ++w)
        for (int ro = 0; ro < 4; ++ro) {
          Qi cf = m.c_five.get(ro, w * 4 + r);
          if (!cf.is_zero())
            M.add_to(ix(d.s_psip, 0, s * 4 + ro), ix(d.s_hi6, 0, w), cf);
        }
      if (!M.is_zero()) op.add_term(mono_zero(d.nl), M);
      d.r1[5][k] = op;
    }
    // family 6: self-dual -> anti-fermion, d then star then spin action
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      for (int l = 0; l < 6; ++l) {
        SparseMap M(fib, fib, Bidegree{0, 1}, true);
        for (int a = 0; a < 10; ++a) {
          std::array<Qi, 15> acc2{};
          for (const auto& [f3, sv] : sec.col(a)) {
            auto [sg, f4] = ext.wedge_letter(3, f3, l);
            if (sg == 0) continue;
            Qi svs = sg < 0 ? -sv : sv;
            for (const auto& [f2, stc] : d.star4.col(f4))
              acc2[f2] += svs * stc;
          }
          for (int so = 0; so < 4; ++so) {
            Qi out(0);
            for (int f2 = 0; f2 < 15; ++f2)
              if (!acc2[f2].is_zero()) out += acc2[f2] * SP2[so][s][f2];
            if (!out.is_zero())
              M.add_to(ix(d.s_psip, 0, so * 4 + r), ix(d.s_sd, a, 0), out);
          }
        }
        if (!M.is_zero()) op.add_term(mono_unit(d.nl, l), M);
      }
      d.r1[6][k] = op;
    }
    // family 7: anti-fermion -> self-dual, dualized triple product
    {
      ConstCoeffOp op(d.nl, fib, fib, Bidegree{0, 1});
      SparseMap M(fib, fib, Bidegree{0, 1}, true);
      for (int sp = 0; sp < 4; ++sp)
        for (int rp = 0; rp < 4; ++rp) {
          Qi om = m.omega_R2.get(0, r * 4 + rp);
          if (om.is_zero()) continue;
          for (int a = 0; a < 10; ++a) {
            Qi c = H8[s][sp][a];
            if (!c.is_zero())
              M.add_to(ix(d.s_sd, a, 0), ix(d.s_psip, 0, sp * 4 + rp),
                       c * om);
          }
        }
      if (!M.is_zero()) op.add_term(mono_zero(d.nl), M);
      d.r1[7][k] = op;
    }
  }

  return dp;
}

DenseVec unit_charge(int k) {
  DenseVec v(16, Qi(0));
  v[k] = Qi(1);
  return v;
}

// pairing-invariance defect of an operator, in normal form
BilinearDensity omega_defect(const TheoryPresentation& t,
                             const ConstCoeffOp& op) {
  return (t.omega.compose_left(op) + t.omega.compose_right(op, true))
      .normal_form();
}

struct Solved {
  std::array<Qi, ActionData::kNR1> t{};
  std::array<Qi, ActionData::kNR2> u{};
  Qi sign;
};

ScalarSolution solve_with(const ActionData& d, Solved* out) {
  ScalarSolution sol;
  const TheoryPresentation& t = d.t;

  // stage one: chain-map and pairing-invariance constraints on the linear
  // layer, homogeneous in its eight scalars
  Eliminator stage1(ActionData::kNR1);
  for (int k = 0; k < 16; ++k) {
    std::array<ConstCoeffOp, ActionData::kNR1> K;
    std::array<BilinearDensity, ActionData::kNR1> W;
    for (int x = 0; x < ActionData::kNR1; ++x) {
      K[x] = ConstCoeffOp::commutator(t.q_bv, d.r1[x][k]);
      W[x] = omega_defect(t, d.r1[x][k]);
    }
    std::map<std::tuple<Mono, int, int>, std::vector<Qi>> rows;
    for (int x = 0; x < ActionData::kNR1; ++x)
      for (const auto& [mn, mat] : K[x].terms())
        for (int j = 0; j < mat.src()->dim(); ++j)
          for (const auto& [i, c] : mat.col(j)) {
            auto& row = rows[{mn, i, j}];
            row.resize(ActionData::kNR1, Qi(0));
            row[x] = c;
          }
    for (auto& [key, row] : rows) {
      row.resize(ActionData::kNR1, Qi(0));
      stage1.add(row, Qi(0),
                 "chain[k=" + std::to_string(k) + ", " +
                     t.bundle->fiber()->at(std::get<1>(key)).label + " <- " +
                     t.bundle->fiber()->at(std::get<2>(key)).label + "]");
    }
    std::map<std::tuple<Mono, Mono, int, int>, std::vector<Qi>> wrows;
    for (int x = 0; x < ActionData::kNR1; ++x)
      for (const auto& [tk, block] : W[x].terms())
        for (const auto& [ij, c] : block) {
          auto& row = wrows[{tk.first, tk.second, ij.first, ij.second}];
          row.resize(ActionData::kNR1, Qi(0));
          row[x] = c;
        }
    for (auto& [key, row] : wrows) {
      row.resize(ActionData::kNR1, Qi(0));
      stage1.add(row, Qi(0),
                 "pairing[k=" + std::to_string(k) + ", (" +
                     t.bundle->fiber()->at(std::get<2>(key)).label + ", " +
                     t.bundle->fiber()->at(std::get<3>(key)).label + ")]");
    }
  }
  if (!stage1.contradiction.empty()) {
    sol.failure = "inconsistent linear-layer constraint: " + stage1.contradiction;
    return sol;
  }
  auto forced = stage1.forced_zero();
  if (!forced.empty()) {
    std::string msg = "constraints force vanishing scalars:";
    for (const auto& [var, label] : forced)
      msg += std::string(" ") + ActionData::r1_name(var) + " (" + label + ")";
    sol.failure = msg;
    return sol;
  }
  auto null_basis = stage1.nullspace();
  if (null_basis.empty()) {
    sol.failure = "linear-layer constraints admit only the zero solution";
    return sol;
  }

  // normalize the scalar-to-fermion route to one; remaining directions are
  // genuine freedom to be pinned by the closure equation
  constexpr int kT4 = 3;
  int base_idx = -1;
  for (size_t i = 0; i < null_basis.size(); ++i)
    if (!null_basis[i][kT4].is_zero()) {
      base_idx = static_cast<int>(i);
      break;
    }
  if (base_idx < 0) {
    sol.failure = "chain and pairing constraints force rho1[lo0->psim] = 0";
    return sol;
  }
  std::vector<Qi> part = null_basis[base_idx];
  {
    Qi dnm = Qi(1) / part[kT4];
    for (Qi& c : part) c *= dnm;
  }
  std::vector<std::vector<Qi>> dirs;
  for (size_t i = 0; i < null_basis.size(); ++i) {
    if (static_cast<int>(i) == base_idx) continue;
    std::vector<Qi> v = null_basis[i];
    Qi f = v[kT4];
    for (int x = 0; x < ActionData::kNR1; ++x) v[x] -= f * part[x];
    dirs.push_back(std::move(v));
  }
  int nd = static_cast<int>(dirs.size());

  // stage two: the closure equation on all basis charge pairs, linear in the
  // free directions, their pairwise products, and the quadratic-layer scalars
  int n_alpha = nd, n_prod = nd * (nd + 1) / 2;
  int NU = ActionData::kNR2;
  int NV = n_alpha + n_prod + NU;
  auto prod_index = [&](int i, int j) {  // i <= j
    return n_alpha + i * nd - i * (i - 1) / 2 + (j - i);
  };

  // per-basis-charge operators for the particular part and each direction
  std::vector<ConstCoeffOp> base_op(16);
  std::vector<std::vector<ConstCoeffOp>> dir_op(nd, std::vector<ConstCoeffOp>(16));
  {
    std::array<Qi, ActionData::kNR1> sc{};
    for (int x = 0; x < ActionData::kNR1; ++x) sc[x] = part[x];
    for (int k = 0; k < 16; ++k) base_op[k] = d.rho1_combined(unit_charge(k), sc);
    for (int i = 0; i < nd; ++i) {
      for (int x = 0; x < ActionData::kNR1; ++x) sc[x] = dirs[i][x];
      for (int k = 0; k < 16; ++k)
        dir_op[i][k] = d.rho1_combined(unit_charge(k), sc);
    }
  }

  for (Qi sign : {Qi(1), Qi(-1)}) {
    Eliminator stage2(NV);
    bool bad = false;
    for (int ka = 0; ka < 16 && !bad; ++ka)
      for (int kb = ka; kb < 16 && !bad; ++kb) {
        DenseVec A = unit_charge(ka), B = unit_charge(kb);
        auto symm = [&](const ConstCoeffOp& pq, const ConstCoeffOp& qp) {
          return pq + qp.scaled(sign);
        };
        ConstCoeffOp cst = d.translation_op(d.to_letters(d.bracket_v(A, B))) -
                           symm(base_op[ka].compose(base_op[kb]),
                                base_op[kb].compose(base_op[ka]));
        std::vector<ConstCoeffOp> coef(NV);
        for (int i = 0; i < nd; ++i)
          coef[i] = symm(dir_op[i][ka].compose(base_op[kb]),
                         dir_op[i][kb].compose(base_op[ka])) +
                    symm(base_op[ka].compose(dir_op[i][kb]),
                         base_op[kb].compose(dir_op[i][ka]));
        for (int i = 0; i < nd; ++i)
          for (int j = i; j < nd; ++j) {
            ConstCoeffOp p = symm(dir_op[i][ka].compose(dir_op[j][kb]),
                                  dir_op[i][kb].compose(dir_op[j][ka]));
            if (i != j)
              p = p + symm(dir_op[j][ka].compose(dir_op[i][kb]),
                           dir_op[j][kb].compose(dir_op[i][ka]));
            coef[prod_index(i, j)] = p;
          }
        for (int y = 0; y < NU; ++y)
          coef[n_alpha + n_prod + y] =
              ConstCoeffOp::commutator(t.q_bv, d.r2_family(y, A, B));

        std::map<std::tuple<Mono, int, int>, std::vector<Qi>> rows;
        std::map<std::tuple<Mono, int, int>, Qi> rhs;
        auto log_entries = [&](const ConstCoeffOp& op, int v) {
          for (const auto& [mn, mat] : op.terms())
            for (int j = 0; j < mat.src()->dim(); ++j)
              for (const auto& [i, c] : mat.col(j)) {
                auto key = std::tuple<Mono, int, int>{mn, i, j};
                if (v < 0) {
                  rhs[key] += c;
                  rows[key];
                } else {
                  auto& row = rows[key];
                  row.resize(NV, Qi(0));
                  row[v] += c;
                }
              }
        };
        log_entries(cst, -1);
        for (int v = 0; v < NV; ++v) log_entries(coef[v], v);
        for (auto& [key, row] : rows) {
          row.resize(NV, Qi(0));
          // cst + sum coef*var = 0  =>  sum coef*var = -cst
          Qi r = rhs.count(key) ? -rhs[key] : Qi(0);
          if (!stage2.add(row, r,
                          "closure[k=" + std::to_string(ka) + "," +
                              std::to_string(kb) + ", " +
                              t.bundle->fiber()->at(std::get<1>(key)).label +
                              " <- " +
                              t.bundle->fiber()->at(std::get<2>(key)).label +
                              "]")) {
            bad = true;
            break;
          }
        }
      }
    if (bad) {
      if (sign == Qi(-1)) {
        sol.failure =
            "closure equation inconsistent: " + stage2.contradiction;
        return sol;
      }
      continue;
    }
    std::vector<Qi> y;
    if (!stage2.solve(y)) {
      if (sign == Qi(-1)) {
        sol.failure = "closure equation leaves scalars undetermined";
        return sol;
      }
      continue;
    }
    bool consistent = true;
    for (int i = 0; i < nd && consistent; ++i)
      for (int j = i; j < nd && consistent; ++j)
        if (y[prod_index(i, j)] != y[i] * y[j]) consistent = false;
    if (!consistent) {
      if (sign == Qi(-1)) {
        sol.failure = "closure solution violates product consistency";
        return sol;
      }
      continue;
    }

    Solved sv;
    for (int x = 0; x < ActionData::kNR1; ++x) {
      sv.t[x] = part[x];
      for (int i = 0; i < nd; ++i) sv.t[x] += y[i] * dirs[i][x];
    }
    for (int yv = 0; yv < NU; ++yv) sv.u[yv] = y[n_alpha + n_prod + yv];
    sv.sign = sign;

    bool nonzero = true;
    std::string zeros;
    for (int x = 0; x < ActionData::kNR1; ++x)
      if (sv.t[x].is_zero()) {
        nonzero = false;
        zeros += std::string(" ") + ActionData::r1_name(x);
      }
    for (int yv = 0; yv < NU; ++yv)
      if (sv.u[yv].is_zero()) {
        nonzero = false;
        zeros += std::string(" ") + ActionData::r2_name(yv);
      }
    if (!nonzero) {
      sol.failure = "solved scalars vanish:" + zeros;
      return sol;
    }

    for (int x = 0; x < ActionData::kNR1; ++x)
      sol.table[ActionData::r1_name(x)] = sv.t[x];
    for (int yv = 0; yv < NU; ++yv)
      sol.table[ActionData::r2_name(yv)] = sv.u[yv];
    sol.table["mu[exchange-sign]"] = sv.sign;
    sol.table["rho1_even[translation]"] = Qi(1);
    sol.ok = true;
    if (out) *out = sv;
    return sol;
  }
  sol.failure = "closure equation inconsistent for both exchange signs";
  return sol;
}

}  // namespace

ScalarSolution solve_equivariant_scalars(bool wrong_eigenspace) {
  auto d = make_action_data(wrong_eigenspace);
  return solve_with(*d, nullptr);
}

SusyAction build_susy_action() {
  SusyAction act;
  act.d_ = make_action_data(false);
  ScalarSolution sol = solve_with(*act.d_, nullptr);
  if (!sol.ok)
    throw std::runtime_error("build_susy_action: " + sol.failure);
  act.table_ = sol.table;
  return act;
}

const TheoryPresentation& SusyAction::theory() const { return d_->t; }

ConstCoeffOp SusyAction::rho1(const Supercharge& q) const {
  if (q.n != 2)
    throw std::invalid_argument("rho1: the action is for rank-two charges");
  std::array<Qi, ActionData::kNR1> sc{};
  for (int x = 0; x < ActionData::kNR1; ++x)
    sc[x] = table_.at(ActionData::r1_name(x));
  return d_->rho1_combined(q.as_vector(), sc);
}

ConstCoeffOp SusyAction::rho1_even(const DenseVec& v_letters) const {
  if (static_cast<int>(v_letters.size()) != d_->nl)
    throw std::invalid_argument("rho1_even: expected letter components");
  return d_->translation_op(v_letters)
      .scaled(table_.at("rho1_even[translation]"));
}

ConstCoeffOp SusyAction::rho2(const Supercharge& a,
                              const Supercharge& b) const {
  if (a.n != 2 || b.n != 2)
    throw std::invalid_argument("rho2: the action is for rank-two charges");
  DenseVec A = a.as_vector(), B = b.as_vector();
  ConstCoeffOp out(d_->nl, d_->t.bundle->fiber(), d_->t.bundle->fiber(),
                   Bidegree{-1, 0});
  for (int y = 0; y < ActionData::kNR2; ++y) {
    Qi c = table_.at(ActionData::r2_name(y));
    if (c.is_zero()) continue;
    out = out + d_->r2_family(y, A, B).scaled(c);
  }
  return out;
}

DenseVec SusyAction::bracket_letters(const Supercharge& a,
                                     const Supercharge& b) const {
  return d_->to_letters(d_->bracket_v(a.as_vector(), b.as_vector()));
}

ConstCoeffOp SusyAction::mu(const Supercharge& a, const Supercharge& b) const {
  Qi sign = table_.at("mu[exchange-sign]");
  ConstCoeffOp ra = rho1(a), rb = rho1(b);
  return rho1_even(bracket_letters(a, b)) - ra.compose(rb) -
         rb.compose(ra).scaled(sign);
}

SusyAction SusyAction::with_scalar(const std::string& name,
                                   const Qi& value) const {
  if (!table_.count(name))
    throw std::invalid_argument("with_scalar: unknown convention " + name);
  SusyAction out = *this;
  out.table_[name] = value;
  return out;
}

std::vector<MuBlock> compute_mu(const SusyAction& act, const Supercharge& a,
                                const Supercharge& b) {
  const FormBundle& bun = *act.theory().bundle;
  ConstCoeffOp defect = act.mu(a, b);
  ConstCoeffOp balanced =
      ConstCoeffOp::commutator(act.theory().q_bv, act.rho2(a, b));
  ConstCoeffOp diff = defect - balanced;

  // block support of either side
  std::vector<std::vector<char>> seen(
      bun.n_summands(), std::vector<char>(bun.n_summands(), 0));
  auto mark = [&](const ConstCoeffOp& op) {
    for (const auto& [mn, mat] : op.terms())
      for (int j = 0; j < mat.src()->dim(); ++j)
        for (const auto& [i, c] : mat.col(j)) {
          (void)c;
          int si = -1, ti = -1;
          for (int ss = 0; ss < bun.n_summands(); ++ss) {
            int off = bun.offset(ss), dim = bun.summand_dim(ss);
            if (j >= off && j < off + dim) si = ss;
            if (i >= off && i < off + dim) ti = ss;
          }
          seen[si][ti] = 1;
        }
  };
  mark(defect);
  mark(balanced);

  std::vector<MuBlock> out;
  for (int si = 0; si < bun.n_summands(); ++si)
    for (int ti = 0; ti < bun.n_summands(); ++ti) {
      if (!seen[si][ti]) continue;
      ConstCoeffOp rd = restrict_block(diff, bun, bun.summand(si).tag,
                                       bun.summand(ti).tag);
      out.push_back(
          MuBlock{bun.summand(si).tag, bun.summand(ti).tag, rd.is_zero()});
    }
  return out;
}

bool check_linfinity(const SusyAction& act, const Supercharge& a,
                     const Supercharge& b, std::string* witness) {
  ConstCoeffOp diff =
      act.mu(a, b) -
      ConstCoeffOp::commutator(act.theory().q_bv, act.rho2(a, b));
  if (diff.is_zero()) return true;
  if (witness) *witness = first_entry(act.theory().chart, diff);
  return false;
}

bool check_higher_vanishing(const SusyAction& act, const Supercharge& a,
                            const Supercharge& b, const Supercharge& c,
                            std::string* witness) {
  ConstCoeffOp j =
      ConstCoeffOp::commutator(act.rho1(a), act.rho2(b, c)) +
      ConstCoeffOp::commutator(act.rho1(b), act.rho2(a, c)) +
      ConstCoeffOp::commutator(act.rho1(c), act.rho2(a, b));
  if (j.is_zero()) return true;
  if (witness) *witness = first_entry(act.theory().chart, j);
  return false;
}

ConstCoeffOp restrict_block(const ConstCoeffOp& op, const FormBundle& b,
                            const std::string& src_tag,
                            const std::string& tgt_tag) {
  int si = b.summand_by_tag(src_tag), ti = b.summand_by_tag(tgt_tag);
  if (si < 0 || ti < 0)
    throw std::invalid_argument("restrict_block: unknown summand tag");
  int so = b.offset(si), sd = b.summand_dim(si);
  int to = b.offset(ti), td = b.summand_dim(ti);
  ConstCoeffOp out(op.letters(), op.src(), op.tgt(), op.bidegree());
  for (const auto& [mn, mat] : op.terms()) {
    SparseMap M(op.src(), op.tgt(), op.bidegree(), false);
    for (int j = so; j < so + sd; ++j)
      for (const auto& [i, c] : mat.col(j))
        if (i >= to && i < to + td) M.set(i, j, c);
    if (!M.is_zero()) out.add_term(mn, M);
  }
  return out;
}

}  // namespace pbv
