#include "pbv/supercharge.hpp"

#include <stdexcept>

namespace pbv {

namespace {

DenseVec act(const SparseMap& m, const DenseVec& v) {
  DenseVec out(m.tgt()->dim(), Qi(0));
  for (int j = 0; j < m.src()->dim(); ++j) {
    if (v[j].is_zero()) continue;
    for (const auto& [i, c] : m.col(j)) out[i] = out[i] + c * v[j];
  }
  return out;
}

int dense_rank(std::vector<DenseVec> rows) {
  size_t cols = rows.empty() ? 0 : rows[0].size();
  int rank = 0;
  size_t lead = 0;
  for (size_t r = 0; r < rows.size() && lead < cols; ++lead) {
    size_t piv = r;
    while (piv < rows.size() && rows[piv][lead].is_zero()) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    Qi inv = Qi(1) / rows[r][lead];
    for (size_t c = lead; c < cols; ++c) rows[r][c] = rows[r][c] * inv;
    for (size_t k = 0; k < rows.size(); ++k) {
      if (k == r || rows[k][lead].is_zero()) continue;
      Qi f = rows[k][lead];
      for (size_t c = lead; c < cols; ++c)
        rows[k][c] = rows[k][c] - f * rows[r][c];
    }
    ++r;
    ++rank;
  }
  return rank;
}

const SparseMap& bracket_for(int n) {
  const SpinorModel& sm = spinor_model();
  return n == 1 ? sm.bracket1 : sm.bracket2;
}

}  // namespace

bool Supercharge::is_zero() const {
  for (const Qi& c : m)
    if (!c.is_zero()) return false;
  return true;
}

int Supercharge::rank() const {
  std::vector<DenseVec> rows(4, DenseVec(2 * n, Qi(0)));
  for (int i = 0; i < 4; ++i)
    for (int r = 0; r < 2 * n; ++r) rows[i][r] = at(i, r);
  return dense_rank(std::move(rows));
}

DenseVec Supercharge::as_vector() const { return m; }

Supercharge Supercharge::operator+(const Supercharge& o) const {
  if (n != o.n) throw std::invalid_argument("mixed supertranslation ranks");
  Supercharge out(n);
  for (size_t k = 0; k < m.size(); ++k) out.m[k] = m[k] + o.m[k];
  return out;
}

Supercharge Supercharge::scaled(const Qi& c) const {
  Supercharge out(n);
  for (size_t k = 0; k < m.size(); ++k) out.m[k] = m[k] * c;
  return out;
}

Supercharge rank_one_charge(int n, const DenseVec& xi, const DenseVec& r) {
  if (xi.size() != 4 || r.size() != static_cast<size_t>(2 * n))
    throw std::invalid_argument("rank_one_charge: bad component sizes");
  Supercharge q(n);
  for (int i = 0; i < 4; ++i)
    for (int s = 0; s < 2 * n; ++s) q.at(i, s) = xi[i] * r[s];
  return q;
}

DenseVec charge_bracket(const Supercharge& a, const Supercharge& b) {
  if (a.n != b.n) throw std::invalid_argument("mixed supertranslation ranks");
  const SparseMap& br = bracket_for(a.n);
  DenseVec va = a.as_vector(), vb = b.as_vector();
  DenseVec t(va.size() * vb.size(), Qi(0));
  for (size_t i = 0; i < va.size(); ++i)
    for (size_t j = 0; j < vb.size(); ++j)
      t[i * vb.size() + j] = va[i] * vb[j];
  return act(br, t);
}

ChargeClass classify(const Supercharge& q) {
  if (q.is_zero()) throw std::invalid_argument("classify: zero supercharge");
  DenseVec sq = charge_bracket(q, q);
  for (const Qi& c : sq)
    if (!c.is_zero()) return ChargeClass::not_square_zero;
  return q.rank() == 1 ? ChargeClass::minimal_rank1
                       : ChargeClass::nonminimal_rank2;
}

std::pair<int, int> tangent_dimensions(const Supercharge& q) {
  const SparseMap& br = bracket_for(q.n);
  int sd = 8 * q.n;
  // bracket with q as a linear map Sigma_n -> V
  std::vector<DenseVec> rows(6, DenseVec(sd, Qi(0)));
  DenseVec vq = q.as_vector();
  for (int e = 0; e < sd; ++e) {
    DenseVec t(sd * sd, Qi(0));
    for (int i = 0; i < sd; ++i) t[i * sd + e] = vq[i];
    DenseVec img = act(br, t);
    for (int k = 0; k < 6; ++k) rows[k][e] = img[k];
  }
  int rk = dense_rank(std::move(rows));
  return {sd - rk, rk};
}

DeformationCheck deformation_check(const Supercharge& q,
                                   const Supercharge& qp) {
  if (q.n != 2 || qp.n != 2)
    throw std::invalid_argument("deformation_check: expects n = 2 charges");
  if (classify(q) != ChargeClass::minimal_rank1)
    throw std::invalid_argument("deformation_check: base charge not rank one");
  DeformationCheck out;
  auto zero = [](const DenseVec& v) {
    for (const Qi& c : v)
      if (!c.is_zero()) return false;
    return true;
  };
  out.anticommutes = zero(charge_bracket(q, qp));
  out.self_square_zero = qp.is_zero() || zero(charge_bracket(qp, qp));
  out.valid = out.anticommutes && out.self_square_zero;
  Supercharge sum = q + qp;
  out.combined =
      sum.is_zero() ? ChargeClass::not_square_zero : classify(sum);
  return out;
}

int ResidualAlgebra::pi_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (a == 0 && b == 1) return 8;
  if (a == 0 && b == 2) return 7;
  return 6;  // (1,2)
}

ResidualAlgebra residual_algebra() {
  ResidualAlgebra ra;
  auto g = std::make_shared<GradedSpace>("gQ");
  for (int a = 0; a < 3; ++a)
    g->add("eta" + std::to_string(a + 1), Bidegree{-1, 0},
           Weight{a == 0 ? 2 : 0, a == 1 ? 2 : 0, a == 2 ? 2 : 0, 0, 0});
  for (int a = 0; a < 3; ++a)
    g->add("v" + std::to_string(a + 1), Bidegree{0, 0},
           Weight{a == 0 ? -2 : 0, a == 1 ? -2 : 0, a == 2 ? -2 : 0, 0, 0});
  const int pairs[3][2] = {{1, 2}, {0, 2}, {0, 1}};
  for (int a = 0; a < 3; ++a) {
    Weight w{0, 0, 0, 0, 0};
    w[pairs[a][0]] = -2;
    w[pairs[a][1]] = -2;
    g->add("pi" + std::to_string(pairs[a][0] + 1) +
               std::to_string(pairs[a][1] + 1),
           Bidegree{1, 0}, w);
  }
  ra.g = g;
  ra.bracket =
      SparseMap(GradedSpace::tensor(*g, *g), g, Bidegree{0, 0}, false);
  // [eta_a, pi_{bc}] = delta_{ab} v_c - delta_{ac} v_b, symmetric in the
  // two odd arguments
  for (int a = 0; a < 3; ++a) {
    for (int p = 0; p < 3; ++p) {
      int b = pairs[p][0], c = pairs[p][1];
      int pi = 6 + p;
      Qi coef(0);
      int tgt = -1;
      if (a == b) {
        coef = Qi(1);
        tgt = ra.v_index(c);
      } else if (a == c) {
        coef = Qi(-1);
        tgt = ra.v_index(b);
      }
      if (coef.is_zero()) continue;
      ra.bracket.add_to(tgt, ra.eta_index(a) * 9 + pi, coef);
      ra.bracket.add_to(tgt, pi * 9 + ra.eta_index(a), coef);
    }
  }
  return ra;
}

}  // namespace pbv
