#include "pbv/sparse_map.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <set>
#include <stdexcept>

namespace pbv {

SparseMap::SparseMap(SpacePtr src, SpacePtr tgt, Bidegree bd, bool enforce)
    : src_(std::move(src)), tgt_(std::move(tgt)), bd_(bd), enforce_(enforce) {
  cols_.resize(src_->dim());
}

SparseMap SparseMap::identity(SpacePtr s) {
  SparseMap m(s, s, Bidegree{0, 0});
  for (int i = 0; i < s->dim(); ++i) m.set(i, i, Qi(1));
  return m;
}

SparseMap SparseMap::zero(SpacePtr src, SpacePtr tgt, Bidegree bd) {
  return SparseMap(std::move(src), std::move(tgt), bd);
}

void SparseMap::set(int row, int col, const Qi& v) {
  if (row < 0 || row >= tgt_->dim() || col < 0 || col >= src_->dim())
    throw std::out_of_range("SparseMap::set: index out of range");
  if (enforce_) {
    Bidegree want = src_->at(col).bd + bd_;
    if (!(tgt_->at(row).bd == want))
      throw std::invalid_argument(
          "SparseMap::set: inhomogeneous entry " + tgt_->at(row).label + " <- " +
          src_->at(col).label);
  }
  if (v.is_zero())
    cols_[col].erase(row);
  else
    cols_[col][row] = v;
}

void SparseMap::add_to(int row, int col, const Qi& v) {
  if (v.is_zero()) return;
  Qi cur = get(row, col);
  set(row, col, cur + v);
}

Qi SparseMap::get(int row, int col) const {
  const auto& c = cols_.at(col);
  auto it = c.find(row);
  return it == c.end() ? Qi(0) : it->second;
}

bool SparseMap::is_zero() const {
  for (const auto& c : cols_)
    if (!c.empty()) return false;
  return true;
}

int SparseMap::nnz() const {
  int n = 0;
  for (const auto& c : cols_) n += static_cast<int>(c.size());
  return n;
}

SparseMap SparseMap::operator+(const SparseMap& o) const {
  if (src_->dim() != o.src_->dim() || tgt_->dim() != o.tgt_->dim())
    throw std::invalid_argument("SparseMap::+: shape mismatch");
  SparseMap out(src_, tgt_, bd_, false);
  out.cols_ = cols_;
  for (int j = 0; j < o.src_->dim(); ++j)
    for (const auto& [i, v] : o.cols_[j]) {
      Qi cur = out.get(i, j);
      cur += v;
      if (cur.is_zero())
        out.cols_[j].erase(i);
      else
        out.cols_[j][i] = cur;
    }
  return out;
}

SparseMap SparseMap::operator-(const SparseMap& o) const {
  return *this + o.scaled(Qi(-1));
}

SparseMap SparseMap::scaled(const Qi& c) const {
  SparseMap out(src_, tgt_, bd_, false);
  if (c.is_zero()) return out;
  out.cols_ = cols_;
  for (auto& colmap : out.cols_)
    for (auto& [i, v] : colmap) v *= c;
  return out;
}

SparseMap SparseMap::compose(const SparseMap& other) const {
  if (src_->dim() != other.tgt_->dim())
    throw std::invalid_argument("SparseMap::compose: shape mismatch");
  SparseMap out(other.src_, tgt_,
                Bidegree{bd_.deg + other.bd_.deg, (bd_.par + other.bd_.par) & 1},
                false);
  for (int j = 0; j < other.src_->dim(); ++j) {
    std::map<int, Qi>& outcol = out.cols_[j];
    for (const auto& [k, b] : other.cols_[j]) {
      for (const auto& [i, a] : cols_[k]) {
        Qi add = a * b;
        auto it = outcol.find(i);
        if (it == outcol.end()) {
          if (!add.is_zero()) outcol[i] = add;
        } else {
          it->second += add;
          if (it->second.is_zero()) outcol.erase(it);
        }
      }
    }
  }
  return out;
}

SparseMap SparseMap::transposed() const {
  SparseMap out(tgt_, src_, Bidegree{0, 0}, false);
  for (int j = 0; j < src_->dim(); ++j)
    for (const auto& [i, v] : cols_[j]) out.cols_[i][j] = v;
  return out;
}

SparseMap SparseMap::tensor(const SparseMap& a, const SparseMap& b) {
  auto src = GradedSpace::tensor(*a.src_, *b.src_);
  auto tgt = GradedSpace::tensor(*a.tgt_, *b.tgt_);
  int sb = b.src_->dim(), tb = b.tgt_->dim();
  SparseMap out(src, tgt,
                Bidegree{a.bd_.deg + b.bd_.deg, (a.bd_.par + b.bd_.par) & 1},
                false);
  int bpar = b.bd_.totalized();
  for (int ja = 0; ja < a.src_->dim(); ++ja) {
    int xpar = a.src_->at(ja).bd.totalized();
    Qi sign((bpar && xpar) ? -1 : 1);
    for (const auto& [ia, va] : a.cols_[ja])
      for (int jb = 0; jb < sb; ++jb)
        for (const auto& [ib, vb] : b.cols_[jb])
          out.cols_[ja * sb + jb][ia * tb + ib] = sign * va * vb;
  }
  return out;
}

SparseMap SparseMap::braiding(SpacePtr u, SpacePtr v) {
  auto src = GradedSpace::tensor(*u, *v);
  auto tgt = GradedSpace::tensor(*v, *u);
  SparseMap out(src, tgt, Bidegree{0, 0}, false);
  int dv = v->dim(), du = u->dim();
  for (int iu = 0; iu < du; ++iu)
    for (int iv = 0; iv < dv; ++iv) {
      int sgn = (u->at(iu).bd.totalized() && v->at(iv).bd.totalized()) ? -1 : 1;
      out.cols_[iu * dv + iv][iv * du + iu] = Qi(sgn);
    }
  return out;
}

SparseMap SparseMap::commutator(const SparseMap& a, const SparseMap& b) {
  SparseMap ab = a.compose(b);
  SparseMap ba = b.compose(a);
  int sgn = (a.bd_.totalized() && b.bd_.totalized()) ? -1 : 1;
  return ab - ba.scaled(Qi(sgn));
}

SparseMap SparseMap::from_blocks(
    SpacePtr src, SpacePtr tgt, Bidegree bd,
    const std::vector<std::tuple<int, int, const SparseMap*>>& blocks,
    const std::vector<int>& tgt_offsets, const std::vector<int>& src_offsets) {
  SparseMap out(src, tgt, bd, false);
  for (const auto& [bi, bj, m] : blocks) {
    if (!m) continue;
    int ro = tgt_offsets.at(bi), co = src_offsets.at(bj);
    for (int j = 0; j < m->src()->dim(); ++j)
      for (const auto& [i, v] : m->col(j)) out.cols_[co + j][ro + i] = v;
  }
  return out;
}

SparseMap SparseMap::restricted(const std::vector<int>& tgt_idx,
                                const std::vector<int>& src_idx) const {
  auto sub_src = std::make_shared<GradedSpace>(src_->name() + "|");
  for (int j : src_idx) {
    const auto& b = src_->at(j);
    sub_src->add(b.label, b.bd, b.wt);
  }
  auto sub_tgt = std::make_shared<GradedSpace>(tgt_->name() + "|");
  std::map<int, int> tpos;
  for (int k = 0; k < static_cast<int>(tgt_idx.size()); ++k) {
    const auto& b = tgt_->at(tgt_idx[k]);
    sub_tgt->add(b.label, b.bd, b.wt);
    tpos[tgt_idx[k]] = k;
  }
  SparseMap out(sub_src, sub_tgt, bd_, false);
  for (int k = 0; k < static_cast<int>(src_idx.size()); ++k)
    for (const auto& [i, v] : cols_[src_idx[k]]) {
      auto it = tpos.find(i);
      if (it != tpos.end()) out.cols_[k][it->second] = v;
    }
  return out;
}

SparseMap SparseMap::with_spaces(SpacePtr src, SpacePtr tgt, Bidegree bd) const {
  if (src->dim() != src_->dim() || tgt->dim() != tgt_->dim())
    throw std::invalid_argument("SparseMap::with_spaces: shape mismatch");
  SparseMap out(std::move(src), std::move(tgt), bd, false);
  out.cols_ = cols_;
  return out;
}

// ---- elimination -----------------------------------------------------------

namespace {

// Clears denominators of a row (multiplies by the positive lcm of all
// component denominators), returning a row over Z[i].
void integerize(std::map<int, Qi>& row) {
  Int l = 1;
  for (const auto& [j, v] : row) {
    l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(v.re()));
    l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(v.im()));
  }
  if (l == 1) return;
  Qi f((Rat(l)));
  for (auto& [j, v] : row) v *= f;
}

struct WorkRow {
  std::map<int, Qi> entries;
  int last_step = -1;  // step index at which this row was last materialized
  int orig = -1;
};

}  // namespace

// Sparse fraction-free (Bareiss) elimination with lazily deferred row
// scalings: rows untouched by a step keep a pending scalar which is harmless
// for ranks, pivots and kernels and is folded in on the next materialization.
Elimination eliminate(const SparseMap& m) {
  int nsrc = m.src()->dim();
  std::vector<WorkRow> rows;
  {
    // gather rows
    std::map<int, std::map<int, Qi>> rowmap;
    for (int j = 0; j < nsrc; ++j)
      for (const auto& [i, v] : m.col(j)) rowmap[i][j] = v;
    rows.reserve(rowmap.size());
    for (auto& [i, r] : rowmap) {
      WorkRow w;
      w.entries = std::move(r);
      w.orig = i;
      integerize(w.entries);
      rows.push_back(std::move(w));
    }
  }

  Elimination out;
  std::vector<Qi> pivots;    // true pivot values per step, pivots[k]
  std::vector<bool> active(rows.size(), true);

  // column -> active-row occupancy count (heuristic for pivot choice; kept
  // approximately in sync, which only affects fill-in, not correctness)
  std::vector<int> colcnt(nsrc, 0);
  for (const auto& w : rows)
    for (const auto& [c, v] : w.entries) colcnt[c]++;

  for (int step = 0;; ++step) {
    // pick pivot: row with fewest entries, then its column with fewest rows
    int best_r = -1;
    size_t best_nnz = SIZE_MAX;
    for (size_t r = 0; r < rows.size(); ++r) {
      if (!active[r]) continue;
      if (rows[r].entries.empty()) {
        active[r] = false;
        continue;
      }
      if (rows[r].entries.size() < best_nnz) {
        best_nnz = rows[r].entries.size();
        best_r = static_cast<int>(r);
      }
    }
    if (best_r < 0) break;
    int best_c = -1, best_cc = INT_MAX;
    for (const auto& [c, v] : rows[best_r].entries) {
      if (colcnt[c] < best_cc) {
        best_cc = colcnt[c];
        best_c = c;
      }
    }

    WorkRow& prow = rows[best_r];
    // true value of the pivot row at this step: stored * p_{step-1}/p_{t}
    Qi scale_p(1);
    if (step > 0 && prow.last_step < step - 1) {
      scale_p = pivots[step - 1] /
                (prow.last_step < 0 ? Qi(1) : pivots[prow.last_step]);
    } else if (step > 0 && prow.last_step == step - 1) {
      scale_p = Qi(1);
    } else if (step == 0) {
      scale_p = Qi(1);
    }
    if (!(scale_p == Qi(1)))
      for (auto& [c, v] : prow.entries) v *= scale_p;
    prow.last_step = step - 1;  // now at stage step-1 truth

    Qi p = prow.entries.at(best_c);
    Qi prev = step == 0 ? Qi(1) : pivots[step == 0 ? 0 : step - 1];

    for (size_t r = 0; r < rows.size(); ++r) {
      if (!active[r] || static_cast<int>(r) == best_r) continue;
      auto it = rows[r].entries.find(best_c);
      if (it == rows[r].entries.end()) continue;  // deferred scaling
      WorkRow& row = rows[r];
      // materialize to stage step-1 truth
      Qi scale(1);
      if (row.last_step < step - 1)
        scale = (step == 0 ? Qi(1) : pivots[step - 1]) /
                (row.last_step < 0 ? Qi(1) : pivots[row.last_step]);
      if (!(scale == Qi(1)))
        for (auto& [c, v] : row.entries) v *= scale;
      Qi f = row.entries.at(best_c);
      // row <- (p*row - f*prow)/prev
      std::map<int, Qi> next;
      for (const auto& [c, v] : row.entries) {
        if (c == best_c) continue;
        Qi nv = v * p;
        auto pit = prow.entries.find(c);
        if (pit != prow.entries.end()) nv -= f * pit->second;
        if (!nv.is_zero())
          next[c] = nv / prev;
        else
          colcnt[c]--;
      }
      for (const auto& [c, pv] : prow.entries) {
        if (c == best_c || row.entries.count(c)) continue;
        Qi nv = -(f * pv);
        if (!nv.is_zero()) {
          next[c] = nv / prev;
          colcnt[c]++;
        }
      }
      colcnt[best_c]--;
      row.entries = std::move(next);
      row.last_step = step;
      if (row.entries.empty()) active[r] = false;
    }

    pivots.push_back(p);
    out.rows.emplace_back(best_c, prow.entries);
    out.pivot_cols.push_back(best_c);
    out.pivot_rows.push_back(prow.orig);
    for (const auto& [c, v] : prow.entries) colcnt[c]--;
    active[best_r] = false;
    out.rank++;
  }
  return out;
}

int rank_gauss_oracle(const SparseMap& m) {
  // dense field elimination, first nonzero pivot
  int nr = m.tgt()->dim(), nc = m.src()->dim();
  std::vector<std::vector<Qi>> a(nr, std::vector<Qi>(nc, Qi(0)));
  for (int j = 0; j < nc; ++j)
    for (const auto& [i, v] : m.col(j)) a[i][j] = v;
  int rank = 0;
  for (int c = 0; c < nc && rank < nr; ++c) {
    int piv = -1;
    for (int r = rank; r < nr; ++r)
      if (!a[r][c].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[rank], a[piv]);
    Qi inv = Qi(1) / a[rank][c];
    for (int j = c; j < nc; ++j) a[rank][j] *= inv;
    for (int r = 0; r < nr; ++r) {
      if (r == rank || a[r][c].is_zero()) continue;
      Qi f = a[r][c];
      for (int j = c; j < nc; ++j) a[r][j] -= f * a[rank][j];
    }
    rank++;
  }
  return rank;
}

int rank(const SparseMap& m) { return eliminate(m).rank; }

std::vector<DenseVec> kernel_basis(const SparseMap& m) {
  Elimination e = eliminate(m);
  int n = m.src()->dim();
  std::set<int> piv(e.pivot_cols.begin(), e.pivot_cols.end());
  std::vector<DenseVec> out;
  for (int f = 0; f < n; ++f) {
    if (piv.count(f)) continue;
    DenseVec x(n, Qi(0));
    x[f] = Qi(1);
    for (int k = static_cast<int>(e.rows.size()) - 1; k >= 0; --k) {
      const auto& [c, row] = e.rows[k];
      Qi s(0);
      for (const auto& [j, v] : row) {
        if (j == c) continue;
        if (!x[j].is_zero()) s += v * x[j];
      }
      x[c] = -s / row.at(c);
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<int> cokernel_rep_indices(const SparseMap& m) {
  Elimination e = eliminate(m.transposed());
  std::set<int> piv(e.pivot_cols.begin(), e.pivot_cols.end());
  std::vector<int> out;
  for (int i = 0; i < m.tgt()->dim(); ++i)
    if (!piv.count(i)) out.push_back(i);
  return out;
}

namespace {

SpacePtr free_space(int n, const std::string& name) {
  auto s = std::make_shared<GradedSpace>(name);
  for (int i = 0; i < n; ++i) s->add(name + std::to_string(i), Bidegree{0, 0});
  return s;
}

}  // namespace

int image_intersection_dim(const SparseMap& m, const std::vector<int>& window) {
  int nw = static_cast<int>(window.size());
  auto aug_src = free_space(m.src()->dim() + nw, "aug");
  SparseMap aug(aug_src, m.tgt(), Bidegree{0, 0}, false);
  for (int j = 0; j < m.src()->dim(); ++j)
    for (const auto& [i, v] : m.col(j)) aug.set(i, j, v);
  for (int k = 0; k < nw; ++k) aug.set(window[k], m.src()->dim() + k, Qi(1));
  int r_aug = rank(aug);
  int r_m = rank(m);
  return r_m + nw - r_aug;
}

bool in_image_span(const SparseMap& m, const std::vector<DenseVec>& extra,
                   const DenseVec& v) {
  int n0 = m.src()->dim();
  int ne = static_cast<int>(extra.size());
  auto s1 = free_space(n0 + ne, "aug");
  SparseMap a(s1, m.tgt(), Bidegree{0, 0}, false);
  for (int j = 0; j < n0; ++j)
    for (const auto& [i, val] : m.col(j)) a.set(i, j, val);
  for (int k = 0; k < ne; ++k)
    for (int i = 0; i < m.tgt()->dim(); ++i)
      if (!extra[k][i].is_zero()) a.set(i, n0 + k, extra[k][i]);
  int r0 = rank(a);
  auto s2 = free_space(n0 + ne + 1, "aug2");
  SparseMap b(s2, m.tgt(), Bidegree{0, 0}, false);
  for (int j = 0; j < n0 + ne; ++j)
    for (const auto& [i, val] : a.col(j)) b.set(i, j, val);
  for (int i = 0; i < m.tgt()->dim(); ++i)
    if (!v[i].is_zero()) b.set(i, n0 + ne, v[i]);
  return rank(b) == r0;
}

SparseMap apply_to_columns(const SparseMap& m, const std::vector<DenseVec>& vecs,
                           SpacePtr col_space) {
  SparseMap out(col_space, m.tgt(), Bidegree{0, 0}, false);
  for (int k = 0; k < static_cast<int>(vecs.size()); ++k) {
    for (int j = 0; j < m.src()->dim(); ++j) {
      if (vecs[k][j].is_zero()) continue;
      for (const auto& [i, v] : m.col(j)) out.add_to(i, k, v * vecs[k][j]);
    }
  }
  return out;
}

}  // namespace pbv
