#include "pbv/forms.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/core.h>

namespace pbv {

Chart::LetterKind Chart::kind(int l) const {
  if (l < real_coords) return LetterKind::Real;
  if (l < real_coords + complex_pairs) return LetterKind::Holo;
  return LetterKind::Anti;
}

int Chart::pair_of(int l) const {
  if (l < real_coords) return -1;
  return (l - real_coords) % complex_pairs;
}

std::string Chart::letter_name(int l) const {
  switch (kind(l)) {
    case LetterKind::Real:
      return fmt::format("x{}", l + 1);
    case LetterKind::Holo:
      return fmt::format("z{}", pair_of(l) + 1);
    default:
      return fmt::format("zb{}", pair_of(l) + 1);
  }
}

Weight Chart::letter_weight(int l) const {
  Weight w = weight_zero();
  switch (kind(l)) {
    case LetterKind::Real:
      break;
    case LetterKind::Holo:
      w[pair_of(l)] = 2;
      break;
    case LetterKind::Anti:
      w[pair_of(l)] = -2;
      break;
  }
  return w;
}

Weight Chart::mono_weight(const std::vector<int>& mono) const {
  Weight w = weight_zero();
  for (int l = 0; l < static_cast<int>(mono.size()); ++l) {
    Weight lw = letter_weight(l);
    for (int s = 0; s < kWeightSlots; ++s) w[s] += mono[l] * lw[s];
  }
  return w;
}

// ---- Exterior ---------------------------------------------------------------

namespace {

void gen_subsets(int n, int k, int start, FormMono& cur,
                 std::vector<FormMono>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int l = start; l < n; ++l) {
    cur.push_back(l);
    gen_subsets(n, k, l + 1, cur, out);
    cur.pop_back();
  }
}

// sign of merging sorted disjoint subsets [a, b] into sorted order
int merge_sign(const FormMono& a, const FormMono& b) {
  int inv = 0;
  for (int x : a)
    for (int y : b)
      if (x > y) ++inv;
  return (inv % 2) ? -1 : 1;
}

}  // namespace

Exterior::Exterior(Chart chart)
    : chart_(chart), real_model_{chart.real_dim(), 0} {
  dens_ = trivial_space("vol");
}

void Exterior::ensure(int k) const {
  if (k < 0 || k > chart_.letters()) return;
  if (lambda_.count(k)) return;
  std::vector<FormMono> ms;
  FormMono cur;
  gen_subsets(chart_.letters(), k, 0, cur, ms);
  auto sp = std::make_shared<GradedSpace>(fmt::format("L{}", k));
  for (int idx = 0; idx < static_cast<int>(ms.size()); ++idx) {
    std::string label;
    Weight w = weight_zero();
    if (ms[idx].empty()) label = "1";
    for (int l : ms[idx]) {
      if (!label.empty() && label != "1") label += "^";
      if (label == "1") label.clear();
      label += "d" + chart_.letter_name(l);
      w = w + chart_.letter_weight(l);
    }
    sp->add(label, Bidegree{k, 0}, w);
    index_[k][ms[idx]] = idx;
  }
  lambda_[k] = sp;
  monos_[k] = std::move(ms);
}

SpacePtr Exterior::lambda(int k) const {
  if (k < 0 || k > chart_.letters()) {
    auto empty = std::make_shared<GradedSpace>(fmt::format("L{}", k));
    return empty;
  }
  ensure(k);
  return lambda_.at(k);
}

const std::vector<FormMono>& Exterior::monos(int k) const {
  ensure(k);
  static const std::vector<FormMono> kEmpty;
  if (!monos_.count(k)) return kEmpty;
  return monos_.at(k);
}

int Exterior::mono_index(int k, const FormMono& m) const {
  ensure(k);
  auto it = index_.at(k).find(m);
  return it == index_.at(k).end() ? -1 : it->second;
}

std::pair<int, int> Exterior::wedge_letter(int k, int mono_idx, int letter) const {
  const FormMono& m = monos(k)[mono_idx];
  if (std::binary_search(m.begin(), m.end(), letter)) return {0, -1};
  int below = 0;
  FormMono nm;
  nm.reserve(m.size() + 1);
  for (int l : m) {
    if (l < letter) ++below;
    nm.push_back(l);
  }
  nm.insert(std::lower_bound(nm.begin(), nm.end(), letter), letter);
  int sign = (below % 2) ? -1 : 1;
  return {sign, mono_index(k + 1, nm)};
}

std::pair<int, int> Exterior::contract_letter(int k, int mono_idx,
                                              int letter) const {
  const FormMono& m = monos(k)[mono_idx];
  auto it = std::find(m.begin(), m.end(), letter);
  if (it == m.end()) return {0, -1};
  int pos = static_cast<int>(it - m.begin());
  FormMono nm;
  for (int l : m)
    if (l != letter) nm.push_back(l);
  int sign = (pos % 2) ? -1 : 1;
  return {sign, mono_index(k - 1, nm)};
}

SparseMap Exterior::wedge_by(
    int k, const std::vector<std::pair<FormMono, Qi>>& form) const {
  int kk = k;
  int dk = form.empty() ? 0 : static_cast<int>(form[0].first.size());
  SparseMap out(lambda(k), lambda(k + dk), Bidegree{dk, 0}, false);
  for (int mi = 0; mi < static_cast<int>(monos(kk).size()); ++mi) {
    const FormMono& m = monos(kk)[mi];
    for (const auto& [s, c] : form) {
      // s ^ m
      bool overlap = false;
      for (int l : s)
        if (std::binary_search(m.begin(), m.end(), l)) overlap = true;
      if (overlap) continue;
      FormMono merged;
      merged.reserve(s.size() + m.size());
      std::merge(s.begin(), s.end(), m.begin(), m.end(),
                 std::back_inserter(merged));
      int sign = merge_sign(s, m);
      out.add_to(mono_index(k + dk, merged), mi, c * Qi(sign));
    }
  }
  return out;
}

SparseMap Exterior::contraction(int k, const std::vector<Qi>& covec) const {
  SparseMap out(lambda(k), lambda(k - 1), Bidegree{-1, 0}, false);
  for (int mi = 0; mi < static_cast<int>(monos(k).size()); ++mi) {
    for (int l = 0; l < chart_.letters(); ++l) {
      if (covec[l].is_zero()) continue;
      auto [sg, ni] = contract_letter(k, mi, l);
      if (sg) out.add_to(ni, mi, covec[l] * Qi(sg));
    }
  }
  return out;
}

SparseMap Exterior::substitution(
    int k, const Chart& src, const Chart& tgt,
    const std::vector<std::vector<std::pair<int, Qi>>>& rules) const {
  Exterior te(tgt);
  SparseMap out(lambda(k), te.lambda(k), Bidegree{0, 0}, false);
  // NOTE: out's target space is a fresh copy; callers compose immediately.
  const auto& ms = monos(k);
  (void)src;
  for (int mi = 0; mi < static_cast<int>(ms.size()); ++mi) {
    // expand product over letters of the monomial
    std::map<FormMono, Qi> acc;
    acc[{}] = Qi(1);
    for (int l : ms[mi]) {
      std::map<FormMono, Qi> next;
      for (const auto& [partial, c] : acc) {
        for (const auto& [tl, rc] : rules[l]) {
          if (std::binary_search(partial.begin(), partial.end(), tl)) continue;
          int above = 0;
          for (int p : partial)
            if (p > tl) ++above;
          FormMono np = partial;
          np.insert(std::lower_bound(np.begin(), np.end(), tl), tl);
          Qi add = c * rc * Qi((above % 2) ? -1 : 1);
          auto it = next.find(np);
          if (it == next.end())
            next[np] = add;
          else {
            it->second += add;
            if (it->second.is_zero()) next.erase(it);
          }
        }
      }
      acc = std::move(next);
    }
    for (const auto& [mono, c] : acc) {
      int idx = te.mono_index(k, mono);
      out.add_to(idx, mi, c);
    }
  }
  return out;
}

SparseMap Exterior::to_real(int k) const {
  std::vector<std::vector<std::pair<int, Qi>>> rules(chart_.letters());
  int r = chart_.real_coords, c = chart_.complex_pairs;
  for (int l = 0; l < chart_.letters(); ++l) {
    switch (chart_.kind(l)) {
      case Chart::LetterKind::Real:
        rules[l] = {{l, Qi(1)}};
        break;
      case Chart::LetterKind::Holo: {
        int a = chart_.pair_of(l);
        rules[l] = {{r + 2 * a, Qi(1)}, {r + 2 * a + 1, Qi::i()}};
        break;
      }
      case Chart::LetterKind::Anti: {
        int a = chart_.pair_of(l);
        rules[l] = {{r + 2 * a, Qi(1)}, {r + 2 * a + 1, -Qi::i()}};
        break;
      }
    }
  }
  (void)c;
  return substitution(k, chart_, real_model_, rules);
}

SparseMap Exterior::from_real(int k) const {
  Exterior re(real_model_);
  std::vector<std::vector<std::pair<int, Qi>>> rules(real_model_.letters());
  int r = chart_.real_coords, c = chart_.complex_pairs;
  Qi half = Qi::frac(1, 2);
  Qi mhalf_i = Qi(Rat(0), Rat(-1, 2));  // -i/2
  Qi phalf_i = Qi(Rat(0), Rat(1, 2));   // +i/2
  for (int l = 0; l < r; ++l) rules[l] = {{l, Qi(1)}};
  for (int a = 0; a < c; ++a) {
    int zl = r + a, zbl = r + c + a;
    rules[r + 2 * a] = {{zl, half}, {zbl, half}};
    rules[r + 2 * a + 1] = {{zl, mhalf_i}, {zbl, phalf_i}};
  }
  return re.substitution(k, real_model_, chart_, rules);
}

SparseMap Exterior::star(int k) const {
  int D = chart_.letters();
  if (chart_.is_real()) {
    SparseMap out(lambda(k), lambda(D - k), Bidegree{D - 2 * k, 0}, false);
    for (int mi = 0; mi < static_cast<int>(monos(k).size()); ++mi) {
      const FormMono& m = monos(k)[mi];
      FormMono comp;
      int ptr = 0;
      for (int l = 0; l < D; ++l) {
        if (ptr < static_cast<int>(m.size()) && m[ptr] == l) {
          ++ptr;
          continue;
        }
        comp.push_back(l);
      }
      int sign = merge_sign(m, comp);
      out.set(mono_index(D - k, comp), mi, Qi(sign));
    }
    return out;
  }
  Exterior re(real_model_);
  SparseMap s = re.star(k);
  return from_real(D - k)
      .compose(s)
      .compose(to_real(k))
      .with_spaces(lambda(k), lambda(D - k), Bidegree{D - 2 * k, 0});
}

SparseMap Exterior::lefschetz(int k) const {
  std::vector<std::pair<FormMono, Qi>> form;
  if (chart_.is_real()) {
    if (chart_.real_coords % 2 != 0)
      throw std::invalid_argument("lefschetz: odd-dimensional real chart");
    for (int a = 0; 2 * a + 1 < chart_.real_coords; ++a)
      form.push_back({{2 * a, 2 * a + 1}, Qi(1)});
  } else {
    int r = chart_.real_coords, c = chart_.complex_pairs;
    for (int a = 0; a < c; ++a)
      form.push_back({{r + a, r + c + a}, Qi(Rat(0), Rat(1, 2))});
  }
  return wedge_by(k, form);
}

SparseMap Exterior::dual_lefschetz(int k) const {
  if (chart_.is_real()) {
    SparseMap out(lambda(k), lambda(k - 2), Bidegree{-2, 0}, false);
    for (int a = 0; 2 * a + 1 < chart_.real_coords; ++a) {
      std::vector<Qi> c1(chart_.letters(), Qi(0)), c2 = c1;
      c1[2 * a] = Qi(1);
      c2[2 * a + 1] = Qi(1);
      out = out + contraction(k - 1, c2).compose(contraction(k, c1));
    }
    return out;
  }
  Exterior re(real_model_);
  return from_real(k - 2)
      .compose(re.dual_lefschetz(k))
      .compose(to_real(k))
      .with_spaces(lambda(k), lambda(k - 2), Bidegree{-2, 0});
}

SparseMap Exterior::top_coefficient() const {
  int D = chart_.letters();
  SparseMap out(lambda(D), dens_, Bidegree{-D, 0}, false);
  if (chart_.is_real()) {
    out.set(0, 0, Qi(1));
    return out;
  }
  Exterior re(real_model_);
  SparseMap tr = to_real(D);
  out.set(0, 0, tr.get(0, 0));
  return out;
}

// ---- fiber pieces -----------------------------------------------------------

namespace {

// group indices of a space by weight
std::map<Weight, std::vector<int>> weight_classes(const GradedSpace& s) {
  std::map<Weight, std::vector<int>> out;
  for (int i = 0; i < s.dim(); ++i) out[s.at(i).wt].push_back(i);
  return out;
}

FiberPiece monomial_piece(const Exterior& ext, int k,
                          const std::vector<int>& mono_ids,
                          const std::string& tag) {
  auto amb = ext.lambda(k);
  auto sp = std::make_shared<GradedSpace>(tag);
  for (int idx : mono_ids) {
    const auto& b = amb->at(idx);
    sp->add(b.label, b.bd, b.wt);
  }
  SparseMap sec(sp, amb, Bidegree{0, 0}, false);
  SparseMap proj(amb, sp, Bidegree{0, 0}, false);
  for (int j = 0; j < static_cast<int>(mono_ids.size()); ++j) {
    sec.set(mono_ids[j], j, Qi(1));
    proj.set(j, mono_ids[j], Qi(1));
  }
  return FiberPiece{sp, sec, proj, k};
}

// piece from a kernel: subspace ker(op) with projection along ker(op2)=complement
FiberPiece kernel_piece(const Exterior& ext, int k, const SparseMap& op,
                        const SparseMap& complement_proj_kill,
                        const std::string& tag) {
  // section: per-weight-class kernel of op; projection computed from the
  // idempotent complement_proj_kill (assumed to be the idempotent with image
  // = ker(op)); caller guarantees the decomposition.
  auto amb = ext.lambda(k);
  auto classes = weight_classes(*amb);
  auto sp = std::make_shared<GradedSpace>(tag);
  std::vector<DenseVec> vecs;
  for (const auto& [w, idxs] : classes) {
    SparseMap sub = op.restricted(
        [&] {
          std::vector<int> all;
          for (int i = 0; i < op.tgt()->dim(); ++i) all.push_back(i);
          return all;
        }(),
        idxs);
    auto ker = kernel_basis(sub);
    for (const auto& kv : ker) {
      DenseVec full(amb->dim(), Qi(0));
      for (int j = 0; j < static_cast<int>(idxs.size()); ++j) full[idxs[j]] = kv[j];
      vecs.push_back(std::move(full));
      sp->add(fmt::format("{}#{}", tag, vecs.size() - 1), Bidegree{k, 0}, w);
    }
  }
  SparseMap sec(sp, amb, Bidegree{0, 0}, false);
  for (int j = 0; j < static_cast<int>(vecs.size()); ++j)
    for (int i = 0; i < amb->dim(); ++i)
      if (!vecs[j][i].is_zero()) sec.set(i, j, vecs[j][i]);
  // projection: coordinates of the idempotent in the section basis: solve
  // sec * X = idempotent (exact, column by column)
  // build [sec | idempotent] and eliminate: use dense solve via inverse of
  // a full-rank row subset of sec.
  Elimination e = eliminate(sec.transposed());
  // pivot columns of sec^T = row indices where sec has independent rows
  std::vector<int> rows = e.pivot_cols;
  std::vector<int> allcols;
  for (int j = 0; j < sp->dim(); ++j) allcols.push_back(j);
  SparseMap square = sec.restricted(rows, allcols);
  SparseMap inv = invert_dense(square);
  std::vector<int> allamb;
  for (int i = 0; i < amb->dim(); ++i) allamb.push_back(i);
  SparseMap idem_rows = complement_proj_kill.restricted(rows, allamb);
  SparseMap proj = inv.compose(idem_rows).with_spaces(amb, sp, Bidegree{0, 0});
  return FiberPiece{sp, sec, proj, k};
}

}  // namespace

SparseMap invert_dense(const SparseMap& m) {
  int n = m.src()->dim();
  if (m.tgt()->dim() != n) throw std::invalid_argument("invert_dense: not square");
  std::vector<std::vector<Qi>> a(n, std::vector<Qi>(2 * n, Qi(0)));
  for (int j = 0; j < n; ++j)
    for (const auto& [i, v] : m.col(j)) a[i][j] = v;
  for (int i = 0; i < n; ++i) a[i][n + i] = Qi(1);
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (!a[r][c].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::domain_error("invert_dense: singular");
    std::swap(a[c], a[piv]);
    Qi inv = Qi(1) / a[c][c];
    for (int j = 0; j < 2 * n; ++j) a[c][j] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      Qi f = a[r][c];
      for (int j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  SparseMap out(m.tgt(), m.src(), Bidegree{0, 0}, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!a[i][n + j].is_zero()) out.set(i, j, a[i][n + j]);
  return out;
}

FiberPiece piece_full(const Exterior& ext, int k, const std::string& tag) {
  std::vector<int> ids;
  for (int i = 0; i < ext.lambda(k)->dim(); ++i) ids.push_back(i);
  auto p = monomial_piece(ext, k, ids, tag);
  return p;
}

FiberPiece piece_dolbeault(const Exterior& ext, int p, int q,
                           const std::string& tag, int a) {
  const Chart& ch = ext.chart();
  int k = a + p + q;
  std::vector<int> ids;
  const auto& ms = ext.monos(k);
  for (int i = 0; i < static_cast<int>(ms.size()); ++i) {
    int np = 0, nq = 0, nr = 0;
    for (int l : ms[i]) {
      switch (ch.kind(l)) {
        case Chart::LetterKind::Real:
          ++nr;
          break;
        case Chart::LetterKind::Holo:
          ++np;
          break;
        case Chart::LetterKind::Anti:
          ++nq;
          break;
      }
    }
    if (np == p && nq == q && nr == a) ids.push_back(i);
  }
  return monomial_piece(ext, k, ids, tag);
}

FiberPiece piece_selfdual(const Exterior& ext, int sign_i,
                          const std::string& tag) {
  int D = ext.chart().letters();
  int k = D / 2;
  SparseMap st = ext.star(k);
  SparseMap id = SparseMap::identity(ext.lambda(k));
  // characteristic operator: star -/+ i
  SparseMap op = st.with_spaces(ext.lambda(k), ext.lambda(k), Bidegree{0, 0}) -
                 id.scaled(Qi(Rat(0), Rat(sign_i)));
  // idempotent onto the eigenspace: (1 -/+ i star)/2
  SparseMap idem =
      (id + st.with_spaces(ext.lambda(k), ext.lambda(k), Bidegree{0, 0})
                .scaled(Qi(Rat(0), Rat(-sign_i))))
          .scaled(Qi::frac(1, 2));
  return kernel_piece(ext, k, op, idem, tag);
}

FiberPiece piece_primitive_perp(const Exterior& ext, int p, int q,
                                const std::string& tag) {
  FiberPiece dolb = piece_dolbeault(ext, p, q, tag + "_amb");
  int k = p + q;
  SparseMap lam = ext.dual_lefschetz(k).compose(dolb.section);
  // kernel of dual lefschetz within the (p,q) block
  auto classes = weight_classes(*dolb.space);
  auto sp = std::make_shared<GradedSpace>(tag);
  std::vector<DenseVec> vecs;
  for (const auto& [w, idxs] : classes) {
    std::vector<int> allt;
    for (int i = 0; i < lam.tgt()->dim(); ++i) allt.push_back(i);
    auto ker = kernel_basis(lam.restricted(allt, idxs));
    for (const auto& kv : ker) {
      DenseVec full(dolb.space->dim(), Qi(0));
      for (int j = 0; j < static_cast<int>(idxs.size()); ++j) full[idxs[j]] = kv[j];
      vecs.push_back(std::move(full));
      sp->add(fmt::format("{}#{}", tag, vecs.size() - 1), Bidegree{k, 0}, w);
    }
  }
  // section into ambient Lambda^k
  SparseMap sec_d(sp, dolb.space, Bidegree{0, 0}, false);
  for (int j = 0; j < static_cast<int>(vecs.size()); ++j)
    for (int i = 0; i < dolb.space->dim(); ++i)
      if (!vecs[j][i].is_zero()) sec_d.set(i, j, vecs[j][i]);
  SparseMap sec = dolb.section.compose(sec_d);

  // projection along the image of the Kaehler wedge: build T = [perp | omega image]
  FiberPiece om = piece_omega_image(ext, p, q, tag + "_om_tmp");
  int n = dolb.space->dim();
  if (sp->dim() + om.space->dim() != n)
    throw std::domain_error("piece_primitive_perp: split dimensions mismatch");
  auto tsp = std::make_shared<GradedSpace>(tag + "_T");
  for (int i = 0; i < n; ++i) tsp->add(fmt::format("t{}", i), Bidegree{0, 0});
  SparseMap T(tsp, dolb.space, Bidegree{0, 0}, false);
  for (int j = 0; j < sp->dim(); ++j)
    for (const auto& [i, v] : sec_d.col(j)) T.set(i, j, v);
  SparseMap om_d = dolb.projection.compose(om.section);
  for (int j = 0; j < om.space->dim(); ++j)
    for (const auto& [i, v] : om_d.col(j)) T.set(i, sp->dim() + j, v);
  SparseMap Tinv = invert_dense(T);
  std::vector<int> first_rows;
  for (int i = 0; i < sp->dim(); ++i) first_rows.push_back(i);
  std::vector<int> allc;
  for (int i = 0; i < n; ++i) allc.push_back(i);
  SparseMap proj_d = Tinv.restricted(first_rows, allc).with_spaces(
      dolb.space, sp, Bidegree{0, 0});
  SparseMap proj = proj_d.compose(dolb.projection);
  return FiberPiece{sp, sec, proj, k};
}

FiberPiece piece_omega_image(const Exterior& ext, int p, int q,
                             const std::string& tag) {
  FiberPiece below = piece_dolbeault(ext, p - 1, q - 1, tag + "_b");
  FiberPiece dolb = piece_dolbeault(ext, p, q, tag + "_amb");
  int k = p + q;
  SparseMap L = dolb.projection.compose(ext.lefschetz(k - 2)).compose(below.section);
  // basis of the image: eliminate transpose to find independent columns
  Elimination e = eliminate(L);
  // independent columns = pivot columns of the elimination of L
  std::vector<int> piv = e.pivot_cols;
  std::sort(piv.begin(), piv.end());
  auto sp = std::make_shared<GradedSpace>(tag);
  for (int j = 0; j < static_cast<int>(piv.size()); ++j) {
    // weight of the column: source weight (the Kaehler wedge is weight zero)
    Weight w = below.space->at(piv[j]).wt;
    sp->add(fmt::format("{}#{}", tag, j), Bidegree{k, 0}, w);
  }
  SparseMap sec_cols(sp, dolb.space, Bidegree{0, 0}, false);
  for (int j = 0; j < static_cast<int>(piv.size()); ++j)
    for (const auto& [i, v] : L.col(piv[j])) sec_cols.set(i, j, v);
  SparseMap sec = dolb.section.compose(sec_cols);

  // projection: inverse of T = [omega image | perp] (first block rows)
  SparseMap lam = ext.dual_lefschetz(k).compose(dolb.section);
  std::vector<int> allt;
  for (int i = 0; i < lam.tgt()->dim(); ++i) allt.push_back(i);
  auto classes = weight_classes(*dolb.space);
  std::vector<DenseVec> perp;
  for (const auto& [w, idxs] : classes) {
    auto ker = kernel_basis(lam.restricted(allt, idxs));
    for (const auto& kv : ker) {
      DenseVec full(dolb.space->dim(), Qi(0));
      for (int j = 0; j < static_cast<int>(idxs.size()); ++j) full[idxs[j]] = kv[j];
      perp.push_back(std::move(full));
    }
  }
  int n = dolb.space->dim();
  if (static_cast<int>(piv.size() + perp.size()) != n)
    throw std::domain_error("piece_omega_image: split dimensions mismatch");
  auto tsp = std::make_shared<GradedSpace>(tag + "_T");
  for (int i = 0; i < n; ++i) tsp->add(fmt::format("t{}", i), Bidegree{0, 0});
  SparseMap T(tsp, dolb.space, Bidegree{0, 0}, false);
  for (int j = 0; j < static_cast<int>(piv.size()); ++j)
    for (const auto& [i, v] : sec_cols.col(j)) T.set(i, j, v);
  for (int j = 0; j < static_cast<int>(perp.size()); ++j)
    for (int i = 0; i < n; ++i)
      if (!perp[j][i].is_zero()) T.set(i, static_cast<int>(piv.size()) + j, perp[j][i]);
  SparseMap Tinv = invert_dense(T);
  std::vector<int> first_rows;
  for (int i = 0; i < static_cast<int>(piv.size()); ++i) first_rows.push_back(i);
  std::vector<int> allc;
  for (int i = 0; i < n; ++i) allc.push_back(i);
  SparseMap proj_d = Tinv.restricted(first_rows, allc).with_spaces(
      dolb.space, sp, Bidegree{0, 0});
  SparseMap proj = proj_d.compose(dolb.projection);
  return FiberPiece{sp, sec, proj, k};
}

FiberPiece piece_quotient_mod_letter(const Exterior& ext, int p, int q,
                                     int letter, const std::string& tag) {
  const Chart& ch = ext.chart();
  int k = p + q;
  std::vector<int> ids;
  const auto& ms = ext.monos(k);
  for (int i = 0; i < static_cast<int>(ms.size()); ++i) {
    int np = 0, nq = 0;
    bool has = false;
    for (int l : ms[i]) {
      if (l == letter) has = true;
      if (ch.kind(l) == Chart::LetterKind::Holo) ++np;
      if (ch.kind(l) == Chart::LetterKind::Anti) ++nq;
    }
    if (np == p && nq == q && !has) ids.push_back(i);
  }
  return monomial_piece(ext, k, ids, tag);
}

}  // namespace pbv
