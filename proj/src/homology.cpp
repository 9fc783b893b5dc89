#include "pbv/homology.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <stdexcept>

namespace pbv {

namespace {

struct Rng {
  uint64_t s;
  explicit Rng(uint64_t seed) : s(seed ? seed : 1) {}
  uint64_t next() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
  }
  int small(int lo, int hi) { return lo + static_cast<int>(next() % (hi - lo + 1)); }
};

std::vector<int> all_indices(int n) {
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace

std::vector<std::vector<Rat>> sample_covectors(int real_dim, int n_random,
                                               uint64_t seed) {
  std::vector<std::vector<Rat>> out;
  for (int a = 0; a < real_dim; ++a) {
    std::vector<Rat> axis(real_dim, Rat(0));
    axis[a] = Rat(1);
    out.push_back(axis);
  }
  Rng rng(seed);
  while (static_cast<int>(out.size()) < real_dim + n_random) {
    std::vector<Rat> xi(real_dim);
    bool nonzero = false;
    for (int a = 0; a < real_dim; ++a) {
      xi[a] = Rat(rng.small(-5, 5), rng.small(1, 3));
      if (xi[a] != 0) nonzero = true;
    }
    if (nonzero) out.push_back(xi);
  }
  return out;
}

std::vector<Qi> letter_covector(const Chart& chart,
                                const std::vector<Rat>& xi) {
  if (static_cast<int>(xi.size()) != chart.real_dim())
    throw std::invalid_argument("letter_covector: dimension mismatch");
  std::vector<Qi> out(chart.letters());
  int r = chart.real_coords;
  for (int l = 0; l < chart.letters(); ++l) {
    switch (chart.kind(l)) {
      case Chart::LetterKind::Real:
        out[l] = Qi(xi[l]);
        break;
      case Chart::LetterKind::Holo: {
        int a = chart.pair_of(l);
        out[l] = Qi(xi[r + 2 * a] / 2, -xi[r + 2 * a + 1] / 2);
        break;
      }
      case Chart::LetterKind::Anti: {
        int a = chart.pair_of(l);
        out[l] = Qi(xi[r + 2 * a] / 2, xi[r + 2 * a + 1] / 2);
        break;
      }
    }
  }
  return out;
}

SymbolCertificate symbol_exactness(const Chart& chart, const ConstCoeffOp& q,
                                   int n_random, uint64_t seed) {
  SymbolCertificate cert;
  cert.samples = 0;
  cert.seed = seed;
  cert.square_zero = q.compose(q).is_zero();
  cert.exact = true;

  const SpacePtr& fib = q.src();
  std::vector<int> degrees = fib->degrees_present();
  std::vector<int> rows = all_indices(fib->dim());
  std::map<int, std::vector<int>> slices;
  for (int k : degrees) slices[k] = fib->degree_slice(k);

  for (const auto& xi : sample_covectors(chart.real_dim(), n_random, seed)) {
    SparseMap s = q.symbol_at(letter_covector(chart, xi));
    std::map<int, int> rk;
    for (int k : degrees) rk[k] = rank(s.restricted(rows, slices[k]));
    for (int k : degrees) {
      int want = static_cast<int>(slices[k].size());
      int got = rk[k] + (rk.count(k - 1) ? rk[k - 1] : 0);
      if (got != want) {
        cert.exact = false;
        if (cert.failure.empty())
          cert.failure = fmt::format("degree {}: rank sum {} of {} at sample {}",
                                     k, got, want, cert.samples);
      }
    }
    ++cert.samples;
  }
  return cert;
}

CohomologyReport window_cohomology(const Chart& chart, const ConstCoeffOp& q,
                                   int N, int margin) {
  CohomologyReport rep;
  rep.N = N;
  rep.margin = margin > 0 ? margin : std::max(1, q.max_order());
  if (N <= rep.margin)
    throw std::invalid_argument("window_cohomology: window too small");

  Window w = make_window(chart, q.src(), N, "window");
  SparseMap d = window_matrix(q, w, w);
  std::vector<int> rows = all_indices(w.space->dim());
  std::vector<int> degrees = q.src()->degrees_present();

  std::map<int, int> rank_full;
  for (int k : degrees)
    rank_full[k] = rank(d.restricted(rows, w.slice(k, N)));

  int euler_space = 0, euler_h = 0;
  for (int k : degrees) {
    int full_k = static_cast<int>(w.slice(k, N).size());
    int hf = full_k - rank_full[k] - (rank_full.count(k - 1) ? rank_full[k - 1] : 0);
    rep.full_dims[k] = hf;
    euler_space += (k % 2 ? -1 : 1) * full_k;
    euler_h += (k % 2 ? -1 : 1) * hf;

    std::vector<int> int_k = w.slice(k, N - rep.margin);
    int rank_int = rank(d.restricted(rows, int_k));
    int ker_i = static_cast<int>(int_k.size()) - rank_int;
    int im_i = 0;
    if (std::count(degrees.begin(), degrees.end(), k - 1))
      im_i = image_intersection_dim(d.restricted(rows, w.slice(k - 1, N)), int_k);
    rep.interior_dims[k] = ker_i - im_i;
  }
  rep.euler_consistent = (euler_space == euler_h);
  return rep;
}

ConstCoeffOp cone(const ConstCoeffOp& qa, const ConstCoeffOp& qb,
                  const ConstCoeffOp& f) {
  if (f.letters() != qa.letters() || f.letters() != qb.letters())
    throw std::invalid_argument("cone: letter mismatch");
  if (f.src()->dim() != qa.src()->dim() || f.tgt()->dim() != qb.src()->dim())
    throw std::invalid_argument("cone: fiber mismatch");
  auto ashift = qa.src()->shifted(-1, "'");
  auto fib = GradedSpace::direct_sum(*ashift, *qb.src());
  int da = ashift->dim();
  ConstCoeffOp out(f.letters(), fib, fib, Bidegree{1, 0});

  std::map<Mono, SparseMap> terms;
  auto slot = [&](const Mono& m) -> SparseMap& {
    auto it = terms.find(m);
    if (it == terms.end())
      it = terms.emplace(m, SparseMap(fib, fib, Bidegree{1, 0}, false)).first;
    return it->second;
  };
  for (const auto& [m, mat] : qa.terms())
    for (int j = 0; j < qa.src()->dim(); ++j)
      for (const auto& [i, v] : mat.col(j)) slot(m).add_to(i, j, Qi(0) - v);
  for (const auto& [m, mat] : f.terms())
    for (int j = 0; j < f.src()->dim(); ++j)
      for (const auto& [i, v] : mat.col(j)) slot(m).add_to(da + i, j, v);
  for (const auto& [m, mat] : qb.terms())
    for (int j = 0; j < qb.src()->dim(); ++j)
      for (const auto& [i, v] : mat.col(j)) slot(m).add_to(da + i, da + j, v);
  for (const auto& [m, mat] : terms) out.add_term(m, mat);
  return out;
}

ConstCoeffOp kernel_subcomplex(const ConstCoeffOp& qa, const ConstCoeffOp& f) {
  if (f.max_order() > 0)
    throw std::invalid_argument("kernel_subcomplex: map has derivative terms");
  SparseMap f0 = SparseMap::zero(f.src(), f.tgt(), f.bidegree());
  if (!f.terms().empty()) f0 = f.terms().begin()->second;
  if (rank(f0) != f.tgt()->dim())
    throw std::invalid_argument("kernel_subcomplex: map not fiberwise onto");

  std::vector<DenseVec> kb = kernel_basis(f0);
  auto ksp = std::make_shared<GradedSpace>("ker(" + f.src()->name() + ")");
  if (kb.empty()) return ConstCoeffOp(qa.letters(), ksp, ksp, qa.bidegree());
  for (size_t n = 0; n < kb.size(); ++n) {
    // each kernel vector is homogeneous (the matrix is block diagonal in
    // degree and weight)
    int lead = -1;
    for (int i = 0; i < f.src()->dim(); ++i)
      if (!kb[n][i].is_zero()) {
        if (lead < 0) lead = i;
        if (f.src()->at(i).bd != f.src()->at(lead).bd ||
            f.src()->at(i).wt != f.src()->at(lead).wt)
          throw std::logic_error("kernel_subcomplex: mixed kernel vector");
      }
    ksp->add(fmt::format("ker{}", n), f.src()->at(lead).bd, f.src()->at(lead).wt);
  }
  SpacePtr kspace = ksp;
  SparseMap e = apply_to_columns(SparseMap::identity(f.src()), kb, kspace);

  // left inverse of the section from its pivot rows
  Elimination el = eliminate(e);
  if (el.rank != static_cast<int>(kb.size()))
    throw std::logic_error("kernel_subcomplex: dependent kernel basis");
  std::vector<int> prows = el.pivot_rows;
  std::sort(prows.begin(), prows.end());
  std::vector<int> kcols = all_indices(kspace->dim());
  SparseMap p = invert_dense(e.restricted(prows, kcols));

  ConstCoeffOp out(qa.letters(), kspace, kspace, qa.bidegree());
  for (const auto& [m, mat] : qa.terms()) {
    SparseMap de = mat.compose(e);
    SparseMap c = p.compose(de.restricted(prows, kcols))
                      .with_spaces(kspace, kspace, qa.bidegree());
    if ((e.compose(c) - de).is_zero() == false)
      throw std::invalid_argument("kernel_subcomplex: kernel not preserved");
    if (!c.is_zero()) out.add_term(m, c);
  }
  return out;
}

QuasiIsoReport quasi_iso_check(const Chart& chart, const ConstCoeffOp& qa,
                               const ConstCoeffOp& qb, const ConstCoeffOp& f,
                               int window_n, uint64_t seed) {
  QuasiIsoReport rep;
  rep.chain_map = (f.compose(qa) - qb.compose(f)).is_zero();
  if (!rep.chain_map) return rep;

  ConstCoeffOp target;
  bool have = false;
  if (f.max_order() == 0) {
    try {
      target = kernel_subcomplex(qa, f);
      rep.used_kernel_route = true;
      have = true;
    } catch (const std::invalid_argument&) {
    }
  }
  if (!have) target = cone(qa, qb, f);

  if (target.src()->dim() == 0) {
    // kernel is the zero complex: nothing to certify
    rep.symbol.square_zero = true;
    rep.symbol.exact = true;
    rep.window.euler_consistent = true;
    rep.ok = true;
    return rep;
  }
  rep.symbol = symbol_exactness(chart, target, 20, seed);
  rep.window = window_cohomology(chart, target, window_n, 0);
  rep.ok = rep.symbol.ok() && rep.window.interior_trivial();
  return rep;
}

SheafDetection constant_sheaf_detect(const Chart& chart, const ConstCoeffOp& q,
                                     int N, int margin) {
  SheafDetection det;
  det.report = window_cohomology(chart, q, N, margin);

  int k0 = 0, nonzero = 0;
  for (const auto& [k, n] : det.report.interior_dims)
    if (n) {
      ++nonzero;
      k0 = k;
      if (n != 1) return det;
    }
  if (nonzero != 1) return det;

  // constant sections at degree k0 killed by the order-zero part
  const SpacePtr& fib = q.src();
  std::vector<int> slice = fib->degree_slice(k0);
  SparseMap d0 = SparseMap::zero(fib, fib, q.bidegree());
  Mono z = mono_zero(q.letters());
  if (q.terms().count(z)) d0 = q.terms().at(z);
  std::vector<DenseVec> consts =
      kernel_basis(d0.restricted(all_indices(fib->dim()), slice));

  Window w = make_window(chart, fib, N, "window");
  SparseMap d = window_matrix(q, w, w);
  std::vector<int> rows = all_indices(w.space->dim());
  SparseMap dkm1 = d.restricted(rows, w.slice(k0 - 1, N));
  Mono zero = mono_zero(chart.letters());
  for (const auto& kv : consts) {
    DenseVec v(w.space->dim(), Qi(0));
    int lead = -1;
    for (size_t t = 0; t < kv.size(); ++t)
      if (!kv[t].is_zero()) {
        int fi = slice[t];
        v[w.index_of(zero, fi)] = kv[t];
        if (lead < 0) lead = fi;
      }
    if (lead < 0) continue;
    if (!in_image_span(dkm1, {}, v)) {
      det.is_constant_sheaf = true;
      det.degree = k0;
      det.weight = fib->at(lead).wt;
      det.witness = fib->at(lead).label;
      return det;
    }
  }
  return det;
}

}  // namespace pbv
