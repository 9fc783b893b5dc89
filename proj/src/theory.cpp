#include "pbv/theory.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pbv/spinors.hpp"

namespace pbv {

namespace {

// merge a sorted letter subset into an accumulator, tracking the wedge sign;
// returns 0 and leaves acc untouched when the subsets intersect
int merge_into(FormMono& acc, const FormMono& add) {
  int inv = 0;
  for (int s : acc)
    for (int t : add) {
      if (s == t) return 0;
      if (s > t) ++inv;
    }
  FormMono merged;
  merged.reserve(acc.size() + add.size());
  std::merge(acc.begin(), acc.end(), add.begin(), add.end(),
             std::back_inserter(merged));
  acc = std::move(merged);
  return inv % 2 ? -1 : 1;
}

SpacePtr plain_space(int n, const std::string& prefix) {
  auto g = std::make_shared<GradedSpace>(prefix);
  for (int i = 0; i < n; ++i)
    g->add(prefix + std::to_string(i), Bidegree{0, 0});
  return g;
}

std::string mono_string(const Chart& chart, const Mono& m) {
  std::string s;
  for (int l = 0; l < static_cast<int>(m.size()); ++l)
    for (int k = 0; k < m[l]; ++k) s += "d/d" + chart.letter_name(l) + " ";
  return s;
}

std::string op_witness(const Chart& chart, const ConstCoeffOp& op) {
  for (const auto& [m, mat] : op.terms())
    for (int j = 0; j < op.src()->dim(); ++j)
      for (const auto& [i, c] : mat.col(j))
        if (!c.is_zero())
          return op.tgt()->at(i).label + " <- " + mono_string(chart, m) +
                 op.src()->at(j).label + " : " + c.str();
  return "";
}

std::string density_witness(const Chart& chart, const BilinearDensity& d) {
  for (const auto& [tk, blk] : d.terms())
    for (const auto& [ij, c] : blk)
      if (!c.is_zero())
        return "(" + mono_string(chart, tk.first) +
               d.left()->at(ij.first).label + ", " +
               mono_string(chart, tk.second) +
               d.right()->at(ij.second).label + ") = " + c.str();
  return "";
}

std::map<int, int> drop_zeros(const std::map<int, int>& m) {
  std::map<int, int> out;
  for (const auto& [k, v] : m)
    if (v) out[k] = v;
  return out;
}

std::string vsuffix(const PairedValueSpace& w) {
  return w.dim() == 1 ? "" : "[" + std::to_string(w.dim()) + "]";
}

// every unordered summand pair produces one candidate block under the given
// derivative/middle pattern; empties are dropped
std::vector<std::pair<std::string, BilinearDensity>> candidate_blocks(
    const FormBundle& b, const std::vector<int>& deriv,
    const std::vector<std::pair<FormMono, Qi>>& middle,
    const std::function<Qi(int, int)>& value_pairing, Bidegree bd) {
  std::vector<std::pair<std::string, BilinearDensity>> out;
  for (int i = 0; i < b.n_summands(); ++i)
    for (int j = i + 1; j < b.n_summands(); ++j) {
      const std::string& ti = b.summand(i).tag;
      const std::string& tj = b.summand(j).tag;
      BilinearDensity x = omega_block(b, ti, tj, deriv, middle, value_pairing, bd);
      if (x.is_zero()) continue;
      out.emplace_back("omega[" + ti + "," + tj + "]", std::move(x));
    }
  return out;
}

// skew-symmetrize the candidates and solve the compatibility condition for
// the block coefficients; the solution space must be exactly one-dimensional
// (or every block already compatible, in which case all coefficients are 1)
BilinearDensity solve_omega(
    const FormBundle& bundle, const ConstCoeffOp& q, Bidegree bd,
    std::vector<std::pair<std::string, BilinearDensity>> raw,
    std::map<std::string, Qi>& conventions) {
  std::vector<std::string> names;
  std::vector<BilinearDensity> blocks;
  for (auto& [nm, x] : raw) {
    BilinearDensity b = x - x.swapped();
    if (b.normal_form().is_zero()) continue;
    names.push_back(nm);
    blocks.push_back(std::move(b));
  }
  if (blocks.empty())
    throw std::runtime_error(bundle.name() + ": no nonzero pairing blocks");

  std::vector<BilinearDensity> defects;
  bool any = false;
  for (const auto& b : blocks) {
    defects.push_back(
        (b.compose_left(q) + b.compose_right(q, true)).normal_form());
    if (!defects.back().is_zero()) any = true;
  }

  std::vector<Qi> coeff(blocks.size(), Qi(1));
  if (any) {
    std::map<std::pair<BilinearDensity::TermKey, std::pair<int, int>>, int> rows;
    for (const auto& d : defects)
      for (const auto& [tk, blk] : d.terms())
        for (const auto& [ij, c] : blk)
          if (!c.is_zero())
            rows.try_emplace({tk, ij}, static_cast<int>(rows.size()));
    SpacePtr cs = plain_space(static_cast<int>(blocks.size()), "blk");
    SpacePtr rs = plain_space(static_cast<int>(rows.size()), "eq");
    SparseMap m(cs, rs, Bidegree{0, 0}, false);
    for (int bi = 0; bi < static_cast<int>(defects.size()); ++bi)
      for (const auto& [tk, blk] : defects[bi].terms())
        for (const auto& [ij, c] : blk)
          if (!c.is_zero()) m.add_to(rows.at({tk, ij}), bi, c);
    auto ker = kernel_basis(m);
    if (ker.size() != 1)
      throw std::runtime_error(
          bundle.name() + ": pairing coefficient space has dimension " +
          std::to_string(ker.size()) + ", expected 1; first defect " +
          density_witness(bundle.chart(), defects.front()));
    coeff = ker[0];
    Qi lead;
    for (const auto& c : coeff)
      if (!c.is_zero()) {
        lead = c;
        break;
      }
    for (auto& c : coeff) c = c / lead;
  }

  BilinearDensity omega(bundle.chart().letters(), bundle.fiber(),
                        bundle.fiber(), bd);
  for (size_t i = 0; i < blocks.size(); ++i) {
    conventions[names[i]] = coeff[i];
    if (!coeff[i].is_zero()) omega = omega + blocks[i].scaled(coeff[i]);
  }
  return omega;
}

// columns of a and b side by side, both mapping into the common target
int stacked_rank(const SparseMap& a, const SparseMap& b) {
  int na = a.src()->dim(), nb = b.src()->dim();
  SparseMap st(plain_space(na + nb, "c"), a.tgt(), Bidegree{0, 0}, false);
  for (int j = 0; j < na; ++j)
    for (const auto& [i, c] : a.col(j)) st.add_to(i, j, c);
  for (int j = 0; j < nb; ++j)
    for (const auto& [i, c] : b.col(j)) st.add_to(i, na + j, c);
  return rank(st);
}

// exactness of the differential induced by sq on coker(sf), by ranks: with
// rk_f[k] = rank sf(E_k) and rkbar[k] the induced rank out of degree k,
//   dim coker_k = rkbar[k] + rkbar[k-1]  for every k
bool coker_exact_at(const SpacePtr& fib, const SpacePtr& dual,
                    const SparseMap& sf, const SparseMap& sq) {
  std::vector<int> all_d(dual->dim());
  std::iota(all_d.begin(), all_d.end(), 0);
  std::set<int> degs;
  for (int d : dual->degrees_present()) {
    degs.insert(d);
    degs.insert(d - 1);  // exactness below the bottom degree is checked too
  }
  std::map<int, int> rk_f, cok, rkbar;
  for (int k : degs) {
    std::vector<int> ek = fib->degree_slice(k);
    std::vector<int> dk = dual->degree_slice(k);
    SparseMap fk = sf.restricted(all_d, ek);
    rk_f[k] = rank(fk);
    cok[k] = static_cast<int>(dk.size()) - rk_f[k];
  }
  for (int k : degs) {
    std::vector<int> dk = dual->degree_slice(k);
    std::vector<int> ek1 = fib->degree_slice(k + 1);
    SparseMap qk = sq.restricted(all_d, dk);
    SparseMap fk1 = sf.restricted(all_d, ek1);
    int rk_next = rk_f.count(k + 1) ? rk_f[k + 1] : rank(fk1);
    rkbar[k] = stacked_rank(qk, fk1) - rk_next;
  }
  for (int k : degs) {
    int below = rkbar.count(k - 1) ? rkbar[k - 1] : 0;
    if (cok[k] != rkbar[k] + below) return false;
  }
  return true;
}

ConstCoeffOp embed_shift(const ConstCoeffOp& op, SpacePtr big, int shift) {
  ConstCoeffOp out(op.letters(), big, big, op.bidegree());
  for (const auto& [m, mat] : op.terms()) {
    SparseMap n(big, big, op.bidegree(), true);
    for (int j = 0; j < op.src()->dim(); ++j)
      for (const auto& [i, c] : mat.col(j)) n.add_to(i + shift, j + shift, c);
    out.add_term(m, n);
  }
  return out;
}

BilinearDensity embed_density(const BilinearDensity& d, SpacePtr big,
                              int shift) {
  BilinearDensity out(d.letters(), big, big, d.bidegree());
  for (const auto& [tk, blk] : d.terms())
    for (const auto& [ij, c] : blk)
      out.add(tk.first, tk.second, ij.first + shift, ij.second + shift, c);
  return out;
}

}  // namespace

// ---- paired value spaces ----------------------------------------------------

bool PairedValueSpace::perfect() const {
  int n = dim();
  if (n == 0) return false;
  SparseMap m(space, space, Bidegree{0, 0}, false);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!gram[i][j].is_zero()) m.set(i, j, gram[i][j]);
  return rank(m) == n;
}

bool PairedValueSpace::consistent() const {
  int n = dim();
  if (static_cast<int>(gram.size()) != n) return false;
  for (const auto& row : gram)
    if (static_cast<int>(row.size()) != n) return false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Qi mirror = antisymmetric ? -gram[j][i] : gram[j][i];
      if (!(gram[i][j] == mirror)) return false;
    }
  return true;
}

PairedValueSpace value_line(const std::string& label) {
  auto g = std::make_shared<GradedSpace>(label);
  g->add(label, Bidegree{0, 0});
  return {g, {{Qi(1)}}, false};
}

PairedValueSpace value_standard(int n) {
  auto g = std::make_shared<GradedSpace>("std" + std::to_string(n));
  for (int i = 0; i < n; ++i)
    g->add("w" + std::to_string(i + 1), Bidegree{0, 0});
  std::vector<std::vector<Qi>> gram(n, std::vector<Qi>(n, Qi(0)));
  for (int i = 0; i < n; ++i) gram[i][i] = Qi(1);
  return {g, gram, false};
}

PairedValueSpace value_w5() {
  const SpinorModel& m = spinor_model();
  int n = m.W->dim();
  std::vector<std::vector<Qi>> gram(n, std::vector<Qi>(n, Qi(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram[i][j] = m.h_W.get(0, i * n + j);
  return {m.W, gram, false};
}

PairedValueSpace value_r(int n) {
  const SpinorModel& m = spinor_model();
  if (n == 1) {
    std::vector<std::vector<Qi>> gram(2, std::vector<Qi>(2, Qi(0)));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) gram[i][j] = m.omega_R1.get(0, i * 2 + j);
    return {m.R1, gram, true};
  }
  if (n == 2) {
    std::vector<std::vector<Qi>> gram(4, std::vector<Qi>(4, Qi(0)));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) gram[i][j] = m.omega_R2.get(0, i * 4 + j);
    return {m.R2, gram, true};
  }
  throw std::invalid_argument("value_r: rank must be 1 or 2");
}

PairedValueSpace value_pi_r1prime() {
  const SpinorModel& m = spinor_model();
  const SpacePtr& src = m.incl_R1p.src();
  int n = src->dim();
  auto g = std::make_shared<GradedSpace>("PiR1'");
  for (int i = 0; i < n; ++i)
    g->add(src->at(i).label, Bidegree{0, 1}, src->at(i).wt);
  int big = m.R2->dim();
  std::vector<std::vector<Qi>> gram(n, std::vector<Qi>(n, Qi(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Qi v(0);
      for (int a = 0; a < big; ++a) {
        Qi ca = m.incl_R1p.get(a, i);
        if (ca.is_zero()) continue;
        for (int b = 0; b < big; ++b) {
          Qi cb = m.incl_R1p.get(b, j);
          if (cb.is_zero()) continue;
          v = v + ca * cb * m.omega_R2.get(0, a * big + b);
        }
      }
      gram[i][j] = v;
    }
  return {g, gram, true};
}

// ---- pairing block assembly ---------------------------------------------------

BilinearDensity omega_block(const FormBundle& bundle,
                            const std::string& left_tag,
                            const std::string& right_tag,
                            const std::vector<int>& deriv_letters,
                            const std::vector<std::pair<FormMono, Qi>>& middle,
                            const std::function<Qi(int, int)>& value_pairing,
                            Bidegree bd) {
  int li = bundle.summand_by_tag(left_tag);
  int ri = bundle.summand_by_tag(right_tag);
  if (li < 0 || ri < 0)
    throw std::invalid_argument("omega_block: unknown summand tag");
  const BundleSummand& L = bundle.summand(li);
  const BundleSummand& R = bundle.summand(ri);
  const Exterior& ext = bundle.ext();
  int nl = ext.chart().letters();
  const SpacePtr& fiber = bundle.fiber();
  BilinearDensity out(nl, fiber, fiber, bd);
  int kL = L.piece.form_degree, kR = R.piece.form_degree;
  const auto& mL = ext.monos(kL);
  const auto& mR = ext.monos(kR);
  Qi topc = ext.top_coefficient().get(0, 0);
  int vL = L.value->dim(), vR = R.value->dim();
  Mono z = mono_zero(nl);

  std::vector<std::pair<FormMono, Qi>> mids = middle;
  if (mids.empty()) mids.emplace_back(FormMono{}, Qi(1));
  bool order_zero = deriv_letters.empty();
  std::vector<int> passes = deriv_letters;
  if (order_zero) passes.push_back(-1);

  for (int l : passes) {
    Mono dl = order_zero ? z : mono_unit(nl, l);
    FormMono base;
    if (!order_zero) base.push_back(l);
    for (int pL = 0; pL < L.piece.space->dim(); ++pL)
      for (const auto& [ia, ca] : L.piece.section.col(pL)) {
        FormMono m1 = base;
        int s1 = merge_into(m1, mL[ia]);
        if (!s1) continue;
        for (const auto& [mid, cm] : mids) {
          FormMono m2 = m1;
          int s2 = merge_into(m2, mid);
          if (!s2) continue;
          int midk = static_cast<int>(mid.size());
          for (int pR = 0; pR < R.piece.space->dim(); ++pR)
            for (const auto& [ib, cb] : R.piece.section.col(pR)) {
              FormMono m3 = m2;
              int s3 = merge_into(m3, mR[ib]);
              if (!s3 || static_cast<int>(m3.size()) != nl) continue;
              Qi w = ca * cm * cb * topc * Qi(s1 * s2 * s3);
              for (int a = 0; a < vL; ++a) {
                int sv = L.value->at(a).bd.totalized();
                Qi vsgn((sv * (midk + kR)) % 2 ? -1 : 1);
                for (int bv = 0; bv < vR; ++bv) {
                  Qi h = value_pairing(a, bv);
                  if (h.is_zero()) continue;
                  int bi = bundle.offset(li) + pL * vL + a;
                  int bj = bundle.offset(ri) + pR * vR + bv;
                  const Bidegree& bdi = fiber->at(bi).bd;
                  const Bidegree& bdj = fiber->at(bj).bd;
                  if (bdi.deg + bdj.deg + bd.deg != 0) continue;
                  if ((bdi.par + bdj.par + bd.par) & 1) continue;
                  out.add(dl, z, bi, bj, w * vsgn * h);
                }
              }
            }
        }
      }
  }
  return out;
}

// ---- catalog constructors -----------------------------------------------------

TheoryPresentation make_chi(const Chart& chart, int two_k,
                            const PairedValueSpace& w) {
  if (two_k < 0 || two_k % 2)
    throw std::invalid_argument("make_chi: middle degree must be even");
  int k = two_k / 2;
  int n = two_k + 1;
  if (!chart.is_complex() || chart.complex_pairs != n)
    throw std::invalid_argument("make_chi: need a complex chart of dimension " +
                                std::to_string(n));
  if (!w.consistent() || w.antisymmetric || !w.perfect())
    throw std::invalid_argument("make_chi: value pairing must be symmetric "
                                "and nondegenerate");
  std::string name = "chi(" + std::to_string(two_k) + ")" + vsuffix(w);
  auto bundle = std::make_shared<FormBundle>(chart, name);
  const Exterior& ext = bundle->ext();
  auto tag = [](int p, int q) {
    return "o" + std::to_string(p) + std::to_string(q);
  };
  for (int p = 0; p <= k; ++p)
    for (int q = 0; q <= n; ++q)
      bundle->add_summand({tag(p, q), piece_dolbeault(ext, p, q, tag(p, q)),
                           w.space, -two_k, 0, weight_zero()});
  std::vector<OpRoute> routes;
  for (int p = 0; p <= k; ++p)
    for (int q = 0; q <= n; ++q) {
      if (p < k)
        routes.push_back(route(*bundle, tag(p, q), *bundle, tag(p + 1, q),
                               op_d(ext, p + q, LetterSet::Holo)));
      if (q < n)
        routes.push_back(route(*bundle, tag(p, q), *bundle, tag(p, q + 1),
                               op_d(ext, p + q, LetterSet::Anti)));
    }
  ConstCoeffOp q_bv = assemble_op(*bundle, *bundle, Bidegree{1, 0}, routes);

  auto gram = w.gram;
  auto vp = [gram](int a, int b) { return gram[a][b]; };
  std::map<std::string, Qi> conv;
  BilinearDensity omega = solve_omega(
      *bundle, q_bv, Bidegree{-1, 0},
      candidate_blocks(*bundle, letters_of(chart, LetterSet::Holo), {}, vp,
                       Bidegree{-1, 0}),
      conv);
  return {name, chart, bundle, q_bv, omega, conv};
}

TheoryPresentation make_chi_plus(const Chart& chart, int two_k,
                                 const PairedValueSpace& w) {
  if (two_k < 0 || two_k % 2)
    throw std::invalid_argument("make_chi_plus: middle degree must be even");
  int d = 2 * two_k + 2;
  if (!chart.is_real() || chart.real_coords != d)
    throw std::invalid_argument("make_chi_plus: need a real chart of dimension " +
                                std::to_string(d));
  if (!w.consistent() || w.antisymmetric || !w.perfect())
    throw std::invalid_argument("make_chi_plus: value pairing must be "
                                "symmetric and nondegenerate");
  std::string name = "chi+(" + std::to_string(two_k) + ")" + vsuffix(w);
  auto bundle = std::make_shared<FormBundle>(chart, name);
  const Exterior& ext = bundle->ext();
  auto tag = [](int j) { return "o" + std::to_string(j); };
  for (int j = 0; j <= two_k; ++j)
    bundle->add_summand({tag(j), piece_full(ext, j, tag(j)), w.space, -two_k,
                         0, weight_zero()});
  bundle->add_summand({"sd", piece_selfdual(ext, +1, "sd"), w.space, -two_k, 0,
                       weight_zero()});
  std::vector<OpRoute> routes;
  for (int j = 0; j < two_k; ++j)
    routes.push_back(route(*bundle, tag(j), *bundle, tag(j + 1),
                           op_d(ext, j, LetterSet::All)));
  routes.push_back(route(*bundle, tag(two_k), *bundle, "sd",
                         op_d(ext, two_k, LetterSet::All)));
  ConstCoeffOp q_bv = assemble_op(*bundle, *bundle, Bidegree{1, 0}, routes);

  auto gram = w.gram;
  auto vp = [gram](int a, int b) { return gram[a][b]; };
  std::map<std::string, Qi> conv;
  BilinearDensity omega = solve_omega(
      *bundle, q_bv, Bidegree{-1, 0},
      candidate_blocks(*bundle, letters_of(chart, LetterSet::All), {}, vp,
                       Bidegree{-1, 0}),
      conv);
  return {name, chart, bundle, q_bv, omega, conv};
}

TheoryPresentation make_phi(const Chart& chart, int p,
                            const PairedValueSpace& w) {
  int d = chart.real_dim();
  if (p < 0 || d <= 2 * p)
    throw std::invalid_argument("make_phi: need chart dimension > 2p");
  if (!w.consistent() || w.antisymmetric || !w.perfect())
    throw std::invalid_argument("make_phi: value pairing must be symmetric "
                                "and nondegenerate");
  std::string name = "phi(" + std::to_string(p) + ")" + vsuffix(w);
  auto bundle = std::make_shared<FormBundle>(chart, name);
  const Exterior& ext = bundle->ext();
  auto lo = [](int j) { return "lo" + std::to_string(j); };
  auto hi = [](int m) { return "hi" + std::to_string(m); };
  for (int j = 0; j <= p; ++j)
    bundle->add_summand({lo(j), piece_full(ext, j, lo(j)), w.space, -p, 0,
                         weight_zero()});
  for (int m = d - p; m <= d; ++m)
    bundle->add_summand({hi(m), piece_full(ext, m, hi(m)), w.space,
                         p + 1 - d, 0, weight_zero()});
  std::vector<OpRoute> routes;
  for (int j = 0; j < p; ++j)
    routes.push_back(route(*bundle, lo(j), *bundle, lo(j + 1),
                           op_d(ext, j, LetterSet::All)));
  for (int m = d - p; m < d; ++m)
    routes.push_back(route(*bundle, hi(m), *bundle, hi(m + 1),
                           op_d(ext, m, LetterSet::All)));
  ConstCoeffOp bridge = op_d(ext, d - p - 1, LetterSet::All)
                            .compose(op_fiber(ext, ext.star(p + 1)))
                            .compose(op_d(ext, p, LetterSet::All));
  routes.push_back(route(*bundle, lo(p), *bundle, hi(d - p), bridge));
  ConstCoeffOp q_bv = assemble_op(*bundle, *bundle, Bidegree{1, 0}, routes);

  auto gram = w.gram;
  auto vp = [gram](int a, int b) { return gram[a][b]; };
  std::map<std::string, Qi> conv;
  BilinearDensity omega =
      solve_omega(*bundle, q_bv, Bidegree{-1, 0},
                  candidate_blocks(*bundle, {}, {}, vp, Bidegree{-1, 0}), conv);
  return {name, chart, bundle, q_bv, omega, conv};
}

TheoryPresentation make_free_boson(const Chart& chart,
                                   const PairedValueSpace& w) {
  TheoryPresentation t = make_phi(chart, 0, w);
  t.name = "boson" + vsuffix(w);
  return t;
}

TheoryPresentation make_fermi(const Chart& chart, const PairedValueSpace& r) {
  if (chart.real_dim() != 6)
    throw std::invalid_argument("make_fermi: need a six-dimensional chart");
  if (!r.consistent() || !r.antisymmetric || !r.perfect())
    throw std::invalid_argument("make_fermi: value pairing must be symplectic");
  const SpinorModel& sm = spinor_model();
  int nl = chart.letters();
  std::string name = "fermi[" + std::to_string(r.dim()) + "]";
  auto bundle = std::make_shared<FormBundle>(chart, name);
  const Exterior& ext = bundle->ext();
  SpacePtr vminus = GradedSpace::tensor(*sm.S_minus, *r.space);
  SpacePtr vplus = GradedSpace::tensor(*sm.S_plus, *r.space);
  bundle->add_summand(
      {"psim", piece_full(ext, 0, "psim"), vminus, 0, 1, weight_zero()});
  bundle->add_summand(
      {"psip", piece_full(ext, 0, "psip"), vplus, 1, 1, weight_zero()});

  auto vl = v_of_letters(chart);
  int dsm = sm.S_minus->dim(), dsp = sm.S_plus->dim(), dv = sm.V->dim();
  std::vector<OpRoute> routes;
  for (int l = 0; l < nl; ++l) {
    SparseMap cl(sm.S_minus, sm.S_plus, Bidegree{0, 0}, false);
    for (int t = 0; t < dsp; ++t)
      for (int s = 0; s < dsm; ++s) {
        Qi v(0);
        for (int vv = 0; vv < dv; ++vv) {
          const Qi& co = vl[l][vv];
          if (!co.is_zero()) v = v + co * sm.c_minus.get(t, vv * dsm + s);
        }
        if (!v.is_zero()) cl.set(t, s, v);
      }
    if (cl.is_zero()) continue;
    SparseMap vmap = SparseMap::tensor(cl, SparseMap::identity(r.space))
                         .with_spaces(vminus, vplus, Bidegree{0, 0});
    ConstCoeffOp form_op = op_first_order(
        nl, ext.lambda(0), ext.lambda(0), Bidegree{0, 0},
        {{l, SparseMap::identity(ext.lambda(0))}});
    routes.push_back(
        route_valued(*bundle, "psim", *bundle, "psip", form_op, vmap));
  }
  ConstCoeffOp q_bv = assemble_op(*bundle, *bundle, Bidegree{1, 0}, routes);

  int dr = r.dim();
  std::vector<std::vector<Qi>> ssp(dsp, std::vector<Qi>(dsm, Qi(0)));
  for (int pp = 0; pp < dsp; ++pp)
    for (int mm = 0; mm < dsm; ++mm) ssp[pp][mm] = sm.pair_SS.get(0, pp * dsm + mm);
  auto gram = r.gram;
  auto vp = [ssp, gram, dr](int a, int b) {
    return ssp[b / dr][a / dr] * gram[a % dr][b % dr];
  };
  FormMono vol(nl);
  std::iota(vol.begin(), vol.end(), 0);
  std::map<std::string, Qi> conv;
  BilinearDensity omega = solve_omega(
      *bundle, q_bv, Bidegree{-1, 0},
      candidate_blocks(*bundle, {}, {{vol, Qi(1)}}, vp, Bidegree{-1, 0}), conv);
  return {name, chart, bundle, q_bv, omega, conv};
}

TheoryPresentation make_hcs(const Chart& chart, const PairedValueSpace& s) {
  if (!chart.is_complex() || chart.complex_pairs != 3)
    throw std::invalid_argument("make_hcs: need a complex chart of dimension 3");
  if (!s.consistent() || !s.antisymmetric || !s.perfect())
    throw std::invalid_argument("make_hcs: value pairing must be symplectic");
  std::string name = "hcs" + vsuffix(s);
  auto bundle = std::make_shared<FormBundle>(chart, name);
  const Exterior& ext = bundle->ext();
  Weight half_k{1, 1, 1, 0, 0};
  auto tag = [](int q) { return "s" + std::to_string(q); };
  for (int q = 0; q <= 3; ++q)
    bundle->add_summand({tag(q), piece_dolbeault(ext, 0, q, tag(q)), s.space,
                         -1, 0, half_k});
  std::vector<OpRoute> routes;
  for (int q = 0; q < 3; ++q)
    routes.push_back(route(*bundle, tag(q), *bundle, tag(q + 1),
                           op_d(ext, q, LetterSet::Anti)));
  ConstCoeffOp q_bv = assemble_op(*bundle, *bundle, Bidegree{1, 0}, routes);

  FormMono holvol = letters_of(chart, LetterSet::Holo);
  std::sort(holvol.begin(), holvol.end());
  auto gram = s.gram;
  auto vp = [gram](int a, int b) { return gram[a][b]; };
  std::map<std::string, Qi> conv;
  BilinearDensity omega = solve_omega(
      *bundle, q_bv, Bidegree{-1, 0},
      candidate_blocks(*bundle, {}, {{holvol, Qi(1)}}, vp, Bidegree{-1, 0}),
      conv);
  return {name, chart, bundle, q_bv, omega, conv};
}

TheoryPresentation make_betagamma(const Chart& chart) {
  if (!chart.is_complex() || chart.complex_pairs != 3)
    throw std::invalid_argument(
        "make_betagamma: need a complex chart of dimension 3");
  std::string name = "bg";
  auto bundle = std::make_shared<FormBundle>(chart, name);
  const Exterior& ext = bundle->ext();
  SpacePtr line = trivial_space("e");
  auto g = [](int q) { return "g" + std::to_string(q); };
  auto b = [](int q) { return "b" + std::to_string(q); };
  for (int q = 0; q <= 3; ++q)
    bundle->add_summand(
        {g(q), piece_dolbeault(ext, 0, q, g(q)), line, 0, 0, weight_zero()});
  for (int q = 0; q <= 3; ++q)
    bundle->add_summand(
        {b(q), piece_dolbeault(ext, 3, q, b(q)), line, -5, 0, weight_zero()});
  std::vector<OpRoute> routes;
  for (int q = 0; q < 3; ++q) {
    routes.push_back(route(*bundle, g(q), *bundle, g(q + 1),
                           op_d(ext, q, LetterSet::Anti)));
    routes.push_back(route(*bundle, b(q), *bundle, b(q + 1),
                           op_d(ext, 3 + q, LetterSet::Anti)));
  }
  ConstCoeffOp q_bv = assemble_op(*bundle, *bundle, Bidegree{1, 0}, routes);

  auto vp = [](int, int) { return Qi(1); };
  std::map<std::string, Qi> conv;
  BilinearDensity omega =
      solve_omega(*bundle, q_bv, Bidegree{-1, 0},
                  candidate_blocks(*bundle, {}, {}, vp, Bidegree{-1, 0}), conv);
  return {name, chart, bundle, q_bv, omega, conv};
}

TheoryPresentation direct_sum(const TheoryPresentation& a,
                              const TheoryPresentation& b,
                              const std::string& name) {
  if (!(a.chart == b.chart))
    throw std::invalid_argument("direct_sum: charts differ");
  std::string nm = name.empty() ? a.name + "+" + b.name : name;
  auto bundle = std::make_shared<FormBundle>(a.chart, nm);
  for (int i = 0; i < a.bundle->n_summands(); ++i)
    bundle->add_summand(a.bundle->summand(i));
  for (int i = 0; i < b.bundle->n_summands(); ++i) {
    const BundleSummand& s = b.bundle->summand(i);
    if (bundle->summand_by_tag(s.tag) >= 0)
      throw std::invalid_argument("direct_sum: duplicate summand tag " + s.tag);
    bundle->add_summand(s);
  }
  int da = a.bundle->fiber()->dim();
  const SpacePtr& fiber = bundle->fiber();
  ConstCoeffOp q_bv =
      embed_shift(a.q_bv, fiber, 0) + embed_shift(b.q_bv, fiber, da);
  BilinearDensity omega =
      embed_density(a.omega, fiber, 0) + embed_density(b.omega, fiber, da);
  std::map<std::string, Qi> conv;
  for (const auto& [k, v] : a.conventions) conv[a.name + ":" + k] = v;
  for (const auto& [k, v] : b.conventions) conv[b.name + ":" + k] = v;
  return {nm, a.chart, bundle, q_bv, omega, conv};
}

TheoryPresentation make_tensor_multiplet(int n) {
  Chart chart = real_chart(6);
  if (n == 1) {
    TheoryPresentation t = direct_sum(
        direct_sum(make_chi_plus(chart, 2, value_line()),
                   make_fermi(chart, value_r(1))),
        make_free_boson(chart, value_line()), "T(1,0)");
    return t;
  }
  if (n == 2) {
    TheoryPresentation t = direct_sum(
        direct_sum(make_chi_plus(chart, 2, value_line()),
                   make_fermi(chart, value_r(2))),
        make_free_boson(chart, value_w5()), "T(2,0)");
    return t;
  }
  throw std::invalid_argument("make_tensor_multiplet: rank must be 1 or 2");
}

// ---- verification ---------------------------------------------------------------

TheoryReport check_theory(const TheoryPresentation& t, int n_random,
                          uint64_t seed) {
  TheoryReport r;
  ConstCoeffOp q2 = t.q_bv.compose(t.q_bv);
  r.q_square_zero = q2.is_zero();
  if (!r.q_square_zero)
    r.failures.push_back({1, "square: " + op_witness(t.chart, q2)});

  r.symbol = symbol_exactness(t.chart, t.q_bv, n_random, seed);
  if (!r.symbol.ok())
    r.failures.push_back({1, "symbol: " + r.symbol.failure});

  if (t.omega.is_zero()) {
    r.omega_skew = false;
    r.failures.push_back({2, "pairing identically zero"});
  } else {
    BilinearDensity skew = (t.omega + t.omega.swapped()).normal_form();
    r.omega_skew = skew.is_zero();
    if (!r.omega_skew)
      r.failures.push_back({2, density_witness(t.chart, skew)});
  }

  BilinearDensity defect = (t.omega.compose_left(t.q_bv) +
                            t.omega.compose_right(t.q_bv, true))
                               .normal_form();
  r.omega_compatible = defect.is_zero();
  if (!r.omega_compatible)
    r.failures.push_back({3, density_witness(t.chart, defect)});
  return r;
}

// ---- the pairing as a map into the dual complex ---------------------------------

SpacePtr dual_fiber(const SpacePtr& fiber) {
  auto g = std::make_shared<GradedSpace>(fiber->name() + "!");
  for (const auto& u : fiber->basis()) {
    Weight wt;
    for (int s = 0; s < kWeightSlots; ++s) wt[s] = -u.wt[s];
    g->add(u.label + "!", Bidegree{1 - u.bd.deg, u.bd.par}, wt);
  }
  return g;
}

ConstCoeffOp dual_differential(const ConstCoeffOp& q, SpacePtr dual) {
  const SpacePtr& fib = q.src();
  ConstCoeffOp out(q.letters(), dual, dual, q.bidegree());
  for (const auto& [m, mat] : q.terms()) {
    int sm = mono_total(m) & 1;
    SparseMap n(dual, dual, q.bidegree(), true);
    for (int k = 0; k < fib->dim(); ++k)
      for (const auto& [j, c] : mat.col(k)) {
        int sj = fib->at(j).bd.totalized() & 1;
        n.add_to(k, j, ((sm + sj) & 1) ? -c : c);
      }
    if (!n.is_zero()) out.add_term(m, n);
  }
  return out;
}

ConeOmegaReport cone_omega_check(const TheoryPresentation& t, int window_n,
                                 int n_random, uint64_t seed) {
  ConeOmegaReport r;
  const SpacePtr& fib = t.bundle->fiber();
  SpacePtr dual = dual_fiber(fib);
  ConstCoeffOp f = t.omega.as_operator(dual, Bidegree{0, 0});
  ConstCoeffOp qd = dual_differential(t.q_bv, dual);
  r.chain_map = (f.compose(t.q_bv) - qd.compose(f)).is_zero();
  r.dual_square_zero = qd.compose(qd).is_zero();
  ConstCoeffOp cn = cone(t.q_bv, qd, f);
  r.cone_square_zero = cn.compose(cn).is_zero();
  r.cone_symbol = symbol_exactness(t.chart, cn, n_random, seed);

  r.coker_acyclic = true;
  for (const auto& xi : sample_covectors(t.chart.real_dim(), n_random, seed)) {
    auto lc = letter_covector(t.chart, xi);
    if (!coker_exact_at(fib, dual, f.symbol_at(lc), qd.symbol_at(lc))) {
      r.coker_acyclic = false;
      break;
    }
  }

  int margin = std::max({1, t.q_bv.max_order(), f.max_order()});
  int n = window_n <= margin ? margin + 1 : window_n;
  r.cone_window = window_cohomology(t.chart, cn, n, margin);

  Window we = make_window(t.chart, fib, n, "E");
  Window wd = make_window(t.chart, dual, n, "D");
  SparseMap fw = window_matrix(f, we, wd);
  SparseMap qw = window_matrix(t.q_bv, we, we);
  std::vector<int> rows_d(wd.space->dim());
  std::iota(rows_d.begin(), rows_d.end(), 0);
  std::vector<int> rows_e(we.space->dim());
  std::iota(rows_e.begin(), rows_e.end(), 0);
  SpacePtr both = plain_space(wd.space->dim() + we.space->dim(), "s");
  for (int deg : fib->degrees_present()) {
    std::vector<int> interior = we.slice(deg, n - margin);
    if (interior.empty()) continue;
    SparseMap fi = fw.restricted(rows_d, interior);
    SparseMap qi = qw.restricted(rows_e, interior);
    SparseMap st(fi.src(), both, Bidegree{0, 0}, false);
    for (int j = 0; j < static_cast<int>(interior.size()); ++j) {
      for (const auto& [i, c] : fi.col(j)) st.add_to(i, j, c);
      for (const auto& [i, c] : qi.col(j)) st.add_to(wd.space->dim() + i, j, c);
    }
    int cycles = static_cast<int>(interior.size()) - rank(st);
    int bnd = 0;
    std::vector<int> prev = we.slice(deg - 1, n);
    if (!prev.empty()) {
      SparseMap fp = fw.restricted(rows_d, prev);
      auto kv = kernel_basis(fp);
      if (!kv.empty()) {
        SparseMap qp = qw.restricted(rows_e, prev);
        SparseMap img = apply_to_columns(
            qp, kv, plain_space(static_cast<int>(kv.size()), "k"));
        bnd = image_intersection_dim(img, interior);
      }
    }
    if (cycles - bnd) r.kernel_interior[deg - 1] = cycles - bnd;
  }
  r.resolves_kernel =
      drop_zeros(r.cone_window.interior_dims) == r.kernel_interior;
  return r;
}

bool cone_omega_acyclic(const TheoryPresentation& t) {
  SpacePtr dual = dual_fiber(t.bundle->fiber());
  ConstCoeffOp f = t.omega.as_operator(dual, Bidegree{0, 0});
  int margin = std::max({1, t.q_bv.max_order(), f.max_order()});
  return cone_omega_check(t, margin + 2, 8, 20260814ull).acyclic();
}

}  // namespace pbv
