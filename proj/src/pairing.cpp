#include "pbv/pairing.hpp"

#include <stdexcept>

namespace pbv {

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  for (const auto& [m, c] : b) {
    Qi v = (out.count(m) ? out[m] : Qi(0)) + c;
    if (v.is_zero())
      out.erase(m);
    else
      out[m] = v;
  }
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [m, c] : a)
    for (const auto& [n, d] : b) {
      Mono mn = mono_add(m, n);
      Qi v = (out.count(mn) ? out[mn] : Qi(0)) + c * d;
      if (v.is_zero())
        out.erase(mn);
      else
        out[mn] = v;
    }
  return out;
}

Poly poly_scaled(const Poly& a, const Qi& c) {
  Poly out;
  if (c.is_zero()) return out;
  for (const auto& [m, v] : a) out[m] = v * c;
  return out;
}

Poly poly_derive(const Poly& p, const Mono& d) {
  Poly out;
  for (const auto& [m, c] : p) {
    Qi f(1);
    Mono r = m;
    bool ok = true;
    for (size_t l = 0; l < d.size() && ok; ++l) {
      if (m[l] < d[l]) {
        ok = false;
        break;
      }
      for (int t = 0; t < d[l]; ++t) f = f * Qi(m[l] - t);
      r[l] = m[l] - d[l];
    }
    if (!ok || f.is_zero()) continue;
    Qi v = (out.count(r) ? out[r] : Qi(0)) + c * f;
    if (v.is_zero())
      out.erase(r);
    else
      out[r] = v;
  }
  return out;
}

bool poly_is_zero(const Poly& p) {
  for (const auto& [m, c] : p)
    if (!c.is_zero()) return false;
  return true;
}

BilinearDensity::BilinearDensity(int letters, SpacePtr left, SpacePtr right,
                                 Bidegree bd, bool enforce)
    : letters_(letters),
      left_(std::move(left)),
      right_(std::move(right)),
      bd_(bd),
      enforce_(enforce) {}

void BilinearDensity::add(const Mono& dl, const Mono& dr, int i, int j,
                          const Qi& c) {
  if (c.is_zero()) return;
  if (static_cast<int>(dl.size()) != letters_ ||
      static_cast<int>(dr.size()) != letters_)
    throw std::invalid_argument("BilinearDensity::add: bad multi-index size");
  if (i < 0 || i >= left_->dim() || j < 0 || j >= right_->dim())
    throw std::out_of_range("BilinearDensity::add: fiber index");
  if (enforce_) {
    const Bidegree& bi = left_->at(i).bd;
    const Bidegree& bj = right_->at(j).bd;
    if (bi.deg + bj.deg + bd_.deg != 0 || ((bi.par + bj.par + bd_.par) & 1))
      throw std::invalid_argument("BilinearDensity::add: entry off bidegree");
  }
  auto& block = terms_[{dl, dr}];
  auto key = std::make_pair(i, j);
  Qi v = (block.count(key) ? block[key] : Qi(0)) + c;
  if (v.is_zero())
    block.erase(key);
  else
    block[key] = v;
}

bool BilinearDensity::is_zero() const {
  for (const auto& [k, block] : terms_)
    for (const auto& [ij, c] : block)
      if (!c.is_zero()) return false;
  return true;
}

int BilinearDensity::max_order() const {
  int mx = 0;
  for (const auto& [k, block] : terms_)
    if (!block.empty())
      mx = std::max(mx, mono_total(k.first) + mono_total(k.second));
  return mx;
}

BilinearDensity BilinearDensity::operator+(const BilinearDensity& o) const {
  BilinearDensity out = *this;
  for (const auto& [k, block] : o.terms_)
    for (const auto& [ij, c] : block)
      out.add(k.first, k.second, ij.first, ij.second, c);
  return out;
}

BilinearDensity BilinearDensity::operator-(const BilinearDensity& o) const {
  return *this + o.scaled(Qi(-1));
}

BilinearDensity BilinearDensity::scaled(const Qi& c) const {
  BilinearDensity out(letters_, left_, right_, bd_, enforce_);
  if (c.is_zero()) return out;
  for (const auto& [k, block] : terms_)
    for (const auto& [ij, v] : block)
      out.add(k.first, k.second, ij.first, ij.second, v * c);
  return out;
}

BilinearDensity BilinearDensity::normal_form() const {
  BilinearDensity out(letters_, left_, right_, bd_, enforce_);
  for (const auto& [k, block] : terms_) {
    int moved = mono_total(k.first);
    Qi sgn(moved % 2 ? -1 : 1);
    Mono b = mono_add(k.first, k.second);
    for (const auto& [ij, c] : block)
      out.add(mono_zero(letters_), b, ij.first, ij.second, c * sgn);
  }
  return out;
}

BilinearDensity BilinearDensity::normal_form_left() const {
  BilinearDensity out(letters_, left_, right_, bd_, enforce_);
  for (const auto& [k, block] : terms_) {
    int moved = mono_total(k.second);
    Qi sgn(moved % 2 ? -1 : 1);
    Mono a = mono_add(k.first, k.second);
    for (const auto& [ij, c] : block)
      out.add(a, mono_zero(letters_), ij.first, ij.second, c * sgn);
  }
  return out;
}

BilinearDensity BilinearDensity::swapped() const {
  BilinearDensity out(letters_, right_, left_, bd_, enforce_);
  for (const auto& [k, block] : terms_)
    for (const auto& [ij, c] : block) {
      int si = left_->at(ij.first).bd.totalized();
      int sj = right_->at(ij.second).bd.totalized();
      Qi sgn((si * sj) % 2 ? -1 : 1);
      out.add(k.second, k.first, ij.second, ij.first, c * sgn);
    }
  return out;
}

BilinearDensity BilinearDensity::compose_left(const ConstCoeffOp& q) const {
  if (q.letters() != letters_)
    throw std::invalid_argument("compose_left: letter mismatch");
  if (q.tgt()->dim() != left_->dim())
    throw std::invalid_argument("compose_left: target/left mismatch");
  BilinearDensity out(letters_, q.src(), right_,
                      bd_ + q.bidegree(), enforce_);
  for (const auto& [m, mat] : q.terms()) {
    // row-major view of the term matrix
    std::map<int, std::vector<std::pair<int, Qi>>> rows;
    for (int kcol = 0; kcol < q.src()->dim(); ++kcol)
      for (const auto& [r, v] : mat.col(kcol)) rows[r].push_back({kcol, v});
    for (const auto& [k, block] : terms_) {
      Mono a = mono_add(k.first, m);
      for (const auto& [ij, c] : block) {
        auto it = rows.find(ij.first);
        if (it == rows.end()) continue;
        for (const auto& [kcol, v] : it->second)
          out.add(a, k.second, kcol, ij.second, c * v);
      }
    }
  }
  return out;
}

BilinearDensity BilinearDensity::compose_right(const ConstCoeffOp& q,
                                               bool graded) const {
  if (q.letters() != letters_)
    throw std::invalid_argument("compose_right: letter mismatch");
  if (q.tgt()->dim() != right_->dim())
    throw std::invalid_argument("compose_right: target/right mismatch");
  int sq = q.bidegree().totalized();
  BilinearDensity out(letters_, left_, q.src(), bd_ + q.bidegree(), enforce_);
  for (const auto& [m, mat] : q.terms()) {
    std::map<int, std::vector<std::pair<int, Qi>>> rows;
    for (int kcol = 0; kcol < q.src()->dim(); ++kcol)
      for (const auto& [r, v] : mat.col(kcol)) rows[r].push_back({kcol, v});
    for (const auto& [k, block] : terms_) {
      Mono b = mono_add(k.second, m);
      for (const auto& [ij, c] : block) {
        auto it = rows.find(ij.second);
        if (it == rows.end()) continue;
        int si = left_->at(ij.first).bd.totalized();
        Qi sgn(graded && (sq * si) % 2 ? -1 : 1);
        for (const auto& [kcol, v] : it->second)
          out.add(k.first, b, ij.first, kcol, c * v * sgn);
      }
    }
  }
  return out;
}

BilinearDensity BilinearDensity::pullback(const ConstCoeffOp& f) const {
  if (f.bidegree().totalized() != 0)
    throw std::invalid_argument("pullback: map must be even");
  return compose_left(f).compose_right(f, false);
}

Poly BilinearDensity::eval(const PolySection& l, const PolySection& r) const {
  if (l.letters != letters_ || r.letters != letters_)
    throw std::invalid_argument("eval: letter mismatch");
  std::vector<Poly> lc(left_->dim()), rc(right_->dim());
  for (const auto& [m, comps] : l.coeff)
    for (const auto& [i, v] : comps)
      if (!v.is_zero()) lc.at(i)[m] = v;
  for (const auto& [m, comps] : r.coeff)
    for (const auto& [j, v] : comps)
      if (!v.is_zero()) rc.at(j)[m] = v;
  Poly out;
  for (const auto& [k, block] : terms_)
    for (const auto& [ij, c] : block) {
      Poly p = poly_mul(poly_derive(lc[ij.first], k.first),
                        poly_derive(rc[ij.second], k.second));
      out = poly_add(out, poly_scaled(p, c));
    }
  return out;
}

Poly BilinearDensity::plane_wave_profile(int i, int j) const {
  Poly out;
  for (const auto& [k, block] : terms_) {
    auto it = block.find({i, j});
    if (it == block.end() || it->second.is_zero()) continue;
    Qi sgn(mono_total(k.second) % 2 ? -1 : 1);
    Mono u = mono_add(k.first, k.second);
    Qi v = (out.count(u) ? out[u] : Qi(0)) + it->second * sgn;
    if (v.is_zero())
      out.erase(u);
    else
      out[u] = v;
  }
  return out;
}

ConstCoeffOp BilinearDensity::as_operator(SpacePtr dual_of_right,
                                          Bidegree op_bd) const {
  if (dual_of_right->dim() != right_->dim())
    throw std::invalid_argument("as_operator: dual dimension mismatch");
  BilinearDensity nfl = normal_form_left();
  ConstCoeffOp out(letters_, left_, dual_of_right, op_bd);
  for (const auto& [k, block] : nfl.terms_) {
    SparseMap mat(left_, dual_of_right, op_bd, false);
    for (const auto& [ij, c] : block) mat.add_to(ij.second, ij.first, c);
    if (!mat.is_zero()) out.add_term(k.first, mat);
  }
  return out;
}

bool BilinearDensity::weight_balanced(const Chart& chart) const {
  // invariance: wt(e_i) + wt(e_j) + wt(x^a) + wt(x^b) = 0, since d^a lowers
  // the component-function weight by the weight of the coordinate monomial
  for (const auto& [k, block] : terms_) {
    Weight wd = chart.mono_weight(k.first) + chart.mono_weight(k.second);
    for (const auto& [ij, c] : block) {
      if (c.is_zero()) continue;
      Weight w = left_->at(ij.first).wt + right_->at(ij.second).wt + wd;
      if (w != weight_zero()) return false;
    }
  }
  return true;
}

bool pairing_symmetry_holds(const BilinearDensity& b, int sign) {
  return (b - b.swapped().scaled(Qi(sign))).normal_form().is_zero();
}

bool is_graded_skew(const BilinearDensity& b) {
  return pairing_symmetry_holds(b, -1);
}

bool pairing_invariance_holds(const BilinearDensity& b, const ConstCoeffOp& q,
                              int sign) {
  BilinearDensity lie =
      b.compose_left(q) + b.compose_right(q, true).scaled(Qi(sign));
  return lie.normal_form().is_zero();
}

bool is_q_compatible(const BilinearDensity& b, const ConstCoeffOp& q) {
  return pairing_invariance_holds(b, q, 1);
}

namespace {

// sign of sorting the concatenation of two disjoint sorted subsets; 0 if they
// intersect
int merge_sign(const FormMono& a, const FormMono& b) {
  int inv = 0;
  for (int s : a)
    for (int t : b) {
      if (s == t) return 0;
      if (s > t) ++inv;
    }
  return inv % 2 ? -1 : 1;
}

}  // namespace

BilinearDensity pairing_wedge(const FormBundle& bundle,
                              const std::string& left_tag,
                              const std::string& right_tag,
                              const std::function<Qi(int, int)>& value_pairing,
                              const Qi& scale, Bidegree bd) {
  const Exterior& ext = bundle.ext();
  int li = bundle.summand_by_tag(left_tag);
  int ri = bundle.summand_by_tag(right_tag);
  if (li < 0 || ri < 0)
    throw std::invalid_argument("pairing_wedge: unknown summand tag");
  const BundleSummand& L = bundle.summand(li);
  const BundleSummand& R = bundle.summand(ri);
  int D = ext.chart().letters();
  BilinearDensity out(D, bundle.fiber(), bundle.fiber(), bd);
  int kL = L.piece.form_degree, kR = R.piece.form_degree;
  if (kL + kR != D) return out;
  Qi topc = ext.top_coefficient().get(0, 0);
  const auto& mL = ext.monos(kL);
  const auto& mR = ext.monos(kR);
  Mono z = mono_zero(D);
  int vL = L.value->dim(), vR = R.value->dim();
  for (int pL = 0; pL < L.piece.space->dim(); ++pL) {
    for (int pR = 0; pR < R.piece.space->dim(); ++pR) {
      Qi w(0);
      for (const auto& [ia, ca] : L.piece.section.col(pL))
        for (const auto& [ib, cb] : R.piece.section.col(pR)) {
          int s = merge_sign(mL[ia], mR[ib]);
          if (s) w = w + ca * cb * Qi(s);
        }
      if (w.is_zero()) continue;
      for (int a = 0; a < vL; ++a) {
        int sv = L.value->at(a).bd.totalized();
        Qi vsgn((sv * kR) % 2 ? -1 : 1);
        for (int bv = 0; bv < vR; ++bv) {
          Qi h = value_pairing(a, bv);
          if (h.is_zero()) continue;
          out.add(z, z, bundle.offset(li) + pL * vL + a,
                  bundle.offset(ri) + pR * vR + bv, scale * w * topc * vsgn);
        }
      }
    }
  }
  return out;
}

}  // namespace pbv
