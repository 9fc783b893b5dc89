#include "pbv/operators.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/core.h>

namespace pbv {

Mono mono_zero(int letters) { return Mono(letters, 0); }

Mono mono_unit(int letters, int l) {
  Mono m(letters, 0);
  m[l] = 1;
  return m;
}

Mono mono_add(const Mono& a, const Mono& b) {
  Mono m = a;
  for (size_t i = 0; i < b.size(); ++i) m[i] += b[i];
  return m;
}

int mono_total(const Mono& m) {
  int t = 0;
  for (int e : m) t += e;
  return t;
}

ConstCoeffOp::ConstCoeffOp(int letters, SpacePtr src, SpacePtr tgt, Bidegree bd)
    : letters_(letters), src_(std::move(src)), tgt_(std::move(tgt)), bd_(bd) {}

void ConstCoeffOp::add_term(const Mono& deriv, const SparseMap& mat) {
  if (static_cast<int>(deriv.size()) != letters_)
    throw std::invalid_argument("ConstCoeffOp::add_term: bad multi-index size");
  auto it = terms_.find(deriv);
  if (it == terms_.end()) {
    if (!mat.is_zero()) terms_.emplace(deriv, mat);
  } else {
    it->second = it->second + mat;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool ConstCoeffOp::is_zero() const {
  for (const auto& [m, mat] : terms_)
    if (!mat.is_zero()) return false;
  return true;
}

int ConstCoeffOp::max_order() const {
  int mx = 0;
  for (const auto& [m, mat] : terms_) mx = std::max(mx, mono_total(m));
  return mx;
}

ConstCoeffOp ConstCoeffOp::operator+(const ConstCoeffOp& o) const {
  ConstCoeffOp out = *this;
  for (const auto& [m, mat] : o.terms_) out.add_term(m, mat);
  return out;
}

ConstCoeffOp ConstCoeffOp::operator-(const ConstCoeffOp& o) const {
  return *this + o.scaled(Qi(-1));
}

ConstCoeffOp ConstCoeffOp::scaled(const Qi& c) const {
  ConstCoeffOp out(letters_, src_, tgt_, bd_);
  if (c.is_zero()) return out;
  for (const auto& [m, mat] : terms_) out.terms_[m] = mat.scaled(c);
  return out;
}

ConstCoeffOp ConstCoeffOp::compose(const ConstCoeffOp& o) const {
  if (src_->dim() != o.tgt_->dim())
    throw std::invalid_argument("ConstCoeffOp::compose: shape mismatch " +
                                src_->name() + " vs " + o.tgt_->name());
  ConstCoeffOp out(letters_, o.src_, tgt_,
                   Bidegree{bd_.deg + o.bd_.deg, (bd_.par + o.bd_.par) & 1});
  for (const auto& [m1, a] : terms_)
    for (const auto& [m2, b] : o.terms_) out.add_term(mono_add(m1, m2), a.compose(b));
  return out;
}

ConstCoeffOp ConstCoeffOp::commutator(const ConstCoeffOp& a, const ConstCoeffOp& b) {
  int sgn = (a.bd_.totalized() && b.bd_.totalized()) ? -1 : 1;
  return a.compose(b) - b.compose(a).scaled(Qi(sgn));
}

ConstCoeffOp ConstCoeffOp::with_spaces(SpacePtr src, SpacePtr tgt,
                                       Bidegree bd) const {
  ConstCoeffOp out(letters_, src, tgt, bd);
  for (const auto& [m, mat] : terms_)
    out.terms_[m] = mat.with_spaces(src, tgt, bd);
  return out;
}

SparseMap ConstCoeffOp::symbol_at(const std::vector<Qi>& covector) const {
  SparseMap out(src_, tgt_, bd_, false);
  for (const auto& [m, mat] : terms_) {
    Qi c(1);
    for (int l = 0; l < letters_; ++l)
      for (int e = 0; e < m[l]; ++e) c *= covector[l];
    if (!c.is_zero()) out = out + mat.scaled(c);
  }
  return out;
}

void PolySection::add(const Mono& m, int fiber_index, const Qi& v) {
  if (v.is_zero()) return;
  auto& slot = coeff[m][fiber_index];
  slot += v;
  if (slot.is_zero()) {
    coeff[m].erase(fiber_index);
    if (coeff[m].empty()) coeff.erase(m);
  }
}

bool PolySection::is_zero() const { return coeff.empty(); }

PolySection PolySection::operator-(const PolySection& o) const {
  PolySection out = *this;
  for (const auto& [m, comps] : o.coeff)
    for (const auto& [i, v] : comps) out.add(m, i, -v);
  return out;
}

PolySection apply_op(const ConstCoeffOp& op, const PolySection& s) {
  PolySection out;
  out.letters = s.letters;
  out.space = op.tgt();
  for (const auto& [deriv, mat] : op.terms()) {
    for (const auto& [m, comps] : s.coeff) {
      // differentiate monomial m by deriv
      Qi factor(1);
      Mono nm = m;
      bool dead = false;
      for (size_t l = 0; l < m.size(); ++l) {
        for (int e = 0; e < deriv[l]; ++e) {
          if (nm[l] == 0) {
            dead = true;
            break;
          }
          factor *= Qi(nm[l]);
          nm[l] -= 1;
        }
        if (dead) break;
      }
      if (dead) continue;
      for (const auto& [j, v] : comps)
        for (const auto& [i, mv] : mat.col(j)) out.add(nm, i, factor * v * mv);
    }
  }
  return out;
}

std::vector<int> letters_of(const Chart& chart, LetterSet w, int single) {
  std::vector<int> out;
  for (int l = 0; l < chart.letters(); ++l) {
    switch (w) {
      case LetterSet::All:
        out.push_back(l);
        break;
      case LetterSet::Holo:
        if (chart.kind(l) == Chart::LetterKind::Holo) out.push_back(l);
        break;
      case LetterSet::Anti:
        if (chart.kind(l) == Chart::LetterKind::Anti) out.push_back(l);
        break;
      case LetterSet::Single:
        if (l == single) out.push_back(l);
        break;
    }
  }
  return out;
}

ConstCoeffOp op_d(const Exterior& ext, int k, LetterSet which, int single_letter) {
  const Chart& ch = ext.chart();
  ConstCoeffOp out(ch.letters(), ext.lambda(k), ext.lambda(k + 1),
                   Bidegree{1, 0});
  for (int l : letters_of(ch, which, single_letter)) {
    SparseMap w = ext.wedge_by(k, {{{l}, Qi(1)}});
    out.add_term(mono_unit(ch.letters(), l), w);
  }
  return out;
}

ConstCoeffOp op_fiber(const Exterior& ext, const SparseMap& m) {
  ConstCoeffOp out(ext.chart().letters(), m.src(), m.tgt(), m.bidegree());
  out.add_term(mono_zero(ext.chart().letters()), m);
  return out;
}

ConstCoeffOp op_first_order(int letters, SpacePtr src, SpacePtr tgt, Bidegree bd,
                            const std::vector<std::pair<int, SparseMap>>& parts) {
  ConstCoeffOp out(letters, std::move(src), std::move(tgt), bd);
  for (const auto& [l, m] : parts) out.add_term(mono_unit(letters, l), m);
  return out;
}

// ---- bundles ----------------------------------------------------------------

FormBundle::FormBundle(Chart chart, std::string name)
    : chart_(chart),
      ext_(std::make_shared<Exterior>(chart)),
      name_(std::move(name)) {
  fiber_mut_ = std::make_shared<GradedSpace>(name_);
  fiber_ = fiber_mut_;
}

int FormBundle::add_summand(BundleSummand s) {
  offsets_.push_back(fiber_mut_->dim());
  for (int fi = 0; fi < s.piece.space->dim(); ++fi) {
    const auto& fb = s.piece.space->at(fi);
    for (int vi = 0; vi < s.value->dim(); ++vi) {
      const auto& vb = s.value->at(vi);
      std::string label = s.tag + "." + fb.label;
      if (s.value->dim() > 1 || vb.label != "1") label += "*" + vb.label;
      Bidegree bd{fb.bd.deg + vb.bd.deg + s.deg_offset,
                  (fb.bd.par + vb.bd.par + s.par_offset) & 1};
      fiber_mut_->add(label, bd, fb.wt + vb.wt + s.wt_offset);
    }
  }
  summands_.push_back(std::move(s));
  return static_cast<int>(summands_.size()) - 1;
}

int FormBundle::summand_by_tag(const std::string& tag) const {
  for (int i = 0; i < n_summands(); ++i)
    if (summands_[i].tag == tag) return i;
  return -1;
}

int FormBundle::summand_dim(int i) const {
  return summands_[i].piece.space->dim() * summands_[i].value->dim();
}

std::vector<int> FormBundle::summand_indices(int i) const {
  std::vector<int> out;
  for (int k = 0; k < summand_dim(i); ++k) out.push_back(offsets_[i] + k);
  return out;
}

ConstCoeffOp assemble_op(const FormBundle& src, const FormBundle& tgt,
                         Bidegree bd, const std::vector<OpRoute>& routes) {
  ConstCoeffOp out(src.chart().letters(), src.fiber(), tgt.fiber(), bd);
  for (const auto& r : routes) {
    const auto& ss = src.summand(r.src_summand);
    const auto& ts = tgt.summand(r.tgt_summand);
    int vs = ss.value->dim(), vt = ts.value->dim();
    int so = src.offset(r.src_summand), to = tgt.offset(r.tgt_summand);
    for (const auto& [m, mat] : r.form_op.terms()) {
      SparseMap wrapped = ts.piece.projection.compose(mat).compose(ss.piece.section);
      if (wrapped.is_zero()) continue;
      SparseMap block(src.fiber(), tgt.fiber(), bd, false);
      for (int j = 0; j < wrapped.src()->dim(); ++j) {
        for (const auto& [i, v] : wrapped.col(j)) {
          for (int jv = 0; jv < vs; ++jv)
            for (const auto& [iv, vv] : r.value_map.col(jv))
              block.add_to(to + i * vt + iv, so + j * vs + jv,
                           r.scale * v * vv);
        }
      }
      out.add_term(m, block);
    }
  }
  return out;
}

OpRoute route(const FormBundle& src, const std::string& src_tag,
              const FormBundle& tgt, const std::string& tgt_tag,
              ConstCoeffOp form_op, Qi scale) {
  int si = src.summand_by_tag(src_tag), ti = tgt.summand_by_tag(tgt_tag);
  if (si < 0 || ti < 0)
    throw std::invalid_argument("route: unknown summand tag " + src_tag + "/" +
                                tgt_tag);
  SparseMap vm = SparseMap::identity(src.summand(si).value);
  if (src.summand(si).value->dim() != tgt.summand(ti).value->dim())
    throw std::invalid_argument("route: value dim mismatch for identity");
  return OpRoute{si, ti, std::move(form_op),
                 vm.with_spaces(src.summand(si).value, tgt.summand(ti).value,
                                Bidegree{0, 0}),
                 scale};
}

OpRoute route_valued(const FormBundle& src, const std::string& src_tag,
                     const FormBundle& tgt, const std::string& tgt_tag,
                     ConstCoeffOp form_op, SparseMap value_map, Qi scale) {
  int si = src.summand_by_tag(src_tag), ti = tgt.summand_by_tag(tgt_tag);
  if (si < 0 || ti < 0)
    throw std::invalid_argument("route: unknown summand tag " + src_tag + "/" +
                                tgt_tag);
  return OpRoute{si, ti, std::move(form_op), std::move(value_map), scale};
}

}  // namespace pbv
