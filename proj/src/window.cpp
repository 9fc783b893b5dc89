#include "pbv/window.hpp"

#include <fmt/core.h>

#include <stdexcept>

namespace pbv {

namespace {

void enumerate_monos(int letters, int N, Mono& cur, int from, int left,
                     std::vector<Mono>& out) {
  out.push_back(cur);
  if (left == 0) return;
  for (int l = from; l < letters; ++l) {
    cur[l]++;
    enumerate_monos(letters, N, cur, l, left - 1, out);
    cur[l]--;
  }
}

std::string mono_label(const Chart& chart, const Mono& m) {
  std::string s;
  for (size_t l = 0; l < m.size(); ++l) {
    if (!m[l]) continue;
    if (!s.empty()) s += ".";
    s += chart.letter_name(static_cast<int>(l));
    if (m[l] > 1) s += fmt::format("^{}", m[l]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace

int Window::index_of(const Mono& m, int fiber_i) const {
  auto it = mono_index_.find(m);
  if (it == mono_index_.end())
    throw std::out_of_range("Window::index_of: monomial outside window");
  return it->second * fiber->dim() + fiber_i;
}

std::vector<int> Window::slice(int deg, int poly_cap) const {
  std::vector<int> out;
  for (int mi = 0; mi < mono_count(); ++mi) {
    if (mono_total(monos[mi]) > poly_cap) continue;
    for (int fi = 0; fi < fiber->dim(); ++fi)
      if (fiber->at(fi).bd.deg == deg) out.push_back(mi * fiber->dim() + fi);
  }
  return out;
}

std::vector<int> Window::poly_slice(int poly_cap) const {
  std::vector<int> out;
  for (int mi = 0; mi < mono_count(); ++mi) {
    if (mono_total(monos[mi]) > poly_cap) continue;
    for (int fi = 0; fi < fiber->dim(); ++fi)
      out.push_back(mi * fiber->dim() + fi);
  }
  return out;
}

Window make_window(const Chart& chart, SpacePtr fiber, int N,
                   const std::string& name) {
  Window w;
  w.letters = chart.letters();
  w.N = N;
  w.fiber = fiber;
  Mono cur = mono_zero(w.letters);
  enumerate_monos(w.letters, N, cur, 0, N, w.monos);
  auto sp = std::make_shared<GradedSpace>(name);
  for (int mi = 0; mi < static_cast<int>(w.monos.size()); ++mi) {
    w.mono_index_[w.monos[mi]] = mi;
    Weight mw = chart.mono_weight(w.monos[mi]);
    std::string ml = mono_label(chart, w.monos[mi]);
    for (int fi = 0; fi < fiber->dim(); ++fi) {
      const BasisVec& b = fiber->at(fi);
      sp->add(fmt::format("{}|{}", ml, b.label), b.bd, mw + b.wt);
    }
  }
  w.space = sp;
  return w;
}

SparseMap window_matrix(const ConstCoeffOp& op, const Window& src,
                        const Window& tgt) {
  if (op.letters() != src.letters || op.letters() != tgt.letters)
    throw std::invalid_argument("window_matrix: letter mismatch");
  if (op.src()->dim() != src.fiber->dim() ||
      op.tgt()->dim() != tgt.fiber->dim())
    throw std::invalid_argument("window_matrix: fiber mismatch");
  if (tgt.N < src.N)
    throw std::invalid_argument("window_matrix: target window too small");
  SparseMap out(src.space, tgt.space, op.bidegree(), false);
  for (int mi = 0; mi < src.mono_count(); ++mi) {
    const Mono& m = src.monos[mi];
    for (const auto& [d, mat] : op.terms()) {
      // falling-factorial coefficient of d^d applied to x^m
      Qi f(1);
      Mono r = m;
      bool ok = true;
      for (int l = 0; l < src.letters && ok; ++l) {
        if (m[l] < d[l]) {
          ok = false;
          break;
        }
        for (int t = 0; t < d[l]; ++t) f = f * Qi(m[l] - t);
        r[l] = m[l] - d[l];
      }
      if (!ok || f.is_zero()) continue;
      for (int j = 0; j < src.fiber->dim(); ++j) {
        int cj = mi * src.fiber->dim() + j;
        for (const auto& [i, v] : mat.col(j))
          out.add_to(tgt.index_of(r, i), cj, v * f);
      }
    }
  }
  return out;
}

PolySection window_to_section(const Window& w, const DenseVec& v) {
  if (static_cast<int>(v.size()) != w.space->dim())
    throw std::invalid_argument("window_to_section: size mismatch");
  PolySection s;
  s.letters = w.letters;
  s.space = w.fiber;
  int fd = w.fiber->dim();
  for (int k = 0; k < static_cast<int>(v.size()); ++k)
    if (!v[k].is_zero()) s.add(w.monos[k / fd], k % fd, v[k]);
  return s;
}

DenseVec section_to_window(const Window& w, const PolySection& s) {
  DenseVec v(w.space->dim(), Qi(0));
  for (const auto& [m, comps] : s.coeff)
    for (const auto& [fi, c] : comps) v[w.index_of(m, fi)] = v[w.index_of(m, fi)] + c;
  return v;
}

}  // namespace pbv
