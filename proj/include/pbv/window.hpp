#pragma once

#include <map>
#include <string>
#include <vector>

#include "pbv/operators.hpp"

namespace pbv {

// Finite-dimensional truncation of polynomial-coefficient sections: all
// monomials of total degree <= N over a fixed fiber.  Every constant
// coefficient operator preserves the truncation (each term lowers or keeps
// the polynomial degree), so restriction matrices are exact on the nose.
struct Window {
  int letters = 0;
  int N = 0;
  SpacePtr fiber;
  SpacePtr space;  // (monomials) x (fiber), monomial-major
  std::vector<Mono> monos;

  int mono_count() const { return static_cast<int>(monos.size()); }
  int index_of(const Mono& m, int fiber_i) const;
  // indices with the given cohomological degree and polynomial degree <= cap
  std::vector<int> slice(int deg, int poly_cap) const;
  std::vector<int> poly_slice(int poly_cap) const;  // all degrees

 private:
  std::map<Mono, int> mono_index_;
  friend Window make_window(const Chart& chart, SpacePtr fiber, int N,
                            const std::string& name);
};

Window make_window(const Chart& chart, SpacePtr fiber, int N,
                   const std::string& name);

// exact matrix of the operator between two windows over the same chart
SparseMap window_matrix(const ConstCoeffOp& op, const Window& src,
                        const Window& tgt);

// embed a window vector as a polynomial section / flatten one back
PolySection window_to_section(const Window& w, const DenseVec& v);
DenseVec section_to_window(const Window& w, const PolySection& s);

}  // namespace pbv
