#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "pbv/graded.hpp"
#include "pbv/scalar.hpp"

namespace pbv {

// Sparse linear map between graded spaces, stored column-major.  Inserting an
// entry checks homogeneity against the declared bidegree unless the map was
// created inhomogeneous.
class SparseMap {
 public:
  SparseMap() = default;
  SparseMap(SpacePtr src, SpacePtr tgt, Bidegree bd, bool enforce = true);

  static SparseMap identity(SpacePtr s);
  static SparseMap zero(SpacePtr src, SpacePtr tgt, Bidegree bd);

  const SpacePtr& src() const { return src_; }
  const SpacePtr& tgt() const { return tgt_; }
  Bidegree bidegree() const { return bd_; }

  void set(int row, int col, const Qi& v);
  void add_to(int row, int col, const Qi& v);
  Qi get(int row, int col) const;
  const std::map<int, Qi>& col(int j) const { return cols_.at(j); }
  bool is_zero() const;
  int nnz() const;

  SparseMap operator+(const SparseMap& o) const;
  SparseMap operator-(const SparseMap& o) const;
  SparseMap scaled(const Qi& c) const;
  // this o other (apply other first)
  SparseMap compose(const SparseMap& other) const;
  // Plain matrix transpose (no Koszul signs); used by elimination utilities.
  SparseMap transposed() const;

  // Graded tensor of maps: (A (x) B)(x (x) y) = (-1)^{|B| |x|} Ax (x) By,
  // with |.| the totalized parity.  Index order matches GradedSpace::tensor.
  static SparseMap tensor(const SparseMap& a, const SparseMap& b);
  // Koszul braiding U (x) V -> V (x) U.
  static SparseMap braiding(SpacePtr u, SpacePtr v);
  // Graded commutator [a,b] = a b - (-1)^{|a||b|} b a.
  static SparseMap commutator(const SparseMap& a, const SparseMap& b);

  // Sum of blocks: block (i,j) maps the j-th source summand into the i-th
  // target summand; any block may be null.
  static SparseMap from_blocks(
      SpacePtr src, SpacePtr tgt, Bidegree bd,
      const std::vector<std::tuple<int, int, const SparseMap*>>& blocks,
      const std::vector<int>& tgt_offsets, const std::vector<int>& src_offsets);

  // Restriction to index subsets (dense indices into tgt/src).
  SparseMap restricted(const std::vector<int>& tgt_idx,
                       const std::vector<int>& src_idx) const;

  // Change codomain/domain space to a compatible one (same dimension);
  // used when re-labelling bases.
  SparseMap with_spaces(SpacePtr src, SpacePtr tgt, Bidegree bd) const;

 private:
  SpacePtr src_, tgt_;
  Bidegree bd_{0, 0};
  bool enforce_ = false;
  std::vector<std::map<int, Qi>> cols_;
};

// ---- exact elimination ----------------------------------------------------

struct Elimination {
  int rank = 0;
  // echelon rows in elimination order: (pivot column, full row contents)
  std::vector<std::pair<int, std::map<int, Qi>>> rows;
  std::vector<int> pivot_cols;  // set of pivot columns
  std::vector<int> pivot_rows;  // original row indices used as pivots
};

// Primary path: sparse fraction-free elimination (Bareiss) over Z[i] after
// clearing row denominators.  Pivots chosen to limit fill-in.
Elimination eliminate(const SparseMap& m);

// Oracle path: naive Gaussian elimination over Q(i), first-nonzero pivoting.
int rank_gauss_oracle(const SparseMap& m);

int rank(const SparseMap& m);

// Dense column vectors over Qi.
using DenseVec = std::vector<Qi>;

// Basis of ker(m), found from the fraction-free echelon form by exact
// back-substitution.  Each vector satisfies m v = 0 identically.
std::vector<DenseVec> kernel_basis(const SparseMap& m);

// Indices of target basis vectors spanning a complement of the image
// (cokernel representatives), via eliminating the transpose.
std::vector<int> cokernel_rep_indices(const SparseMap& m);

// dim(im(m) /\ span of target indices in `window`), by rank arithmetic.
int image_intersection_dim(const SparseMap& m, const std::vector<int>& window);

// Does `v` lie in im(m) + span(extra columns)?  (exact membership by rank)
bool in_image_span(const SparseMap& m, const std::vector<DenseVec>& extra,
                   const DenseVec& v);

SparseMap apply_to_columns(const SparseMap& m, const std::vector<DenseVec>& vecs,
                           SpacePtr col_space);

}  // namespace pbv
