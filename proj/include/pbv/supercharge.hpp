#pragma once

#include <utility>
#include <vector>

#include "pbv/spinors.hpp"

namespace pbv {

// Odd elements of the supertranslation algebra: a 4 x 2n matrix over Q(i),
// rows indexed by the chiral spinor basis, columns by the R-symmetry basis.
struct Supercharge {
  int n = 2;           // 1 or 2
  std::vector<Qi> m;   // row-major, m[i * 2n + r]

  Supercharge() : m(16, Qi(0)) {}
  explicit Supercharge(int n_) : n(n_), m(4 * 2 * n_, Qi(0)) {}

  Qi& at(int i, int r) { return m[i * 2 * n + r]; }
  const Qi& at(int i, int r) const { return m[i * 2 * n + r]; }

  bool is_zero() const;
  int rank() const;
  // coordinates in S+ (x) R_n (row-major, matching the tensor convention)
  DenseVec as_vector() const;

  Supercharge operator+(const Supercharge& o) const;
  Supercharge scaled(const Qi& c) const;
};

// rank-one charge  xi (x) r
Supercharge rank_one_charge(int n, const DenseVec& xi, const DenseVec& r);

enum class ChargeClass { not_square_zero, minimal_rank1, nonminimal_rank2 };

// self-bracket in V, computed through the equivariant pairing
DenseVec charge_bracket(const Supercharge& a, const Supercharge& b);

// square-zero status and rank stratum; throws on the zero charge
ChargeClass classify(const Supercharge& q);

// (dimension of the anticommutant of q inside Sigma_n, codimension)
std::pair<int, int> tangent_dimensions(const Supercharge& q);

struct DeformationCheck {
  bool valid = false;            // anticommutes and has vanishing self-bracket
  bool anticommutes = false;     // [q, qp] = 0
  bool self_square_zero = false; // [qp, qp] = 0
  ChargeClass combined = ChargeClass::not_square_zero;  // class of q + qp
};

// test a candidate deformation qp of a rank-one charge q (both n = 2)
DeformationCheck deformation_check(const Supercharge& q, const Supercharge& qp);

// residual directions surviving a rank-two twist: dual lines in degree -1,
// translations in degree 0, a bivector block in degree +1; the only bracket
// contracts a dual line with a bivector.
struct ResidualAlgebra {
  SpacePtr g;        // 9-dimensional: eta_1..3 | v_1..3 | pi_23, pi_13, pi_12
  SparseMap bracket; // g (x) g -> g, graded-symmetric on the odd part
  int eta_index(int a) const { return a; }
  int v_index(int a) const { return 3 + a; }
  int pi_index(int a, int b) const;  // pi_{ab}, a < b
};

ResidualAlgebra residual_algebra();

}  // namespace pbv
