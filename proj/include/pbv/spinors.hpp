#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbv/forms.hpp"
#include "pbv/graded.hpp"
#include "pbv/sparse_map.hpp"

namespace pbv {

// Fixed-basis models of the six-dimensional spin representations, the vector
// representation realised on bivectors, and the rank-one / rank-two symplectic
// R-symmetry spaces, together with every equivariant structure map the
// supersymmetry action needs.  All bases are homogeneous for the doubled
// five-slot torus weights; every structure map preserves them entry by entry.
//
// Conventions baked into the model (each recorded in `conventions`):
//   - S+ has basis e1..e4; e1 spans the half-determinant line of the
//     holomorphic frame, e2..e4 the twisted coordinate lines.
//   - eps(e1,e2,e3,e4) = +1 trivialises the top wedge of S+.
//   - V = wedge^2 S+ with basis v(i,j), i<j, lexicographic; the metric is
//     g(a,b) = eps(a ^ b).
//   - c_plus(v (x) s) = eps(v ^ s ^ -) in the dual basis; c_minus is the
//     contraction scaled so both round trips equal g(v,v) exactly.
//   - the coordinate dictionary sends v(1,1+a) to the holomorphic derivation
//     of the a-th complex coordinate.
struct SpinorModel {
  // spin side
  SpacePtr S_plus, S_minus, V, L2V, L3V;
  std::vector<std::vector<int>> V_subsets;    // pairs of S+ indices
  std::vector<std::vector<int>> L2V_subsets;  // pairs of V indices
  std::vector<std::vector<int>> L3V_subsets;  // triples of V indices

  SparseMap pair_SS;  // S+ (x) S- -> C, the perfect pairing
  SparseMap g_V;      // V (x) V -> C, symmetric nondegenerate
  SparseMap c_plus;   // V (x) S+ -> S-
  SparseMap c_minus;  // V (x) S- -> S+
  SparseMap gamma3;   // wedge^3 V (x) S+ -> S-, antisymmetrised triple product
  SparseMap star3;    // wedge^3 V -> wedge^3 V, squares to -1
  std::vector<DenseVec> sd_basis;   // +i eigenspace of star3 (gamma3 kills it)
  std::vector<DenseVec> asd_basis;  // -i eigenspace of star3

  SparseMap spin_rep2;  // wedge^2 V (x) S+ -> S+, bivector spin action
  SparseMap bispinor2;  // S+ (x) S- -> wedge^2 V, the bispinor bivector

  // R-symmetry side
  SpacePtr R1, R2, W;
  SparseMap omega_R1;  // R1 (x) R1 -> C
  SparseMap omega_R2;  // R2 (x) R2 -> C
  SparseMap incl_R1, incl_R1p;  // the two symplectic-plane inclusions into R2
  SparseMap h_W;       // W (x) W -> C, symmetric nondegenerate
  SparseMap incl_W;    // W -> R2 (x) R2 (antisymmetric traceless tensors)
  SparseMap proj_W2;   // R2 (x) R2 -> W with proj_W2 o incl_W = id
  DenseVec omega_inv;  // the invariant bivector in R2 (x) R2
  SparseMap c_five;    // W (x) R2 -> R2, rank-two symplectic Clifford action

  // supercharge spaces and pairings
  SpacePtr Sigma1;     // S+ (x) R1
  SpacePtr Sigma2;     // S+ (x) R2
  SpacePtr SigmaDual;  // S- (x) R2
  SpacePtr DD;         // Sigma2 (x) SigmaDual
  SparseMap bracket1;  // Sigma1 (x) Sigma1 -> V
  SparseMap bracket2;  // Sigma2 (x) Sigma2 -> V
  SparseMap star_map;  // Sigma2 (x) Sigma2 -> V (x) W

  // the three small summands of Sigma2 (x) SigmaDual, with normalised
  // projections (proj o incl = id on each summand)
  SparseMap proj_c, incl_c;        // scalar summand
  SparseMap proj_2form, incl_2form;  // wedge^2 V summand
  SparseMap proj_w, incl_w;        // W summand

  std::map<std::string, Qi> conventions;
};

// The model is immutable and built once.
const SpinorModel& spinor_model();

// Coordinates in V of the coordinate derivations of `chart` (one vector per
// letter; defined for the rank-three complex chart and the rank-six real one).
std::vector<DenseVec> v_of_letters(const Chart& chart);

// gamma3 applied to q (x) a, rejecting a outside the -i eigenspace of star3.
DenseVec asd_project(const SpinorModel& m, const DenseVec& q, const DenseVec& a);

// Derivation extension of a base-space map to a wedge-power space whose basis
// is given by index subsets of the base.
SparseMap wedge_derivation(SpacePtr wedge_sp, SpacePtr base,
                           const std::vector<std::vector<int>>& subsets,
                           const SparseMap& e);

// Dual action on S- induced by a map on S+ (negative transpose).
SparseMap dual_action(SpacePtr s_minus, const SparseMap& e);

// Every entry of the map relates basis vectors of equal torus weight.
bool weight_zero_entries(const SparseMap& m);

// ---- branchings -------------------------------------------------------------

// A named linear projection of the five-slot doubled weight lattice onto the
// (doubled) weight lattice of a subgroup; rows may be half-integral as long as
// every weight that occurs maps to an integer vector.
struct BranchingData {
  std::string label;
  std::vector<Covector> rows;
};

std::vector<int> branch_weight(const BranchingData& d, const Weight& w);
std::map<std::vector<int>, std::vector<int>> branch(const GradedSpace& sp,
                                                    const BranchingData& d);

// determinant charge of the unitary subgroup fixed by the holomorphic frame
BranchingData branch_mu3();
// holomorphic twisting data for the rank-one algebra: (ghost, spin) doubled
BranchingData branch_twist10();
// holomorphic twisting data for the rank-two algebra: (ghost, l1, l2, l3, s')
BranchingData branch_twist20();
// polarised alternative for the rank-two algebra: (ghost, l1, l2, l3)
BranchingData branch_twist20_alt();
// block-diagonal refinement: (ghost, u1, u2, x) on the split chart
BranchingData branch_top();
// four-plus-two split: (ghost, s1, s2, q)
BranchingData branch_so4();
// the plain rank-two R-symmetry torus: (t, t')
BranchingData branch_sp11();

}  // namespace pbv
