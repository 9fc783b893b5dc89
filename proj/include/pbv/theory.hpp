#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbv/homology.hpp"
#include "pbv/pairing.hpp"

namespace pbv {

// A value space with a fixed bilinear pairing (symmetric or antisymmetric),
// used as the coefficient datum of the field constructors below.
struct PairedValueSpace {
  SpacePtr space;
  std::vector<std::vector<Qi>> gram;  // gram[i][j] = pairing of basis i with j
  bool antisymmetric = false;

  int dim() const { return space ? space->dim() : 0; }
  Qi at(int i, int j) const { return gram.at(i).at(j); }
  bool perfect() const;  // gram nondegenerate
  bool consistent() const;  // shape and declared (anti)symmetry hold
};

PairedValueSpace value_line(const std::string& label = "w");  // 1-dim, pairing 1
PairedValueSpace value_standard(int n);                       // identity pairing
PairedValueSpace value_w5();    // the five-dim R-symmetry space with its form
PairedValueSpace value_r(int n);           // rank n in {1,2}, symplectic
PairedValueSpace value_pi_r1prime();       // odd two-dim symplectic space

// A free field theory presented over one flat chart: a graded form bundle, a
// square-zero differential of bidegree (1,0) and a density-valued pairing of
// bidegree (-1,0) that is graded skew and compatible with the differential.
struct TheoryPresentation {
  std::string name;
  Chart chart;
  std::shared_ptr<FormBundle> bundle;
  ConstCoeffOp q_bv;
  BilinearDensity omega;
  // exact scalars fixed during construction (block coefficients of omega, ...)
  std::map<std::string, Qi> conventions;
};

// One failed defining condition, with the first offending entry.
//   1 = differential squares to zero / symbol exactness
//   2 = pairing graded skew
//   3 = pairing compatible with the differential
struct ConditionFailure {
  int condition = 0;
  std::string witness;
};

struct TheoryReport {
  bool q_square_zero = false;
  bool omega_skew = false;
  bool omega_compatible = false;
  SymbolCertificate symbol;
  std::vector<ConditionFailure> failures;

  bool passed() const {
    return q_square_zero && omega_skew && omega_compatible && symbol.ok() &&
           failures.empty();
  }
};

// Verify the three defining conditions exactly, plus symbol exactness at the
// coordinate axes and n_random rational covectors.
TheoryReport check_theory(const TheoryPresentation& t, int n_random = 20,
                          uint64_t seed = 20260814ull);

// ---- catalog constructors ----------------------------------------------------
// Each returns a theory whose pairing block coefficients are solved exactly:
// the pairing is assembled from wedge blocks between the summands named in the
// defining display, graded-skew by construction, and the relative block
// coefficients are the unique solution (first block normalised to 1) making
// the pairing compatible with the differential.

// Dolbeault rows (0..k, all antiholomorphic degrees) on a complex chart of
// dimension 2k+1, shifted so the bottom corner sits in degree -2k; the
// differential is the full de Rham operator and the pairing is the
// holomorphic-derivative wedge against the value form.
TheoryPresentation make_chi(const Chart& chart, int two_k,
                            const PairedValueSpace& w);

// Forms of degree 0..2k on a real chart of dimension 4k+2, followed by the
// +i eigenspace of the middle-degree star; the last differential is the
// projected exterior derivative and the pairing is the derivative wedge.
TheoryPresentation make_chi_plus(const Chart& chart, int two_k,
                                 const PairedValueSpace& w);

// Two truncated de Rham rows (degrees <= p and >= d-p) bridged by d star d,
// with the order-zero wedge pairing; nondegenerate.
TheoryPresentation make_phi(const Chart& chart, int p,
                            const PairedValueSpace& w);

// Scalars: the p = 0 case of the two-row theory.
TheoryPresentation make_free_boson(const Chart& chart,
                                   const PairedValueSpace& w);

// Odd spinors valued in a symplectic space on the six-dimensional chart, with
// the Dirac operator and the order-zero spinor pairing.
TheoryPresentation make_fermi(const Chart& chart, const PairedValueSpace& r);

// Dolbeault (0,q) forms valued in s twisted by the half-determinant weight on
// the complex three-dimensional chart, with the holomorphic-volume wedge
// pairing.
TheoryPresentation make_hcs(const Chart& chart, const PairedValueSpace& s);

// The (0,q) row paired against the (3,q) row on the complex three-dimensional
// chart; both rows carry the Dolbeault differential.
TheoryPresentation make_betagamma(const Chart& chart);

// Direct sum over a common chart; summand tags must be disjoint.
TheoryPresentation direct_sum(const TheoryPresentation& a,
                              const TheoryPresentation& b,
                              const std::string& name = "");

// The six-dimensional multiplets: rank n in {1,2} assembles the middle-form
// theory, odd spinors valued in the rank-n symplectic space, and scalars
// valued in the trivial line (n = 1) or the five-dim space (n = 2).
TheoryPresentation make_tensor_multiplet(int n);

// ---- pairing as a map into the dual complex ----------------------------------

// The dual fiber: one basis functional per fiber vector, at complementary
// degree (deg* = 1 - deg), equal parity, opposite weight.
SpacePtr dual_fiber(const SpacePtr& fiber);

// The adjoint differential on the dual fiber, squaring to zero whenever q
// does; omega.as_operator(dual_fiber(..), {0,0}) intertwines q with it
// exactly when the compatibility condition holds.
ConstCoeffOp dual_differential(const ConstCoeffOp& q, SpacePtr dual);

struct ConeOmegaReport {
  bool chain_map = false;        // pairing-as-map intertwines the differentials
  bool dual_square_zero = false;
  bool cone_square_zero = false;
  // at every sampled covector the differential induced on the cokernel of the
  // pairing symbol is exact (the dual part contributes no new cohomology)
  bool coker_acyclic = false;
  SymbolCertificate cone_symbol;   // full symbol exactness of the cone
  CohomologyReport cone_window;    // interior cohomology of the cone
  // interior cohomology of the kernel of the pairing map on the same window,
  // keyed in the cone's grading (source degrees shifted down by one)
  std::map<int, int> kernel_interior;
  bool resolves_kernel = false;    // cone interior equals the kernel interior

  bool acyclic() const {
    return chain_map && dual_square_zero && cone_square_zero &&
           cone_symbol.ok() && coker_acyclic && resolves_kernel;
  }
};

// Certify that the cone of the pairing map is a resolution of its kernel:
// build the dual complex, check the chain-map/square-zero identities, sample
// the symbol for surjectivity onto the dual part, and compare the interior
// window cohomology of the cone against that of the kernel subsheaf.
ConeOmegaReport cone_omega_check(const TheoryPresentation& t, int window_n,
                                 int n_random = 20,
                                 uint64_t seed = 20260814ull);

bool cone_omega_acyclic(const TheoryPresentation& t);

// ---- shared assembly helpers --------------------------------------------------

// Wedge-to-top pairing block with optional derivative letters and a fixed
// middle form:
//   B(mu (x) v, nu (x) w) =
//     sum_l (-1)^{|v|(|mid| + deg nu)} top(dl ^ mu ^ mid ^ nu) h(v, w) d_l(.)
// where |v| is the totalized parity of the left fiber element and the sum is
// over deriv_letters (an empty list means the order-zero pairing without dl;
// an empty middle list means no middle factor).  Entries that would violate
// the declared bidegree are skipped.
BilinearDensity omega_block(const FormBundle& bundle,
                            const std::string& left_tag,
                            const std::string& right_tag,
                            const std::vector<int>& deriv_letters,
                            const std::vector<std::pair<FormMono, Qi>>& middle,
                            const std::function<Qi(int, int)>& value_pairing,
                            Bidegree bd);

}  // namespace pbv
