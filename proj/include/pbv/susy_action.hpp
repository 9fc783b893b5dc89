#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbv/operators.hpp"
#include "pbv/pairing.hpp"
#include "pbv/supercharge.hpp"
#include "pbv/theory.hpp"

namespace pbv {

// Result of pinning the structure scalars of the odd symmetry action on the
// rank-two multiplet.  Constraints imposed: every linear-layer operator is a
// chain map and preserves the pairing, and the quadratic layer balances the
// closure defect of the linear layer exactly, on all basis charge pairs.
// `ok` means a solution with every scalar nonzero exists; otherwise `failure`
// names the constraints that force scalars to vanish.
struct ScalarSolution {
  bool ok = false;
  std::string failure;
  std::map<std::string, Qi> table;
};

// Solve the scalars.  `wrong_eigenspace` reroutes the two-form transformation
// through the opposite eigenspace of the middle star (a deliberate convention
// error: the triple Clifford product annihilates that eigenspace, so the
// system must come out inconsistent).
ScalarSolution solve_equivariant_scalars(bool wrong_eigenspace = false);

struct ActionData;  // internal: solved route operators and index tables

// The symmetry action on the rank-two multiplet: translations, one odd
// operator per supercharge (the linear layer), and a symmetric quadratic
// correction.  All structure scalars are solved, never chosen by hand;
// conventions() records the solution.
class SusyAction {
 public:
  const TheoryPresentation& theory() const;
  const std::map<std::string, Qi>& conventions() const { return table_; }

  // linear layer: an odd degree-zero operator per supercharge (n = 2)
  ConstCoeffOp rho1(const Supercharge& q) const;
  // even layer: translation along a constant vector in letter components
  ConstCoeffOp rho1_even(const DenseVec& v_letters) const;
  // quadratic layer, symmetric in the two charges, lowers degree by one
  ConstCoeffOp rho2(const Supercharge& a, const Supercharge& b) const;

  // bracket of two odd charges, converted to letter components
  DenseVec bracket_letters(const Supercharge& a, const Supercharge& b) const;

  // closure defect of the linear layer,
  //   mu(a,b) = rho1_even([a,b]) - rho1(a)rho1(b) - s rho1(b)rho1(a),
  // with the recorded exchange sign s
  ConstCoeffOp mu(const Supercharge& a, const Supercharge& b) const;

  // copy with one convention scalar overridden (for negative controls)
  SusyAction with_scalar(const std::string& name, const Qi& value) const;

 private:
  friend SusyAction build_susy_action();

  std::shared_ptr<const ActionData> d_;
  std::map<std::string, Qi> table_;
};

// Build the action with solved scalars; throws std::runtime_error if the
// constraint system has no all-nonzero solution.
SusyAction build_susy_action();

// One block of the closure-defect comparison: the defect restricted to a
// source/target summand pair, diffed against the same block of the commutator
// of the BV differential with the quadratic layer.
struct MuBlock {
  std::string src, tgt;
  bool matches = false;
};
std::vector<MuBlock> compute_mu(const SusyAction& act, const Supercharge& a,
                                const Supercharge& b);

// The closure identity [Q_BV, rho2(a,b)] = mu(a,b), exactly; on failure
// `witness` names the first offending block entry.
bool check_linfinity(const SusyAction& act, const Supercharge& a,
                     const Supercharge& b, std::string* witness = nullptr);

// The arity-three identity: the three splittings of one charge against the
// quadratic layer of the other two cancel exactly.
bool check_higher_vanishing(const SusyAction& act, const Supercharge& a,
                            const Supercharge& b, const Supercharge& c,
                            std::string* witness = nullptr);

// the entries of `op` with source column in summand `src_tag` and target row
// in summand `tgt_tag` of the bundle, all other entries dropped
ConstCoeffOp restrict_block(const ConstCoeffOp& op, const FormBundle& b,
                            const std::string& src_tag,
                            const std::string& tgt_tag);

}  // namespace pbv
