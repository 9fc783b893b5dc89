#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbv/forms.hpp"
#include "pbv/graded.hpp"
#include "pbv/sparse_map.hpp"

namespace pbv {

// multi-index over chart letters (derivative orders / polynomial exponents)
using Mono = std::vector<int>;

Mono mono_zero(int letters);
Mono mono_unit(int letters, int l);
Mono mono_add(const Mono& a, const Mono& b);
int mono_total(const Mono& m);

// A constant-coefficient differential operator between graded fibers:
// a finite sum of (fiber matrix) * (partial derivative multi-index).
class ConstCoeffOp {
 public:
  ConstCoeffOp() = default;
  ConstCoeffOp(int letters, SpacePtr src, SpacePtr tgt, Bidegree bd);

  int letters() const { return letters_; }
  const SpacePtr& src() const { return src_; }
  const SpacePtr& tgt() const { return tgt_; }
  Bidegree bidegree() const { return bd_; }
  const std::map<Mono, SparseMap>& terms() const { return terms_; }

  void add_term(const Mono& deriv, const SparseMap& mat);
  bool is_zero() const;
  int max_order() const;

  ConstCoeffOp operator+(const ConstCoeffOp& o) const;
  ConstCoeffOp operator-(const ConstCoeffOp& o) const;
  ConstCoeffOp scaled(const Qi& c) const;
  ConstCoeffOp compose(const ConstCoeffOp& o) const;  // this after o
  // graded commutator with Koszul sign from totalized bidegrees
  static ConstCoeffOp commutator(const ConstCoeffOp& a, const ConstCoeffOp& b);
  ConstCoeffOp with_spaces(SpacePtr src, SpacePtr tgt, Bidegree bd) const;

  // symbol at a covector: substitute each derivative letter by the covector
  // component (an order-zero fiber map)
  SparseMap symbol_at(const std::vector<Qi>& covector) const;

 private:
  int letters_ = 0;
  SpacePtr src_, tgt_;
  Bidegree bd_{0, 0};
  std::map<Mono, SparseMap> terms_;
};

// polynomial-coefficient section of a fiber space
struct PolySection {
  int letters = 0;
  SpacePtr space;
  std::map<Mono, std::map<int, Qi>> coeff;  // monomial -> fiber component -> value

  void add(const Mono& m, int fiber_index, const Qi& v);
  bool is_zero() const;
  PolySection operator-(const PolySection& o) const;
};

PolySection apply_op(const ConstCoeffOp& op, const PolySection& s);

// ---- form-level operator builders ------------------------------------------

enum class LetterSet { All, Holo, Anti, Single };

std::vector<int> letters_of(const Chart& chart, LetterSet w, int single = -1);

// exterior derivative summed over the given letters, Lambda^k -> Lambda^{k+1}
ConstCoeffOp op_d(const Exterior& ext, int k, LetterSet which,
                  int single_letter = -1);
// order-zero operator from a fiber map
ConstCoeffOp op_fiber(const Exterior& ext, const SparseMap& m);
// first-order operator: sum_l (fiber map_l) d/dl
ConstCoeffOp op_first_order(int letters, SpacePtr src, SpacePtr tgt, Bidegree bd,
                            const std::vector<std::pair<int, SparseMap>>& parts);

// ---- bundles ----------------------------------------------------------------

struct BundleSummand {
  std::string tag;
  FiberPiece piece;
  SpacePtr value;
  int deg_offset = 0;  // cohomological degree = form degree + deg_offset (+ value)
  int par_offset = 0;
  Weight wt_offset = weight_zero();
};

// A direct sum of form-type summands (each: a presented subquotient of the
// exterior fiber tensored with a value space) over one chart.
class FormBundle {
 public:
  explicit FormBundle(Chart chart, std::string name = "bundle");

  const Chart& chart() const { return chart_; }
  const Exterior& ext() const { return *ext_; }
  const std::string& name() const { return name_; }

  int add_summand(BundleSummand s);
  int n_summands() const { return static_cast<int>(summands_.size()); }
  const BundleSummand& summand(int i) const { return summands_.at(i); }
  int summand_by_tag(const std::string& tag) const;  // -1 if absent
  int offset(int i) const { return offsets_.at(i); }
  int summand_dim(int i) const;
  // indices of the total fiber belonging to summand i
  std::vector<int> summand_indices(int i) const;

  const SpacePtr& fiber() const { return fiber_; }

 private:
  Chart chart_;
  std::shared_ptr<Exterior> ext_;
  std::string name_;
  std::vector<BundleSummand> summands_;
  std::vector<int> offsets_;
  std::shared_ptr<GradedSpace> fiber_mut_;
  SpacePtr fiber_;
};

// one block of a bundle-level operator
struct OpRoute {
  int src_summand = 0, tgt_summand = 0;
  ConstCoeffOp form_op;  // between the ambient exterior fibers of the pieces
  SparseMap value_map;   // between the value spaces (even)
  Qi scale = Qi(1);
};

ConstCoeffOp assemble_op(const FormBundle& src, const FormBundle& tgt,
                         Bidegree bd, const std::vector<OpRoute>& routes);

// convenience: route with identity value map
OpRoute route(const FormBundle& src, const std::string& src_tag,
              const FormBundle& tgt, const std::string& tgt_tag,
              ConstCoeffOp form_op, Qi scale = Qi(1));
OpRoute route_valued(const FormBundle& src, const std::string& src_tag,
                     const FormBundle& tgt, const std::string& tgt_tag,
                     ConstCoeffOp form_op, SparseMap value_map,
                     Qi scale = Qi(1));

}  // namespace pbv
