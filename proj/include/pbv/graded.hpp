#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pbv/scalar.hpp"

namespace pbv {

// (cohomological degree, intrinsic parity).  Sign rules use the totalized
// parity (deg + par) mod 2.
struct Bidegree {
  int deg = 0;
  int par = 0;  // 0 or 1

  int totalized() const { return ((deg + par) % 2 + 2) % 2; }
  Bidegree operator+(const Bidegree& o) const {
    return Bidegree{deg + o.deg, (par + o.par) & 1};
  }
  friend bool operator==(const Bidegree&, const Bidegree&) = default;
  friend auto operator<=>(const Bidegree&, const Bidegree&) = default;
};

// Doubled equivariant weights under the fixed maximal torus:
// slots 0..2 = the three rotation circles (one per complex coordinate plane),
// slots 3..4 = the rank-two torus of the R-symmetry group.  Entries are twice
// the naive weight so that half-integral spinor weights stay integral.
constexpr int kWeightSlots = 5;
using Weight = std::array<int, kWeightSlots>;

inline Weight weight_zero() { return Weight{0, 0, 0, 0, 0}; }
inline Weight operator+(const Weight& a, const Weight& b) {
  Weight w;
  for (int s = 0; s < kWeightSlots; ++s) w[s] = a[s] + b[s];
  return w;
}
inline Weight operator-(const Weight& a, const Weight& b) {
  Weight w;
  for (int s = 0; s < kWeightSlots; ++s) w[s] = a[s] - b[s];
  return w;
}

// Integer covector on the torus; pairs with doubled weights (result is twice
// the honest pairing, which is fine for weight-zero checks).
using Covector = std::array<Rat, kWeightSlots>;

Rat pair_weight(const Covector& c, const Weight& w);

struct BasisVec {
  std::string label;
  Bidegree bd;
  Weight wt = weight_zero();
};

// A finite-rank Z x Z/2 graded vector space with a distinguished labeled
// basis carrying torus weights.
class GradedSpace {
 public:
  GradedSpace() = default;
  explicit GradedSpace(std::string name) : name_(std::move(name)) {}

  int add(const std::string& label, Bidegree bd, Weight wt = weight_zero());
  int dim() const { return static_cast<int>(basis_.size()); }
  const BasisVec& at(int i) const { return basis_.at(i); }
  const std::vector<BasisVec>& basis() const { return basis_; }
  int index_of(const std::string& label) const;  // -1 if absent
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  std::vector<int> degree_slice(int deg) const;
  std::vector<int> degrees_present() const;  // sorted distinct degrees
  std::map<int, int> dim_by_degree() const;

  // Constructions.  Tensor uses row-major index order (i*dimB + j) and
  // label "a*b"; sum keeps labels (caller guarantees uniqueness).
  static std::shared_ptr<GradedSpace> tensor(const GradedSpace& a,
                                             const GradedSpace& b);
  static std::shared_ptr<GradedSpace> direct_sum(const GradedSpace& a,
                                                 const GradedSpace& b);
  std::shared_ptr<GradedSpace> shifted(int by, const std::string& suffix) const;

 private:
  std::string name_;
  std::vector<BasisVec> basis_;
  std::map<std::string, int> index_;
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

// One-dimensional even space, weight zero (used for ground fields / density
// lines).
SpacePtr trivial_space(const std::string& label);

}  // namespace pbv
