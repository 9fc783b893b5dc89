#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "pbv/operators.hpp"

namespace pbv {

// polynomial in the chart letters with exact coefficients
using Poly = std::map<Mono, Qi>;

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scaled(const Poly& a, const Qi& c);
Poly poly_derive(const Poly& p, const Mono& d);
bool poly_is_zero(const Poly& p);

// A constant-coefficient bilinear differential pairing valued in densities:
//   B(alpha, beta) = sum c * (d^a alpha^i) (d^b beta^j) vol
// normalized against the real volume form of the chart.  The declared
// bidegree is the defect of the pairing: every entry must satisfy
// deg(i) + deg(j) + bd.deg = 0 and par(i) + par(j) + bd.par even.
class BilinearDensity {
 public:
  using TermKey = std::pair<Mono, Mono>;
  using Block = std::map<std::pair<int, int>, Qi>;

  BilinearDensity() = default;
  BilinearDensity(int letters, SpacePtr left, SpacePtr right, Bidegree bd,
                  bool enforce = true);

  int letters() const { return letters_; }
  const SpacePtr& left() const { return left_; }
  const SpacePtr& right() const { return right_; }
  Bidegree bidegree() const { return bd_; }
  const std::map<TermKey, Block>& terms() const { return terms_; }

  void add(const Mono& dl, const Mono& dr, int i, int j, const Qi& c);
  bool is_zero() const;
  int max_order() const;

  BilinearDensity operator+(const BilinearDensity& o) const;
  BilinearDensity operator-(const BilinearDensity& o) const;
  BilinearDensity scaled(const Qi& c) const;

  // integrate by parts until no derivative hits the left argument; two
  // pairings are equal modulo total derivatives iff their normal forms agree
  BilinearDensity normal_form() const;
  // mirror image: all derivatives moved onto the left argument
  BilinearDensity normal_form_left() const;

  // arguments exchanged, with the Koszul sign of their totalized parities:
  // swapped()(a, b) = (-1)^{|a||b|} (*this)(b, a)
  BilinearDensity swapped() const;

  // B(q., .)
  BilinearDensity compose_left(const ConstCoeffOp& q) const;
  // B(., q.); `graded` inserts the Koszul sign (-1)^{|q||left basis|} picked
  // up by moving q past the first argument
  BilinearDensity compose_right(const ConstCoeffOp& q, bool graded) const;
  // B(f., f.) for an even bundle map f
  BilinearDensity pullback(const ConstCoeffOp& f) const;

  // the density evaluated on two polynomial sections (coefficient of vol)
  Poly eval(const PolySection& l, const PolySection& r) const;

  // profile of B(e^{u.x} e_i, e^{-u.x} e_j) as a polynomial in u: invariant
  // under integration by parts and faithful on normal forms
  Poly plane_wave_profile(int i, int j) const;

  // curry the left argument through a copy of the right space's dual:
  // the operator alpha -> B(alpha, -), rows indexed like right().
  ConstCoeffOp as_operator(SpacePtr dual_of_right, Bidegree op_bd) const;

  bool weight_balanced(const Chart& chart) const;

 private:
  int letters_ = 0;
  SpacePtr left_, right_;
  Bidegree bd_{0, 0};
  bool enforce_ = false;
  std::map<TermKey, Block> terms_;
};

// graded skewness (B = -swapped(B) modulo total derivatives)
bool is_graded_skew(const BilinearDensity& b);
// signed variant for convention probes: normal_form(B - sign*swapped) == 0
bool pairing_symmetry_holds(const BilinearDensity& b, int sign);

// q acts as a graded derivation killing B modulo total derivatives:
// normal_form(B(q.,.) + Koszul * B(., q.)) == 0
bool is_q_compatible(const BilinearDensity& b, const ConstCoeffOp& q);
bool pairing_invariance_holds(const BilinearDensity& b, const ConstCoeffOp& q,
                              int sign);

// Wedge-to-top pairing concentrated on one block of a bundle:
//   B(mu (x) v, nu (x) w) = scale * (-1)^{|v| deg(nu)} top(mu ^ nu) h(v, w)
// where h is given on the value bases of the two summands.
BilinearDensity pairing_wedge(const FormBundle& bundle,
                              const std::string& left_tag,
                              const std::string& right_tag,
                              const std::function<Qi(int, int)>& value_pairing,
                              const Qi& scale, Bidegree bd);

}  // namespace pbv
