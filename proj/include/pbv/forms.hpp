#pragma once

#include <map>
#include <string>
#include <vector>

#include "pbv/graded.hpp"
#include "pbv/sparse_map.hpp"

namespace pbv {

// A flat affine chart.  Letters (coordinate one-form generators) are ordered
// real first ("x1".."xr"), then holomorphic ("z1".."zc"), then antiholomorphic
// ("zb1".."zbc").  On pure complex charts the underlying real model pairs
// z_a = x_{2a-1} + i x_{2a}; the volume form is dx1^...^dxD.
struct Chart {
  int real_coords = 0;
  int complex_pairs = 0;

  int letters() const { return real_coords + 2 * complex_pairs; }
  int real_dim() const { return real_coords + 2 * complex_pairs; }
  bool is_real() const { return complex_pairs == 0; }
  bool is_complex() const { return real_coords == 0 && complex_pairs > 0; }

  enum class LetterKind { Real, Holo, Anti };
  LetterKind kind(int l) const;
  // for Holo/Anti letters, which complex pair (0-based)
  int pair_of(int l) const;
  std::string letter_name(int l) const;
  // doubled rotation weight of the letter's one-form (dz_a -> +2 e_a)
  Weight letter_weight(int l) const;
  // doubled rotation weight of the coordinate function monomial exponent
  Weight mono_weight(const std::vector<int>& mono) const;

  friend bool operator==(const Chart&, const Chart&) = default;
};

inline Chart real_chart(int d) { return Chart{d, 0}; }
inline Chart complex_chart(int n) { return Chart{0, n}; }

// Exterior monomials: sorted letter-index subsets.
using FormMono = std::vector<int>;

// Cached exterior fiber data for one chart.
class Exterior {
 public:
  explicit Exterior(Chart chart);

  const Chart& chart() const { return chart_; }
  // the space of all k-forms; basis labels "dz1^dzb2", degree k, parity 0
  SpacePtr lambda(int k) const;
  const std::vector<FormMono>& monos(int k) const;
  int mono_index(int k, const FormMono& m) const;

  // wedge by a single letter: returns (sign, index in Lambda^{k+1}) or sign=0
  std::pair<int, int> wedge_letter(int k, int mono_idx, int letter) const;
  // contraction with the dual of a single letter
  std::pair<int, int> contract_letter(int k, int mono_idx, int letter) const;

  // order-zero fiber maps
  SparseMap wedge_by(int k, const std::vector<std::pair<FormMono, Qi>>& form) const;
  SparseMap contraction(int k, const std::vector<Qi>& covec_coeffs) const;
  SparseMap star(int k) const;           // Hodge star Lambda^k -> Lambda^{D-k}
  SparseMap lefschetz(int k) const;      // wedge with the Kaehler form
  SparseMap dual_lefschetz(int k) const; // metric adjoint of lefschetz
  // coefficient of the volume form: Lambda^D -> Dens line
  SparseMap top_coefficient() const;
  SpacePtr density_line() const { return dens_; }

  // change of letters to the underlying real model and back (complex charts)
  SparseMap to_real(int k) const;    // Lambda^k(cx letters) -> Lambda^k(real)
  SparseMap from_real(int k) const;  // inverse

 private:
  Chart chart_;
  Chart real_model_;
  mutable std::map<int, SpacePtr> lambda_;
  mutable std::map<int, std::vector<FormMono>> monos_;
  mutable std::map<int, std::map<FormMono, int>> index_;
  SpacePtr dens_;

  void ensure(int k) const;
  SparseMap substitution(
      int k, const Chart& src, const Chart& tgt,
      const std::vector<std::vector<std::pair<int, Qi>>>& rules) const;
};

// A summand fiber presented inside the ambient exterior fiber: an abstract
// basis together with a section and a projection (projection o section = id).
struct FiberPiece {
  SpacePtr space;
  SparseMap section;     // space -> Lambda^k
  SparseMap projection;  // Lambda^k -> space
  int form_degree = 0;
};

// constructors; all bases are weight-homogeneous
FiberPiece piece_full(const Exterior& ext, int k, const std::string& tag);
// span of monomials with p holomorphic and q antiholomorphic letters
// (and a real letters when the chart is mixed)
FiberPiece piece_dolbeault(const Exterior& ext, int p, int q,
                           const std::string& tag, int a = 0);
// +i / -i eigenspace of the Hodge star on middle-degree forms
FiberPiece piece_selfdual(const Exterior& ext, int sign_i, const std::string& tag);
// kernel of the dual Lefschetz operator inside Dolbeault (p,q)
FiberPiece piece_primitive_perp(const Exterior& ext, int p, int q,
                                const std::string& tag);
// image of wedging with the Kaehler form inside Dolbeault (p,q); its
// projection annihilates the perp summand
FiberPiece piece_omega_image(const Exterior& ext, int p, int q,
                             const std::string& tag);
// Dolbeault (p,q) monomials not containing the given holomorphic letter
// (model of the quotient by the ideal generated by that letter)
FiberPiece piece_quotient_mod_letter(const Exterior& ext, int p, int q,
                                     int letter, const std::string& tag);

// dense inverse of a square invertible map (exact)
SparseMap invert_dense(const SparseMap& m);

}  // namespace pbv
