#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbv/window.hpp"

namespace pbv {

// real rational covectors (fixed-seed), plus the coordinate axes up front
std::vector<std::vector<Rat>> sample_covectors(int real_dim, int n_random,
                                               uint64_t seed);
// substitute a real covector into the chart letters (complex letters get the
// holomorphic / antiholomorphic components of the complexified covector)
std::vector<Qi> letter_covector(const Chart& chart,
                                const std::vector<Rat>& xi);

struct SymbolCertificate {
  bool square_zero = false;
  bool exact = false;
  int samples = 0;
  uint64_t seed = 0;
  std::string failure;  // first failing (covector, degree) if any

  bool ok() const { return square_zero && exact; }
};

// exactness of the symbol complex of q at the axes plus n_random covectors
SymbolCertificate symbol_exactness(const Chart& chart, const ConstCoeffOp& q,
                                   int n_random, uint64_t seed);

struct CohomologyReport {
  int N = 0;
  int margin = 1;
  std::map<int, int> interior_dims;  // cohomological degree -> dim
  std::map<int, int> full_dims;
  bool euler_consistent = false;

  bool interior_trivial() const {
    for (const auto& [d, n] : interior_dims)
      if (n) return false;
    return true;
  }
};

// cohomology of the truncated complex, read on the interior window
// (polynomial degree <= N - margin; margin should be >= the operator order)
CohomologyReport window_cohomology(const Chart& chart, const ConstCoeffOp& q,
                                   int N, int margin);

// mapping cone of a chain map f: (A, qa) -> (B, qb); the A part is shifted
// down one degree and carries -qa
ConstCoeffOp cone(const ConstCoeffOp& qa, const ConstCoeffOp& qb,
                  const ConstCoeffOp& f);

// the kernel of an order-zero fiberwise-surjective chain map, as a complex;
// throws if f has derivative terms, is not surjective, or the kernel is not
// preserved by qa
ConstCoeffOp kernel_subcomplex(const ConstCoeffOp& qa, const ConstCoeffOp& f);

struct QuasiIsoReport {
  bool chain_map = false;
  bool ok = false;
  bool used_kernel_route = false;
  SymbolCertificate symbol;
  CohomologyReport window;
};

// certify that f is a quasi-isomorphism: via the acyclicity of the kernel
// subcomplex when available, else of the cone
QuasiIsoReport quasi_iso_check(const Chart& chart, const ConstCoeffOp& qa,
                               const ConstCoeffOp& qb, const ConstCoeffOp& f,
                               int window_n, uint64_t seed);

struct SheafDetection {
  bool is_constant_sheaf = false;
  int degree = 0;
  Weight weight = weight_zero();
  std::string witness;  // label of the constant fiber class
  CohomologyReport report;
};

// detect whether the interior cohomology is one copy of the constants
SheafDetection constant_sheaf_detect(const Chart& chart, const ConstCoeffOp& q,
                                     int N, int margin);

}  // namespace pbv
