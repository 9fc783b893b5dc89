#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "pbv/homology.hpp"
#include "pbv/window.hpp"

using namespace pbv;

namespace {

// de Rham complex as a bundle operator: Omega^0 ... Omega^d at degrees 0..d
struct DeRham {
  std::shared_ptr<FormBundle> bundle;
  ConstCoeffOp q;
};

DeRham derham(const Chart& chart) {
  DeRham out;
  out.bundle = std::make_shared<FormBundle>(chart, "derham");
  const Exterior& ext = out.bundle->ext();
  int d = chart.letters();
  for (int k = 0; k <= d; ++k) {
    BundleSummand s;
    s.tag = "w" + std::to_string(k);
    s.piece = piece_full(ext, k, s.tag);
    s.value = trivial_space("c");
    out.bundle->add_summand(s);
  }
  std::vector<OpRoute> routes;
  for (int k = 0; k < d; ++k)
    routes.push_back(route(*out.bundle, "w" + std::to_string(k), *out.bundle,
                           "w" + std::to_string(k + 1),
                           op_d(ext, k, LetterSet::All)));
  out.q = assemble_op(*out.bundle, *out.bundle, Bidegree{1, 0}, routes);
  return out;
}

// Dolbeault complex Omega^{0,*}
DeRham dolbeault(const Chart& chart) {
  DeRham out;
  out.bundle = std::make_shared<FormBundle>(chart, "dolbeault");
  const Exterior& ext = out.bundle->ext();
  int n = chart.complex_pairs;
  for (int k = 0; k <= n; ++k) {
    BundleSummand s;
    s.tag = "w" + std::to_string(k);
    s.piece = piece_dolbeault(ext, 0, k, s.tag);
    s.value = trivial_space("c");
    out.bundle->add_summand(s);
  }
  std::vector<OpRoute> routes;
  for (int k = 0; k < n; ++k)
    routes.push_back(route(*out.bundle, "w" + std::to_string(k), *out.bundle,
                           "w" + std::to_string(k + 1),
                           op_d(ext, k, LetterSet::Anti)));
  out.q = assemble_op(*out.bundle, *out.bundle, Bidegree{1, 0}, routes);
  return out;
}

}  // namespace

TEST_CASE("window enumeration and matrices") {
  Chart line = real_chart(1);
  auto fiber = trivial_space("f");
  Window w = make_window(line, fiber, 2, "w");
  CHECK(w.space->dim() == 3);  // 1, x, x^2

  // d/dx as a window matrix: x^2 -> 2x
  ConstCoeffOp ddx(1, fiber, fiber, Bidegree{0, 0});
  SparseMap unit(fiber, fiber, Bidegree{0, 0});
  unit.set(0, 0, Qi(1));
  ddx.add_term({1}, unit);
  SparseMap m = window_matrix(ddx, w, w);
  int x2 = w.index_of({2}, 0), x1 = w.index_of({1}, 0), x0 = w.index_of({0}, 0);
  CHECK(m.get(x1, x2) == Qi(2));
  CHECK(m.get(x0, x1) == Qi(1));
  CHECK(m.get(x0, x2) == Qi(0));

  // round trip through polynomial sections
  DenseVec v(w.space->dim(), Qi(0));
  v[x2] = Qi(5);
  v[x0] = Qi(-1);
  PolySection s = window_to_section(w, v);
  DenseVec back = section_to_window(w, s);
  CHECK(back[x2] == Qi(5));
  CHECK(back[x0] == Qi(-1));
  CHECK(back[x1] == Qi(0));

  // weights: on a complex line the monomial weight adds to the fiber weight
  Chart cx = complex_chart(1);
  auto wf = std::make_shared<GradedSpace>("wf");
  Weight fw = weight_zero();
  fw[0] = 2;
  wf->add("e", Bidegree{0, 0}, fw);
  Window wc = make_window(cx, wf, 1, "wc");
  int zi = wc.index_of({1, 0}, 0);
  CHECK(wc.space->at(zi).wt[0] == 4);  // z-function weight 2 + fiber weight 2
}

TEST_CASE("polynomial de Rham cohomology on the interior window") {
  Chart chart = real_chart(3);
  DeRham dr = derham(chart);
  CHECK(dr.q.compose(dr.q).is_zero());

  CohomologyReport rep = window_cohomology(chart, dr.q, 3, 1);
  CHECK(rep.euler_consistent);
  CHECK(rep.interior_dims.at(0) == 1);
  CHECK(rep.interior_dims.at(1) == 0);
  CHECK(rep.interior_dims.at(2) == 0);
  CHECK(rep.interior_dims.at(3) == 0);
}

TEST_CASE("polynomial Dolbeault cohomology") {
  Chart chart = complex_chart(3);
  DeRham db = dolbeault(chart);
  CHECK(db.q.compose(db.q).is_zero());

  CohomologyReport rep = window_cohomology(chart, db.q, 2, 1);
  CHECK(rep.euler_consistent);
  // full-window closed functions = holomorphic polynomials of degree <= 2
  CHECK(rep.full_dims.at(0) == 10);
  CHECK(rep.interior_dims.at(1) == 0);
  CHECK(rep.interior_dims.at(2) == 0);
  CHECK(rep.interior_dims.at(3) == 0);
}
