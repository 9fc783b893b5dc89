#include "pbv/graded.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace pbv {

Rat pair_weight(const Covector& c, const Weight& w) {
  Rat out = 0;
  for (int s = 0; s < kWeightSlots; ++s) out += c[s] * w[s];
  return out;
}

int GradedSpace::add(const std::string& label, Bidegree bd, Weight wt) {
  if (index_.count(label))
    throw std::invalid_argument("GradedSpace: duplicate label " + label);
  int idx = dim();
  basis_.push_back(BasisVec{label, bd, wt});
  index_[label] = idx;
  return idx;
}

int GradedSpace::index_of(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> GradedSpace::degree_slice(int deg) const {
  std::vector<int> out;
  for (int i = 0; i < dim(); ++i)
    if (basis_[i].bd.deg == deg) out.push_back(i);
  return out;
}

std::vector<int> GradedSpace::degrees_present() const {
  std::set<int> degs;
  for (const auto& b : basis_) degs.insert(b.bd.deg);
  return {degs.begin(), degs.end()};
}

std::map<int, int> GradedSpace::dim_by_degree() const {
  std::map<int, int> out;
  for (const auto& b : basis_) out[b.bd.deg]++;
  return out;
}

std::shared_ptr<GradedSpace> GradedSpace::tensor(const GradedSpace& a,
                                                 const GradedSpace& b) {
  auto out = std::make_shared<GradedSpace>(a.name() + "*" + b.name());
  for (const auto& u : a.basis())
    for (const auto& v : b.basis())
      out->add(u.label + "*" + v.label, u.bd + v.bd, u.wt + v.wt);
  return out;
}

std::shared_ptr<GradedSpace> GradedSpace::direct_sum(const GradedSpace& a,
                                                     const GradedSpace& b) {
  auto out = std::make_shared<GradedSpace>(a.name() + "+" + b.name());
  for (const auto& u : a.basis()) out->add(u.label, u.bd, u.wt);
  for (const auto& v : b.basis()) out->add(v.label, v.bd, v.wt);
  return out;
}

std::shared_ptr<GradedSpace> GradedSpace::shifted(
    int by, const std::string& suffix) const {
  auto out = std::make_shared<GradedSpace>(name_ + suffix);
  for (const auto& u : basis_)
    out->add(u.label + suffix, Bidegree{u.bd.deg + by, u.bd.par}, u.wt);
  return out;
}

SpacePtr trivial_space(const std::string& label) {
  auto s = std::make_shared<GradedSpace>(label);
  s->add(label, Bidegree{0, 0});
  return s;
}

}  // namespace pbv
