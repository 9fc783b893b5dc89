#include "pbv/scalar.hpp"

#include <ostream>
#include <stdexcept>

namespace pbv {

Qi Qi::frac(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("Qi::frac: zero denominator");
  return Qi(Rat(Int(num), Int(den)));
}

bool Qi::is_gaussian_integer() const {
  return boost::multiprecision::denominator(re_) == 1 &&
         boost::multiprecision::denominator(im_) == 1;
}

Qi& Qi::operator+=(const Qi& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

Qi& Qi::operator-=(const Qi& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

Qi& Qi::operator*=(const Qi& o) {
  Rat r = re_ * o.re_ - im_ * o.im_;
  Rat i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

Qi& Qi::operator/=(const Qi& o) {
  Rat n = o.norm();
  if (n == 0) throw std::domain_error("Qi: division by zero");
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

namespace {

std::string rat_str(const Rat& r) {
  std::string s = boost::multiprecision::numerator(r).str();
  if (boost::multiprecision::denominator(r) != 1)
    s += "/" + boost::multiprecision::denominator(r).str();
  return s;
}

Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s));
  return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

}  // namespace

std::string Qi::str() const {
  if (im_ == 0) return rat_str(re_);
  return rat_str(re_) + "," + rat_str(im_);
}

Qi Qi::parse(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) return Qi(rat_parse(s));
  return Qi(rat_parse(s.substr(0, comma)), rat_parse(s.substr(comma + 1)));
}

std::ostream& operator<<(std::ostream& os, const Qi& q) { return os << q.str(); }

}  // namespace pbv
