#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <string>

namespace pbv {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Exact Gaussian rational a + b*i.  All engine arithmetic runs over this
// field; there is no floating point anywhere in the verification paths.
class Qi {
 public:
  Qi() : re_(0), im_(0) {}
  Qi(int n) : re_(n), im_(0) {}  // NOLINT: implicit by design
  Qi(long long n) : re_(n), im_(0) {}
  Qi(Rat re) : re_(std::move(re)), im_(0) {}
  Qi(Rat re, Rat im) : re_(std::move(re)), im_(std::move(im)) {}

  static Qi i() { return Qi(Rat(0), Rat(1)); }
  // num/den as a real rational.
  static Qi frac(long long num, long long den);

  const Rat& re() const { return re_; }
  const Rat& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }
  bool is_one() const { return im_ == 0 && re_ == 1; }
  // true when both components are integers (element of Z[i])
  bool is_gaussian_integer() const;

  Qi conj() const { return Qi(re_, -im_); }
  Rat norm() const { return re_ * re_ + im_ * im_; }

  Qi operator-() const { return Qi(-re_, -im_); }
  Qi& operator+=(const Qi& o);
  Qi& operator-=(const Qi& o);
  Qi& operator*=(const Qi& o);
  Qi& operator/=(const Qi& o);

  friend Qi operator+(Qi a, const Qi& b) { return a += b; }
  friend Qi operator-(Qi a, const Qi& b) { return a -= b; }
  friend Qi operator*(Qi a, const Qi& b) { return a *= b; }
  friend Qi operator/(Qi a, const Qi& b) { return a /= b; }
  friend bool operator==(const Qi& a, const Qi& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const Qi& a, const Qi& b) { return !(a == b); }
  // arbitrary strict total order, used only for canonical serialization
  friend bool operator<(const Qi& a, const Qi& b) {
    if (a.re_ != b.re_) return a.re_ < b.re_;
    return a.im_ < b.im_;
  }

  // Canonical text form "<re>" for real values, "<re>,<im>" otherwise, with
  // each component a reduced fraction "n" or "n/d" (d > 0).  parse() accepts
  // exactly this grammar and round-trips byte-identically.
  std::string str() const;
  static Qi parse(const std::string& s);

  friend std::ostream& operator<<(std::ostream& os, const Qi& q);

 private:
  Rat re_, im_;
};

}  // namespace pbv
