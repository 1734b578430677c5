#pragma once

// Exact scalar arithmetic for the symbolic engine.
//
// Every coefficient that appears in the expansion is a Laurent polynomial in
// pi whose coefficients live in Q(i, sqrt 2).  We keep that structure exact:
//   Rational   - arbitrary-precision rational
//   GaussRat   - a + b*i over Rational
//   Scalar2    - x + y*sqrt(2) over GaussRat
//   Coefficient- finite map  (pi exponent) -> Scalar2

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <map>
#include <string>

namespace bklab {

using BigInt = boost::multiprecision::cpp_int;

class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}
  Rational(BigInt num, BigInt den);

  static Rational frac(long long p, long long q) { return Rational(BigInt(p), BigInt(q)); }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return num_ * o.den_ < o.num_ * den_; }

  double to_double() const;
  std::string str() const;

 private:
  void normalize();
  BigInt num_, den_;
};

struct GaussRat {
  Rational re, im;

  GaussRat() = default;
  GaussRat(Rational r) : re(r) {}
  GaussRat(Rational r, Rational i) : re(r), im(i) {}
  static GaussRat iunit() { return GaussRat(Rational(0), Rational(1)); }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  GaussRat operator-() const { return {-re, -im}; }
  GaussRat operator+(const GaussRat& o) const { return {re + o.re, im + o.im}; }
  GaussRat operator-(const GaussRat& o) const { return {re - o.re, im - o.im}; }
  GaussRat operator*(const GaussRat& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussRat conj() const { return {re, -im}; }
  GaussRat inverse() const;
  bool operator==(const GaussRat& o) const { return re == o.re && im == o.im; }
  bool operator!=(const GaussRat& o) const { return !(*this == o); }
  bool operator<(const GaussRat& o) const {
    if (re != o.re) return re < o.re;
    return im < o.im;
  }

  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
  std::string str() const;
};

// x + y*sqrt(2)
struct Scalar2 {
  GaussRat x, y;

  Scalar2() = default;
  Scalar2(GaussRat a) : x(a) {}
  Scalar2(GaussRat a, GaussRat b) : x(a), y(b) {}
  static Scalar2 sqrt2() { return Scalar2(GaussRat(), GaussRat(Rational(1))); }

  bool is_zero() const { return x.is_zero() && y.is_zero(); }
  Scalar2 operator-() const { return {-x, -y}; }
  Scalar2 operator+(const Scalar2& o) const { return {x + o.x, y + o.y}; }
  Scalar2 operator-(const Scalar2& o) const { return {x - o.x, y - o.y}; }
  Scalar2 operator*(const Scalar2& o) const {
    GaussRat two{Rational(2)};
    return {x * o.x + two * (y * o.y), x * o.y + y * o.x};
  }
  Scalar2 conj() const { return {x.conj(), y.conj()}; }
  Scalar2 inverse() const;
  bool operator==(const Scalar2& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Scalar2& o) const { return !(*this == o); }
  bool operator<(const Scalar2& o) const {
    if (!(x == o.x)) return x < o.x;
    return y < o.y;
  }

  std::complex<double> to_complex() const;
  std::string str() const;
};

// Finite Laurent polynomial in pi over Scalar2.
class Coefficient {
 public:
  Coefficient() = default;

  static Coefficient zero() { return {}; }
  static Coefficient one() { return rational(1); }
  static Coefficient rational(long long v);
  static Coefficient frac(long long p, long long q);
  static Coefficient iunit();
  static Coefficient sqrt2();
  static Coefficient pi_pow(int k, Rational r = Rational(1));
  static Coefficient make(Scalar2 s, int pi_exp = 0);
  // Inverse of str(); throws std::invalid_argument on malformed input.
  static Coefficient parse(const std::string& text);

  bool is_zero() const { return terms_.empty(); }
  const std::map<int, Scalar2>& terms() const { return terms_; }

  Coefficient operator-() const;
  Coefficient operator+(const Coefficient& o) const;
  Coefficient operator-(const Coefficient& o) const;
  Coefficient operator*(const Coefficient& o) const;
  Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }
  Coefficient& operator*=(const Coefficient& o) { return *this = *this * o; }
  bool operator==(const Coefficient& o) const { return terms_ == o.terms_; }
  bool operator!=(const Coefficient& o) const { return !(*this == o); }
  bool operator<(const Coefficient& o) const { return terms_ < o.terms_; }

  Coefficient conj() const;
  // Multiply by r * pi^k (used by resolvent division: r = 1/(4m), k = -1).
  Coefficient scaled(Rational r, int pi_exp = 0) const;

  std::complex<double> to_complex() const;
  std::string str() const;

 private:
  void insert(int k, const Scalar2& s);
  std::map<int, Scalar2> terms_;
};

}  // namespace bklab
