#include "bklab/scalar.hpp"

#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bklab {

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw std::domain_error("Rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
  num_ /= g;
  den_ /= g;
}

Rational Rational::operator-() const { return Rational(-num_, den_); }

Rational Rational::operator+(const Rational& o) const {
  return Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return Rational(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return Rational(num_ * o.num_, den_ * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  return Rational(num_ * o.den_, den_ * o.num_);
}

double Rational::to_double() const {
  return static_cast<double>(boost::multiprecision::cpp_rational(num_, den_));
}

std::string Rational::str() const {
  std::ostringstream os;
  os << num_;
  if (den_ != 1) os << "/" << den_;
  return os.str();
}

GaussRat GaussRat::inverse() const {
  Rational n2 = re * re + im * im;
  if (n2.is_zero()) throw std::domain_error("GaussRat: inverse of zero");
  return {re / n2, -im / n2};
}

std::string GaussRat::str() const {
  if (im.is_zero()) return re.str();
  if (re.is_zero()) return im.str() + "*i";
  return "(" + re.str() + (im.is_negative() ? "" : "+") + im.str() + "*i)";
}

Scalar2 Scalar2::inverse() const {
  // (x + y s)^-1 = (x - y s) / (x^2 - 2 y^2), s = sqrt 2.
  GaussRat d = x * x - GaussRat(Rational(2)) * (y * y);
  if (d.is_zero()) throw std::domain_error("Scalar2: inverse of zero norm");
  GaussRat di = d.inverse();
  return {x * di, -(y * di)};
}

std::complex<double> Scalar2::to_complex() const {
  return x.to_complex() + std::numbers::sqrt2 * y.to_complex();
}

std::string Scalar2::str() const {
  if (y.is_zero()) return x.str();
  std::string s = y.str() + "*sqrt2";
  if (x.is_zero()) return s;
  return "(" + x.str() + "+" + s + ")";
}

void Coefficient::insert(int k, const Scalar2& s) {
  if (s.is_zero()) return;
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(k, s);
  } else {
    it->second = it->second + s;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Coefficient Coefficient::rational(long long v) {
  return make(Scalar2(GaussRat(Rational(v))));
}

Coefficient Coefficient::frac(long long p, long long q) {
  return make(Scalar2(GaussRat(Rational::frac(p, q))));
}

Coefficient Coefficient::iunit() { return make(Scalar2(GaussRat::iunit())); }

Coefficient Coefficient::sqrt2() { return make(Scalar2::sqrt2()); }

Coefficient Coefficient::pi_pow(int k, Rational r) {
  return make(Scalar2(GaussRat(r)), k);
}

Coefficient Coefficient::make(Scalar2 s, int pi_exp) {
  Coefficient c;
  c.insert(pi_exp, s);
  return c;
}

Coefficient Coefficient::operator-() const {
  Coefficient r;
  for (auto& [k, s] : terms_) r.terms_.emplace(k, -s);
  return r;
}

Coefficient Coefficient::operator+(const Coefficient& o) const {
  Coefficient r = *this;
  for (auto& [k, s] : o.terms_) r.insert(k, s);
  return r;
}

Coefficient Coefficient::operator-(const Coefficient& o) const { return *this + (-o); }

Coefficient Coefficient::operator*(const Coefficient& o) const {
  Coefficient r;
  for (auto& [ka, sa] : terms_)
    for (auto& [kb, sb] : o.terms_) r.insert(ka + kb, sa * sb);
  return r;
}

Coefficient Coefficient::conj() const {
  Coefficient r;
  for (auto& [k, s] : terms_) r.terms_.emplace(k, s.conj());
  return r;
}

Coefficient Coefficient::scaled(Rational r, int pi_exp) const {
  Coefficient m = make(Scalar2(GaussRat(r)), pi_exp);
  return *this * m;
}

std::complex<double> Coefficient::to_complex() const {
  std::complex<double> acc{0.0, 0.0};
  for (auto& [k, s] : terms_) acc += s.to_complex() * std::pow(std::numbers::pi, k);
  return acc;
}

// Sum of product tokens:  [-]r [pi^k] [i] [sqrt2], joined by " + " / " - ".
// This is also the coefficient grammar of the identity rule file.
std::string Coefficient::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  auto put = [&](const Rational& r, int k, bool has_i, bool has_s2) {
    if (r.is_zero()) return;
    Rational mag = r.is_negative() ? -r : r;
    if (first) {
      if (r.is_negative()) os << "-";
    } else {
      os << (r.is_negative() ? " - " : " + ");
    }
    first = false;
    std::string tail;
    if (k == 1)
      tail = "pi";
    else if (k != 0)
      tail = "pi^" + std::to_string(k);
    if (has_i) tail += (tail.empty() ? "" : " ") + std::string("i");
    if (has_s2) tail += (tail.empty() ? "" : " ") + std::string("sqrt2");
    if (tail.empty()) {
      os << mag.str();
    } else {
      if (!(mag == Rational(1))) os << mag.str() << " ";
      os << tail;
    }
  };
  for (auto& [k, s] : terms_) {
    put(s.x.re, k, false, false);
    put(s.x.im, k, true, false);
    put(s.y.re, k, false, true);
    put(s.y.im, k, true, true);
  }
  return os.str();
}

Coefficient Coefficient::parse(const std::string& text) {
  auto bad = [&]() -> std::invalid_argument {
    return std::invalid_argument("bad coefficient: " + text);
  };
  if (text == "0") return Coefficient::zero();
  std::istringstream is(text);
  std::vector<std::string> words;
  for (std::string w; is >> w;) words.push_back(w);
  if (words.empty()) throw bad();

  auto parse_rational = [&](const std::string& w) {
    size_t slash = w.find('/');
    try {
      if (slash == std::string::npos) return Rational(BigInt(w), BigInt(1));
      return Rational(BigInt(w.substr(0, slash)), BigInt(w.substr(slash + 1)));
    } catch (const std::runtime_error&) {
      throw bad();
    }
  };

  // the sign of the leading token is glued to its first word
  int lead = 1;
  if (words[0].size() > 1 && words[0][0] == '-') {
    lead = -1;
    words[0] = words[0].substr(1);
  }

  Coefficient acc;
  size_t i = 0;
  bool first = true;
  while (i < words.size()) {
    int sign = 1;
    if (first) {
      sign = lead;
    } else {
      if (words[i] == "+")
        sign = 1;
      else if (words[i] == "-")
        sign = -1;
      else
        throw bad();
      ++i;
    }
    first = false;
    if (i >= words.size()) throw bad();

    Rational mag(1);
    bool have_mag = false, has_i = false, has_s2 = false;
    int k = 0;
    bool any = false;
    while (i < words.size() && words[i] != "+" && words[i] != "-") {
      const std::string& w = words[i];
      if (w == "pi") {
        k = 1;
      } else if (w.rfind("pi^", 0) == 0) {
        try {
          k = std::stoi(w.substr(3));
        } catch (const std::exception&) {
          throw bad();
        }
      } else if (w == "i") {
        has_i = true;
      } else if (w == "sqrt2") {
        has_s2 = true;
      } else if (!have_mag && !any) {
        mag = parse_rational(w);
        have_mag = true;
      } else {
        throw bad();
      }
      any = true;
      ++i;
    }
    if (!any) throw bad();
    if (sign < 0) mag = -mag;
    GaussRat g = has_i ? GaussRat(Rational(0), mag) : GaussRat(mag);
    Scalar2 s = has_s2 ? Scalar2(GaussRat(), g) : Scalar2(g);
    acc += Coefficient::make(s, k);
  }
  return acc;
}

}  // namespace bklab
