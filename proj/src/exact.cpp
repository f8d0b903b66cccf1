#include "ar1/exact.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace ar1 {

namespace {

mpz_class parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty())
    throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
  for (char c : digits)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
  return mpz_class(std::string(digits), 10);
}

Rational parse_decimal(std::string_view text) {
  bool negative = false;
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = body.substr(e + 1);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    const mpz_class mag = parse_integer(exp_text, text);
    if (!mag.fits_slong_p() || mag > 4000)
      throw std::invalid_argument("exponent out of range: '" + std::string(text) + "'");
    exponent = exp_negative ? -mag.get_si() : mag.get_si();
    body = body.substr(0, e);
  }
  std::string digits;
  if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = body.substr(0, dot);
    std::string_view frac_part = body.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
      throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  } else {
    digits = std::string(body);
  }
  Rational q(parse_integer(digits, text));
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  if (exponent >= 0)
    q *= scale;
  else
    q /= scale;
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_mpz(const mpz_class& z) {
  std::size_t h = static_cast<std::size_t>(mpz_sgn(z.get_mpz_t()) + 1);
  const std::size_t n = mpz_size(z.get_mpz_t());
  for (std::size_t i = 0; i < n; ++i)
    h = mix(h, static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), static_cast<mp_size_t>(i))));
  return h;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_decimal(text.substr(0, slash));
    const Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) {
  if (q == 0) return 0.0;
  // mpq_get_d truncates; round the leading 53 bits to nearest instead.
  const mpz_class num = abs(q.get_num());
  const mpz_class& den = q.get_den();
  const long shift = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2)) -
                     static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2)) + 66;
  mpz_class scaled = num;
  if (shift > 0)
    scaled <<= static_cast<mp_bitcnt_t>(shift);
  else
    scaled >>= static_cast<mp_bitcnt_t>(-shift);
  mpz_class quotient;
  mpz_tdiv_q(quotient.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  const long drop = static_cast<long>(mpz_sizeinbase(quotient.get_mpz_t(), 2)) - 53;
  mpz_class rounded = (quotient + (mpz_class(1) << static_cast<mp_bitcnt_t>(drop - 1))) >>
                      static_cast<mp_bitcnt_t>(drop);
  const double magnitude = std::ldexp(rounded.get_d(), static_cast<int>(drop - shift));
  return sgn(q) < 0 ? -magnitude : magnitude;
}

long floor_int(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

std::size_t hash_value(const Rational& q) {
  return mix(hash_mpz(q.get_num()), hash_mpz(q.get_den()));
}

QuadSurd::QuadSurd(Rational r, Rational s, long d) : r_(std::move(r)), s_(std::move(s)), d_(d) {
  if (s_ != 0 && d_ <= 1) throw std::invalid_argument("QuadSurd: radicand must exceed 1");
  normalize();
}

void QuadSurd::adopt_radicand(const QuadSurd& o) {
  if (o.s_ == 0) return;
  if (s_ == 0) {
    d_ = o.d_;
    return;
  }
  if (d_ != o.d_) throw std::invalid_argument("QuadSurd: mixed radicands");
}

int QuadSurd::sign() const {
  const int sr = sgn(r_);
  const int ss = sgn(s_);
  if (ss == 0) return sr;
  if (sr == 0 || sr == ss) return ss;
  // Opposite signs: compare r^2 with d s^2.
  const Rational lhs = r_ * r_;
  const Rational rhs = s_ * s_ * d_;
  if (lhs == rhs) return 0;  // impossible for square-free d, kept for safety
  return lhs > rhs ? sr : ss;
}

double QuadSurd::to_double() const {
  if (s_ == 0) return ar1::to_double(r_);
  const long double v = static_cast<long double>(ar1::to_double(r_)) +
                        static_cast<long double>(ar1::to_double(s_)) *
                            std::sqrt(static_cast<long double>(d_));
  return static_cast<double>(v);
}

QuadSurd& QuadSurd::operator+=(const QuadSurd& o) {
  adopt_radicand(o);
  r_ += o.r_;
  s_ += o.s_;
  normalize();
  return *this;
}

QuadSurd& QuadSurd::operator-=(const QuadSurd& o) {
  adopt_radicand(o);
  r_ -= o.r_;
  s_ -= o.s_;
  normalize();
  return *this;
}

QuadSurd& QuadSurd::operator*=(const QuadSurd& o) {
  adopt_radicand(o);
  if (o.s_ == 0) {
    r_ *= o.r_;
    s_ *= o.r_;
  } else {
    Rational r = r_ * o.r_ + s_ * o.s_ * d_;
    Rational s = r_ * o.s_ + s_ * o.r_;
    r_ = std::move(r);
    s_ = std::move(s);
  }
  normalize();
  return *this;
}

QuadSurd& QuadSurd::operator/=(const QuadSurd& o) {
  if (o.r_ == 0 && o.s_ == 0) throw std::domain_error("QuadSurd: division by zero");
  adopt_radicand(o);
  if (o.s_ == 0) {
    r_ /= o.r_;
    s_ /= o.r_;
    normalize();
    return *this;
  }
  const Rational norm = o.r_ * o.r_ - o.s_ * o.s_ * d_;
  QuadSurd conj(o.r_ / norm, -o.s_ / norm, d_);
  return *this *= conj;
}

QuadSurd QuadSurd::operator-() const {
  QuadSurd n = *this;
  n.r_ = -n.r_;
  n.s_ = -n.s_;
  return n;
}

std::string to_string(const QuadSurd& x) {
  if (x.is_rational()) return to_string(x.rational_part());
  return to_string(x.rational_part()) + (sgn(x.surd_part()) < 0 ? "-" : "+") + "(" +
         to_string(Rational(abs(x.surd_part()))) + ")*sqrt(" + std::to_string(x.radicand()) + ")";
}

double to_double(const QuadSurd& x) { return x.to_double(); }

long floor_int(const QuadSurd& x) {
  long n = static_cast<long>(std::floor(x.to_double()));
  while (QuadSurd(n) > x) --n;
  while (QuadSurd(n + 1) <= x) ++n;
  return n;
}

std::size_t hash_value(const QuadSurd& x) {
  return mix(mix(hash_value(x.rational_part()), hash_value(x.surd_part())),
             static_cast<std::size_t>(x.radicand()));
}

}  // namespace ar1
