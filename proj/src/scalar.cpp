#include "matid/scalar.hpp"

#include <charconv>
#include <cstdlib>
#include <functional>

namespace matid {

namespace {

// Inline values stay strictly inside +-2^62 so that cross products and their
// sums never overflow a signed 128-bit accumulator.
constexpr std::int64_t kSmallLimit = std::int64_t{1} << 62;

bool fits_small(__int128 v) { return v > -kSmallLimit && v < kSmallLimit; }

unsigned __int128 gcd128(unsigned __int128 a, unsigned __int128 b) {
  while (b != 0) {
    unsigned __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

unsigned __int128 abs128(__int128 v) {
  return v < 0 ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
}

mpz_class mpz_from_i128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = abs128(v);
  mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
  mpz_class r = (hi << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

}  // namespace

Rational::Rational(std::int64_t value) {
  if (fits_small(value)) {
    num_ = value;
  } else {
    assign_big(mpq_class(mpz_from_i128(value)));
  }
}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw PreconditionError("rational with zero denominator");
  assign_wide(num, den);
}

Rational::Rational(const mpq_class& value) {
  mpq_class v(value);
  v.canonicalize();
  assign_big(std::move(v));
}

void Rational::assign_wide(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  unsigned __int128 g = gcd128(abs128(num), static_cast<unsigned __int128>(den));
  if (g > 1) {
    num /= static_cast<__int128>(g);
    den /= static_cast<__int128>(g);
  }
  if (fits_small(num) && fits_small(den)) {
    num_ = static_cast<std::int64_t>(num);
    den_ = static_cast<std::int64_t>(den);
    big_.reset();
    return;
  }
  mpq_class q(mpz_from_i128(num), mpz_from_i128(den));
  assign_big(std::move(q));
}

void Rational::assign_big(mpq_class value) {
  const mpz_class& n = value.get_num();
  const mpz_class& d = value.get_den();
  if (n.fits_slong_p() && d.fits_slong_p()) {
    long ln = n.get_si();
    long ld = d.get_si();
    if (fits_small(ln) && fits_small(ld)) {
      num_ = ln;
      den_ = ld;
      big_.reset();
      return;
    }
  }
  num_ = 0;
  den_ = 1;
  big_ = std::make_shared<const mpq_class>(std::move(value));
}

Rational Rational::parse(std::string_view text) {
  auto slash = text.find('/');
  auto parse_int = [&](std::string_view s) {
    if (s.empty()) throw ParseError("empty integer in rational '" + std::string(text) + "'");
    std::string str(s);
    if (str[0] == '+') str.erase(0, 1);
    mpz_class z;
    if (z.set_str(str, 10) != 0) throw ParseError("bad integer '" + std::string(s) + "'");
    return z;
  };
  mpz_class num = parse_int(text.substr(0, slash));
  mpz_class den = slash == std::string_view::npos ? mpz_class(1) : parse_int(text.substr(slash + 1));
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(mpq_class(num, den));
}

bool Rational::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

int Rational::sign() const {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(mpz_class(static_cast<long>(num_)), mpz_class(static_cast<long>(den_)));
}

mpz_class Rational::numerator() const { return big_ ? mpz_class(big_->get_num()) : mpz_class(static_cast<long>(num_)); }
mpz_class Rational::denominator() const { return big_ ? mpz_class(big_->get_den()) : mpz_class(static_cast<long>(den_)); }

Rational Rational::operator-() const {
  if (big_) return Rational(mpq_class(-*big_));
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  if (!big_ && !o.big_) {
    Rational r;
    if (den_ == 1 && o.den_ == 1) {
      __int128 s = static_cast<__int128>(num_) + o.num_;
      if (fits_small(s)) {
        r.num_ = static_cast<std::int64_t>(s);
        return r;
      }
    }
    r.assign_wide(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                  static_cast<__int128>(den_) * o.den_);
    return r;
  }
  return Rational(mpq_class(to_mpq() + o.to_mpq()));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
  if (!big_ && !o.big_) {
    Rational r;
    if (den_ == 1 && o.den_ == 1) {
      __int128 p = static_cast<__int128>(num_) * o.num_;
      if (fits_small(p)) {
        r.num_ = static_cast<std::int64_t>(p);
        return r;
      }
    }
    r.assign_wide(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
    return r;
  }
  return Rational(mpq_class(to_mpq() * o.to_mpq()));
}

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw PreconditionError("division by zero");
  if (!big_ && !o.big_) {
    Rational r;
    r.assign_wide(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
    return r;
  }
  return Rational(mpq_class(to_mpq() / o.to_mpq()));
}

bool Rational::operator==(const Rational& o) const {
  if (!big_ && !o.big_) return num_ == o.num_ && den_ == o.den_;
  if (big_ && o.big_) return *big_ == *o.big_;
  return false;
}

bool Rational::operator<(const Rational& o) const {
  if (!big_ && !o.big_) {
    return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
  }
  return to_mpq() < o.to_mpq();
}

std::string Rational::str() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::size_t Rational::hash() const {
  if (big_) return std::hash<std::string>{}(big_->get_str());
  std::size_t h = std::hash<std::int64_t>{}(num_);
  return h ^ (std::hash<std::int64_t>{}(den_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

// ---------------------------------------------------------------- Field

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

namespace {

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul_mod(r, a, p);
    a = mul_mod(a, a, p);
    e >>= 1;
  }
  return r;
}

}  // namespace

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  __int128 t = 0, new_t = 1;
  __int128 r = p, new_r = a % p;
  while (new_r != 0) {
    __int128 q = r / new_r;
    __int128 tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) throw PreconditionError("element not invertible mod " + std::to_string(p));
  if (t < 0) t += p;
  return static_cast<std::uint64_t>(t);
}

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Field Field::prime(std::uint64_t p) {
  if (p >= (std::uint64_t{1} << 61)) throw PreconditionError("prime field modulus must be below 2^61");
  if (!is_prime_u64(p)) throw PreconditionError(std::to_string(p) + " is not prime");
  return Field(p);
}

Field Field::parse(std::string_view text) {
  if (text == "Q" || text == "QQ" || text == "rationals") return rationals();
  std::string_view digits = text;
  if (text.size() > 4 && text.substr(0, 3) == "GF(" && text.back() == ')') {
    digits = text.substr(3, text.size() - 4);
  }
  std::uint64_t p = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw ParseError("unknown field '" + std::string(text) + "'");
  }
  return prime(p);
}

std::string Field::name() const { return is_rational() ? "Q" : "GF(" + std::to_string(modulus_) + ")"; }

// ---------------------------------------------------------------- Scalar

namespace {

std::uint64_t reduce_mpz(const mpz_class& z, std::uint64_t p) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), z.get_mpz_t(), p);
  return r.get_ui();
}

std::uint64_t reduce_rational(const Rational& q, std::uint64_t p) {
  std::uint64_t num = reduce_mpz(q.numerator(), p);
  std::uint64_t den = reduce_mpz(q.denominator(), p);
  if (den == 0) throw PreconditionError("denominator of " + q.str() + " vanishes mod " + std::to_string(p));
  return den == 1 ? num : mul_mod(num, inv_mod(den, p), p);
}

}  // namespace

Scalar::Scalar(Field field, const Rational& value) : field_(field) {
  if (field.is_rational()) {
    value_ = value;
  } else {
    value_ = Rational(static_cast<std::int64_t>(reduce_rational(value, field.modulus())));
  }
}

std::uint64_t Scalar::residue() const {
  if (field_.is_rational()) throw PreconditionError("residue of a rational scalar");
  return static_cast<std::uint64_t>(value_.small_numerator());
}

Scalar Scalar::from_rational(Field field, Rational value) {
  Scalar s;
  s.field_ = field;
  s.value_ = std::move(value);
  return s;
}

Scalar Scalar::to_field(Field target) const {
  if (target == field_) return *this;
  if (!field_.is_rational()) throw FieldMismatch("cannot move " + field_.name() + " value to " + target.name());
  return Scalar(target, value_);
}

void Scalar::check_same(const Scalar& o) const {
  if (field_ != o.field_) throw FieldMismatch("field mismatch: " + field_.name() + " vs " + o.field_.name());
}

Scalar Scalar::from_residue(Field field, std::uint64_t r) {
  if (field.is_rational()) throw PreconditionError("residue requires a prime field");
  if (r >= field.modulus()) r %= field.modulus();
  Scalar s;
  s.field_ = field;
  s.value_ = Rational(static_cast<std::int64_t>(r));
  return s;
}

Scalar Scalar::operator-() const {
  if (field_.is_rational()) return from_rational(field_, -value_);
  std::uint64_t r = residue();
  return from_residue(field_, r == 0 ? 0 : field_.modulus() - r);
}

Scalar Scalar::operator+(const Scalar& o) const {
  check_same(o);
  if (field_.is_rational()) return from_rational(field_, value_ + o.value_);
  std::uint64_t p = field_.modulus();
  std::uint64_t s = residue() + o.residue();
  return from_residue(field_, s >= p ? s - p : s);
}

Scalar Scalar::operator-(const Scalar& o) const {
  check_same(o);
  if (field_.is_rational()) return from_rational(field_, value_ - o.value_);
  std::uint64_t a = residue(), b = o.residue();
  return from_residue(field_, a >= b ? a - b : a + field_.modulus() - b);
}

Scalar Scalar::operator*(const Scalar& o) const {
  check_same(o);
  if (field_.is_rational()) return from_rational(field_, value_ * o.value_);
  return from_residue(field_, mul_mod(residue(), o.residue(), field_.modulus()));
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw PreconditionError("division by zero");
  if (field_.is_rational()) return from_rational(field_, Rational(1) / value_);
  return from_residue(field_, inv_mod(residue(), field_.modulus()));
}

Scalar Scalar::operator/(const Scalar& o) const {
  check_same(o);
  return *this * o.inverse();
}

Scalar Scalar::pow(std::uint64_t e) const {
  Scalar result = one(field_);
  Scalar base = *this;
  while (e) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

std::string Scalar::str() const { return value_.str(); }

}  // namespace matid
