#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace rdmt {

/// Exact rational number. Always kept in lowest terms with a positive
/// denominator. Backed by GMP, so numerator and denominator are
/// arbitrary-precision integers.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long n) : q_(n) {}                      // NOLINT(google-explicit-constructor)
    Rational(int n) : q_(static_cast<long>(n)) {}    // NOLINT(google-explicit-constructor)
    Rational(long num, long den);
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    /// Parses "3", "-4/7", or a decimal such as "0.25" (scaled exactly).
    /// Throws std::invalid_argument on malformed input.
    static Rational from_string(std::string_view text);

    /// Exact conversion; every finite double is a dyadic rational.
    static Rational from_double(double x);

    Rational operator-() const { return Rational(mpq_class(-q_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(q_ + o.q_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(q_ - o.q_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(q_ * o.q_)); }
    Rational operator/(const Rational& o) const;
    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }

    Rational pow(unsigned e) const;
    Rational abs() const { return Rational(mpq_class(::abs(q_))); }

    bool operator==(const Rational& o) const { return q_ == o.q_; }
    bool operator!=(const Rational& o) const { return q_ != o.q_; }
    bool operator<(const Rational& o) const { return q_ < o.q_; }
    bool operator<=(const Rational& o) const { return q_ <= o.q_; }
    bool operator>(const Rational& o) const { return q_ > o.q_; }
    bool operator>=(const Rational& o) const { return q_ >= o.q_; }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }

    double to_double() const { return q_.get_d(); }

    /// "a" when the denominator is 1, otherwise "a/b".
    std::string to_string() const;
    std::string numerator_string() const { return q_.get_num().get_str(); }
    std::string denominator_string() const { return q_.get_den().get_str(); }

    const mpq_class& raw() const { return q_; }

private:
    mpq_class q_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace rdmt
