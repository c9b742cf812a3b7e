#include "rdmt/rational.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace rdmt {

Rational::Rational(long num, long den) {
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational Rational::operator/(const Rational& o) const {
    if (o.is_zero()) {
        throw std::invalid_argument("rational division by zero");
    }
    return Rational(mpq_class(q_ / o.q_));
}

Rational Rational::pow(unsigned e) const {
    mpq_class out;
    mpz_pow_ui(out.get_num_mpz_t(), q_.get_num_mpz_t(), e);
    mpz_pow_ui(out.get_den_mpz_t(), q_.get_den_mpz_t(), e);
    return Rational(out);  // canonical since the base was canonical
}

Rational Rational::from_string(std::string_view text) {
    if (text.empty()) {
        throw std::invalid_argument("empty rational literal");
    }
    std::string s(text);
    const auto is_int = [](const std::string& t) {
        std::size_t i = (t.size() > 1 && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        }
        return true;
    };

    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        if (!is_int(num) || !is_int(den) || den.empty() || den[0] == '-') {
            throw std::invalid_argument("malformed rational literal: " + s);
        }
        mpq_class q(mpz_class(num), mpz_class(den));
        if (q.get_den() == 0) {
            throw std::invalid_argument("rational with zero denominator: " + s);
        }
        q.canonicalize();
        return Rational(q);
    }

    const auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        const std::size_t frac_len = s.size() - dot - 1;
        if (frac_len == 0 || !is_int(digits)) {
            throw std::invalid_argument("malformed decimal literal: " + s);
        }
        mpz_class den(1);
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        mpq_class q(mpz_class(digits), den);
        q.canonicalize();
        return Rational(q);
    }

    if (!is_int(s)) {
        throw std::invalid_argument("malformed integer literal: " + s);
    }
    return Rational(mpq_class(mpz_class(s)));
}

Rational Rational::from_double(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("cannot convert non-finite double to rational");
    }
    mpq_class q;
    mpq_set_d(q.get_mpq_t(), x);
    q.canonicalize();
    return Rational(q);
}

std::string Rational::to_string() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.to_string();
}

}  // namespace rdmt
