#include "rdmt/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace rdmt {

MultiPoly MultiPoly::constant(std::size_t num_vars, const Rational& c) {
    MultiPoly p(num_vars);
    p.add_term(Exponents(num_vars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(std::size_t num_vars, std::size_t index) {
    if (index < 1 || index > num_vars) {
        throw std::out_of_range("variable index out of range");
    }
    MultiPoly p(num_vars);
    Exponents e(num_vars, 0);
    e[index - 1] = 1;
    p.add_term(e, Rational(1));
    return p;
}

void MultiPoly::add_term(const Exponents& e, const Rational& c) {
    if (e.size() != num_vars_) {
        throw std::invalid_argument("exponent vector length mismatch");
    }
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

Rational MultiPoly::coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

void MultiPoly::check_same_shape(const MultiPoly& o) const {
    if (num_vars_ != o.num_vars_) {
        throw std::invalid_argument("polynomial dimension mismatch");
    }
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    check_same_shape(o);
    MultiPoly out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    check_same_shape(o);
    MultiPoly out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, -c);
    return out;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out(num_vars_);
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
    return out;
}

MultiPoly MultiPoly::scaled(const Rational& c) const {
    MultiPoly out(num_vars_);
    if (c.is_zero()) return out;
    for (const auto& [e, coef] : terms_) out.terms_.emplace(e, coef * c);
    return out;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    check_same_shape(o);
    MultiPoly out(num_vars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            Exponents e(num_vars_);
            for (std::size_t k = 0; k < num_vars_; ++k) e[k] = ea[k] + eb[k];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly out = MultiPoly::constant(num_vars_, Rational(1));
    MultiPoly base = *this;
    while (e > 0) {
        if (e & 1u) out = out * base;
        e >>= 1u;
        if (e > 0) base = base * base;
    }
    return out;
}

double MultiPoly::eval(std::span<const double> z) const {
    if (z.size() != num_vars_) {
        throw std::invalid_argument("evaluation point dimension mismatch");
    }
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c.to_double();
        for (std::size_t k = 0; k < num_vars_; ++k) {
            for (std::uint32_t j = 0; j < e[k]; ++j) t *= z[k];
        }
        acc += t;
    }
    return acc;
}

Rational MultiPoly::eval_exact(std::span<const Rational> z) const {
    if (z.size() != num_vars_) {
        throw std::invalid_argument("evaluation point dimension mismatch");
    }
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (std::size_t k = 0; k < num_vars_; ++k) {
            if (e[k] > 0) t *= z[k].pow(e[k]);
        }
        acc += t;
    }
    return acc;
}

MultiPoly MultiPoly::partial(std::size_t i) const {
    if (i < 1 || i > num_vars_) {
        throw std::out_of_range("partial-derivative index out of range");
    }
    MultiPoly out(num_vars_);
    for (const auto& [e, c] : terms_) {
        const std::uint32_t k = e[i - 1];
        if (k == 0) continue;
        Exponents de = e;
        de[i - 1] = k - 1;
        out.add_term(de, c * Rational(static_cast<long>(k)));
    }
    return out;
}

MultiPoly MultiPoly::substitute_zero(std::size_t i) const {
    if (i < 1 || i > num_vars_) {
        throw std::out_of_range("substitution index out of range");
    }
    MultiPoly out(num_vars_);
    for (const auto& [e, c] : terms_) {
        if (e[i - 1] == 0) out.add_term(e, c);
    }
    return out;
}

unsigned MultiPoly::total_degree() const {
    unsigned deg = 0;
    for (const auto& [e, c] : terms_) {
        (void)c;
        const unsigned d = std::accumulate(e.begin(), e.end(), 0u);
        deg = std::max(deg, d);
    }
    return deg;
}

MultiPoly MultiPoly::leading_form() const {
    const unsigned deg = total_degree();
    MultiPoly out(num_vars_);
    for (const auto& [e, c] : terms_) {
        if (std::accumulate(e.begin(), e.end(), 0u) == deg) out.add_term(e, c);
    }
    return out;
}

bool MultiPoly::is_homogeneous() const {
    if (terms_.empty()) return true;
    const unsigned deg = total_degree();
    for (const auto& [e, c] : terms_) {
        (void)c;
        if (std::accumulate(e.begin(), e.end(), 0u) != deg) return false;
    }
    return true;
}

Rational MultiPoly::coefficient_abs_sum() const {
    Rational acc(0);
    for (const auto& [e, c] : terms_) {
        (void)e;
        acc += c.abs();
    }
    return acc;
}

std::string MultiPoly::to_string(std::string_view var_prefix) const {
    std::vector<std::string> names(num_vars_);
    for (std::size_t k = 0; k < num_vars_; ++k) {
        names[k] = std::string(var_prefix) + std::to_string(k + 1);
    }
    return to_string(names);
}

std::string MultiPoly::to_string(const std::vector<std::string>& var_names) const {
    if (var_names.size() != num_vars_) {
        throw std::invalid_argument("variable name count mismatch");
    }
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        const Rational mag = c.abs();
        if (first) {
            if (c.sign() < 0) os << "-";
            first = false;
        } else {
            os << (c.sign() < 0 ? " - " : " + ");
        }
        const bool has_vars =
            std::any_of(e.begin(), e.end(), [](std::uint32_t k) { return k > 0; });
        bool printed = false;
        if (!has_vars || mag != Rational(1)) {
            os << mag.to_string();
            printed = true;
        }
        for (std::size_t k = 0; k < num_vars_; ++k) {
            if (e[k] == 0) continue;
            if (printed) os << "*";
            os << var_names[k];
            if (e[k] > 1) os << "^" << e[k];
            printed = true;
        }
    }
    return os.str();
}

MultiPoly linear_combination(std::span<const Rational> coeffs,
                             std::span<const MultiPoly> polys) {
    if (coeffs.empty() || coeffs.size() != polys.size()) {
        throw std::invalid_argument("linear_combination length mismatch");
    }
    const std::size_t nv = polys[0].num_vars();
    MultiPoly out(nv);
    for (std::size_t k = 0; k < polys.size(); ++k) {
        if (polys[k].num_vars() != nv) {
            throw std::invalid_argument("linear_combination dimension mismatch");
        }
        out = out + polys[k].scaled(coeffs[k]);
    }
    return out;
}

}  // namespace rdmt
