#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rdmt/rational.hpp"

namespace rdmt {

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are keyed by exponent vectors of length num_vars() and held in
/// lexicographic order, which fixes printing and evaluation order. No stored
/// term has a zero coefficient.
class MultiPoly {
public:
    using Exponents = std::vector<std::uint32_t>;
    using TermMap = std::map<Exponents, Rational>;

    explicit MultiPoly(std::size_t num_vars) : num_vars_(num_vars) {}

    static MultiPoly constant(std::size_t num_vars, const Rational& c);
    /// 1-based variable index.
    static MultiPoly variable(std::size_t num_vars, std::size_t index);

    std::size_t num_vars() const { return num_vars_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    /// Adds c * x^e into the polynomial, merging and pruning zeros.
    void add_term(const Exponents& e, const Rational& c);
    Rational coefficient(const Exponents& e) const;

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator-() const;
    MultiPoly scaled(const Rational& c) const;
    MultiPoly pow(unsigned e) const;

    bool operator==(const MultiPoly& o) const {
        return num_vars_ == o.num_vars_ && terms_ == o.terms_;
    }

    /// Floating evaluation; terms are visited in lexicographic order, so the
    /// result is deterministic. Throws on dimension mismatch.
    double eval(std::span<const double> z) const;
    Rational eval_exact(std::span<const Rational> z) const;

    /// Exact partial derivative with respect to variable i (1-based).
    MultiPoly partial(std::size_t i) const;

    /// Restriction to the face x_i = 0: drops every term containing x_i.
    MultiPoly substitute_zero(std::size_t i) const;

    /// Total degree; 0 for the zero polynomial (check is_zero() to tell the
    /// two apart).
    unsigned total_degree() const;

    /// Top-degree homogeneous part; zero polynomial maps to itself.
    MultiPoly leading_form() const;

    bool is_homogeneous() const;

    /// Sum of |coefficients|; the polynomial-growth certificate constant.
    Rational coefficient_abs_sum() const;

    /// Emits the expression grammar: terms in lexicographic order,
    /// coefficients as "a/b" when non-integer. parse(to_string()) round-trips.
    std::string to_string(std::string_view var_prefix = "u") const;
    std::string to_string(const std::vector<std::string>& var_names) const;

private:
    void check_same_shape(const MultiPoly& o) const;

    std::size_t num_vars_;
    TermMap terms_;
};

/// Exact expanded combination sum_k coeffs[k] * polys[k]. Throws on length or
/// dimension mismatch; exact cancellation yields the zero polynomial.
MultiPoly linear_combination(std::span<const Rational> coeffs,
                             std::span<const MultiPoly> polys);

/// Error from the expression parser, carrying the byte offset of the
/// offending token in the input text.
class ExprError : public std::runtime_error {
public:
    ExprError(std::size_t offset, const std::string& message)
        : std::runtime_error(message + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Parses the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := base ('^' uint)?
///   base   := rational-literal | variable | '(' expr ')' | '-' base
/// over variables named var_names[0..]. Identifiers that are not variables
/// are looked up in `constants` when given. Products and powers are fully
/// expanded. Throws ExprError.
MultiPoly parse_expression(std::string_view text,
                           const std::vector<std::string>& var_names,
                           const std::map<std::string, Rational>* constants = nullptr);

/// Same grammar with variables var_prefix followed by a 1-based index
/// (u1, u2, ...).
MultiPoly parse_expression(std::string_view text, std::size_t num_vars,
                           std::string_view var_prefix = "u",
                           const std::map<std::string, Rational>* constants = nullptr);

}  // namespace rdmt
