#include <cctype>
#include <optional>

#include "rdmt/poly.hpp"

namespace rdmt {
namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Caret, LParen, RParen, End };

struct Token {
    Tok kind = Tok::End;
    std::size_t offset = 0;
    std::string text;       // Ident / Number spelling
    bool plain_uint = false;  // Number consisting of digits only
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        Token t;
        t.offset = pos_;
        if (pos_ >= text_.size()) {
            t.kind = Tok::End;
            return t;
        }
        const char c = text_[pos_];
        switch (c) {
            case '+': t.kind = Tok::Plus; ++pos_; return t;
            case '-': t.kind = Tok::Minus; ++pos_; return t;
            case '*': t.kind = Tok::Star; ++pos_; return t;
            case '^': t.kind = Tok::Caret; ++pos_; return t;
            case '(': t.kind = Tok::LParen; ++pos_; return t;
            case ')': t.kind = Tok::RParen; ++pos_; return t;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            bool plain = true;
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/')) {
                const char sep = text_[pos_];
                const std::size_t sep_pos = pos_;
                ++pos_;
                const std::size_t tail = pos_;
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    ++pos_;
                }
                if (pos_ == tail) {
                    if (sep == '.') {
                        throw ExprError(sep_pos, "malformed decimal literal");
                    }
                    pos_ = sep_pos;  // bare '/' is not part of a literal
                } else {
                    plain = false;
                }
            }
            t.kind = Tok::Number;
            t.text = std::string(text_.substr(start, pos_ - start));
            t.plain_uint = plain;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            t.kind = Tok::Ident;
            t.text = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        throw ExprError(pos_, std::string("unexpected character '") + c + "'");
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& var_names,
           const std::map<std::string, Rational>* constants, std::string_view prefix)
        : lexer_(text), var_names_(var_names), constants_(constants), prefix_(prefix) {
        cur_ = lexer_.next();
    }

    MultiPoly run() {
        MultiPoly p = parse_expr();
        if (cur_.kind != Tok::End) {
            throw ExprError(cur_.offset, "trailing input after expression");
        }
        return p;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    MultiPoly parse_expr() {
        MultiPoly acc = parse_term();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            const bool minus = cur_.kind == Tok::Minus;
            advance();
            MultiPoly rhs = parse_term();
            acc = minus ? acc - rhs : acc + rhs;
        }
        return acc;
    }

    MultiPoly parse_term() {
        MultiPoly acc = parse_factor();
        while (cur_.kind == Tok::Star) {
            advance();
            acc = acc * parse_factor();
        }
        return acc;
    }

    MultiPoly parse_factor() {
        MultiPoly base = parse_base();
        if (cur_.kind == Tok::Caret) {
            advance();
            if (cur_.kind != Tok::Number || !cur_.plain_uint) {
                throw ExprError(cur_.offset, "exponent not a nonnegative integer");
            }
            unsigned long e = 0;
            try {
                e = std::stoul(cur_.text);
            } catch (const std::exception&) {
                throw ExprError(cur_.offset, "exponent out of range");
            }
            if (e > 4096) {
                throw ExprError(cur_.offset, "exponent out of range");
            }
            advance();
            return base.pow(static_cast<unsigned>(e));
        }
        return base;
    }

    MultiPoly parse_base() {
        switch (cur_.kind) {
            case Tok::Minus: {
                advance();
                return -parse_base();
            }
            case Tok::LParen: {
                advance();
                MultiPoly inner = parse_expr();
                if (cur_.kind != Tok::RParen) {
                    throw ExprError(cur_.offset, "expected ')'");
                }
                advance();
                return inner;
            }
            case Tok::Number: {
                const Rational c = Rational::from_string(cur_.text);
                advance();
                return MultiPoly::constant(var_names_.size(), c);
            }
            case Tok::Ident: {
                const Token tok = cur_;
                advance();
                for (std::size_t k = 0; k < var_names_.size(); ++k) {
                    if (var_names_[k] == tok.text) {
                        return MultiPoly::variable(var_names_.size(), k + 1);
                    }
                }
                if (constants_ != nullptr) {
                    auto it = constants_->find(tok.text);
                    if (it != constants_->end()) {
                        return MultiPoly::constant(var_names_.size(), it->second);
                    }
                }
                if (!prefix_.empty() && tok.text.size() > prefix_.size() &&
                    tok.text.compare(0, prefix_.size(), prefix_) == 0 &&
                    std::all_of(tok.text.begin() + static_cast<long>(prefix_.size()),
                                tok.text.end(), [](char ch) {
                                    return std::isdigit(static_cast<unsigned char>(ch));
                                })) {
                    throw ExprError(tok.offset, "variable index out of range: " + tok.text);
                }
                throw ExprError(tok.offset, "unknown identifier: " + tok.text);
            }
            default:
                throw ExprError(cur_.offset, "expected a value");
        }
    }

    Lexer lexer_;
    Token cur_;
    const std::vector<std::string>& var_names_;
    const std::map<std::string, Rational>* constants_;
    std::string_view prefix_;
};

}  // namespace

MultiPoly parse_expression(std::string_view text,
                           const std::vector<std::string>& var_names,
                           const std::map<std::string, Rational>* constants) {
    return Parser(text, var_names, constants, "").run();
}

MultiPoly parse_expression(std::string_view text, std::size_t num_vars,
                           std::string_view var_prefix,
                           const std::map<std::string, Rational>* constants) {
    std::vector<std::string> names(num_vars);
    for (std::size_t k = 0; k < num_vars; ++k) {
        names[k] = std::string(var_prefix) + std::to_string(k + 1);
    }
    return Parser(text, names, constants, var_prefix).run();
}

}  // namespace rdmt
