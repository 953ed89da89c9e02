#include "chiral/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace chiral {

namespace {

class Parser {
public:
    Parser(std::string_view text, const SymbolTable& symbols) : text_(text), symbols_(symbols) {}

    double parse() {
        skip_space();
        if (pos_ == text_.size()) throw ExpressionError("empty expression", pos_);
        const double v = expr();
        skip_space();
        if (pos_ != text_.size()) {
            throw ExpressionError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        }
        if (!std::isfinite(v)) throw ExpressionError("expression is not finite", 0);
        return v;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool starts_primary() {
        skip_space();
        if (pos_ >= text_.size()) return false;
        const char c = text_[pos_];
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '(';
    }

    double expr() {
        double v = term();
        for (;;) {
            if (accept('+')) {
                v += term();
            } else if (accept('-')) {
                v -= term();
            } else {
                return v;
            }
        }
    }

    double term() {
        double v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                const double d = unary();
                if (d == 0.0) throw ExpressionError("division by zero", at);
                v /= d;
            } else if (starts_primary()) {
                v *= primary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return primary();
    }

    double primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ExpressionError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            const double v = expr();
            if (!accept(')')) throw ExpressionError("missing ')'", pos_);
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const auto [end, ec] =
                std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
            if (ec != std::errc{}) throw ExpressionError("malformed number", pos_);
            pos_ = static_cast<std::size_t>(end - text_.data());
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = text_.substr(start, pos_ - start);
            const auto it = symbols_.find(name);
            if (it == symbols_.end()) {
                throw ExpressionError("unknown symbol '" + std::string(name) + "'", start);
            }
            return it->second;
        }
        throw ExpressionError(std::string("unexpected '") + c + "'", pos_);
    }

    std::string_view text_;
    const SymbolTable& symbols_;
    std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(std::string_view text, const SymbolTable& symbols) {
    return Parser(text, symbols).parse();
}

}  // namespace chiral
