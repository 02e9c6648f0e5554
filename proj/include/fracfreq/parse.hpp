#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "fracfreq/model.hpp"

// Textual transfer-function grammar:
//   expr := poly "/" poly | poly
//   poly := term (("+"|"-") term)*
//   term := coeff ["*"] ["s" ["^" real]] | "s" ["^" real]
// Polynomials may be parenthesized; "s" stands for jw under evaluation.

namespace fracfreq {

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    size_t position() const { return position_; }

private:
    size_t position_;
};

namespace detail {

class TfParser {
public:
    explicit TfParser(std::string_view text) : text_(text) {}

    FractionalTF parse() {
        FractionalPolynomial num = parse_poly();
        skip_ws();
        if (peek() == '/') {
            ++pos_;
            FractionalPolynomial den = parse_poly();
            skip_ws();
            if (pos_ != text_.size()) throw parse_error("trailing input", pos_);
            return FractionalTF(std::move(num), std::move(den));
        }
        if (pos_ != text_.size()) throw parse_error("trailing input", pos_);
        return FractionalTF(std::move(num), FractionalPolynomial({{1.0, 0.0}}));
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    double parse_number() {
        skip_ws();
        const size_t start = pos_;
        if (peek() == '+' || peek() == '-') ++pos_;
        size_t digits = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) { ++pos_; ++digits; }
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) { ++pos_; ++digits; }
        }
        if (digits == 0) throw parse_error("expected a number", start);
        if (peek() == 'e' || peek() == 'E') {
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek())))
                throw parse_error("malformed exponent", pos_);
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        return std::stod(std::string(text_.substr(start, pos_ - start)));
    }

    FractionalTerm parse_term(double sign) {
        skip_ws();
        double coeff = sign;
        bool have_coeff = false;
        if (peek() != 's') {
            coeff = sign * parse_number();
            have_coeff = true;
            skip_ws();
            if (peek() == '*') { ++pos_; skip_ws(); }
        }
        double exponent = 0.0;
        if (peek() == 's') {
            ++pos_;
            exponent = 1.0;
            skip_ws();
            if (peek() == '^') {
                ++pos_;
                exponent = parse_number();
            }
        } else if (!have_coeff) {
            throw parse_error("expected a coefficient or 's'", pos_);
        }
        return {coeff, exponent};
    }

    FractionalPolynomial parse_poly() {
        skip_ws();
        bool parenthesized = false;
        if (peek() == '(') { ++pos_; parenthesized = true; }
        std::vector<FractionalTerm> terms;
        double sign = 1.0;
        skip_ws();
        if (peek() == '+' || peek() == '-') {
            sign = peek() == '-' ? -1.0 : 1.0;
            ++pos_;
        }
        terms.push_back(parse_term(sign));
        for (;;) {
            skip_ws();
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1.0 : 1.0;
                ++pos_;
                terms.push_back(parse_term(sign));
            } else {
                break;
            }
        }
        if (parenthesized) {
            skip_ws();
            if (peek() != ')') throw parse_error("expected ')'", pos_);
            ++pos_;
        }
        return FractionalPolynomial(std::move(terms));
    }

    std::string_view text_;
    size_t pos_{0};
};

}  // namespace detail

inline FractionalTF parse_tf_text(std::string_view text) {
    if (text.empty()) throw parse_error("empty input", 0);
    return detail::TfParser(text).parse();
}

}  // namespace fracfreq
