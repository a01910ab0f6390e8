#include "ctxlab/rational.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "ctxlab/errors.hpp"

namespace ctxlab {

bool looks_decimal(const std::string& text) {
    return text.find('.') != std::string::npos || text.find('e') != std::string::npos ||
           text.find('E') != std::string::npos;
}

Rational parse_rational(const std::string& text) {
    std::string s = text;
    if (s.empty()) throw InvalidArgument("empty number");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (num.empty() || den.empty()) throw InvalidArgument("bad rational '" + text + "'");
        try {
            mpz_class n(num, 10), d(den, 10);
            if (d == 0) throw InvalidArgument("zero denominator in '" + text + "'");
            Rational r(n, d);
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw InvalidArgument("bad rational '" + text + "'");
        }
    }

    if (!looks_decimal(s)) {
        try {
            return Rational(mpz_class(s, 10));
        } catch (const std::invalid_argument&) {
            throw InvalidArgument("bad integer '" + text + "'");
        }
    }

    // Decimal literal: mantissa digits over a power of ten, exponent applied
    // exactly.
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');
    std::string digits;
    long frac_len = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size() && (std::isdigit((unsigned char)s[i]) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (seen_dot) throw InvalidArgument("bad decimal '" + text + "'");
            seen_dot = true;
        } else {
            digits += s[i];
            seen_digit = true;
            if (seen_dot) ++frac_len;
        }
    }
    if (!seen_digit) throw InvalidArgument("bad decimal '" + text + "'");
    long exponent = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i >= s.size()) throw InvalidArgument("bad exponent in '" + text + "'");
        char* end = nullptr;
        exponent = std::strtol(s.c_str() + i, &end, 10);
        if (end != s.c_str() + s.size()) throw InvalidArgument("bad exponent in '" + text + "'");
    } else if (i != s.size()) {
        throw InvalidArgument("bad decimal '" + text + "'");
    }

    mpz_class mant(digits.empty() ? "0" : digits, 10);
    if (neg) mant = -mant;
    long pow10 = exponent - frac_len;
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, (unsigned long)std::labs(pow10));
    Rational r = pow10 >= 0 ? Rational(mant * scale) : Rational(mant, scale);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) {
    return r.get_str();
}

double to_double(const Rational& r) {
    return r.get_d();
}

// ---------------------------------------------------------------------------
// Value

namespace {

// m = s^2 * d with d square-free; returns (s, d). Trial division covers prime
// squares up to 1000^2; a remaining perfect square is folded afterwards.
// Larger radicands with hidden square factors are out of desk-scale range.
void extract_square(const mpz_class& m, mpz_class& s, mpz_class& d) {
    s = 1;
    d = m;
    for (long p = 2; p <= 1000 && d > 1; p = (p == 2 ? 3 : p + 2)) {
        mpz_class p2 = (mpz_class)p * p;
        while (mpz_divisible_p(d.get_mpz_t(), p2.get_mpz_t())) {
            d /= p2;
            s *= p;
        }
    }
    if (d > 1 && mpz_perfect_square_p(d.get_mpz_t())) {
        mpz_class root;
        mpz_sqrt(root.get_mpz_t(), d.get_mpz_t());
        s *= root;
        d = 1;
    }
}

int sgn(const Rational& r) { return sgn(r.get_num()); }

} // namespace

Value::Value(const Rational& a, const Rational& b, long d) : a_(a), b_(b), d_(d) {
    a_.canonicalize();
    b_.canonicalize();
    if (b_ == 0) {
        d_ = 0;
    } else if (d_ < 2) {
        throw InvalidArgument("radicand must be a square-free integer >= 2");
    }
}

Value Value::sqrt_of(const Rational& r) {
    if (r < 0) throw InvalidArgument("sqrt of negative rational");
    if (r == 0) return Value(Rational(0));
    // sqrt(p/q) = sqrt(p*q)/q
    mpz_class m = r.get_num() * r.get_den();
    mpz_class s, d;
    extract_square(m, s, d);
    if (d == 1) {
        Rational v(s, r.get_den());
        v.canonicalize();
        return Value(v);
    }
    if (!d.fits_slong_p())
        throw InvalidArgument("radicand too large: sqrt(" + r.get_str() + ")");
    Rational coeff(s, r.get_den());
    coeff.canonicalize();
    return Value(Rational(0), coeff, d.get_si());
}

const Rational& Value::rational() const {
    if (!is_rational())
        throw InvalidArgument("irrational value where a rational is required: " + to_string());
    return a_;
}

Value Value::operator-() const {
    Value v(*this);
    v.a_ = -v.a_;
    v.b_ = -v.b_;
    return v;
}

Value& Value::operator+=(const Value& o) {
    if (d_ != 0 && o.d_ != 0 && d_ != o.d_)
        throw InvalidArgument("mixed radicands: sqrt(" + std::to_string(d_) + ") vs sqrt(" +
                              std::to_string(o.d_) + ")");
    a_ += o.a_;
    b_ += o.b_;
    if (b_ == 0)
        d_ = 0;
    else if (d_ == 0)
        d_ = o.d_;
    return *this;
}

Value& Value::operator-=(const Value& o) { return *this += -o; }

Value& Value::operator*=(const Value& o) {
    if (d_ != 0 && o.d_ != 0 && d_ != o.d_)
        throw InvalidArgument("mixed radicands: sqrt(" + std::to_string(d_) + ") vs sqrt(" +
                              std::to_string(o.d_) + ")");
    long d = d_ != 0 ? d_ : o.d_;
    Rational a = a_ * o.a_ + b_ * o.b_ * d;
    Rational b = a_ * o.b_ + b_ * o.a_;
    a_ = a;
    b_ = b;
    d_ = (b_ == 0) ? 0 : d;
    return *this;
}

int Value::sign() const {
    int sa = sgn(a_), sb = sgn(b_);
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // Opposite signs: |a| vs |b|*sqrt(d), i.e. a^2 vs b^2*d. Equality cannot
    // occur since d is square-free >= 2.
    Rational lhs = a_ * a_, rhs = b_ * b_ * d_;
    return lhs > rhs ? sa : sb;
}

bool operator==(const Value& l, const Value& r) {
    return l.a_ == r.a_ && l.b_ == r.b_ && l.d_ == r.d_;
}

double Value::to_double() const {
    double v = a_.get_d();
    if (d_ != 0) v += b_.get_d() * std::sqrt((double)d_);
    return v;
}

std::string Value::to_string() const {
    if (is_rational()) return a_.get_str();
    std::string surd;
    if (b_ == 1)
        surd = "sqrt(" + std::to_string(d_) + ")";
    else if (b_ == -1)
        surd = "-sqrt(" + std::to_string(d_) + ")";
    else
        surd = b_.get_str() + "*sqrt(" + std::to_string(d_) + ")";
    if (a_ == 0) return surd;
    if (sgn(b_) > 0) return a_.get_str() + " + " + surd;
    Rational nb = -b_;
    return a_.get_str() + " - " + nb.get_str() + "*sqrt(" + std::to_string(d_) + ")";
}

std::ostream& operator<<(std::ostream& os, const Value& v) {
    return os << v.to_string();
}

Value parse_value(const std::string& text, bool* decimal) {
    if (decimal) *decimal = false;
    if (text.rfind("sqrt(", 0) == 0 && !text.empty() && text.back() == ')') {
        std::string inner = text.substr(5, text.size() - 6);
        if (decimal) *decimal = looks_decimal(inner);
        return Value::sqrt_of(parse_rational(inner));
    }
    if (decimal) *decimal = looks_decimal(text);
    return Value(parse_rational(text));
}

} // namespace ctxlab
