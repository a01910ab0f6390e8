#ifndef CTXLAB_RATIONAL_HPP
#define CTXLAB_RATIONAL_HPP

#include <gmpxx.h>

#include <iosfwd>
#include <string>

namespace ctxlab {

// Exact arbitrary-precision rational. All feasibility checks, optima and
// certificates are computed in this type; doubles appear only as display
// approximations and in the explicitly float-mode code paths.
using Rational = mpq_class;

// Accepts "p/q", integers, and decimal literals ("0.25", "-1.5e-3"); decimals
// are converted exactly (digits over a power of ten).
Rational parse_rational(const std::string& text);

// True when the literal was written in decimal/exponent notation. Probability
// tables built from such literals are checked with tolerance 1e-9 instead of
// exact equality.
bool looks_decimal(const std::string& text);

std::string to_string(const Rational& r);
double to_double(const Rational& r);

// Element of Q(sqrt(d)): a + b*sqrt(d) with d a square-free integer >= 2,
// or a plain rational (b == 0, d == 0). Needed so that boxes parameterised
// by values like sqrt(1/5) keep exact arithmetic end to end; comparisons are
// exact sign computations, never floating point.
class Value {
public:
    Value() : a_(0), b_(0), d_(0) {}
    // GMP does not canonicalize fractions built from a num/den pair, and its
    // comparisons assume canonical form, so normalise here once.
    Value(const Rational& r) : a_(r), b_(0), d_(0) { a_.canonicalize(); }
    Value(long n) : a_(n), b_(0), d_(0) {}
    Value(const Rational& a, const Rational& b, long d);

    // sqrt of a nonnegative rational, normalised to a square-free radicand.
    static Value sqrt_of(const Rational& r);

    bool is_rational() const { return d_ == 0; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }
    // Throws InvalidArgument when the value has an irrational part.
    const Rational& rational() const;

    const Rational& rational_part() const { return a_; }
    const Rational& surd_coeff() const { return b_; }
    long radicand() const { return d_; }

    Value operator-() const;
    Value& operator+=(const Value& o);
    Value& operator-=(const Value& o);
    Value& operator*=(const Value& o);

    friend Value operator+(Value l, const Value& r) { return l += r; }
    friend Value operator-(Value l, const Value& r) { return l -= r; }
    friend Value operator*(Value l, const Value& r) { return l *= r; }

    // -1, 0, +1; exact.
    int sign() const;

    friend bool operator==(const Value& l, const Value& r);
    friend bool operator!=(const Value& l, const Value& r) { return !(l == r); }
    friend bool operator<(const Value& l, const Value& r) { return (l - r).sign() < 0; }
    friend bool operator<=(const Value& l, const Value& r) { return (l - r).sign() <= 0; }
    friend bool operator>(const Value& l, const Value& r) { return (l - r).sign() > 0; }
    friend bool operator>=(const Value& l, const Value& r) { return (l - r).sign() >= 0; }

    double to_double() const;
    // "5/2", "sqrt(5)", "2/5 + 1/5*sqrt(5)", ...
    std::string to_string() const;

private:
    Rational a_, b_;
    long d_;
};

std::ostream& operator<<(std::ostream& os, const Value& v);

// Box/threshold parameter: a rational or decimal literal, or "sqrt(<rational>)".
// Sets `decimal` when the literal was written in decimal notation.
Value parse_value(const std::string& text, bool* decimal = nullptr);

} // namespace ctxlab

#endif
