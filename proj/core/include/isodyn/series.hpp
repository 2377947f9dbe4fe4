#ifndef ISODYN_SERIES_HPP
#define ISODYN_SERIES_HPP

#include <array>

namespace isodyn::num {

/// Truncated power series about 0 up to degree 6: c[k] multiplies x^k.
/// Used for the Taylor stacks of catalog and designed models.
struct Series7 {
    std::array<double, 7> c{};

    static Series7 variable() {
        Series7 s;
        s.c[1] = 1.0;
        return s;
    }

    Series7 operator+(const Series7& o) const;
    Series7 operator-(const Series7& o) const;
    Series7 operator*(const Series7& o) const;
    Series7 scaled(double f) const;
    Series7 shifted(double a) const; // adds a to the constant term

    /// Composition this(other(x)); other must have zero constant term.
    Series7 compose(const Series7& inner) const;

    /// Series of the functional inverse; requires c[0] == 0, c[1] != 0.
    Series7 inverse_function() const;

    /// Term-by-term antiderivative with zero constant.
    Series7 antiderivative() const;

    /// (1 + w)^alpha for a series w with zero constant term.
    static Series7 binomial_of(double alpha, const Series7& w);

    /// Value of the k-th derivative at 0 (k! * c[k]).
    double derivative_at_zero(int k) const;
};

} // namespace isodyn::num

#endif
