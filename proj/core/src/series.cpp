#include "isodyn/series.hpp"

#include "isodyn/common.hpp"

namespace isodyn::num {

Series7 Series7::operator+(const Series7& o) const {
    Series7 r;
    for (int k = 0; k < 7; ++k) r.c[k] = c[k] + o.c[k];
    return r;
}

Series7 Series7::operator-(const Series7& o) const {
    Series7 r;
    for (int k = 0; k < 7; ++k) r.c[k] = c[k] - o.c[k];
    return r;
}

Series7 Series7::operator*(const Series7& o) const {
    Series7 r;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; i + j < 7; ++j) r.c[i + j] += c[i] * o.c[j];
    return r;
}

Series7 Series7::scaled(double f) const {
    Series7 r;
    for (int k = 0; k < 7; ++k) r.c[k] = c[k] * f;
    return r;
}

Series7 Series7::shifted(double a) const {
    Series7 r = *this;
    r.c[0] += a;
    return r;
}

Series7 Series7::compose(const Series7& inner) const {
    if (inner.c[0] != 0.0)
        throw ValidationError("Series7::compose: inner constant term must vanish");
    // Horner over the outer coefficients
    Series7 r;
    for (int k = 6; k >= 0; --k) {
        r = r * inner;
        r.c[0] += c[k];
    }
    return r;
}

Series7 Series7::inverse_function() const {
    if (c[0] != 0.0 || c[1] == 0.0)
        throw ValidationError("Series7::inverse_function: needs c0 = 0, c1 != 0");
    Series7 phi;
    phi.c[1] = 1.0 / c[1];
    // fix one coefficient per pass: residual of (this o phi) at degree n
    for (int n = 2; n < 7; ++n) {
        const Series7 comp = this->compose(phi);
        phi.c[n] -= comp.c[n] / c[1];
    }
    return phi;
}

Series7 Series7::antiderivative() const {
    Series7 r;
    for (int k = 0; k < 6; ++k) r.c[k + 1] = c[k] / (k + 1);
    return r;
}

Series7 Series7::binomial_of(double alpha, const Series7& w) {
    if (w.c[0] != 0.0)
        throw ValidationError("Series7::binomial_of: w must have zero constant term");
    Series7 outer;
    double coeff = 1.0;
    for (int k = 0; k < 7; ++k) {
        outer.c[k] = coeff;
        coeff *= (alpha - k) / (k + 1);
    }
    return outer.compose(w);
}

double Series7::derivative_at_zero(int k) const {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return c[k] * fact;
}

} // namespace isodyn::num
