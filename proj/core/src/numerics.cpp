#include "isodyn/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace isodyn::num {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

// ---------------------------------------------------------------------------
// root finding

double solve_bracketed(const Fn& f, double lo, double hi, double f_lo, double f_hi,
                       double xtol) {
    if (lo > hi) {
        std::swap(lo, hi);
        std::swap(f_lo, f_hi);
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0) == (f_hi > 0))
        throw NumericsError("solve_bracketed: endpoints do not bracket a root");

    for (int iter = 0; iter < 200; ++iter) {
        const double width = hi - lo;
        if (width <= xtol + 4.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;

        // secant candidate, fall back to the midpoint when it leaves the
        // bracket or stops making progress
        double x = lo - f_lo * width / (f_hi - f_lo);
        const double guard = 0.01 * width;
        if (!(x > lo + guard && x < hi - guard) || iter % 3 == 2) x = 0.5 * (lo + hi);

        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (f_hi > 0)) {
            hi = x;
            f_hi = fx;
        } else {
            lo = x;
            f_lo = fx;
        }
    }
    // midpoint of the collapsed bracket
    return 0.5 * (lo + hi);
}

double solve_bracketed(const Fn& f, double lo, double hi, double xtol) {
    return solve_bracketed(f, lo, hi, f(lo), f(hi), xtol);
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> nodes(n), weights(n);
    // Newton on P_n with the Bonnet recurrence; standard cos initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                // one polishing step after convergence
                p0 = 1.0;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;

    auto [pos, ok] = cache.emplace(n, std::make_pair(std::move(nodes), std::move(weights)));
    (void)ok;
    return pos->second;
}

namespace {

struct PanelResult {
    double value;
    double error;
};

PanelResult panel_gl(const Fn& f, double a, double b) {
    const auto& [x61, w61] = gauss_legendre(61);
    const auto& [x30, w30] = gauss_legendre(30);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double v61 = 0.0, v30 = 0.0;
    for (int i = 0; i < 61; ++i) v61 += w61[i] * f(mid + half * x61[i]);
    for (int i = 0; i < 30; ++i) v30 += w30[i] * f(mid + half * x30[i]);
    v61 *= half;
    v30 *= half;
    return {v61, std::abs(v61 - v30)};
}

void integrate_rec(const Fn& f, double a, double b, double tol, int depth, Quadrature& acc) {
    const PanelResult r = panel_gl(f, a, b);
    if (r.error > tol && depth > 0) {
        const double mid = 0.5 * (a + b);
        integrate_rec(f, a, mid, 0.5 * tol, depth - 1, acc);
        integrate_rec(f, mid, b, 0.5 * tol, depth - 1, acc);
        return;
    }
    acc.value += r.value;
    acc.error_estimate += r.error;
    acc.panels += 1;
}

} // namespace

Quadrature integrate(const Fn& f, double a, double b, double abs_tol, int max_bisections) {
    Quadrature acc;
    integrate_rec(f, a, b, abs_tol, max_bisections, acc);
    if (!std::isfinite(acc.value))
        throw NumericsError("quadrature: non-finite integrand");
    if (acc.error_estimate > 100.0 * abs_tol + 1e-14 * std::abs(acc.value))
        throw NumericsError("quadrature: error estimate " + std::to_string(acc.error_estimate) +
                            " exceeds tolerance " + std::to_string(abs_tol));
    return acc;
}

// ---------------------------------------------------------------------------
// finite differences

namespace {

int stencil_halfwidth(int order) {
    switch (order) {
        case 1:
        case 2: return 1;
        case 3:
        case 4: return 2;
        case 5:
        case 6: return 3;
        default: throw ValidationError("derivative: order must be 1..6");
    }
}

double central_diff(const Fn& f, double x, int order, double h) {
    switch (order) {
        case 1: return (f(x + h) - f(x - h)) / (2 * h);
        case 2: return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
        case 3:
            return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) /
                   (2 * h * h * h);
        case 4:
            return (f(x + 2 * h) - 4 * f(x + h) + 6 * f(x) - 4 * f(x - h) + f(x - 2 * h)) /
                   (h * h * h * h);
        case 5:
            return (f(x + 3 * h) - 4 * f(x + 2 * h) + 5 * f(x + h) - 5 * f(x - h) +
                    4 * f(x - 2 * h) - f(x - 3 * h)) /
                   (2 * std::pow(h, 5));
        case 6:
            return (f(x + 3 * h) - 6 * f(x + 2 * h) + 15 * f(x + h) - 20 * f(x) +
                    15 * f(x - h) - 6 * f(x - 2 * h) + f(x - 3 * h)) /
                   std::pow(h, 6);
        default: throw ValidationError("derivative: order must be 1..6");
    }
}

} // namespace

double derivative_with_step(const Fn& f, double x, int order, double h) {
    // Richardson on the even-power error series of the central stencils:
    // nodes h, 2h, 4h give an O(h^6) extrapolation.
    const double d1 = central_diff(f, x, order, h);
    const double d2 = central_diff(f, x, order, 2 * h);
    const double d4 = central_diff(f, x, order, 4 * h);
    const double r1 = (4.0 * d1 - d2) / 3.0;
    const double r2 = (4.0 * d2 - d4) / 3.0;
    return (16.0 * r1 - r2) / 15.0;
}

double derivative(const Fn& f, double x, int order, double scale, double reach) {
    const int hw = stencil_halfwidth(order);
    // step balancing truncation against rounding for the extrapolated stencil
    double h = scale * std::pow(kEps, 1.0 / (order + 6));
    const double h_max = reach / (4.0 * hw) * 0.999;
    if (h > h_max) h = h_max;
    if (!(h > scale * 1e-12))
        throw NumericsError("derivative: step underflow (stencil does not fit the domain)");
    return derivative_with_step(f, x, order, h);
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

// Butcher tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

} // namespace

template <std::size_t N>
std::array<double, N> integrate_ode(const OdeRhs<N>& rhs, std::array<double, N> y,
                                    double t0, double t1, const OdeOptions& opt,
                                    const OdeObserver<N>& observer) {
    if (t0 == t1) return y;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);

    std::array<double, N> k1, k2, k3, k4, k5, k6, k7, tmp, ynew, err;
    double t = t0;
    rhs(t, y, k1);

    double h = opt.initial_step;
    if (h <= 0.0) {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        h = fnorm > 0 ? 0.01 * std::max(ynorm, 1.0) / fnorm : 1e-3 * span;
        h = std::min(h, 0.1 * span);
    }
    h = std::min(h, opt.max_step);

    bool fsal_valid = true;
    for (long step = 0; step < 100000000L; ++step) {
        if ((t - t1) * dir >= 0.0) break;
        h = std::min({h, opt.max_step, std::abs(t1 - t)});
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw NumericsError("ode: step size underflow at t=" + std::to_string(t));
        const double hs = dir * h;

        if (!fsal_valid) rhs(t, y, k1);

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * A21 * k1[i];
        rhs(t + hs / 5, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        rhs(t + 0.3 * hs, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        rhs(t + 0.8 * hs, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        rhs(t + 8.0 / 9.0 * hs, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] +
                                  A65 * k5[i]);
        rhs(t + hs, tmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                                   B6 * k6[i]);
        rhs(t + hs, ynew, k7);
        for (std::size_t i = 0; i < N; ++i)
            err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                           E7 * k7[i]);

        double err_norm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc =
                opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double e = err[i] / sc;
            err_norm += e * e;
        }
        err_norm = std::sqrt(err_norm / N);

        if (err_norm <= 1.0) {
            t += hs;
            y = ynew;
            k1 = k7; // FSAL
            fsal_valid = true;
            if (observer) observer(t, y);
        } else {
            fsal_valid = true; // k1 still matches (t, y)
        }
        const double factor =
            err_norm > 0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return y;
}

template std::array<double, 2> integrate_ode<2>(const OdeRhs<2>&, std::array<double, 2>,
                                                double, double, const OdeOptions&,
                                                const OdeObserver<2>&);
template std::array<double, 4> integrate_ode<4>(const OdeRhs<4>&, std::array<double, 4>,
                                                double, double, const OdeOptions&,
                                                const OdeObserver<4>&);
template std::array<double, 6> integrate_ode<6>(const OdeRhs<6>&, std::array<double, 6>,
                                                double, double, const OdeOptions&,
                                                const OdeObserver<6>&);

// ---------------------------------------------------------------------------
// least squares

std::vector<double> qr_lstsq(const std::vector<double>& a_in, std::size_t m, std::size_t n,
                             const std::vector<double>& b_in) {
    if (m < n) throw ValidationError("qr_lstsq: fewer rows than columns");
    std::vector<double> a = a_in; // row-major m x n
    std::vector<double> b = b_in;

    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

    double r00 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += at(i, k) * at(i, k);
        norm = std::sqrt(norm);
        if (k == 0) r00 = norm;
        if (norm <= 1e-13 * std::max(r00, 1e-300))
            throw ValidationError("qr_lstsq: rank deficient system (ill-conditioned fit)");

        const double alpha = at(k, k) >= 0 ? -norm : norm;
        double vnorm2 = 0.0;
        std::vector<double> v(m - k);
        v[0] = at(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = at(i, k);
        for (double vi : v) vnorm2 += vi * vi;
        if (vnorm2 == 0.0) continue;

        for (std::size_t c = k; c < n; ++c) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * at(i, c);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) at(i, c) -= f * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * b[i];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) b[i] -= f * v[i - k];
    }

    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= at(k, c) * x[c];
        x[k] = s / at(k, k);
    }
    return x;
}

ChebFit chebyshev_fit(std::span<const double> xs, std::span<const double> ys,
                      double half_width, int degree) {
    const std::size_t m = xs.size();
    const std::size_t n = static_cast<std::size_t>(degree) + 1;
    if (m < n) throw ValidationError("chebyshev_fit: not enough samples for the degree");

    std::vector<double> a(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        const double xi = xs[i] / half_width;
        double t0 = 1.0, t1 = xi;
        a[i * n + 0] = t0;
        if (n > 1) a[i * n + 1] = t1;
        for (std::size_t j = 2; j < n; ++j) {
            const double t2 = 2.0 * xi * t1 - t0;
            a[i * n + j] = t2;
            t0 = t1;
            t1 = t2;
        }
    }
    std::vector<double> b(ys.begin(), ys.end());
    const std::vector<double> alpha = qr_lstsq(a, m, n, b);

    // Chebyshev -> monomial in the scaled variable, then undo the scaling.
    // T_j coefficients are integers below 2^(n) and exact in double.
    std::vector<std::vector<double>> tpoly(n);
    tpoly[0] = {1.0};
    if (n > 1) tpoly[1] = {0.0, 1.0};
    for (std::size_t j = 2; j < n; ++j) {
        std::vector<double> p(j + 1, 0.0);
        for (std::size_t k = 0; k < tpoly[j - 1].size(); ++k) p[k + 1] += 2.0 * tpoly[j - 1][k];
        for (std::size_t k = 0; k < tpoly[j - 2].size(); ++k) p[k] -= tpoly[j - 2][k];
        tpoly[j] = std::move(p);
    }

    ChebFit fit;
    fit.monomial.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        long double acc = 0.0L;
        for (std::size_t j = k; j < n; ++j)
            if (k < tpoly[j].size()) acc += static_cast<long double>(alpha[j]) * tpoly[j][k];
        fit.monomial[k] = static_cast<double>(acc) / std::pow(half_width, double(k));
    }

    for (std::size_t i = 0; i < m; ++i) {
        double pred = 0.0;
        double xp = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            pred += fit.monomial[k] * xp;
            xp *= xs[i];
        }
        fit.max_residual = std::max(fit.max_residual, std::abs(pred - ys[i]));
    }
    return fit;
}

std::vector<double> chebyshev_taylor(const Fn& f, double half_width, int n_coeffs) {
    const int n = 128, degree = 22;
    std::vector<double> xs(n), ys(n);
    for (int j = 0; j < n; ++j) {
        xs[j] = half_width * std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n));
        ys[j] = f(xs[j]);
        if (!std::isfinite(ys[j]))
            throw NumericsError("chebyshev_taylor: non-finite sample");
    }
    ChebFit fit = chebyshev_fit(xs, ys, half_width, degree);
    fit.monomial.resize(n_coeffs);
    return fit.monomial;
}

double polyval(std::span<const double> c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

// ---------------------------------------------------------------------------
// cubic Hermite tables

CubicHermite::CubicHermite(std::vector<double> xs, std::vector<double> ys,
                           std::vector<double> ds, bool monotone)
    : x_(std::move(xs)), y_(std::move(ys)), d_(std::move(ds)) {
    if (x_.size() < 2 || x_.size() != y_.size() || x_.size() != d_.size())
        throw ValidationError("CubicHermite: inconsistent table sizes");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1])) throw ValidationError("CubicHermite: nodes not increasing");

    if (monotone) {
        // Fritsch-Carlson limiter against the panel secants
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            const double s = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
            if (s == 0.0) {
                d_[i] = 0.0;
                d_[i + 1] = 0.0;
                continue;
            }
            const double a = d_[i] / s, b = d_[i + 1] / s;
            if (a < 0) d_[i] = 0.0;
            if (b < 0) d_[i + 1] = 0.0;
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double f = 3.0 / std::sqrt(r);
                d_[i] = f * a * s;
                d_[i + 1] = f * b * s;
            }
        }
    }
}

std::size_t CubicHermite::locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : std::size_t(it - x_.begin()) - 1;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    return i;
}

double CubicHermite::operator()(double x) const {
    const std::size_t i = locate(x);
    const double w = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / w;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y_[i] + h10 * w * d_[i] + h01 * y_[i + 1] + h11 * w * d_[i + 1];
}

double CubicHermite::deriv(double x) const {
    const std::size_t i = locate(x);
    const double w = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / w;
    const double g00 = 6 * s * (s - 1) / w;
    const double g10 = (1 - s) * (1 - 3 * s);
    const double g01 = -g00;
    const double g11 = s * (3 * s - 2);
    return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
}

double CubicHermite::second(double x) const {
    const std::size_t i = locate(x);
    const double w = x_[i + 1] - x_[i];
    const double s = (x - x_[i]) / w;
    const double k00 = (12 * s - 6) / (w * w);
    const double k10 = (6 * s - 4) / w;
    const double k01 = -k00;
    const double k11 = (6 * s - 2) / w;
    return k00 * y_[i] + k10 * d_[i] + k01 * y_[i + 1] + k11 * d_[i + 1];
}

double kahan_sum(std::span<const double> xs) {
    double s = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace isodyn::num
