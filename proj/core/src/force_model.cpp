#include "isodyn/force_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "isodyn/expression.hpp"
#include "isodyn/numerics.hpp"
#include "isodyn/series.hpp"

namespace isodyn {

namespace {

constexpr double kEndMargin = 1e-9; // fraction of diam(J) kept off the open ends

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

// ---------------------------------------------------------------------------
// ForceModel

ForceModel::ForceModel(Parts parts)
    : name_(std::move(parts.name)),
      domain_(parts.domain),
      g_(std::move(parts.g)),
      dg_(std::move(parts.dg)),
      d2g_(std::move(parts.d2g)),
      V_(std::move(parts.V)),
      taylor_(parts.taylor_V0),
      mode_(parts.mode) {
    if (!(domain_.lo < 0.0 && 0.0 < domain_.hi))
        throw ValidationError(name_ + ": domain must be an open interval around 0");
    validate();
    compute_center_bound();
}

double ForceModel::d2g(double x) const {
    if (!d2g_) throw ValidationError(name_ + ": second derivative of g unavailable");
    return d2g_(x);
}

double ForceModel::ddV0() const {
    if (taylor_ && std::isfinite((*taylor_)[2])) return (*taylor_)[2];
    return dg_(0.0);
}

void ForceModel::require_in_domain(double x, const char* who) const {
    if (!domain_.contains(x))
        throw ValidationError(std::string(who) + ": x=" + fmt(x) + " outside domain (" +
                              fmt(domain_.lo) + ", " + fmt(domain_.hi) + ") of " + name_);
}

void ForceModel::validate() {
    const double g0 = g_(0.0);
    const double g0_tol = mode_ == DerivativeMode::Analytic ? 0.0 : 1e-12;
    if (!(std::abs(g0) <= g0_tol))
        throw ValidationError(name_ + ": g(0) = " + fmt(g0) + " violates g(0) = 0");
    const double dg0 = dg_(0.0);
    if (!(dg0 > 0.0))
        throw ValidationError(name_ + ": g'(0) = " + fmt(dg0) + " violates g'(0) > 0");

    // validation grid: V single-well, g vanishing only at 0, V' == g
    const double delta = kEndMargin * domain_.diam();
    const double lo = domain_.lo + delta, hi = domain_.hi - delta;
    const int n = 100;
    double prev_v = V_(lo);
    double prev_x = lo;
    if (!std::isfinite(prev_v)) throw ValidationError(name_ + ": V not finite near domain edge");
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = V_(x);
        const double gx = g_(x);
        if (!std::isfinite(v) || !std::isfinite(gx))
            throw ValidationError(name_ + ": non-finite value at x=" + fmt(x));
        if (std::abs(x) > 1e-12 && !(gx * x > 0.0))
            throw ValidationError(name_ + ": g(" + fmt(x) +
                                  ") = " + fmt(gx) + " -- g must vanish only at x = 0");
        if (prev_x < 0.0 && x <= 0.0 && !(v < prev_v))
            throw ValidationError(name_ + ": V not strictly decreasing on (" + fmt(prev_x) +
                                  ", " + fmt(x) + ")");
        if (prev_x >= 0.0 && !(v > prev_v))
            throw ValidationError(name_ + ": V not strictly increasing on (" + fmt(prev_x) +
                                  ", " + fmt(x) + ")");
        prev_v = v;
        prev_x = x;
    }

    // finite-difference check of V' against g
    for (int i = 0; i < n; ++i) {
        const double x = lo + (hi - lo) * (i + 0.5) / n;
        const double h = 1e-6 * std::max(1.0, std::abs(x));
        if (x - h <= domain_.lo || x + h >= domain_.hi) continue;
        const double fd = (V_(x + h) - V_(x - h)) / (2 * h);
        const double gx = g_(x);
        if (std::abs(fd - gx) > 1e-6 * std::max(1.0, std::abs(gx)))
            throw ValidationError(name_ + ": dV/dx deviates from g at x=" + fmt(x) + " (" +
                                  fmt(fd) + " vs " + fmt(gx) + ")");
    }
}

void ForceModel::compute_center_bound() {
    const double delta = kEndMargin * domain_.diam();
    const double lo = domain_.lo + delta, hi = domain_.hi - delta;
    const double e_left = V_(lo), e_right = V_(hi);
    if (!(e_left > 0.0 && e_right > 0.0))
        throw ValidationError(name_ + ": degenerate center (V does not rise toward both ends)");
    bound_.e_max = std::min(e_left, e_right);

    const double e = bound_.e_max;
    if (e_right <= e_left) {
        bound_.x_max_pos = hi;
    } else {
        bound_.x_max_pos = num::solve_bracketed(
            [this, e](double x) { return V_(x) - e; }, delta, hi);
    }
    if (e_left <= e_right) {
        bound_.x_max_neg = lo;
    } else {
        bound_.x_max_neg = num::solve_bracketed(
            [this, e](double x) { return V_(x) - e; }, lo, -delta);
    }
}

CenterBound center_bound(const ForceModel& model) { return model.center(); }

// ---------------------------------------------------------------------------
// catalog families

ForceModel make_harmonic(double omega, std::optional<Interval> domain) {
    if (!(omega > 0.0)) throw ValidationError("harmonic: omega must be positive");
    const double w2 = omega * omega;
    ForceModel::Parts p;
    p.name = "harmonic(omega=" + fmt(omega) + ")";
    p.domain = domain.value_or(Interval{-2.0, 2.0});
    p.g = [w2](double x) { return w2 * x; };
    p.dg = [w2](double) { return w2; };
    p.d2g = [](double) { return 0.0; };
    p.V = [w2](double x) { return 0.5 * w2 * x * x; };
    p.taylor_V0 = std::array<double, 7>{0, 0, w2, 0, 0, 0, 0};
    return ForceModel(std::move(p));
}

ForceModel make_pendulum(std::optional<Interval> domain) {
    constexpr double pi = std::numbers::pi;
    ForceModel::Parts p;
    p.name = "pendulum";
    p.domain = domain.value_or(Interval{-pi + 1e-3, pi - 1e-3});
    p.g = [](double x) { return std::sin(x); };
    p.dg = [](double x) { return std::cos(x); };
    p.d2g = [](double x) { return -std::sin(x); };
    p.V = [](double x) {
        const double s = std::sin(0.5 * x);
        return 2.0 * s * s; // = 1 - cos x, stable near 0
    };
    p.taylor_V0 = std::array<double, 7>{0, 0, 1, 0, -1, 0, 1};
    return ForceModel(std::move(p));
}

ForceModel make_cubic(double alpha, double beta, double gamma,
                      std::optional<Interval> domain) {
    if (!(alpha > 0.0)) throw ValidationError("cubic: alpha must be positive");
    Interval J;
    if (domain) {
        J = *domain;
    } else {
        // keep the default domain clear of the nonzero roots of g
        double r_pos = std::numeric_limits<double>::infinity();
        double r_neg = -std::numeric_limits<double>::infinity();
        auto consider = [&](double r) {
            if (r > 1e-12) r_pos = std::min(r_pos, r);
            if (r < -1e-12) r_neg = std::max(r_neg, r);
        };
        if (gamma == 0.0) {
            if (beta != 0.0) consider(-alpha / beta);
        } else {
            const double disc = beta * beta - 4.0 * alpha * gamma;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                consider((-beta + sq) / (2.0 * gamma));
                consider((-beta - sq) / (2.0 * gamma));
            }
        }
        J.hi = std::min(2.0, 0.8 * r_pos);
        J.lo = std::max(-2.0, 0.8 * r_neg);
    }
    ForceModel::Parts p;
    p.name = "cubic(alpha=" + fmt(alpha) + ",beta=" + fmt(beta) + ",gamma=" + fmt(gamma) + ")";
    p.domain = J;
    p.g = [alpha, beta, gamma](double x) { return x * (alpha + x * (beta + x * gamma)); };
    p.dg = [alpha, beta, gamma](double x) { return alpha + x * (2 * beta + 3 * gamma * x); };
    p.d2g = [beta, gamma](double x) { return 2 * beta + 6 * gamma * x; };
    p.V = [alpha, beta, gamma](double x) {
        return x * x * (0.5 * alpha + x * (beta / 3.0 + 0.25 * gamma * x));
    };
    p.taylor_V0 = std::array<double, 7>{0, 0, alpha, 2 * beta, 6 * gamma, 0, 0};
    return ForceModel(std::move(p));
}

ForceModel make_sqrt_isochrone(double omega, double lambda,
                               std::optional<Interval> domain) {
    if (!(omega > 0.0) || lambda == 0.0)
        throw ValidationError("sqrt_iso: requires omega > 0 and lambda != 0");
    const double w2 = omega * omega;
    Interval J;
    if (domain) {
        J = *domain;
    } else {
        // approach the 1 + 2*lambda*x = 0 end, close the other end with the
        // conjugate point so the involution stays inside J
        const double x_sing = -0.5 / lambda;
        const double near = x_sing * (1.0 - 1e-3);
        const double far = near + (2.0 / lambda) * (1.0 - std::sqrt(1.0 + 2.0 * lambda * near));
        J.lo = std::min(near, far);
        J.hi = std::max(near, far);
    }
    ForceModel::Parts p;
    p.name = "sqrt_iso(omega=" + fmt(omega) + ",lambda=" + fmt(lambda) + ")";
    p.domain = J;
    p.g = [w2, lambda](double x) {
        return w2 / lambda * (1.0 - 1.0 / std::sqrt(1.0 + 2.0 * lambda * x));
    };
    p.dg = [w2, lambda](double x) { return w2 * std::pow(1.0 + 2.0 * lambda * x, -1.5); };
    p.d2g = [w2, lambda](double x) {
        return -3.0 * lambda * w2 * std::pow(1.0 + 2.0 * lambda * x, -2.5);
    };
    p.V = [w2, lambda](double x) {
        const double t = 1.0 + std::sqrt(1.0 + 2.0 * lambda * x);
        return 2.0 * w2 * x * x / (t * t);
    };
    const double l2 = lambda * lambda;
    p.taylor_V0 = std::array<double, 7>{
        0, 0, w2, -3 * lambda * w2, 15 * l2 * w2, -105 * l2 * lambda * w2, 945 * l2 * l2 * w2};
    return ForceModel(std::move(p));
}

ForceModel make_quartic_isochrone(double omega, double lambda,
                                  std::optional<Interval> domain) {
    if (!(omega > 0.0) || lambda == 0.0)
        throw ValidationError("quartic_iso: requires omega > 0 and lambda != 0");
    const double w2 = omega * omega;
    Interval J;
    if (domain) {
        J = *domain;
    } else {
        // h(-0.9 lambda) = 9 lambda closes the interval under the involution
        J.lo = std::min(-0.9 * lambda, 9.0 * lambda);
        J.hi = std::max(-0.9 * lambda, 9.0 * lambda);
    }
    ForceModel::Parts p;
    p.name = "quartic_iso(omega=" + fmt(omega) + ",lambda=" + fmt(lambda) + ")";
    p.domain = J;
    p.g = [w2, lambda](double x) {
        const double w = lambda + x;
        const double r = lambda / w;
        return 0.25 * w2 * (w - lambda * r * r * r);
    };
    p.dg = [w2, lambda](double x) {
        const double w = lambda + x;
        return 0.25 * w2 * (1.0 + 3.0 * std::pow(lambda, 4) / std::pow(w, 4));
    };
    p.d2g = [w2, lambda](double x) {
        const double w = lambda + x;
        return -3.0 * w2 * std::pow(lambda, 4) / std::pow(w, 5);
    };
    p.V = [w2, lambda](double x) {
        const double w = lambda + x;
        const double t = x * (x + 2.0 * lambda) / w;
        return 0.125 * w2 * t * t;
    };
    const double il = 1.0 / lambda;
    p.taylor_V0 = std::array<double, 7>{0,
                                        0,
                                        w2,
                                        -3 * w2 * il,
                                        15 * w2 * il * il,
                                        -90 * w2 * il * il * il,
                                        630 * w2 * il * il * il * il};
    return ForceModel(std::move(p));
}

ForceModel make_generic_superintegrable(double omega, double b1, double c1,
                                        std::optional<Interval> domain) {
    if (!(omega > 0.0)) throw ValidationError("generic_super: omega must be positive");
    if (c1 == 0.0) throw ValidationError("generic_super: c1 = 0 admits no solution");
    if (b1 == 0.0)
        throw ValidationError("generic_super: b1 = 0 degenerates to the harmonic force");
    const double cdisc = b1 * b1 - 4.0 * c1;
    if (cdisc == 0.0)
        throw ValidationError("generic_super: b1^2 = 4 c1 is the quartic-family case");

    const double w2 = omega * omega;
    const double a0 = b1 * b1 + 4.0 * c1;
    const double k = 2.0 * c1 * w2 / (cdisc * cdisc);

    auto radicand = [b1, c1](double x) { return 1.0 + x * (b1 + x) / c1; };
    auto g_fn = [k, a0, b1, cdisc, radicand](double x) {
        if (x == 0.0) return 0.0;
        const double s = b1 + 2.0 * x;
        return k * (a0 * s + b1 * (cdisc - 2.0 * s * s) / std::sqrt(radicand(x)));
    };
    auto dg_fn = [k, a0, b1, c1, cdisc, radicand](double x) {
        const double s = b1 + 2.0 * x;
        const double P = radicand(x);
        const double pm12 = 1.0 / std::sqrt(P);
        const double pm32 = pm12 / P;
        return k * (2.0 * a0 +
                    b1 * (-8.0 * s * pm12 - s * (cdisc - 2.0 * s * s) / (2.0 * c1) * pm32));
    };
    auto d2g_fn = [k, b1, c1, cdisc, radicand](double x) {
        const double s = b1 + 2.0 * x;
        const double P = radicand(x);
        const double pm12 = 1.0 / std::sqrt(P);
        const double pm32 = pm12 / P;
        const double pm52 = pm32 / P;
        return k * b1 *
               (-16.0 * pm12 + (10.0 * s * s - cdisc) / c1 * pm32 +
                3.0 * s * s * (cdisc - 2.0 * s * s) / (4.0 * c1 * c1) * pm52);
    };
    auto V_fn = [k, a0, b1, c1](double x) {
        const double s = b1 + 2.0 * x;
        const double P = 1.0 + x * (b1 + x) / c1;
        const double sq = std::sqrt(P);
        return k * x *
               (a0 * (b1 + x) - 2.0 * b1 * (b1 + x) * s / (sq + 1.0) - 4.0 * b1 * c1);
    };

    Interval J;
    if (domain) {
        J = *domain;
    } else {
        double lo = -3.0 * std::max({1.0, std::abs(b1), std::sqrt(std::abs(c1))});
        double hi = -lo;
        if (cdisc > 0.0) {
            // radicand zeros bound the domain
            const double sq = std::sqrt(cdisc);
            const double z1 = 0.5 * (-b1 - sq), z2 = 0.5 * (-b1 + sq);
            const double zlo = std::min(z1, z2), zhi = std::max(z1, z2);
            if (zhi < 0.0)
                lo = std::max(lo, zhi * (1.0 - 1e-3));
            else if (zlo > 0.0)
                hi = std::min(hi, zlo * (1.0 - 1e-3));
            else {
                lo = std::max(lo, zlo * (1.0 - 1e-3));
                hi = std::min(hi, zhi * (1.0 - 1e-3));
            }
        }
        // shrink to the single-well region: stop at the first sign defect of g
        const int n = 512;
        for (int i = 1; i <= n; ++i) {
            const double x = hi * i / n;
            if (!(std::isfinite(g_fn(x)) && g_fn(x) > 0.0)) {
                hi = 0.98 * x;
                break;
            }
        }
        for (int i = 1; i <= n; ++i) {
            const double x = lo * i / n;
            if (!(std::isfinite(g_fn(x)) && g_fn(x) < 0.0)) {
                lo = 0.98 * x;
                break;
            }
        }
        J = {lo, hi};
    }

    // Taylor stack from the truncated series of g
    num::Series7 w_ser;
    w_ser.c[1] = b1 / c1;
    w_ser.c[2] = 1.0 / c1;
    const num::Series7 pm12_ser = num::Series7::binomial_of(-0.5, w_ser);
    num::Series7 poly;
    poly.c[0] = cdisc - 2.0 * b1 * b1;
    poly.c[1] = -8.0 * b1;
    poly.c[2] = -8.0;
    num::Series7 s_ser;
    s_ser.c[0] = b1;
    s_ser.c[1] = 2.0;
    const num::Series7 g_ser = (s_ser.scaled(a0) + (poly * pm12_ser).scaled(b1)).scaled(k);
    const num::Series7 v_ser = g_ser.antiderivative();
    std::array<double, 7> taylor{};
    for (int n = 2; n <= 6; ++n) taylor[n] = v_ser.derivative_at_zero(n);

    ForceModel::Parts p;
    p.name = "generic_super(omega=" + fmt(omega) + ",b1=" + fmt(b1) + ",c1=" + fmt(c1) + ")";
    p.domain = J;
    p.g = g_fn;
    p.dg = dg_fn;
    p.d2g = d2g_fn;
    p.V = V_fn;
    p.taylor_V0 = taylor;
    return ForceModel(std::move(p));
}

std::vector<ForceModel> builtin_catalog() {
    std::vector<ForceModel> models;
    models.push_back(make_harmonic(1.0));
    models.push_back(make_pendulum());
    models.push_back(make_cubic(1.0, 1.0, 0.0));
    models.push_back(make_sqrt_isochrone(1.0, 2.0));
    models.push_back(make_quartic_isochrone(1.0, 1.0));
    models.push_back(make_generic_superintegrable(1.0, 1.0, 1.0));
    return models;
}

// ---------------------------------------------------------------------------
// expression models

namespace {

/// Dense cumulative integral of g anchored at 0 with Hermite interpolation;
/// slopes at the nodes are g itself.
class PotentialCache {
public:
    PotentialCache(const std::function<double(double)>& g, Interval J) {
        const double delta = kEndMargin * J.diam();
        const double lo = J.lo + delta, hi = J.hi - delta;
        const int per_side = 2048;

        std::vector<double> xs, vs, ds;
        const int n_left = std::max(64, static_cast<int>(per_side * (-lo) / J.diam() * 2));
        const int n_right = std::max(64, static_cast<int>(per_side * hi / J.diam() * 2));

        xs.reserve(n_left + n_right + 1);
        for (int i = n_left; i >= 1; --i) xs.push_back(lo * i / n_left);
        xs.push_back(0.0);
        for (int i = 1; i <= n_right; ++i) xs.push_back(hi * i / n_right);

        const std::size_t zero_idx = n_left;
        vs.assign(xs.size(), 0.0);
        ds.resize(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) ds[i] = g(xs[i]);

        const auto& [gx, gw] = num::gauss_legendre(15);
        auto panel = [&](double a, double b) {
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            double s = 0.0;
            for (int i = 0; i < 15; ++i) s += gw[i] * g(mid + half * gx[i]);
            return s * half;
        };

        double acc = 0.0, comp = 0.0;
        for (std::size_t i = zero_idx + 1; i < xs.size(); ++i) {
            const double inc = panel(xs[i - 1], xs[i]);
            const double y = inc - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            vs[i] = acc;
        }
        acc = 0.0;
        comp = 0.0;
        for (std::size_t i = zero_idx; i-- > 0;) {
            const double inc = panel(xs[i + 1], xs[i]);
            const double y = inc - comp;
            const double t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            vs[i] = acc;
        }
        table_ = num::CubicHermite(std::move(xs), std::move(vs), std::move(ds), true);
    }

    double operator()(double x) const { return table_(x); }

private:
    num::CubicHermite table_;
};

} // namespace

ForceModel model_from_expression(std::string_view source, Interval domain, std::string name) {
    const Expression expr = Expression::parse(source);
    if (!(domain.lo < 0.0 && 0.0 < domain.hi))
        throw ValidationError("expression model: domain must contain 0");

    // probe for finite evaluation before any quadrature
    const double delta = kEndMargin * domain.diam();
    for (int i = 0; i <= 128; ++i) {
        const double x = domain.lo + delta + (domain.diam() - 2 * delta) * i / 128.0;
        const double v = expr(x);
        if (!std::isfinite(v))
            throw ValidationError("expression model: non-finite value at x=" + fmt(x));
    }
    const double g0 = expr(0.0);
    if (!(std::abs(g0) <= 1e-12))
        throw ValidationError("expression model: g(0) = " + fmt(g0) + " violates g(0) = 0");

    auto g = [expr](double x) { return expr(x); };
    const Interval J = domain;

    auto reach_at = [J](double x) {
        return 0.9 * std::min(x - J.lo, J.hi - x);
    };
    auto scale_at = [J](double x) {
        const double dist = std::min(x - J.lo, J.hi - x);
        return std::max(1e-6 * J.diam(), std::min(std::max(1.0, std::abs(x)), dist));
    };
    auto dg = [g, scale_at, reach_at](double x) {
        return num::derivative(g, x, 1, scale_at(x), reach_at(x));
    };
    auto d2g = [g, scale_at, reach_at](double x) {
        return num::derivative(g, x, 2, scale_at(x), reach_at(x));
    };

    auto cache = std::make_shared<PotentialCache>(g, J);
    auto V = [cache](double x) { return (*cache)(x); };

    // V^(n)(0) = g^(n-1)(0) from a Chebyshev window fit of g
    std::array<double, 7> taylor{};
    bool taylor_ok = true;
    try {
        const double x_f = 0.45 * std::min(-J.lo, J.hi);
        const std::vector<double> mono = num::chebyshev_taylor(g, x_f, 6);
        double fact = 1.0;
        for (int n = 2; n <= 6; ++n) {
            fact *= (n - 1);
            taylor[n] = fact * mono[n - 1];
            if (!std::isfinite(taylor[n])) taylor_ok = false;
        }
    } catch (const NumericsError&) {
        taylor_ok = false;
    }

    ForceModel::Parts p;
    p.name = name.empty() ? "expr(" + std::string(source) + ")" : std::move(name);
    p.domain = J;
    p.g = g;
    p.dg = dg;
    p.d2g = d2g;
    p.V = V;
    if (taylor_ok) p.taylor_V0 = taylor;
    p.mode = DerivativeMode::FiniteDifference;
    return ForceModel(std::move(p));
}

} // namespace isodyn
