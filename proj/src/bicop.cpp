#include "vinecg/bicop.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "vinecg/deptools.hpp"
#include "vinecg/errors.hpp"
#include "vinecg/normal.hpp"

namespace vinecg {

namespace {

constexpr double kEps = 1e-10;  // boundary clip for all uniform inputs

double clip01(double u) { return std::clamp(u, kEps, 1.0 - kEps); }

[[noreturn]] void domain_fail(const std::string& msg) { throw std::domain_error(msg); }

// ---------------------------------------------------------------------------
// Gaussian kernels (rotation 0)

struct Gaussian {
    double rho;

    double log_pdf(double u, double v) const {
        const double x = std_normal_quantile(u);
        const double y = std_normal_quantile(v);
        const double s = 1.0 - rho * rho;
        return rho * (2.0 * x * y - rho * (x * x + y * y)) / (2.0 * s) - 0.5 * std::log(s);
    }
    double cdf(double u, double v) const {
        return bvn_cdf(std_normal_quantile(u), std_normal_quantile(v), rho);
    }
    double h1(double u, double v) const {
        const double x = std_normal_quantile(u);
        const double y = std_normal_quantile(v);
        return std_normal_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
    }
    double hinv1(double p, double v) const {
        const double z = std_normal_quantile(p);
        const double y = std_normal_quantile(v);
        return std_normal_cdf(z * std::sqrt(1.0 - rho * rho) + rho * y);
    }
};

// ---------------------------------------------------------------------------
// Clayton kernels (rotation 0), fully in log space: theta can reach the
// thousands for |tau| near 1 and u^-theta overflows long before that.

struct Clayton {
    double theta;

    // log(u^-theta + v^-theta - 1)
    double log_s(double u, double v) const {
        const double a = -theta * std::log(u);
        const double b = -theta * std::log(v);
        const double m = std::max(a, b);
        return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
    }
    double log_pdf(double u, double v) const {
        return std::log1p(theta) - (theta + 1.0) * (std::log(u) + std::log(v)) -
               (2.0 + 1.0 / theta) * log_s(u, v);
    }
    double cdf(double u, double v) const { return std::exp(-log_s(u, v) / theta); }
    double h1(double u, double v) const {
        return std::exp(-(theta + 1.0) * std::log(v) - (1.0 + 1.0 / theta) * log_s(u, v));
    }
    double hinv1(double p, double v) const {
        const double a = -theta / (theta + 1.0) * std::log(p) - theta * std::log(v);
        const double b = -theta * std::log(v);  // b <= a
        const double bracket = 1.0 - std::exp(b - a) + std::exp(-a);
        const double log_x = a + std::log(bracket);
        return std::exp(-log_x / theta);
    }
};

// ---------------------------------------------------------------------------
// Gumbel kernels (rotation 0).  A = (x^theta + y^theta)^(1/theta) with
// x = -log u, y = -log v, computed through logs to survive large theta.

struct Gumbel {
    double theta;

    double big_a(double x, double y) const {
        const double lx = std::log(x), ly = std::log(y);
        const double m = std::max(lx, ly);
        const double lse = theta * m + std::log1p(std::exp(theta * (std::min(lx, ly) - m)));
        return std::exp(lse / theta);
    }
    double log_pdf(double u, double v) const {
        const double x = -std::log(u), y = -std::log(v);
        const double a = big_a(x, y);
        return -a + x + y + (theta - 1.0) * (std::log(x) + std::log(y)) +
               (1.0 - 2.0 * theta) * std::log(a) + std::log(a + theta - 1.0);
    }
    double cdf(double u, double v) const { return std::exp(-big_a(-std::log(u), -std::log(v))); }
    double log_h1(double x, double y) const {
        const double a = big_a(x, y);
        return -a + (1.0 - theta) * std::log(a) + (theta - 1.0) * std::log(y) + y;
    }
    double h1(double u, double v) const { return std::exp(log_h1(-std::log(u), -std::log(v))); }

    // Safeguarded Newton in x = -log u on f(x) = log h1 - log p, which is
    // strictly decreasing in x.
    double hinv1(double p, double v) const {
        const double y = -std::log(v);
        const double target = std::log(p);
        double lo = -std::log1p(-kEps);  // u = 1 - eps
        double hi = -std::log(kEps);     // u = eps
        double x = std::clamp(-std::log(p), lo, hi);  // independence-ish start
        for (int it = 0; it < 100; ++it) {
            const double a = big_a(x, y);
            const double f = -a + (1.0 - theta) * std::log(a) + (theta - 1.0) * std::log(y) + y - target;
            if (std::abs(f) < 1e-13) return std::exp(-x);
            if (f > 0.0)
                lo = x;  // h1 too large -> need larger x
            else
                hi = x;
            const double da_dx = std::exp((theta - 1.0) * (std::log(x) - std::log(a)));
            const double df = -da_dx * (1.0 + (theta - 1.0) / a);
            double next = x - f / df;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - x) < 1e-12 * std::max(1.0, x)) return std::exp(-next);
            x = next;
        }
        std::ostringstream os;
        os << "gumbel hinv did not converge (theta=" << theta << ", p=" << p << ", v=" << v << ")";
        throw NumericError(os.str());
    }
};

// ---------------------------------------------------------------------------
// Frank kernels for theta > 0; negative theta is handled by the caller via
// the (u, 1-v) reflection, under which Frank(theta) maps to Frank(-theta).

struct Frank {
    double theta;  // > 0

    // log D with D = exp(-t u) + exp(-t v) - exp(-t) - exp(-t(u+v)) > 0.
    double log_d(double u, double v) const {
        if (theta < 20.0) {
            return std::log(-std::expm1(-theta) - std::expm1(-theta * u) * std::expm1(-theta * v));
        }
        const double e1 = -theta * u, e2 = -theta * v;
        const double m = std::max(e1, e2);
        return m + std::log(std::exp(e1 - m) + std::exp(e2 - m) - std::exp(-theta - m) -
                            std::exp(e1 + e2 - m));
    }
    double log_eta() const { return std::log(-std::expm1(-theta)); }
    double log_pdf(double u, double v) const {
        return std::log(theta) + log_eta() - theta * (u + v) - 2.0 * log_d(u, v);
    }
    double cdf(double u, double v) const { return -(log_d(u, v) - log_eta()) / theta; }
    double h1(double u, double v) const {
        return std::exp(-theta * v + std::log(-std::expm1(-theta * u)) - log_d(u, v));
    }
    double hinv1(double p, double v) const {
        // closed form via two log-sum-exps, stable for all theta > 0
        const double base = std::log1p(-p) - theta * v;
        const double lp = std::log(p);
        const auto lse = [](double a, double b) {
            const double m = std::max(a, b);
            return m + std::log(std::exp(a - m) + std::exp(b - m));
        };
        return (lse(base, lp) - lse(base, lp - theta)) / theta;
    }
};

// ---------------------------------------------------------------------------
// Base-family dispatch at rotation 0.  All families here are exchangeable,
// so h2(u,v) = h1(v,u) and hinv2(p,u) = hinv1(p,u).

double base_log_pdf(CopulaFamily f, double th, double u, double v) {
    switch (f) {
        case CopulaFamily::independence: return 0.0;
        case CopulaFamily::gaussian: return Gaussian{th}.log_pdf(u, v);
        case CopulaFamily::clayton: return Clayton{th}.log_pdf(u, v);
        case CopulaFamily::gumbel: return Gumbel{th}.log_pdf(u, v);
        case CopulaFamily::frank:
            return th > 0 ? Frank{th}.log_pdf(u, v) : Frank{-th}.log_pdf(u, 1.0 - v);
    }
    domain_fail("unknown family");
}

double base_cdf(CopulaFamily f, double th, double u, double v) {
    switch (f) {
        case CopulaFamily::independence: return u * v;
        case CopulaFamily::gaussian: return Gaussian{th}.cdf(u, v);
        case CopulaFamily::clayton: return Clayton{th}.cdf(u, v);
        case CopulaFamily::gumbel: return Gumbel{th}.cdf(u, v);
        case CopulaFamily::frank:
            return th > 0 ? Frank{th}.cdf(u, v) : u - Frank{-th}.cdf(u, 1.0 - v);
    }
    domain_fail("unknown family");
}

double base_h1(CopulaFamily f, double th, double u, double v) {
    switch (f) {
        case CopulaFamily::independence: return u;
        case CopulaFamily::gaussian: return Gaussian{th}.h1(u, v);
        case CopulaFamily::clayton: return Clayton{th}.h1(u, v);
        case CopulaFamily::gumbel: return Gumbel{th}.h1(u, v);
        case CopulaFamily::frank:
            return th > 0 ? Frank{th}.h1(u, v) : Frank{-th}.h1(u, 1.0 - v);
    }
    domain_fail("unknown family");
}

double base_hinv1(CopulaFamily f, double th, double p, double v) {
    switch (f) {
        case CopulaFamily::independence: return p;
        case CopulaFamily::gaussian: return Gaussian{th}.hinv1(p, v);
        case CopulaFamily::clayton: return Clayton{th}.hinv1(p, v);
        case CopulaFamily::gumbel: return Gumbel{th}.hinv1(p, v);
        case CopulaFamily::frank:
            return th > 0 ? Frank{th}.hinv1(p, v) : Frank{-th}.hinv1(p, 1.0 - v);
    }
    domain_fail("unknown family");
}

double base_h2(CopulaFamily f, double th, double u, double v) { return base_h1(f, th, v, u); }
double base_hinv2(CopulaFamily f, double th, double p, double u) { return base_hinv1(f, th, p, u); }

}  // namespace

// ---------------------------------------------------------------------------

std::string family_name(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::independence: return "independence";
        case CopulaFamily::gaussian: return "gaussian";
        case CopulaFamily::clayton: return "clayton";
        case CopulaFamily::gumbel: return "gumbel";
        case CopulaFamily::frank: return "frank";
    }
    domain_fail("unknown family");
}

CopulaFamily family_from_name(const std::string& name) {
    if (name == "independence") return CopulaFamily::independence;
    if (name == "gaussian") return CopulaFamily::gaussian;
    if (name == "clayton") return CopulaFamily::clayton;
    if (name == "gumbel") return CopulaFamily::gumbel;
    if (name == "frank") return CopulaFamily::frank;
    throw DataError("unknown copula family: \"" + name + "\"");
}

BivariateCopula::BivariateCopula() : family_(CopulaFamily::independence), rotation_(Rotation::deg0), theta_(0.0) {}

BivariateCopula::BivariateCopula(CopulaFamily family, Rotation rotation, double theta)
    : family_(family), rotation_(rotation), theta_(theta) {
    switch (family_) {
        case CopulaFamily::independence:
            if (theta_ != 0.0) domain_fail("independence: has no parameter, got theta=" + std::to_string(theta));
            break;
        case CopulaFamily::gaussian:
            if (!(std::abs(theta_) < 1.0))
                domain_fail("gaussian: rho must lie in (-1, 1), got " + std::to_string(theta));
            break;
        case CopulaFamily::clayton:
            if (!(theta_ > 0.0) || !std::isfinite(theta_))
                domain_fail("clayton: theta must lie in (0, inf), got " + std::to_string(theta));
            break;
        case CopulaFamily::gumbel:
            if (!(theta_ >= 1.0) || !std::isfinite(theta_))
                domain_fail("gumbel: theta must lie in [1, inf), got " + std::to_string(theta));
            break;
        case CopulaFamily::frank:
            if (theta_ == 0.0 || !std::isfinite(theta_))
                domain_fail("frank: theta must be a nonzero real, got " + std::to_string(theta));
            break;
    }
    const bool rotatable = family_ == CopulaFamily::clayton || family_ == CopulaFamily::gumbel;
    if (!rotatable && rotation_ != Rotation::deg0)
        domain_fail(family_name(family_) + ": rotation must be 0");
}

double BivariateCopula::tau() const { return theta_to_tau(family_, rotation_, theta_); }

std::string BivariateCopula::describe() const {
    std::ostringstream os;
    os << family_name(family_);
    if (rotation_ != Rotation::deg0) os << " " << static_cast<int>(rotation_) << "deg";
    if (family_ != CopulaFamily::independence) os << " theta=" << theta_;
    return os.str();
}

// Rotation transforms.  With (U,V) the rotated pair and (U',V') the base:
//   90:  (U,V) = (1-U', V')      180: (U,V) = (1-U', 1-V')
//   270: (U,V) = (U', 1-V')
double log_pdf(const BivariateCopula& c, double u, double v) {
    u = clip01(u);
    v = clip01(v);
    switch (c.rotation()) {
        case Rotation::deg0: return base_log_pdf(c.family(), c.theta(), u, v);
        case Rotation::deg90: return base_log_pdf(c.family(), c.theta(), 1.0 - u, v);
        case Rotation::deg180: return base_log_pdf(c.family(), c.theta(), 1.0 - u, 1.0 - v);
        case Rotation::deg270: return base_log_pdf(c.family(), c.theta(), u, 1.0 - v);
    }
    domain_fail("unknown rotation");
}

double pdf(const BivariateCopula& c, double u, double v) { return std::exp(log_pdf(c, u, v)); }

double cdf(const BivariateCopula& c, double u, double v) {
    // exact uniform margins on the boundary
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u >= 1.0) return v;
    if (v >= 1.0) return u;
    switch (c.rotation()) {
        case Rotation::deg0: return base_cdf(c.family(), c.theta(), u, v);
        case Rotation::deg90: return v - base_cdf(c.family(), c.theta(), 1.0 - u, v);
        case Rotation::deg180:
            return u + v - 1.0 + base_cdf(c.family(), c.theta(), 1.0 - u, 1.0 - v);
        case Rotation::deg270: return u - base_cdf(c.family(), c.theta(), u, 1.0 - v);
    }
    domain_fail("unknown rotation");
}

double hfunc1(const BivariateCopula& c, double u, double v) {
    u = clip01(u);
    v = clip01(v);
    double out;
    switch (c.rotation()) {
        case Rotation::deg0: out = base_h1(c.family(), c.theta(), u, v); break;
        case Rotation::deg90: out = 1.0 - base_h1(c.family(), c.theta(), 1.0 - u, v); break;
        case Rotation::deg180: out = 1.0 - base_h1(c.family(), c.theta(), 1.0 - u, 1.0 - v); break;
        case Rotation::deg270: out = base_h1(c.family(), c.theta(), u, 1.0 - v); break;
        default: domain_fail("unknown rotation");
    }
    return std::clamp(out, 0.0, 1.0);
}

double hfunc2(const BivariateCopula& c, double u, double v) {
    u = clip01(u);
    v = clip01(v);
    double out;
    switch (c.rotation()) {
        case Rotation::deg0: out = base_h2(c.family(), c.theta(), u, v); break;
        case Rotation::deg90: out = base_h2(c.family(), c.theta(), 1.0 - u, v); break;
        case Rotation::deg180: out = 1.0 - base_h2(c.family(), c.theta(), 1.0 - u, 1.0 - v); break;
        case Rotation::deg270: out = 1.0 - base_h2(c.family(), c.theta(), u, 1.0 - v); break;
        default: domain_fail("unknown rotation");
    }
    return std::clamp(out, 0.0, 1.0);
}

double hinv1(const BivariateCopula& c, double p, double v) {
    p = clip01(p);
    v = clip01(v);
    double out;
    switch (c.rotation()) {
        case Rotation::deg0: out = base_hinv1(c.family(), c.theta(), p, v); break;
        case Rotation::deg90: out = 1.0 - base_hinv1(c.family(), c.theta(), 1.0 - p, v); break;
        case Rotation::deg180: out = 1.0 - base_hinv1(c.family(), c.theta(), 1.0 - p, 1.0 - v); break;
        case Rotation::deg270: out = base_hinv1(c.family(), c.theta(), p, 1.0 - v); break;
        default: domain_fail("unknown rotation");
    }
    return clip01(out);
}

double hinv2(const BivariateCopula& c, double p, double u) {
    p = clip01(p);
    u = clip01(u);
    double out;
    switch (c.rotation()) {
        case Rotation::deg0: out = base_hinv2(c.family(), c.theta(), p, u); break;
        case Rotation::deg90: out = base_hinv2(c.family(), c.theta(), p, 1.0 - u); break;
        case Rotation::deg180: out = 1.0 - base_hinv2(c.family(), c.theta(), 1.0 - p, 1.0 - u); break;
        case Rotation::deg270: out = 1.0 - base_hinv2(c.family(), c.theta(), 1.0 - p, u); break;
        default: domain_fail("unknown rotation");
    }
    return clip01(out);
}

// ---------------------------------------------------------------------------
// Kendall's tau maps

namespace {

// D1(x) = (1/x) int_0^x t / (e^t - 1) dt, by adaptive Simpson to ~1e-12.
double debye_integrand(double t) {
    if (t < 1e-8) return 1.0 - t / 2.0;
    return t / std::expm1(t);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

double debye1(double x) {
    // beyond ~50 the integrand tail is below double precision
    const double upper = std::min(x, 50.0);
    const double integral = integrate(debye_integrand, 0.0, upper, 1e-13);
    return integral / x;
}

double frank_tau_from_theta(double theta) {
    if (theta == 0.0) return 0.0;
    const double t = std::abs(theta);
    const double tau = 1.0 - 4.0 / t * (1.0 - debye1(t));
    return theta > 0 ? tau : -tau;
}

double frank_theta_from_tau(double tau) {
    const double target = std::abs(tau);
    double lo = 1e-10, hi = 1.0;
    while (frank_tau_from_theta(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e7) throw NumericError("frank: tau too close to 1");
    }
    // Illinois method on tau(theta) - target
    double flo = frank_tau_from_theta(lo) - target;
    double fhi = frank_tau_from_theta(hi) - target;
    double theta = hi;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        theta = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(theta > lo && theta < hi)) theta = 0.5 * (lo + hi);
        const double f = frank_tau_from_theta(theta) - target;
        if (f == 0.0) break;
        if ((f > 0) == (fhi > 0)) {
            hi = theta;
            fhi = f;
            flo *= 0.5;
        } else {
            lo = theta;
            flo = f;
            fhi *= 0.5;
        }
    }
    return tau > 0 ? theta : -theta;
}

bool tau_sign_flipped(Rotation r) { return r == Rotation::deg90 || r == Rotation::deg270; }

}  // namespace

double theta_to_tau(CopulaFamily family, Rotation rotation, double theta) {
    double tau;
    switch (family) {
        case CopulaFamily::independence: tau = 0.0; break;
        case CopulaFamily::gaussian: tau = 2.0 * std::asin(theta) / M_PI; break;
        case CopulaFamily::clayton: tau = theta / (theta + 2.0); break;
        case CopulaFamily::gumbel: tau = 1.0 - 1.0 / theta; break;
        case CopulaFamily::frank: tau = frank_tau_from_theta(theta); break;
        default: domain_fail("unknown family");
    }
    return tau_sign_flipped(rotation) ? -tau : tau;
}

double tau_to_theta(CopulaFamily family, Rotation rotation, double tau) {
    if (std::abs(tau) > 0.999)
        domain_fail(family_name(family) + ": |tau| must be <= 0.999, got " + std::to_string(tau));
    const double t = tau_sign_flipped(rotation) ? -tau : tau;
    switch (family) {
        case CopulaFamily::independence:
            domain_fail("independence: has no parameter");
        case CopulaFamily::gaussian:
            return std::sin(M_PI * t / 2.0);
        case CopulaFamily::clayton:
            if (t <= 0.0)
                domain_fail("clayton: requires tau > 0 at rotation " +
                            std::to_string(tau_sign_flipped(rotation) ? 90 : 0) + ", got tau=" +
                            std::to_string(tau));
            return 2.0 * t / (1.0 - t);
        case CopulaFamily::gumbel:
            if (t < 0.0)
                domain_fail("gumbel: requires tau >= 0 at rotation " +
                            std::to_string(tau_sign_flipped(rotation) ? 90 : 0) + ", got tau=" +
                            std::to_string(tau));
            return 1.0 / (1.0 - t);
        case CopulaFamily::frank:
            if (t == 0.0) domain_fail("frank: tau = 0 has no parameter");
            return frank_theta_from_tau(t);
    }
    domain_fail("unknown family");
}

// ---------------------------------------------------------------------------
// Fitting

double loglik(const BivariateCopula& c, std::span<const double> u, std::span<const double> v) {
    double ll = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) ll += log_pdf(c, u[i], v[i]);
    return ll;
}

namespace {

struct Candidate {
    CopulaFamily family;
    Rotation rotation;
};

// Golden-section maximizer with a seed-centered window that grows while the
// optimum sits on its edge.
double maximize_1d(const std::function<double(double)>& f, double seed, double lo_bound,
                   double hi_bound) {
    double window = std::max(0.5, 0.5 * std::abs(seed));
    for (int grow = 0; grow < 8; ++grow) {
        double lo = std::max(lo_bound, seed - window);
        double hi = std::min(hi_bound, seed + window);
        const double gr = 0.6180339887498949;
        double x1 = hi - gr * (hi - lo);
        double x2 = lo + gr * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        while (hi - lo > 1e-8) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = f(x1);
            }
        }
        const double best = 0.5 * (lo + hi);
        const bool at_low_edge = best - (seed - window) < 1e-6 && seed - window > lo_bound;
        const bool at_high_edge = (seed + window) - best < 1e-6 && seed + window < hi_bound;
        if (!at_low_edge && !at_high_edge) return best;
        window *= 4.0;
    }
    return seed;
}

std::pair<double, double> theta_bounds(CopulaFamily family) {
    switch (family) {
        case CopulaFamily::gaussian: return {-0.999999, 0.999999};
        case CopulaFamily::clayton: return {1e-6, 2e4};
        case CopulaFamily::gumbel: return {1.0, 1e4};
        case CopulaFamily::frank: return {-4.2e3, 4.2e3};
        default: return {0.0, 0.0};
    }
}

}  // namespace

BivariateCopula fit(const std::vector<CopulaFamily>& family_set, std::span<const double> u,
                    std::span<const double> v, const FitConfig& cfg) {
    if (family_set.empty()) throw std::invalid_argument("fit: family_set is empty");
    if (u.size() != v.size()) throw std::invalid_argument("fit: u and v differ in length");
    if (u.size() < 10) throw DataError("fit: needs at least 10 observation pairs, got " + std::to_string(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0 && v[i] > 0.0 && v[i] < 1.0))
            throw DataError("fit: observation " + std::to_string(i) + " outside (0,1)");
    }

    const double emp_tau = kendall_tau(u, v);
    if (std::abs(emp_tau) < cfg.independence_threshold) return BivariateCopula{};

    const double tau_c = std::clamp(emp_tau, -0.999, 0.999);

    std::vector<Candidate> candidates;
    for (CopulaFamily f : family_set) {
        switch (f) {
            case CopulaFamily::independence:
                candidates.push_back({f, Rotation::deg0});
                break;
            case CopulaFamily::gaussian:
            case CopulaFamily::frank:
                candidates.push_back({f, Rotation::deg0});
                break;
            case CopulaFamily::clayton:
            case CopulaFamily::gumbel:
                if (tau_c > 0.0) {
                    candidates.push_back({f, Rotation::deg0});
                    candidates.push_back({f, Rotation::deg180});
                } else {
                    candidates.push_back({f, Rotation::deg90});
                    candidates.push_back({f, Rotation::deg270});
                }
                break;
        }
    }

    bool have_best = false;
    BivariateCopula best;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (const Candidate& cand : candidates) {
        BivariateCopula c;
        if (cand.family == CopulaFamily::independence) {
            c = BivariateCopula{};
        } else {
            double theta = tau_to_theta(cand.family, cand.rotation, tau_c);
            if (cfg.method == FitMethod::mle) {
                const auto [lo, hi] = theta_bounds(cand.family);
                auto objective = [&](double th) {
                    return loglik(BivariateCopula(cand.family, cand.rotation, th), u, v);
                };
                theta = maximize_1d(objective, theta, lo, hi);
            }
            c = BivariateCopula(cand.family, cand.rotation, theta);
        }
        const double ll = loglik(c, u, v);
        if (!have_best || ll > best_ll) {
            have_best = true;
            best = c;
            best_ll = ll;
        }
    }
    return best;
}

}  // namespace vinecg
