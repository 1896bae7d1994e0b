#include "logschro/green.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace logschro {

namespace {

constexpr double kPi = std::numbers::pi;

// \int_{-inf}^{b0} + pieces + \int_{b_last}^{inf} in the log variable
template <class F>
double integrate_line(const F& f, std::vector<double> b, const QuadratureSpec& q, const char* what) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    double acc = integrate_inf([&](double w) { return f(b.front() - w); }, 0.0, q, what);
    for (size_t i = 0; i + 1 < b.size(); ++i) acc += integrate(f, b[i], b[i + 1], q, what);
    return acc + integrate_inf([&](double w) { return f(b.back() + w); }, 0.0, q, what);
}

// Taylor coefficients of the N = 1 density at time 1: p(y,1) = sum_k c_k y^{2k}, entire for s > 1/2
// and convergent on |y| < 1 at s = 1/2.
double origin_coefficient(double s, int k) {
    const double a = 2.0 * s;
    const double lg = log_gamma((2.0 * k + 1.0) / a) - log_gamma(2.0 * k + 1.0);
    return (k % 2 ? -1.0 : 1.0) * std::exp(lg) / (kPi * a);
}

// sum_{k>=1} c_k (f_k(a) - f_k(b)) until the terms die out
template <class T>
double origin_series(double s, const T& term) {
    double acc = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double v = origin_coefficient(s, k) * term(k);
        acc += v;
        if (std::fabs(v) < 1e-18 * std::fabs(acc)) break;
    }
    return acc;
}

// p(r,tau) - p(rho,tau) without cancellation once both points sit deep inside the core
double density_difference(const OperatorParams& p, double r, double rho, double tau, const QuadratureSpec& q) {
    const int N = p.N;
    const double s = p.s;
    if (s == 0.5) {
        const double gN = gamma_fn(0.5 * (N + 1)) * std::pow(kPi, -0.5 * (N + 1));
        const double A = tau * tau + r * r;
        const double m = 0.5 * (N + 1);
        return gN * tau * std::pow(A, -m) * -std::expm1(m * std::log1p((r * r - rho * rho) / (tau * tau + rho * rho)));
    }
    if (s == 1.0)
        return std::pow(4.0 * kPi * tau, -0.5 * N) * std::exp(-r * r / (4.0 * tau)) *
               -std::expm1(-(rho * rho - r * r) / (4.0 * tau));
    const double sc = std::pow(tau, -0.5 / s);
    const double yr = r * sc, yrho = rho * sc;
    if (N == 1 && s > 0.5 && yrho < 0.5)
        return sc * origin_series(s, [&](int k) { return std::pow(yr, 2 * k) - std::pow(yrho, 2 * k); });
    return density_radial(p, r, tau, q) - density_radial(p, rho, tau, q);
}

// P(|X_1| < b) for N = 1
double central_mass(const OperatorParams& p, double b, const QuadratureSpec& q) {
    if (p.s == 0.5) return 2.0 / kPi * std::atan(b);
    if (p.s == 1.0) return std::erf(0.5 * b);
    auto dens = [&](double y) { return density_radial(p, y, 1.0, q); };
    if (b <= 2.0) return 2.0 * integrate(dens, 0.0, b, q, "central mass");
    return 1.0 - 2.0 * integrate_inf(dens, b, q, "central mass");
}

void check_green_params(const OperatorParams& params) {
    params.validate();
}

}  // namespace

double renewal_density(double tau, const QuadratureSpec& quad) {
    if (!(tau > 0.0)) throw std::invalid_argument("renewal_density: tau must be positive");
    if (tau > 50.0) return 1.0;  // the remainder is below e^{-50}/tau
    if (tau < 1e-2) {
        // t = w / log(1/tau), Gamma(t) = Gamma(1+t)/t
        const double L = -std::log(tau);
        auto f = [&](double w) { return w * std::exp(-w - log_gamma(1.0 + w / L)); };
        const double I = integrate(f, 0.0, 1.0, quad, "renewal density") + integrate_inf(f, 1.0, quad, "renewal density");
        return std::exp(-tau) * I / (tau * L * L);
    }
    const double lt = std::log(tau);
    auto f = [&](double t) {
        if (t == 0.0) return 0.0;
        return std::exp((t - 1.0) * lt + std::log(t) - log_gamma(1.0 + t) - tau);
    };
    const double peak = tau + 1.0;
    return integrate(f, 0.0, peak, quad, "renewal density") + integrate_inf(f, peak, quad, "renewal density");
}

double q_density(const OperatorParams& params, double t, double r, const QuadratureSpec& quad) {
    check_green_params(params);
    if (!(t > 0.0 && t < 0.5 * params.N)) throw std::invalid_argument("q_density: t must lie in (0, N/2)");
    if (!(r >= 0.0)) throw std::invalid_argument("q_density: r must be nonnegative");
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    const double lg = log_gamma(t);
    const double vmax = std::log(800.0);  // e^{-tau} is below the double range past here
    auto f = [&](double v) {
        if (v > vmax || v < -700.0) return 0.0;
        const double tau = std::exp(v);
        const double p = density_radial(params, r, tau, quad);
        return p == 0.0 ? 0.0 : p * std::exp(t * v - tau - lg);
    };
    std::vector<double> b{std::min(0.0, vmax)};
    const double vr = 2.0 * params.s * std::log(r);
    if (vr < vmax) b.push_back(vr);
    return integrate_line(f, b, quad, "q_density");
}

bool green_recurrent(const OperatorParams& params) { return params.N <= 2.0 * params.s; }

GreenValue green_ex(const OperatorParams& params, double r, const QuadratureSpec& quad, double reference_radius) {
    check_green_params(params);
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("green: r must be positive and finite");
    GreenValue out;
    out.renormalized = green_recurrent(params);
    const double s = params.s;
    if (out.renormalized && !(reference_radius > 0.0))
        throw std::invalid_argument("green: reference radius must be positive");
    auto f = [&](double v) {
        if (std::fabs(v) > 700.0) return 0.0;  // both tails are exponentially small in v
        const double tau = std::exp(v);
        const double d = out.renormalized ? density_difference(params, r, reference_radius, tau, quad)
                                          : density_radial(params, r, tau, quad);
        return d == 0.0 ? 0.0 : tau * d * renewal_density(tau, quad);
    };
    std::vector<double> b{0.0, 2.0 * s * std::log(r)};
    if (out.renormalized) b.push_back(2.0 * s * std::log(reference_radius));
    out.value = integrate_line(f, b, quad, "green");
    return out;
}

double green(const OperatorParams& params, double r, const QuadratureSpec& quad) {
    return green_ex(params, r, quad).value;
}

GreenSample green_sample(const OperatorParams& params, double r, const QuadratureSpec& quad) {
    const GreenValue g = green_ex(params, r, quad);
    GreenSample out;
    out.r = r;
    out.value = g.value;
    out.renormalized = g.renormalized;
    const double L = std::log(r);
    out.near_one = std::fabs(L) < 1e-3;
    out.weighted_zero = std::pow(r, params.N) * L * L * g.value;
    out.weighted_inf = std::pow(r, params.N + 2.0 * params.s) * L * L * g.value;
    return out;
}

std::vector<GreenSample> green_table(const OperatorParams& params, const std::vector<double>& radii,
                                     const QuadratureSpec& quad) {
    check_green_params(params);
    std::vector<GreenSample> out(radii.size());
    const size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (size_t w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (size_t i = w; i < radii.size(); i += workers) out[i] = green_sample(params, radii[i], quad);
        }));
    for (auto& j : jobs) j.get();
    return out;
}

AsymptoticFit green_asymptote(const OperatorParams& params, Regime regime, const QuadratureSpec& quad) {
    check_green_params(params);
    AsymptoticFit fit;
    const bool zero = regime == Regime::Zero;
    // near zero the window stays below 1e-6: the renormalization constant enters as r log(1/r)^2 const
    fit.r_min = zero ? 1e-16 : 1e3;
    fit.r_max = zero ? 1e-6 : 1e4;
    const int n = 13;
    std::vector<double> radii(n);
    for (int i = 0; i < n; ++i)
        radii[i] = fit.r_min * std::pow(fit.r_max / fit.r_min, static_cast<double>(i) / (n - 1));
    const auto samples = green_table(params, radii, quad);
    // least squares for y = c + c1 x, x = 1/log(1/r)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = 1.0 / std::log(1.0 / radii[i]);
        ys[i] = zero ? samples[i].weighted_zero : samples[i].weighted_inf;
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    fit.correction = (n * sxy - sx * sy) / det;
    fit.constant = (sy - fit.correction * sx) / n;
    double rss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = ys[i] - (fit.constant + fit.correction * xs[i]);
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / n) / std::max(std::fabs(fit.constant), 1e-300);
    fit.residual_too_large = !(fit.residual <= kFitResidualLimit) || !(fit.constant > 0.0);
    return fit;
}

GridFunction green_convolve(const OperatorParams& params, const GridFunction& f, const QuadratureSpec& quad) {
    check_green_params(params);
    f.validate();
    if (params.N != 1 || f.spec.N != 1) throw std::invalid_argument("green_convolve: only N = 1 is supported");
    const double h = f.spec.dx();
    const int n = f.spec.n;
    const double half = 0.5 * h;
    const bool rec = green_recurrent(params);
    const double rho = kGreenReferenceRadius;
    const double s = params.s;

    // central cell: \int_{|z|<h/2} G = \int u(tau) [P(|X_tau| < h/2) - h p(rho, tau)] dtau
    auto core = [&](double v) {
        if (std::fabs(v) > 700.0) return 0.0;
        const double tau = std::exp(v);
        const double sc = std::pow(tau, -0.5 / s);
        const double b = half * sc;
        double m;
        if (rec && b < 0.5 && rho * sc < 0.5 && s >= 0.5) {
            // both terms are 2b p(0,1) to leading order
            m = 2.0 * origin_series(s, [&](int k) {
                    return std::pow(b, 2 * k + 1) / (2 * k + 1) - b * std::pow(rho * sc, 2 * k);
                });
        } else {
            m = central_mass(params, b, quad);
            if (rec) m -= h * density_radial(params, rho, tau, quad);
        }
        return m == 0.0 ? 0.0 : tau * m * renewal_density(tau, quad);
    };
    std::vector<double> b{0.0, 2.0 * s * std::log(half)};
    if (rec) b.push_back(2.0 * s * std::log(rho));
    std::vector<double> w(n);
    w[0] = integrate_line(core, b, quad, "green_convolve");

    // other cells: 4-point Gauss-Legendre on G sampled at the nodes
    static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
    static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
    std::vector<double> radii;
    radii.reserve(4 * (n - 1));
    for (int k = 1; k < n; ++k)
        for (double x : gx) radii.push_back(h * (k + 0.5 * x));
    const auto g = green_table(params, radii, quad);
    for (int k = 1; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += gw[j] * g[4 * (k - 1) + j].value;
        w[k] = 0.5 * h * acc;
    }
    GridFunction out{f.spec, std::vector<double>(n, 0.0)};
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += w[std::abs(i - j)] * f.values[j];
        out.values[i] = acc;
    }
    return out;
}

}  // namespace logschro
