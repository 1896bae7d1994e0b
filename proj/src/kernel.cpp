#include "logschro/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "logschro/stable_density.hpp"

namespace logschro {

namespace {

void check_radius(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("kernel: r must be positive (K_s is singular at the origin)");
}

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - (f.intercept + f.slope * x[i]);
        ss += d * d;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

std::vector<double> log_space(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
    return out;
}

// \int_{r0}^inf r^{N-1} K_s(r) dr on a logarithmic variable
double radial_tail(const OperatorParams& params, double r0, const QuadratureSpec& quad) {
    const int N = params.N;
    auto f = [&](double u) {
        const double r = r0 * std::exp(u);
        if (r > 1e90) return 0.0;  // r^N K ~ r^{-2s}: what is dropped is far below tolerance
        return std::pow(r, N) * kernel(params, r, quad);
    };
    return integrate_inf(f, 0.0, quad, "kernel radial tail");
}

}  // namespace

double kernel_subordination(const OperatorParams& params, double r, const QuadratureSpec& quad) {
    params.validate();
    check_radius(r);
    const double s = params.s;
    const double a = params.N / (2.0 * s);
    const double tstar = quad.split_radius_rule == SplitRule::PowerLaw ? std::pow(r, 2.0 * s) : 1.0;
    const double ystar = r * std::pow(tstar, -0.5 / s);
    const double p0 = density_at_origin(params);
    auto p = [&](double y) { return density_radial(params, y, 1.0, quad); };

    // t < t*: t = t* e^{-v}
    auto inner = [&](double v) {
        // the integrand decays like e^{-v}
        if (v > 700.0 || v / (2.0 * s) > 600.0) return 0.0;
        const double pv = p(ystar * std::exp(v / (2.0 * s)));
        if (pv == 0.0) return 0.0;
        return std::exp(a * v - tstar * std::exp(-v)) * pv;
    };
    // t > t*: t = t* e^{v}, with p(., 1) replaced by its deviation from p(0, 1); the
    // constant part integrates to an incomplete gamma function.
    auto outer = [&](double v) {
        const double damp = tstar * std::exp(v);
        if (damp > 745.0) return 0.0;
        return std::exp(-a * v - damp) * (p(ystar * std::exp(-v / (2.0 * s))) - p0);
    };
    const double v0 = std::max(0.0, std::log(tstar));
    const double in = integrate(inner, 0.0, v0, quad, "kernel (t < split)") +
                      integrate_inf(inner, v0, quad, "kernel (t < split)");
    const double out = integrate_inf(outer, 0.0, quad, "kernel (t > split)");
    const double gamma_part = tstar > 700.0 ? 0.0 : upper_incomplete_gamma(-a, tstar);
    return std::pow(tstar, -a) * (in + out) + p0 * gamma_part;
}

KernelValue kernel_ex(const OperatorParams& params, double r, const QuadratureSpec& quad) {
    params.validate();
    check_radius(r);
    KernelValue out;
    if (r < kKernelSurrogateRadius) {
        out.value = kernel_zero_limit(params) * std::pow(r, -params.N);
        out.surrogate = true;
    } else if (params.is_one()) {
        out.value = kernel_one(params.N, r, &out.underflow);
    } else if (params.s == 0.5) {
        out.value = kernel_half(params.N, r, quad);
    } else {
        out.value = kernel_subordination(params, r, quad);
    }
    return out;
}

double kernel(const OperatorParams& params, double r, const QuadratureSpec& quad) {
    return kernel_ex(params, r, quad).value;
}

double kernel_half(int N, double r, const QuadratureSpec& quad) {
    const OperatorParams params{N, 0.5};
    params.validate();
    check_radius(r);
    const double gN = constants(params).gamma_N;
    const double e = 0.5 * (N + 1);
    if (r < 1.0) {
        auto f = [&](double t) { return std::exp(-t * r) * std::pow(t * t + 1.0, -e); };
        return gN * std::pow(r, -N) * integrate_inf(f, 0.0, quad, "kernel_half");
    }
    auto f = [&](double u) { return std::exp(-u) * std::pow(u * u / (r * r) + 1.0, -e); };
    return gN * std::pow(r, -N - 1.0) * integrate_inf(f, 0.0, quad, "kernel_half");
}

double kernel_one_prefactor(int N) {
    // Fitted by calibrate_kernel_one_prefactor (r in [1, 10], tol 1e-12); the values agree
    // with 2^{1-N/2} pi^{-N/2} to the digits shown.
    switch (N) {
        case 1: return 0.7978845608028654;
        case 2: return 0.3183098861837907;
        case 3: return 0.1269872718684820;
        default: throw std::invalid_argument("N must be 1, 2 or 3");
    }
}

double kernel_one(int N, double r, bool* underflow) {
    OperatorParams{N, 1.0}.validate();
    check_radius(r);
    return kernel_one_prefactor(N) * std::pow(r, -0.5 * N) * bessel_k(0.5 * N, r, underflow);
}

double calibrate_kernel_one_prefactor(int N, const QuadratureSpec& quad) {
    const OperatorParams params{N, 1.0};
    double acc = 0.0;
    const auto rs = log_space(1.0, 10.0, 12);
    for (double r : rs) acc += kernel_subordination(params, r, quad) / (std::pow(r, -0.5 * N) * bessel_k(0.5 * N, r));
    return acc / static_cast<double>(rs.size());
}

double tail_mass(const OperatorParams& params, double delta, const QuadratureSpec& quad) {
    params.validate();
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("tail_mass: delta must lie in (0,1)");
    return constants(params).omega_Nm1 * radial_tail(params, delta, quad);
}

double kernel_mass_beyond(const OperatorParams& params, double r0, const QuadratureSpec& quad) {
    params.validate();
    check_radius(r0);
    return constants(params).omega_Nm1 * radial_tail(params, r0, quad);
}

KernelTable::KernelTable(const OperatorParams& params, const QuadratureSpec& quad, double step, double r_max)
    : params_(params), quad_(quad) {
    params.validate();
    quad.validate();
    if (params.s == 0.5 || params.is_one()) {
        direct_ = true;
        return;
    }
    if (!(step > 0.0 && step <= 0.2) || !(r_max > 1.0)) throw std::invalid_argument("KernelTable: bad step or range");
    step_ = step;
    r_max_ = r_max;
    tail_exp_ = -2.0 * params.s;
    // three guard nodes on each side keep the stencil inside the table
    w0_ = std::log(kKernelSurrogateRadius) - 3 * step;
    const int count = static_cast<int>(std::ceil((std::log(r_max) - w0_) / step)) + 4;
    g_.resize(count);
    const int nthreads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (int t = 0; t < nthreads; ++t)
        jobs.push_back(std::async(std::launch::async, [this, t, nthreads, count] {
            for (int i = t; i < count; i += nthreads) {
                const double r = std::exp(w0_ + i * step_);
                // below the surrogate radius use the subordination integral itself so the stencil stays smooth
                const double k = kernel_subordination(params_, r, quad_);
                g_[i] = std::log(std::pow(r, params_.N) * k);
            }
        }));
    for (auto& j : jobs) j.get();
}

double KernelTable::operator()(double r) const {
    if (direct_) return kernel(params_, r, quad_);
    check_radius(r);
    if (r < kKernelSurrogateRadius) return kernel_zero_limit(params_) * std::pow(r, -params_.N);
    const int last = static_cast<int>(g_.size()) - 1;
    if (r > r_max_) {
        const double wm = w0_ + (last - 3) * step_;
        return std::exp(g_[last - 3] + tail_exp_ * (std::log(r) - wm)) * std::pow(r, -params_.N);
    }
    const double u = (std::log(r) - w0_) / step_;
    int i0 = static_cast<int>(std::floor(u)) - 2;
    i0 = std::clamp(i0, 0, last - 5);
    const double x = u - i0;
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) {
        double w = 1.0;
        for (int m = 0; m < 6; ++m)
            if (m != j) w *= (x - m) / (j - m);
        acc += w * g_[i0 + j];
    }
    return std::exp(acc) * std::pow(r, -params_.N);
}

double KernelTable::mass_beyond(double r0) const {
    check_radius(r0);
    const int N = params_.N;
    auto f = [&](double u) {
        const double r = r0 * std::exp(u);
        if (r > 1e90) return 0.0;
        return std::pow(r, N) * (*this)(r);
    };
    return constants(params_).omega_Nm1 * integrate_inf(f, 0.0, quad_, "kernel table tail");
}

std::shared_ptr<const KernelTable> shared_kernel_table(const OperatorParams& params, const QuadratureSpec& quad) {
    static std::mutex mu;
    static std::map<std::tuple<int, double, double, int>, std::shared_ptr<const KernelTable>> cache;
    const auto key = std::make_tuple(params.N, params.s, quad.tol, static_cast<int>(quad.split_radius_rule));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    // built outside the lock; a racing duplicate is harmless
    auto table = std::make_shared<const KernelTable>(params, quad);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(key, table).first->second;
}

IntegrabilityResult levy_integrability(const OperatorParams& params, double eps, const QuadratureSpec& quad,
                                       bool weighted) {
    params.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("levy_integrability: eps must be positive");
    const int N = params.N;
    const double omega = constants(params).omega_Nm1;
    const double rs = kKernelSurrogateRadius;
    IntegrabilityResult res;
    double total = radial_tail(params, 1.0, quad);
    // dyadic shells down to the surrogate radius, so a runaway sum is caught early
    const double w = weighted ? eps : 0.0;
    for (double hi = 1.0; hi > rs; hi *= 0.5) {
        const double lo = std::max(rs, 0.5 * hi);
        auto f = [&](double u) {
            const double r = std::exp(u);
            return std::pow(r, N + w) * kernel(params, r, quad);
        };
        total += integrate(f, std::log(lo), std::log(hi), quad, "levy_integrability shell");
        if (omega * total > 1e12) {
            res.diverged = true;
            res.value = std::numeric_limits<double>::infinity();
            return res;
        }
    }
    if (!weighted) {
        // below rs the kernel is c r^{-N}: \int_0^{rs} r^{N-1} c r^{-N} dr is infinite
        res.diverged = true;
        res.value = std::numeric_limits<double>::infinity();
        return res;
    }
    total += kernel_zero_limit(params) * std::pow(rs, eps) / eps;
    res.value = omega * total;
    return res;
}

AsymptoticFit fit_asymptote(const OperatorParams& params, Regime regime, const QuadratureSpec& quad) {
    params.validate();
    AsymptoticFit fit;
    if (regime == Regime::Zero) {
        fit.r_min = 2e-6;
        fit.r_max = 2e-4;
    } else if (params.is_one()) {
        fit.r_min = 5.0;
        fit.r_max = 50.0;
    } else {
        fit.r_min = 1e2;
        fit.r_max = 1e4;
    }
    std::vector<double> lx, ly;
    for (double r : log_space(fit.r_min, fit.r_max, 9)) {
        lx.push_back(std::log(r));
        ly.push_back(std::log(kernel(params, r, quad)));
    }
    const LineFit lf = least_squares(lx, ly);
    fit.exponent = -lf.slope;
    fit.constant = std::exp(lf.intercept);
    fit.residual = lf.rms;
    fit.residual_too_large = lf.rms > kFitResidualLimit;
    return fit;
}

AsymptoticFit fit_exponential_tail(const OperatorParams& params, const QuadratureSpec& quad) {
    params.validate();
    AsymptoticFit fit;
    fit.r_min = 5.0;
    fit.r_max = 50.0;
    std::vector<double> lx, ly;
    for (double r : log_space(fit.r_min, fit.r_max, 9)) {
        lx.push_back(std::log(r));
        ly.push_back(std::log(kernel(params, r, quad)) + r);
    }
    const LineFit lf = least_squares(lx, ly);
    fit.exponent = -lf.slope;
    fit.constant = std::exp(lf.intercept);
    fit.residual = lf.rms;
    fit.residual_too_large = lf.rms > kFitResidualLimit;
    return fit;
}

}  // namespace logschro
