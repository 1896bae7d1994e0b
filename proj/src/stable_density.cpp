#include "logschro/stable_density.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace logschro {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFloor = 1e-300;

void check_time(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("density: time must be positive");
}

// Tail expansion of the radial stable density,
//   p(r,t) = sum_j (-1)^{j+1}/j! 2^{aj} pi^{-N/2-1} G((N+aj)/2) G(1+aj/2) sin(pi a j/2) t^j r^{-N-aj}
// with a = 2s. Convergent for a < 1, asymptotic for a > 1.
struct SeriesTable {
    int N = 0;
    double alpha = 0.0;
    static constexpr int kTerms = 150;
    double log_env[kTerms + 1];  // log of |coefficient| without the sine
    double signed_sin[kTerms + 1];
};

const SeriesTable& series_table(int N, double alpha) {
    // one entry per thread is enough: callers sweep r and t at fixed (N, s)
    thread_local SeriesTable table;
    if (table.N != N || table.alpha != alpha) {
        table.N = N;
        table.alpha = alpha;
        const double base = -(0.5 * N + 1.0) * std::log(kPi);
        for (int j = 1; j <= SeriesTable::kTerms; ++j) {
            const double aj = alpha * j;
            table.log_env[j] = base + aj * std::log(2.0) + log_gamma(0.5 * (N + aj)) + log_gamma(1.0 + 0.5 * aj) -
                               log_gamma(j + 1.0);
            table.signed_sin[j] = ((j % 2 == 1) ? 1.0 : -1.0) * std::sin(0.5 * kPi * aj);
        }
    }
    return table;
}

// Returns nothing when the truncated sum cannot be trusted to ~1e-13.
std::optional<double> tail_series(int N, double alpha, double r, double t) {
    const SeriesTable& tab = series_table(N, alpha);
    const double log_r = std::log(r);
    const double step = std::log(t) - alpha * log_r;
    const double lead = -N * log_r;
    if (tab.log_env[1] + lead + step < -700.0) return 0.0;  // far tail, below the flush level
    double sum = 0.0;
    double max_abs = 0.0;
    double prev_env = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= SeriesTable::kTerms; ++j) {
        const double env = std::exp(tab.log_env[j] + lead + j * step);
        const double term = env * tab.signed_sin[j];
        sum += term;
        max_abs = std::max(max_abs, std::fabs(term));
        if (j >= 2 && env < 1e-17 * std::fabs(sum)) {
            if (max_abs > 1e3 * std::fabs(sum)) return std::nullopt;  // cancellation ate the digits
            return sum;
        }
        if (j >= 2 && env > 1e8 * std::fabs(sum)) return std::nullopt;
        if (alpha > 1.0 && j >= 3 && env > prev_env) return std::nullopt;  // asymptotic series turned
        prev_env = env;
    }
    return std::nullopt;
}

double fourier_route(int N, double alpha, double r, double t, const QuadratureSpec& qs) {
    // truncation radius where k^{N+1} e^{-t k^alpha} is negligible
    double K = std::pow(45.0 / t, 1.0 / alpha);
    for (int i = 0; i < 6; ++i) K = std::pow((45.0 + (N + 1.0) / alpha * std::log1p(K)) / t, 1.0 / alpha);
    const double mass = std::exp(log_gamma(N / alpha)) / (alpha * std::pow(t, N / alpha));

    auto integrand = [&](double k) -> double {
        const double damp = std::exp(-t * std::pow(k, alpha));
        switch (N) {
            case 1: return std::cos(k * r) * damp;
            case 2: return k * std::cyl_bessel_j(0.0, k * r) * damp;
            default: return (r > 0.0 ? k * std::sin(k * r) / r : k * k) * damp;
        }
    };
    const double seg = (r > 0.0) ? std::min(K, 4.0 * kPi / r) : K;
    const double segments = std::ceil(K / seg);
    if (segments > 2e5)
        throw QuadratureError("density (Fourier inversion): oscillatory range too long for this order", 0.0,
                              std::numeric_limits<double>::infinity());
    const int nseg = static_cast<int>(segments);
    QuadratureSpec local = qs;
    local.abs_tol = std::max(qs.abs_tol, 1e-2 * qs.tol * mass / nseg);
    double total = 0.0;
    for (int i = 0; i < nseg; ++i) {
        const double a = i * seg;
        const double b = std::min(K, a + seg);
        total += require(quad(integrand, a, b, local), "density (Fourier inversion)");
    }
    switch (N) {
        case 1: return total / kPi;
        case 2: return total / (2.0 * kPi);
        default: return total / (2.0 * kPi * kPi);
    }
}

}  // namespace

double norm(const Point& x, int N) {
    double acc = 0.0;
    for (int i = 0; i < N; ++i) acc += x[i] * x[i];
    return std::sqrt(acc);
}

double density_at_origin(const OperatorParams& params) {
    params.validate();
    const double alpha = 2.0 * params.s;
    const int N = params.N;
    return constants(params).omega_Nm1 * std::exp(log_gamma(N / alpha)) / (alpha * std::pow(2.0 * kPi, N));
}

double density_fourier(const OperatorParams& params, double r, double t, const QuadratureSpec& quad) {
    params.validate();
    check_time(t);
    return fourier_route(params.N, 2.0 * params.s, std::fabs(r), t, quad);
}

namespace {

DensityValue radial_ex(const OperatorParams& params, double r, double t, const QuadratureSpec& quad) {
    params.validate();
    check_time(t);
    r = std::fabs(r);
    const int N = params.N;
    const double s = params.s;
    DensityValue out;
    if (std::isinf(r)) {
        out.floored = true;
        return out;
    }
    if (s == 1.0) {
        out.value = std::pow(4.0 * kPi * t, -0.5 * N) * std::exp(-r * r / (4.0 * t));
        out.route = DensityRoute::Gaussian;
    } else if (s == 0.5) {
        const double gN = gamma_fn(0.5 * (N + 1)) * std::pow(kPi, -0.5 * (N + 1));
        // hypot keeps t^2 + r^2 from underflowing when both are below 1e-154
        out.value = gN * t * std::pow(std::hypot(t, r), -(N + 1.0));
        out.route = DensityRoute::Cauchy;
    } else if (r == 0.0) {
        out.value = std::pow(t, -N / (2.0 * s)) * density_at_origin(params);
        out.route = DensityRoute::Origin;
    } else if (auto v = tail_series(N, 2.0 * s, r, t)) {
        out.value = *v;
        out.route = DensityRoute::Series;
    } else {
        out.value = fourier_route(N, 2.0 * s, r, t, quad);
        out.route = DensityRoute::Fourier;
    }
    if (out.value < kFloor) {
        out.value = 0.0;
        out.floored = true;
    }
    return out;
}

}  // namespace

DensityValue density_ex(const DensityQuery& q, const QuadratureSpec& quad) {
    return radial_ex(q.params, norm(q.x, q.params.N), q.t, quad);
}

double density(const DensityQuery& q, const QuadratureSpec& quad) { return density_ex(q, quad).value; }

double density_radial(const OperatorParams& params, double r, double t, const QuadratureSpec& quad) {
    return radial_ex(params, r, t, quad).value;
}

double density_scaled(const DensityQuery& q, const QuadratureSpec& quad) {
    q.params.validate();
    check_time(q.t);
    const double s = q.params.s;
    const double y = norm(q.x, q.params.N) * std::pow(q.t, -0.5 / s);
    return std::pow(q.t, -q.params.N / (2.0 * s)) * radial_ex(q.params, y, 1.0, quad).value;
}

double density_scaled(const DensityQuery& q) { return density_scaled(q, QuadratureSpec{}); }

double comparability_check(const OperatorParams& params, double t, double y) {
    params.validate();
    check_time(t);
    if (y == 0.0) throw std::invalid_argument("comparability_check: y must be nonzero");
    const auto c = constants(params);
    if (!c.C_Ns) throw DomainError("comparability_check: C_Ns is unavailable at s = 1");
    const double s = params.s;
    const int N = params.N;
    const double ay = std::fabs(y);
    const double bound = *c.C_Ns * std::min(t / std::pow(ay, N + 2.0 * s), std::pow(t, -N / (2.0 * s)));
    return density_radial(params, ay, t, QuadratureSpec{}) / bound;
}

}  // namespace logschro
