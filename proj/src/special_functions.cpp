#include "logschro/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace logschro {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos, g = 7, n = 9
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_series(double x) {  // for Gamma(x+1)
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (x + i);
    return a;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

QuadratureSpec tight_spec() {
    QuadratureSpec q;
    q.tol = 1e-13;
    q.max_subdiv = 2000;
    return q;
}

}  // namespace

void OperatorParams::validate() const {
    if (N < 1 || N > 3) throw std::invalid_argument("N must be 1, 2 or 3");
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0,1]");
}

double gamma_fn(double x) {
    if (std::isnan(x)) return x;
    if (is_nonpositive_integer(x))
        throw DomainError("gamma: pole at non-positive integer " + std::to_string(x));
    if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
    if (x > 171.7) return std::numeric_limits<double>::infinity();
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    // split the power so large arguments do not overflow before e^{-t} is applied
    const double half = std::pow(t, 0.5 * (z + 0.5));
    return std::sqrt(2.0 * kPi) * half * std::exp(-t) * half * lanczos_series(z);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (x < 0.5) return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_series(z));
}

double digamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double x2 = 1.0 / (x * x);
    // Bernoulli tail: -1/12, 1/120, -1/252, 1/240, -1/132, 691/32760, -1/12
    const double tail =
        x2 * (-1.0 / 12 +
              x2 * (1.0 / 120 +
                    x2 * (-1.0 / 252 + x2 * (1.0 / 240 + x2 * (-1.0 / 132 + x2 * (691.0 / 32760 - x2 / 12))))));
    return acc + std::log(x) - 0.5 / x + tail;
}

double upper_incomplete_gamma_integral(double a, double z, const QuadratureSpec& quad) {
    if (!(z > 0.0)) throw DomainError("upper_incomplete_gamma: z must be positive");
    // With t = w/z the integrand becomes e^{-w}(1+w/z)^{a-1}/z, which is O(1) near w ~ 1
    // regardless of how small z is.
    auto f = [&](double w) { return std::exp(-w + (a - 1.0) * std::log1p(w / z)); };
    const QuadResult r = quad_inf(f, 0.0, quad);
    const double v = require(r, "upper_incomplete_gamma");
    return std::exp(a * std::log(z) - z) * v / z;
}

double upper_incomplete_gamma(double a, double z) {
    if (!(z > 0.0)) throw DomainError("upper_incomplete_gamma: z must be positive");
    if (a <= 0.0) return upper_incomplete_gamma_integral(a, z, tight_spec());
    const double log_pref = a * std::log(z) - z;
    if (z < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < 1000; ++n) {
            term *= z / (a + n);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
        }
        const double lower = std::exp(log_pref) * sum;
        return gamma_fn(a) - lower;
    }
    // modified Lentz
    const double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(log_pref) * h;
}

double bessel_k(double nu, double r, bool* underflow) {
    if (!(nu > 0.0)) throw DomainError("bessel_k: order must be positive");
    if (!(r > 0.0)) throw DomainError("bessel_k: argument must be positive");
    if (underflow) *underflow = false;
    if (r > 700.0) {
        if (underflow) *underflow = true;
        return 0.0;
    }
    // t = w^2 / r in the Laplace form; the weight is then e^{-w^2} w^{2nu} (1 + w^2/(2r))^{nu-1/2}
    auto f = [&](double w) {
        if (w == 0.0) return 0.0;
        const double w2 = w * w;
        return 2.0 * std::exp(-w2 + 2.0 * nu * std::log(w) + (nu - 0.5) * std::log1p(w2 / (2.0 * r)));
    };
    const double integral = require(quad_inf(f, 0.0, tight_spec()), "bessel_k");
    return std::sqrt(kPi / 2.0) * std::exp(-r) / (gamma_fn(nu + 0.5) * std::sqrt(r)) * integral;
}

double bessel_k0(double r) {
    if (!(r > 0.0)) throw DomainError("bessel_k0: argument must be positive");
    if (r > 700.0) return 0.0;
    auto f = [&](double t) { return std::exp(-r * (std::cosh(t) - 1.0)); };
    return std::exp(-r) * require(quad_inf(f, 0.0, tight_spec()), "bessel_k0");
}

ConstantsTable constants(const OperatorParams& params) {
    params.validate();
    const int N = params.N;
    const double s = params.s;
    const double hN = 0.5 * N;
    ConstantsTable t;
    if (s < 1.0) {
        const double C = std::pow(kPi, -hN) * std::pow(2.0, 2.0 * s) * s * gamma_fn(hN + s) / gamma_fn(1.0 - s);
        t.C_Ns = C;
        // the ratio of two large gammas is taken in log form for small s
        const double ratio = std::exp(log_gamma((N + s) / (2.0 * s)) - log_gamma((N + 2.0 * s) / (2.0 * s)));
        t.kappa_Ns = C * (1.0 + std::sqrt(kPi) * ratio / 2.0);
    }
    t.gamma_N = gamma_fn(0.5 * (N + 1)) * std::pow(kPi, -0.5 * (N + 1));
    t.omega_Nm1 = 2.0 * std::pow(kPi, hN) / gamma_fn(hN);
    t.B_N = std::log(gamma_fn(N) / gamma_fn(hN)) - hN * (std::log(4.0 * kPi) + 2.0 * digamma_fn(hN));
    t.A_N = std::pow(2.0, N) * gamma_fn(0.5 * (N + 1)) / (std::sqrt(kPi) * gamma_fn(hN));
    return t;
}

double kernel_zero_limit(const OperatorParams& params) {
    params.validate();
    return 2.0 * params.s / constants(params).omega_Nm1;
}

}  // namespace logschro
