#include "logschro/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace logschro {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

// FFTW planning is not thread safe; execution on fresh arrays is.
fftw_plan plan_for(int N, int n, int sign) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_tuple(N, n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    int dims[3] = {n, n, n};
    size_t total = 1;
    for (int i = 0; i < N; ++i) total *= static_cast<size_t>(n);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(N, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    cache.emplace(key, p);
    return p;
}

void transform(std::vector<cplx>& data, const GridSpec& g, int sign) {
    fftw_execute_dft(plan_for(g.N, g.n, sign), reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

// |xi| at every DFT index, same flat layout as the grid
std::vector<double> frequency_norms(const GridSpec& g) {
    std::vector<double> axis(g.n);
    for (int j = 0; j < g.n; ++j) {
        const int k = j < g.n / 2 ? j : j - g.n;
        axis[j] = kPi * k / g.L;
    }
    std::vector<double> out(g.size());
    for (size_t f = 0; f < out.size(); ++f) {
        size_t rest = f;
        double acc = 0.0;
        for (int d = 0; d < g.N; ++d) {
            const double k = axis[rest % g.n];
            rest /= g.n;
            acc += k * k;
        }
        out[f] = std::sqrt(acc);
    }
    return out;
}

void check_decay(const GridFunction& u) {
    const GridSpec& g = u.spec;
    double worst = 0.0;
    for (size_t f = 0; f < u.values.size(); ++f) {
        size_t rest = f;
        bool edge = false;
        for (int d = 0; d < g.N; ++d) {
            const size_t i = rest % g.n;
            rest /= g.n;
            if (i == 0 || i + 1 == static_cast<size_t>(g.n)) edge = true;
        }
        if (edge) worst = std::max(worst, std::fabs(u.values[f]));
    }
    if (worst > kBoundaryDecay)
        throw BoundaryDecayError("grid function does not decay at the box boundary (max " + std::to_string(worst) +
                                 "); enlarge L");
}

std::vector<cplx> forward(const GridFunction& u) {
    std::vector<cplx> data(u.values.begin(), u.values.end());
    transform(data, u.spec, FFTW_FORWARD);
    return data;
}

void check_params_grid(const GridFunction& u, const OperatorParams& params) {
    params.validate();
    u.validate();
    if (params.N != u.spec.N) throw std::invalid_argument("operator dimension does not match the grid");
}

}  // namespace

void GridSpec::validate() const {
    if (N < 1 || N > 3) throw std::invalid_argument("N must be 1, 2 or 3");
    if (!(L > 0.0)) throw std::invalid_argument("grid half-width L must be positive");
    if (n < 16 || (n & (n - 1)) != 0) throw std::invalid_argument("grid size n must be a power of two >= 16");
}

size_t GridSpec::size() const {
    size_t s = 1;
    for (int i = 0; i < N; ++i) s *= static_cast<size_t>(n);
    return s;
}

Point GridSpec::point(size_t flat) const {
    Point p{};
    for (int d = N - 1; d >= 0; --d) {
        p[d] = coord(static_cast<int>(flat % n));
        flat /= n;
    }
    return p;
}

double GridSpec::cell_volume() const { return std::pow(dx(), N); }

void GridFunction::validate() const {
    spec.validate();
    if (values.size() != spec.size()) throw std::invalid_argument("grid function has the wrong number of values");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("grid function has non-finite values");
}

GridFunction sample(const GridSpec& spec, const std::function<double(const Point&)>& f) {
    spec.validate();
    GridFunction u{spec, std::vector<double>(spec.size())};
    for (size_t i = 0; i < u.values.size(); ++i) u.values[i] = f(spec.point(i));
    return u;
}

double symbol_radial(double s, double k) { return std::log1p(std::pow(std::fabs(k), 2.0 * s)); }

double symbol(const OperatorParams& params, const Point& xi) {
    params.validate();
    return symbol_radial(params.s, norm(xi, params.N));
}

double frullani_integral(double lambda, const QuadratureSpec& quad) {
    if (!(lambda > 0.0)) throw std::invalid_argument("frullani: lambda must be positive");
    auto f = [&](double t) { return t == 0.0 ? lambda : -std::expm1(-t * lambda) * std::exp(-t) / t; };
    QuadratureSpec q = quad;
    q.abs_tol = std::max(q.abs_tol, 1e-13);
    // the integrand turns over near t = 1/lambda
    const double knee = std::min(1.0, 1.0 / lambda);
    return integrate(f, 0.0, knee, q, "frullani") + integrate(f, knee, 1.0, q, "frullani") +
           integrate_inf(f, 1.0, q, "frullani");
}

double frullani_check(double s, double xi, const QuadratureSpec& quad) {
    OperatorParams{1, s}.validate();
    return frullani_integral(std::pow(std::fabs(xi), 2.0 * s), quad);
}

GridFunction apply_multiplier(const GridFunction& u, const std::function<double(double)>& m, Boundary b) {
    u.validate();
    if (b == Boundary::Whole) check_decay(u);
    const GridSpec& g = u.spec;
    std::vector<cplx> data = forward(u);
    const std::vector<double> k = frequency_norms(g);
    for (size_t i = 0; i < data.size(); ++i) data[i] *= m(k[i]);
    transform(data, g, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(g.size());
    GridFunction out{g, std::vector<double>(g.size())};
    double peak = 0.0, residue = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        out.values[i] = data[i].real() * scale;
        peak = std::max(peak, std::fabs(out.values[i]));
        residue = std::max(residue, std::fabs(data[i].imag() * scale));
    }
    if (residue > kImaginaryResidue * std::max(1.0, peak))
        throw ImaginaryResidueError("multiplier output has imaginary part " + std::to_string(residue));
    return out;
}

GridFunction apply_operator(const GridFunction& u, const OperatorParams& params, Boundary b) {
    check_params_grid(u, params);
    const double s = params.s;
    return apply_multiplier(u, [s](double k) { return symbol_radial(s, k); }, b);
}

GridFunction resolvent_apply(const GridFunction& u, const OperatorParams& params, double lambda, Boundary b) {
    check_params_grid(u, params);
    if (!(lambda > 0.0)) throw std::invalid_argument("resolvent: lambda must be positive");
    const double s = params.s;
    return apply_multiplier(u, [s, lambda](double k) { return 1.0 / (lambda + std::pow(k, 2.0 * s)); }, b);
}

GridFunction semigroup_apply(const GridFunction& u, const OperatorParams& params, double t, Boundary b) {
    check_params_grid(u, params);
    if (!(t > 0.0 && t < 0.5 * params.N))
        throw std::invalid_argument("semigroup: t must lie in (0, N/2)");
    const double s = params.s;
    return apply_multiplier(u, [s, t](double k) { return std::pow(1.0 + std::pow(k, 2.0 * s), -t); }, b);
}

double quadratic_form_spectral(const GridFunction& u, const OperatorParams& params, Boundary b) {
    check_params_grid(u, params);
    if (b == Boundary::Whole) check_decay(u);
    const GridSpec& g = u.spec;
    const std::vector<cplx> data = forward(u);
    const std::vector<double> k = frequency_norms(g);
    double acc = 0.0;
    for (size_t i = 0; i < data.size(); ++i) acc += symbol_radial(params.s, k[i]) * std::norm(data[i]);
    return acc * g.cell_volume() / static_cast<double>(g.size());
}

ContinuityModulus s_continuity_modulus(const GridFunction& u, double s1, double s2, Boundary b) {
    const OperatorParams p1{u.spec.N, s1}, p2{u.spec.N, s2};
    p1.validate();
    p2.validate();
    ContinuityModulus out;
    out.modulus = max_abs_diff(apply_operator(u, p1, b), apply_operator(u, p2, b));
    // |d/ds log(1+k^{2s})| = 2|log k| k^{2s}/(1+k^{2s}), largest at the end of [s1, s2] where k^{2s} is
    const double lo = std::min(s1, s2), hi = std::max(s1, s2);
    const std::vector<cplx> data = forward(u);
    const std::vector<double> k = frequency_norms(u.spec);
    double acc = 0.0;
    for (size_t i = 0; i < data.size(); ++i) {
        if (k[i] == 0.0) continue;
        const double y = std::pow(k[i], 2.0 * (k[i] > 1.0 ? hi : lo));
        acc += 2.0 * std::fabs(std::log(k[i])) * y / (1.0 + y) * std::abs(data[i]);
    }
    out.lipschitz_bound = acc / static_cast<double>(u.spec.size());
    return out;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    if (a.values.size() != b.values.size()) throw std::invalid_argument("grid functions differ in size");
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::fabs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace logschro
