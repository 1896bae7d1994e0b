#include "logschro/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace logschro {

namespace {

constexpr double kPi = std::numbers::pi;

struct Feature {
    Point c;
    double R;
};

Point add(const Point& a, const Point& b, double t) { return {a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]}; }

double dist(const Point& a, const Point& b, int N) {
    double acc = 0.0;
    for (int i = 0; i < N; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

// orthonormal frame with e[0] along the first compact feature (or the x axis)
struct Frame {
    Point e[3];
};

Frame make_frame(const Point& x, const std::vector<Feature>& feats, int N) {
    Frame fr;
    fr.e[0] = {1, 0, 0};
    fr.e[1] = {0, 1, 0};
    fr.e[2] = {0, 0, 1};
    if (feats.empty()) return fr;
    Point d = add(feats[0].c, x, -1.0);
    const double len = norm(d, N);
    if (len == 0.0) return fr;
    for (int i = 0; i < 3; ++i) d[i] = i < N ? d[i] / len : 0.0;
    fr.e[0] = d;
    if (N == 2) {
        fr.e[1] = {-d[1], d[0], 0};
    } else if (N == 3) {
        Point a = std::fabs(d[0]) < 0.9 ? Point{1, 0, 0} : Point{0, 1, 0};
        // Gram-Schmidt
        const double p = a[0] * d[0] + a[1] * d[1] + a[2] * d[2];
        a = add(a, d, -p);
        const double an = norm(a, 3);
        for (double& v : a) v /= an;
        fr.e[1] = a;
        fr.e[2] = {d[1] * a[2] - d[2] * a[1], d[2] * a[0] - d[0] * a[2], d[0] * a[1] - d[1] * a[0]};
    }
    return fr;
}

// Half-angle of the cone (seen from x) in which the sphere of radius rho meets B(c, R);
// returns pi when the whole sphere is inside, a negative value when they miss.
double window(const Point& x, const Feature& f, double rho, int N) {
    const double d = dist(x, f.c, N);
    if (d + rho <= f.R) return kPi;
    if (rho < d - f.R || rho > d + f.R) return -1.0;
    if (d == 0.0) return kPi;
    const double c = (rho * rho + d * d - f.R * f.R) / (2 * rho * d);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double angle_to(const Point& x, const Feature& f, const Frame& fr, int N, double* azimuth) {
    Point d = add(f.c, x, -1.0);
    const double len = norm(d, N);
    if (len == 0.0) {
        *azimuth = 0.0;
        return 0.0;
    }
    double c[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < N; ++i) c[k] += d[i] * fr.e[k][i];
    // matches the parametrizations in Sphere::average
    *azimuth = N == 2 ? std::atan2(c[1], c[0]) : std::atan2(c[2], c[1]);
    return std::acos(std::clamp(c[0] / len, -1.0, 1.0));
}

void push_break(std::vector<double>& b, double v, double lo, double hi) {
    if (v > lo && v < hi) b.push_back(v);
}

// \int_{S^{N-1}} g(x, x + rho*theta) dtheta, with g symmetrized under theta -> -theta
struct Sphere {
    int N;
    Point x;
    std::vector<Feature> feats;
    Frame fr;
    QuadratureSpec quad;
    double noise = 0.0;  // rounding level of g itself; the angular tolerance never goes below it

    template <class G>
    double average(const G& g, double rho) const {
        auto gs = [&](const Point& dir) { return 0.5 * (g(add(x, dir, rho)) + g(add(x, dir, -rho))); };
        if (N == 1) return 2.0 * gs({1, 0, 0});
        if (N == 2) {
            auto f = [&](double phi) {
                return gs(add(add(Point{0, 0, 0}, fr.e[0], std::cos(phi)), fr.e[1], std::sin(phi)));
            };
            std::vector<double> b{0.0, kPi};
            for (const auto& ft : feats) {
                const double w = window(x, ft, rho, N);
                if (w <= 0.0 || w >= kPi) continue;
                double az;
                angle_to(x, ft, fr, N, &az);
                // the feature shows up at az and, through the symmetrization, at az + pi
                for (double a : {az, az + kPi, az - kPi})
                    for (double e : {a - w, a + w}) push_break(b, e, 0.0, kPi);
            }
            return 2.0 * piecewise(f, b);
        }
        auto inner = [&](double th) {
            const double st = std::sin(th), ct = std::cos(th);
            auto f = [&](double phi) {
                Point dir = add(Point{0, 0, 0}, fr.e[0], ct);
                dir = add(dir, fr.e[1], st * std::cos(phi));
                dir = add(dir, fr.e[2], st * std::sin(phi));
                return gs(dir);
            };
            std::vector<double> b{0.0, 2 * kPi};
            for (size_t i = 1; i < feats.size(); ++i) {
                const double w = window(x, feats[i], rho, N);
                if (w <= 0.0 || w >= kPi) continue;
                double az;
                angle_to(x, feats[i], fr, N, &az);
                if (az < 0) az += 2 * kPi;
                // a cone of half-angle w spans about w / sin(theta) in azimuth
                const double wa = std::min(kPi, w / std::max(st, 1e-3));
                for (double a : {az, az + kPi, az - kPi, az + 2 * kPi})
                    for (double e : {a - wa, a + wa}) push_break(b, e, 0.0, 2 * kPi);
            }
            return st * piecewise(f, b);
        };
        std::vector<double> b{0.0, 0.5 * kPi};
        for (const auto& ft : feats) {
            const double w = window(x, ft, rho, N);
            if (w <= 0.0 || w >= kPi) continue;
            double az;
            const double pol = angle_to(x, ft, fr, N, &az);
            for (double a : {pol, kPi - pol})
                for (double e : {a - w, a + w}) push_break(b, e, 0.0, 0.5 * kPi);
        }
        return 2.0 * piecewise(inner, b);
    }

    template <class F>
    double piecewise(const F& f, std::vector<double> b) const {
        std::sort(b.begin(), b.end());
        QuadratureSpec q = quad;
        q.abs_tol = std::max(q.abs_tol, noise * (b.back() - b.front()));
        double acc = 0.0;
        for (size_t i = 0; i + 1 < b.size(); ++i) {
            if (b[i + 1] - b[i] < 1e-15) continue;
            acc += integrate(f, b[i], b[i + 1], q, "spherical average");
        }
        return acc;
    }
};

// \int_0^inf K(rho) rho^{N-1} S(rho) d rho with S the spherical average of g.
// tail_value: the value g takes once rho is past every compact support.
template <class G>
PointwiseValue radial_integral(const G& g, const Point& x, std::vector<Feature> feats, bool all_compact,
                               double tail_value, double noise, const KernelTable& K, std::optional<double> holder) {
    const OperatorParams& params = K.params();
    const int N = params.N;
    Sphere sph{N, x, feats, make_frame(x, feats, N), K.quad(), noise};
    auto S = [&](double rho) { return sph.average(g, rho); };
    auto integrand = [&](double w) {
        const double rho = std::exp(w);
        if (rho > 1e90) return 0.0;  // K rho^N ~ rho^{-2s}; rho^N itself overflows for N = 3 past 1e102
        return K(rho) * std::pow(rho, N) * S(rho);
    };

    PointwiseValue out;
    const double rs = kKernelSurrogateRadius;
    // probe the second difference near the origin
    const double s5 = S(10 * rs), s6 = S(rs);
    double beta = 2.0;
    const double scale = std::fabs(S(1e-2)) + std::fabs(g(x)) * 1e-6 + 1e-300;
    if (std::fabs(s6) > 1e-13 * scale && std::fabs(s5) > 0.0) {
        beta = std::log10(std::fabs(s5) / std::fabs(s6));
        if (!(beta > 0.02) && std::fabs(s6) > 1e-8 * scale)
            throw SingularityError("apply_pointwise: second difference does not vanish at the origin (not Dini)");
        if (holder && std::fabs(s6) <= 1e-8 * scale) beta = *holder;
        beta = std::clamp(beta, 0.02, 2.5);
    }
    out.probe_exponent = beta;
    out.inner_remainder = kernel_zero_limit(params) * s6 / beta;

    std::vector<double> b{rs, 1.0};
    double far = 1.0;
    for (const auto& f : feats) {
        const double d = dist(x, f.c, N);
        push_break(b, std::fabs(d - f.R), rs, 1e300);
        push_break(b, d + f.R, rs, 1e300);
        far = std::max(far, d + f.R);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    const QuadratureSpec& q = K.quad();
    double acc = out.inner_remainder;
    for (size_t i = 0; i + 1 < b.size(); ++i)
        acc += integrate(integrand, std::log(b[i]), std::log(b[i + 1]), q, "apply_pointwise shell");
    if (all_compact) {
        if (tail_value != 0.0) acc += tail_value * K.mass_beyond(far);
    } else {
        acc += integrate_inf(integrand, std::log(b.back()), q, "apply_pointwise far field");
    }
    out.value = acc;
    return out;
}

std::vector<Feature> features_of(std::initializer_list<const CallableFunction*> fs) {
    std::vector<Feature> out;
    for (const auto* f : fs)
        if (f->compact()) out.push_back({f->center, f->support_radius});
    return out;
}

}  // namespace

PointwiseValue apply_pointwise_ex(const CallableFunction& u, const Point& x, const KernelTable& kernel) {
    const double ux = u(x);
    auto g = [&](const Point& y) { return ux - u(y); };
    // u(x) - u(y) cannot resolve anything below a few ulps of u(x)
    const double noise = 64 * std::numeric_limits<double>::epsilon() * std::fabs(ux);
    return radial_integral(g, x, features_of({&u}), u.compact(), ux, noise, kernel, u.holder_exponent);
}

double apply_pointwise(const CallableFunction& u, const Point& x, const OperatorParams& params,
                       const QuadratureSpec& quad) {
    return apply_pointwise_ex(u, x, *shared_kernel_table(params, quad)).value;
}

double carre_du_champ(const CallableFunction& phi, const CallableFunction& psi, const Point& x,
                      const KernelTable& kernel) {
    const double px = phi(x), qx = psi(x);
    auto g = [&](const Point& y) { return (px - phi(y)) * (qx - psi(y)); };
    const bool compact = phi.compact() && psi.compact();
    std::optional<double> h;
    if (phi.holder_exponent && psi.holder_exponent) h = *phi.holder_exponent + *psi.holder_exponent;
    const double noise = 64 * std::numeric_limits<double>::epsilon() * (std::fabs(px) + std::fabs(qx)) *
                         (std::fabs(px) + std::fabs(qx));
    return radial_integral(g, x, features_of({&phi, &psi}), compact, px * qx, noise, kernel, h).value;
}

WeightedL1Norm weighted_norm(const CallableFunction& u, const OperatorParams& params, const QuadratureSpec& quad) {
    params.validate();
    const int N = params.N;
    const double s = params.s;
    const Point origin{};
    std::vector<Feature> feats = features_of({&u});
    Sphere sph{N, origin, feats, make_frame(origin, feats, N), quad};
    auto absu = [&](const Point& y) { return std::fabs(u(y)); };
    auto f = [&](double rho) {
        if (rho == 0.0) return 0.0;
        // the symmetrized average of |u(rho theta)| and |u(-rho theta)| is the plain sphere average
        return std::pow(rho, N - 1) * std::pow(1.0 + rho, -N - 2.0 * s) * sph.average(absu, rho);
    };
    WeightedL1Norm out;
    std::vector<double> b{0.0, 1.0};
    for (const auto& ft : feats) {
        const double d = norm(ft.c, N);
        push_break(b, std::fabs(d - ft.R), 0.0, 1e300);
        push_break(b, d + ft.R, 0.0, 1e300);
    }
    std::sort(b.begin(), b.end());
    try {
        double acc = 0.0;
        for (size_t i = 0; i + 1 < b.size(); ++i) acc += integrate(f, b[i], b[i + 1], quad, "weighted_norm");
        if (!u.compact()) acc += integrate_inf(f, b.back(), quad, "weighted_norm");
        out.value = acc;
        out.diverged = !std::isfinite(acc);
    } catch (const QuadratureError&) {
        out.value = std::numeric_limits<double>::infinity();
        out.diverged = true;
    }
    return out;
}

DecayBound decay_bound_check(const CallableFunction& phi, const OperatorParams& params,
                             const std::vector<double>& sample_radii, const QuadratureSpec& quad) {
    params.validate();
    if (!phi.compact()) throw std::invalid_argument("decay_bound_check: phi must have compact support");
    const auto table = shared_kernel_table(params, quad);
    DecayBound out;
    for (double r : sample_radii) {
        if (r < 4.0 * phi.support_radius)
            throw std::invalid_argument("decay_bound_check: sample radius must be at least 4 support radii");
        Point x = phi.center;
        x[0] += r;
        const double v = apply_pointwise_ex(phi, x, *table).value;
        const double ratio = std::fabs(v) * std::pow(1.0 + r, params.N + 2.0 * params.s);
        out.ratios.push_back(ratio);
        out.max_ratio = std::max(out.max_ratio, ratio);
    }
    return out;
}

double product_rule_residual(const CallableFunction& phi, const CallableFunction& psi, const Point& x,
                             const OperatorParams& params, const QuadratureSpec& quad) {
    const auto table = shared_kernel_table(params, quad);
    CallableFunction prod;
    prod.f = [&](const Point& y) { return phi(y) * psi(y); };
    if (phi.compact() && psi.compact()) {
        // the product lives in the smaller ball, a valid (if loose) support
        const CallableFunction& small = phi.support_radius <= psi.support_radius ? phi : psi;
        prod.support_radius = small.support_radius;
        prod.center = small.center;
    } else if (phi.compact() || psi.compact()) {
        const CallableFunction& c = phi.compact() ? phi : psi;
        prod.support_radius = c.support_radius;
        prod.center = c.center;
    }
    const double a = apply_pointwise_ex(prod, x, *table).value;
    const double b = phi(x) * apply_pointwise_ex(psi, x, *table).value;
    const double c = psi(x) * apply_pointwise_ex(phi, x, *table).value;
    const double d = carre_du_champ(phi, psi, x, *table);
    return std::fabs(a - b - c + d);
}

}  // namespace logschro
