#include <gtest/gtest.h>

#include <cmath>

#include "logschro/pointwise.hpp"
#include "logschro/spectral.hpp"

using namespace logschro;

namespace {

double r2(const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

CallableFunction gaussian() {
    CallableFunction u;
    u.f = [](const Point& x) { return std::exp(-0.5 * r2(x)); };
    return u;
}

// smooth bump exp(1 - 1/(1-|x-c|^2/R^2)) on B(c, R)
CallableFunction bump(Point c = {}, double R = 1.0) {
    CallableFunction u;
    u.f = [c, R](const Point& x) {
        const double q = r2({x[0] - c[0], x[1] - c[1], x[2] - c[2]}) / (R * R);
        return q < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    };
    u.support_radius = R;
    u.center = c;
    u.holder_exponent = 1.0;
    return u;
}

}  // namespace

TEST(Pointwise, ConstantsAreAnnihilated) {
    QuadratureSpec q;
    CallableFunction c;
    c.f = [](const Point&) { return 2.5; };
    for (int N = 1; N <= 3; ++N) EXPECT_EQ(apply_pointwise(c, {0.3, -0.2, 0.1}, {N, 0.5}, q), 0.0);
}

TEST(Pointwise, AgreesWithSpectralPath) {
    QuadratureSpec q;
    // dx = 1/32 puts the sample points on grid nodes
    const GridSpec g{1, 128.0, 8192};
    std::vector<CallableFunction> fs;
    fs.push_back(gaussian());
    CallableFunction a;
    a.f = [](const Point& x) { return std::exp(-0.5 * (x[0] - 0.7) * (x[0] - 0.7)); };
    fs.push_back(a);
    CallableFunction b;
    b.f = [](const Point& x) { return x[0] * std::exp(-x[0] * x[0]); };
    fs.push_back(b);
    CallableFunction c;
    c.f = [](const Point& x) { return std::exp(-0.5 * x[0] * x[0]) * std::cos(2 * x[0]); };
    fs.push_back(c);
    CallableFunction d;
    d.f = [](const Point& x) { return 1.0 / (std::cosh(x[0]) * std::cosh(x[0])); };
    fs.push_back(d);
    for (double s : {0.5, 0.75}) {
        const auto table = shared_kernel_table({1, s}, q);
        for (const auto& u : fs) {
            const GridFunction out = apply_operator(sample(g, u.f), {1, s});
            double scale = 0.0;
            for (double v : out.values) scale = std::max(scale, std::fabs(v));
            for (double x : {0.0, 0.5, 1.0, 2.0, 3.0}) {
                const double sp = out.values[static_cast<size_t>((x + g.L) / g.dx())];
                const double pw = apply_pointwise_ex(u, {x, 0, 0}, *table).value;
                // relative to the output scale: the odd and oscillating inputs cross zero
                EXPECT_LE(std::fabs(pw - sp), 1e-3 * std::max(std::fabs(sp), 0.1 * scale)) << s << " " << x;
            }
        }
    }
}

TEST(Pointwise, HigherDimensionsAgreeWithSpectral) {
    QuadratureSpec q;
    for (int N = 2; N <= 3; ++N) {
        const GridSpec g{N, N == 2 ? 48.0 : 24.0, N == 2 ? 1024 : 128};
        const GridFunction out = apply_operator(sample(g, gaussian().f), {N, 0.5});
        size_t idx = 0;
        for (int d = 0; d < N; ++d) idx = idx * g.n + g.n / 2;
        EXPECT_NEAR(apply_pointwise(gaussian(), {0, 0, 0}, {N, 0.5}, q) / out.values[idx], 1.0, 1e-3);
    }
}

TEST(Pointwise, FarBumpGivesNegativeValue) {
    QuadratureSpec q;
    for (int N = 1; N <= 3; ++N) {
        const double v = apply_pointwise(bump({3.0, 0, 0}), {0, 0, 0}, {N, 0.5}, q);
        EXPECT_LT(v, 0.0) << N;
    }
    // outside the support op(phi)(x) = -\int phi(y) K(x-y) dy; compare with a direct 1D integral
    const CallableFunction phi = bump({3.0, 0, 0});
    const double direct =
        -integrate([&](double y) { return phi({y, 0, 0}) * kernel({1, 0.5}, 6.0 - y, q); }, 2.0, 4.0, q);
    EXPECT_NEAR(apply_pointwise(phi, {6.0, 0, 0}, {1, 0.5}, q), direct, 1e-9 * std::fabs(direct));
}

TEST(Pointwise, LinearityAndTranslation) {
    QuadratureSpec q;
    const OperatorParams p{2, 0.75};
    const auto table = shared_kernel_table(p, q);
    const CallableFunction u = gaussian();
    const CallableFunction v = bump({0.5, 0.2, 0}, 1.5);
    CallableFunction w;
    w.f = [&](const Point& x) { return 2.0 * u(x) - 3.0 * v(x); };
    const Point x{0.3, -0.4, 0};
    const double lhs = apply_pointwise_ex(w, x, *table).value;
    const double rhs = 2.0 * apply_pointwise_ex(u, x, *table).value - 3.0 * apply_pointwise_ex(v, x, *table).value;
    EXPECT_NEAR(lhs, rhs, 1e-7 * std::fabs(rhs));
    CallableFunction sh;
    sh.f = [&](const Point& y) { return u({y[0] - 1.2, y[1] + 0.4, 0}); };
    EXPECT_NEAR(apply_pointwise_ex(sh, {x[0] + 1.2, x[1] - 0.4, 0}, *table).value,
                apply_pointwise_ex(u, x, *table).value, 1e-8);
}

TEST(Pointwise, NonnegativeAtGlobalMaximum) {
    QuadratureSpec q;
    for (int N = 1; N <= 3; ++N)
        for (double s : {0.5, 1.0}) {
            EXPECT_GE(apply_pointwise(gaussian(), {0, 0, 0}, {N, s}, q), 0.0);
            EXPECT_GE(apply_pointwise(bump({0.2, 0, 0}), {0.2, 0, 0}, {N, s}, q), 0.0);
        }
}

TEST(Pointwise, SingularityIsFlagged) {
    QuadratureSpec q;
    CallableFunction step;
    step.f = [](const Point& x) { return x[0] >= 0 ? std::exp(-x[0] * x[0]) : 0.0; };
    EXPECT_THROW(apply_pointwise(step, {0, 0, 0}, {1, 0.5}, q), SingularityError);
    // Hoelder-1/2 cusp: integrable, value stays finite and positive at the peak
    CallableFunction cusp;
    cusp.f = [](const Point& x) { return (1.0 - std::sqrt(std::fabs(x[0]))) * std::exp(-x[0] * x[0]); };
    cusp.holder_exponent = 0.5;
    const auto v = apply_pointwise_ex(cusp, {0, 0, 0}, *shared_kernel_table({1, 0.5}, q));
    EXPECT_TRUE(std::isfinite(v.value));
    EXPECT_GT(v.value, 0.0);
    EXPECT_NEAR(v.probe_exponent, 0.5, 0.05);
}

TEST(Pointwise, WeightedNorm) {
    QuadratureSpec q;
    CallableFunction zero;
    zero.f = [](const Point&) { return 0.0; };
    EXPECT_EQ(weighted_norm(zero, {1, 0.5}, q).value, 0.0);
    const CallableFunction b = bump();
    const double w = weighted_norm(b, {1, 0.5}, q).value;
    EXPECT_GT(w, 0.0);
    EXPECT_LE(w, 1.0);
    CallableFunction b2 = b;
    b2.f = [&](const Point& x) { return 2.0 * b(x); };
    EXPECT_NEAR(weighted_norm(b2, {1, 0.5}, q).value, 2.0 * w, 1e-12);
    // closed form: \int (1+|y|)^{-N-2s} over R^1 with s = 1/2 is 2
    CallableFunction one;
    one.f = [](const Point&) { return 1.0; };
    EXPECT_NEAR(weighted_norm(one, {1, 0.5}, q).value, 2.0, 1e-9);
    EXPECT_GT(weighted_norm(bump({0, 0, 0}, 1.0), {3, 0.25}, q).value, 0.0);
    CallableFunction grow;
    grow.f = [](const Point& x) { return r2(x); };
    EXPECT_TRUE(weighted_norm(grow, {1, 0.5}, q).diverged);
}

TEST(Pointwise, DecayBound) {
    QuadratureSpec q;
    const OperatorParams p{1, 0.5};
    const auto d = decay_bound_check(bump(), p, {10.0, 20.0, 40.0, 80.0}, q);
    for (size_t i = 0; i + 1 < d.ratios.size(); ++i) {
        EXPECT_LT(d.ratios[i + 1] / d.ratios[i], 2.0);
        EXPECT_GT(d.ratios[i + 1] / d.ratios[i], 0.5);
    }
    // doubling the support radius doubles the mass, and with it the far-field constant
    const auto d2 = decay_bound_check(bump({}, 2.0), p, {80.0}, q);
    EXPECT_NEAR(d2.max_ratio / d.ratios.back(), 2.0, 0.2);
    EXPECT_THROW(decay_bound_check(bump(), p, {2.0}, q), std::invalid_argument);
}

TEST(Pointwise, ProductRule) {
    QuadratureSpec q;
    const OperatorParams p{1, 0.5};
    const CallableFunction g = bump({}, 1.5);
    EXPECT_LE(product_rule_residual(g, g, {0, 0, 0}, p, q), 5e-3);
    EXPECT_LE(product_rule_residual(g, g, {0.4, 0, 0}, p, q), 1e-8);
    CallableFunction one;
    one.f = [](const Point&) { return 1.0; };
    EXPECT_LE(product_rule_residual(g, one, {0.3, 0, 0}, p, q), 1e-9);
    const CallableFunction far = bump({4.0, 0, 0});
    EXPECT_LE(product_rule_residual(g, far, {0.2, 0, 0}, p, q), 1e-9);
    EXPECT_LE(product_rule_residual(bump({0, 0, 0}, 1.0), bump({0.5, 0.3, 0}, 1.0), {0.1, 0.1, 0}, {2, 0.75}, q), 1e-6);
}
