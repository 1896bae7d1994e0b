#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "logschro/inequalities.hpp"

using namespace logschro;
constexpr double kPi = std::numbers::pi;

namespace {

PiecewiseFunction smooth(std::function<double(double)> f, double R, double step = 0.05) {
    PiecewiseFunction u{std::move(f), {}};
    const int m = static_cast<int>(std::round(2 * R / step));
    for (int i = 0; i <= m; ++i) u.breaks.push_back(-R + i * step);
    return u;
}

std::vector<double> random_nodal(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    // a few smooth modes plus nodal noise, so sign changes are common
    const double a1 = nd(rng), a2 = nd(rng), a3 = nd(rng);
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * (i + 1) / (n + 1);
        v[i] = a1 * std::cos(0.5 * kPi * x) + a2 * std::sin(kPi * x) + a3 * std::cos(1.5 * kPi * x) + 0.2 * nd(rng);
    }
    return v;
}

}  // namespace

TEST(Inequalities, GaussianFormMatchesClosedIntegral) {
    // Fourier side of the Gaussian: 2 \int_0^inf log(1 + xi^{2s}) e^{-xi^2} dxi
    boost::math::quadrature::exp_sinh<double> es;
    QuadratureSpec q;
    for (double s : {0.25, 0.5, 0.8}) {
        const double ref = 2.0 * es.integrate([&](double x) { return std::log1p(std::pow(x, 2 * s)) * std::exp(-x * x); });
        const FormValue f = quadratic_form_direct(smooth([](double x) { return std::exp(-0.5 * x * x); }, 9.0), {1, s},
                                                  FormDomain::Whole, q);
        EXPECT_NEAR(f.b_s / ref, 1.0, 1e-6) << s;
        EXPECT_EQ(f.gagliardo, 2.0 * f.b_s);
    }
}

TEST(Inequalities, DirectAgreesWithSpectral) {
    QuadratureSpec q;
    const std::vector<std::function<double(double)>> fs{
        [](double x) { return std::exp(-0.5 * x * x); },
        [](double x) { return x * std::exp(-x * x); },
        [](double x) { return std::cos(2 * x) * std::exp(-0.5 * x * x); },
        [](double x) { return std::exp(-0.5 * (x - 1) * (x - 1)) - 0.5 * std::exp(-2 * (x + 1) * (x + 1)); },
        [](double x) { return std::fabs(x) < 1 ? std::exp(-1 / (1 - x * x)) : 0.0; },
    };
    // the grid sum has an O((pi/L)^2) error from the kink of |xi|^{2s} at 0, hence the wide box
    const GridSpec g{1, 128.0, 4096};
    for (double s : {0.5, 0.75})
        for (size_t i = 0; i < fs.size(); ++i) {
            const double d = quadratic_form_direct(smooth(fs[i], 10.0), {1, s}, FormDomain::Whole, q).b_s;
            const double sp = quadratic_form_spectral(sample(g, [&](const Point& x) { return fs[i](x[0]); }), {1, s});
            EXPECT_NEAR(d / sp, 1.0, 5e-3) << s << " " << i;
        }
}

TEST(Inequalities, NodalFormsMatchStiffness) {
    QuadratureSpec q;
    const Mesh1D m{-1, 1, 63};
    for (double s : {0.3, 0.5, 1.0}) {
        const FemSystem sys = assemble(m, {1, s}, q);
        const Eigen::MatrixXd B = form_matrix_direct(m, {1, s}, FormDomain::Whole, q);
        EXPECT_LT((B - sys.stiffness).cwiseAbs().maxCoeff(), 1e-8 * sys.stiffness(0, 0)) << s;
        std::vector<double> hat(63, 0.0);
        hat[31] = 1.0;
        EXPECT_NEAR(quadratic_form_direct(nodal_function(m, hat), {1, s}, FormDomain::Whole, q).b_s /
                        sys.stiffness(31, 31),
                    1.0, 5e-3);
    }
}

TEST(Inequalities, RegionalFormKillsConstants) {
    QuadratureSpec q;
    const Mesh1D m{-1, 1, 31};
    const FormValue f = quadratic_form_direct(nodal_function(m, std::vector<double>(33, 2.0)), {1, 0.5},
                                              FormDomain::Regional, q);
    EXPECT_NEAR(f.b_s, 0.0, 1e-14);
    const Eigen::MatrixXd B = form_matrix_direct(m, {1, 0.5}, FormDomain::Regional, q);
    EXPECT_LT((B * Eigen::VectorXd::Ones(33)).cwiseAbs().maxCoeff(), 1e-12 * B(5, 5));
    // the regional form drops the interaction with the exterior
    std::vector<double> v(31);
    for (int i = 0; i < 31; ++i) v[i] = std::cos(0.5 * kPi * m.node(i));
    const PiecewiseFunction u = nodal_function(m, v);
    EXPECT_LT(quadratic_form_direct(u, {1, 0.5}, FormDomain::Regional, q).b_s,
              quadratic_form_direct(u, {1, 0.5}, FormDomain::Whole, q).b_s);
}

TEST(Inequalities, PoincareConstant) {
    // scan of Xi(R) = 2 / (log(1+R) (1 - 2R/pi)) for (-1, 1), s = 1/2
    double best = 1e300, rbest = 0.0;
    for (int i = 1; i < 200000; ++i) {
        const double R = 0.5 * kPi * i / 200000.0;
        const double xi = 2.0 / (std::log1p(R) * (1.0 - 2.0 * R / kPi));
        if (xi < best) best = xi, rbest = R;
    }
    const PoincareConstant c = poincare_constant({1, 0.5}, 2.0);
    EXPECT_NEAR(c.R_max, 0.5 * kPi, 1e-14);
    EXPECT_NEAR(c.R_star, rbest, 1e-5);
    EXPECT_NEAR(c.C_statement, best, 1e-9);
    EXPECT_NEAR(c.C_statement, 6.8, 0.01);
    EXPECT_EQ(c.C, c.C_statement);
    EXPECT_NEAR(c.C_derived, 0.25 * best, 1e-9);
    EXPECT_GT(poincare_constant({1, 0.5}, 3.0).C, c.C);
    EXPECT_GT(poincare_constant({2, 0.5}, 1.0).R_star, 0.0);
    EXPECT_THROW(poincare_constant({1, 0.5}, 0.0), std::invalid_argument);
}

TEST(Inequalities, PoincareHoldsOnEigenfunctionsAndRandomFunctions) {
    QuadratureSpec q;
    const FemSystem sys = assemble({-1, 1, 127}, {1, 0.5}, q);
    const double C = poincare_constant({1, 0.5}, 2.0).C_derived;
    const Spectrum sp = solve_eigs(sys, 127);
    EXPECT_GE(sp.eigenvalues[0], 1.0 / (2.0 * C));
    for (int j = 0; j < 127; ++j) {
        const Eigen::VectorXd v = sp.eigenvectors.col(j);
        EXPECT_GE(verify_poincare(sys, {v.data(), v.data() + v.size()}, C), 0.0) << j;
    }
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) EXPECT_GE(verify_poincare(sys, random_nodal(rng, 127), C), 0.0);
    EXPECT_EQ(verify_poincare(sys, std::vector<double>(127, 0.0), C), 0.0);
}

TEST(Inequalities, StripWeight) {
    EXPECT_NEAR(strip_poincare_weight({1, 0.5}, 1.0, 0.0), 2.0, 1e-14);
    EXPECT_EQ(strip_poincare_weight({2, 0.3}, 1.5, 0.4), strip_poincare_weight({2, 0.3}, 1.5, -0.4));
    EXPECT_GT(strip_poincare_weight({1, 0.5}, 1.0, 1.0 - 1e-9), 1e8);
    EXPECT_THROW(strip_poincare_weight({1, 0.5}, 1.0, 1.0), std::domain_error);
    // N = 2: \int_{|y1| >= a} \int_R ((x1 - y1)^2 + t^2)^{-1-s} dt dy1
    boost::math::quadrature::exp_sinh<double> es;
    const double s = 0.4, a = 1.0, x1 = 0.3;
    auto side = [&](double d) {  // y1 at distance >= d from x1
        return es.integrate([&](double u) {
            const double dist = d + u;
            return 2.0 * es.integrate([&](double t) { return std::pow(dist * dist + t * t, -1.0 - s); });
        });
    };
    const double ref = side(a - x1) + side(a + x1);
    EXPECT_NEAR(strip_poincare_weight({2, s}, a, x1) / ref, 1.0, 1e-8);
}

TEST(Inequalities, LogSobolevDeficitIsNonnegative) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const GridSpec g{1, 64.0, 4096};
    for (int t = 0; t < 20; ++t) {
        const double sigma = 0.7 + 1.3 * unif(rng);
        double a[4], w[4], ph[4];
        for (int k = 0; k < 4; ++k) a[k] = 2 * unif(rng) - 1, w[k] = 3 * unif(rng), ph[k] = 2 * kPi * unif(rng);
        const GridFunction u = sample(g, [&](const Point& x) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += a[k] * std::cos(w[k] * x[0] + ph[k]);
            return acc * std::exp(-0.5 * x[0] * x[0] / (sigma * sigma));
        });
        for (double s : {0.25, 0.5, 1.0}) EXPECT_GE(log_sobolev_deficit(u, {1, s}), -1e-8) << t << " " << s;
        for (double c : {0.1, 10.0}) {
            GridFunction v = u;
            for (double& x : v.values) x *= c;
            EXPECT_GE(log_sobolev_deficit(v, {1, 0.5}), -1e-8);
        }
    }
}

TEST(Inequalities, BecknerExtremal) {
    QuadratureSpec q;
    // A_1 (1 + x^2)^{-1/2}, then any multiple: the sharp inequality is homogeneous
    const double A = constants({1, 0.5}).A_N;
    for (double c : {1.0, 1.0 / (A * std::sqrt(kPi))}) {
        const BecknerTerms t = beckner_deficit([&](double x) { return c * A / std::sqrt(1 + x * x); }, q);
        EXPECT_NEAR(t.deficit, 0.0, 1e-3 * std::fabs(t.lhs));
        EXPECT_NEAR(t.deficit, 0.0, 1e-3 * std::fabs(t.rhs));
    }
    // Fourier side of the normalized extremal: u^ = sqrt(2/pi^2) K_0(|xi|)
    boost::math::quadrature::exp_sinh<double> es;
    const double ref = 2.0 * es.integrate([](double x) {
        const double k = boost::math::cyl_bessel_k(0, x);
        return x > 700 ? 0.0 : std::log(x) * 2.0 / (kPi * kPi) * k * k;
    });
    EXPECT_NEAR(ref, -3 * std::log(2.0) - std::numbers::egamma, 1e-9);
    EXPECT_NEAR(log_energy([](double x) { return 1.0 / std::sqrt(kPi * (1 + x * x)); }, q), ref, 1e-7);
    // strict away from the extremal family
    EXPECT_GT(beckner_deficit([](double x) { return std::exp(-0.5 * x * x); }, q).deficit, 1e-2);
}

TEST(Inequalities, LatticeOfParts) {
    QuadratureSpec q;
    const Mesh1D m{-1, 1, 63};
    std::mt19937_64 rng(99);
    for (int t = 0; t < 50; ++t) {
        const LatticeReport r = lattice_check(m, random_nodal(rng, 63), {1, 0.5}, q);
        EXPECT_GE(r.abs_margin(), -1e-12 * r.g_u) << t;
        EXPECT_GE(r.parts_margin(), -1e-12 * r.g_u) << t;
    }
    // one sign: all three coincide
    std::vector<double> pos(63);
    for (int i = 0; i < 63; ++i) pos[i] = 1.0 - m.node(i) * m.node(i);
    const LatticeReport r = lattice_check(m, pos, {1, 0.5}, q);
    EXPECT_NEAR(r.g_abs, r.g_u, 1e-12 * r.g_u);
    EXPECT_EQ(r.g_minus, 0.0);
}

TEST(Inequalities, WirtingerGap) {
    QuadratureSpec q;
    const double g1 = wirtinger_gap({-1, 1, 63}, {1, 0.5}, q);
    const double g2 = wirtinger_gap({-2, 2, 127}, {1, 0.5}, q);
    EXPECT_GT(g1, 0.0);
    EXPECT_GT(g2, 0.0);
    EXPECT_LT(g2, g1);
    // stable under refinement
    EXPECT_NEAR(wirtinger_gap({-1, 1, 127}, {1, 0.5}, q) / g1, 1.0, 0.02);
}
