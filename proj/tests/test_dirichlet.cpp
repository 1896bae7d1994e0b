#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "logschro/dirichlet.hpp"

using namespace logschro;
constexpr double kPi = std::numbers::pi;

namespace {

// b(phi_0, phi_m) from the Fourier side: (1/pi) \int_0^inf log(1 + xi^{2s}) h^2 sinc^4(xi h/2) cos(m h xi) dxi,
// in u = xi h / 2
double hat_form_fourier(double s, double h, int m) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto f = [&](double u) {
        const double sc = u == 0.0 ? 1.0 : std::sin(u) / u;
        return std::log1p(std::pow(2.0 * u / h, 2.0 * s)) * sc * sc * sc * sc * std::cos(2.0 * m * u);
    };
    double acc = 0.0;
    // half-periods of cos(2 m u) and sin(u); the tail beyond is O(log U / U^3)
    const double step = kPi / (2.0 * std::max(1, m));
    for (double a = 0.0; a < 400.0; a += step) acc += GK::integrate(f, a, a + step, 8, 1e-13);
    return 2.0 * h / kPi * acc;
}

FemSystem system(double a, double b, int n, double s = 0.5) { return assemble({a, b, n}, {1, s}, QuadratureSpec{}); }

}  // namespace

TEST(Dirichlet, EntriesMatchFourierForm) {
    QuadratureSpec q;
    for (double s : {0.25, 0.5, 0.9}) {
        const auto table = shared_kernel_table({1, s}, q);
        for (double h : {2.0 / 64, 2.0 / 256})
            for (int m : {0, 1, 2, 5}) {
                const double ref = hat_form_fourier(s, h, m);
                EXPECT_NEAR(hat_form(*table, h, m), ref, 2e-3 * std::fabs(hat_form_fourier(s, h, 0)))
                    << s << " " << h << " " << m;
            }
    }
}

TEST(Dirichlet, MatrixStructure) {
    const FemSystem sys = system(-1, 1, 63);
    EXPECT_TRUE(sys.stiffness.isApprox(sys.stiffness.transpose(), 0.0));
    for (int i = 0; i < 63; ++i) {
        EXPECT_GT(sys.stiffness(i, i), 0.0);
        for (int j = i + 2; j < 63; ++j) EXPECT_LT(sys.stiffness(i, j), 0.0) << i << " " << j;
    }
    EXPECT_THROW(assemble({-1, 1, 63}, {2, 0.5}, QuadratureSpec{}), std::invalid_argument);
    EXPECT_THROW(assemble({1, -1, 63}, {1, 0.5}, QuadratureSpec{}), std::invalid_argument);
}

TEST(Dirichlet, PoissonBasics) {
    const FemSystem sys = system(-1, 1, 127);
    const auto zero = solve_poisson(sys, std::vector<double>(127, 0.0));
    for (double v : zero) EXPECT_EQ(v, 0.0);
    const auto u = solve_poisson(sys, std::vector<double>(127, 1.0));
    for (int i = 0; i < 127; ++i) {
        EXPECT_GT(u[i], 0.0);
        EXPECT_NEAR(u[i], u[126 - i], 1e-10 * u[63]);
    }
    // energy identity and the spectral bound |u| <= |f| / lambda_1
    const double lam1 = solve_eigs(sys, 1).eigenvalues[0];
    std::vector<double> f(127);
    for (int i = 0; i < 127; ++i) f[i] = std::sin(3.0 * sys.mesh.node(i)) + 0.3;
    const auto w = solve_poisson(sys, f);
    EXPECT_LE(fem_l2_norm(sys, w), fem_l2_norm(sys, f) / lam1 * (1 + 1e-12));
    EXPECT_THROW(solve_poisson(sys, std::vector<double>(5, 1.0)), std::invalid_argument);
}

TEST(Dirichlet, Spectrum) {
    const FemSystem sys = system(-1, 1, 255);
    const Spectrum sp = solve_eigs(sys, 6);
    EXPECT_GT(sp.eigenvalues[0], 0.0);
    for (int j = 1; j < 6; ++j) EXPECT_GT(sp.eigenvalues[j], sp.eigenvalues[j - 1]);
    EXPECT_LT(sp.max_residual, 1e-8);
    const Eigen::MatrixXd gram = sp.eigenvectors.transpose() * sys.mass * sp.eigenvectors;
    EXPECT_TRUE(gram.isApprox(Eigen::MatrixXd::Identity(6, 6), 1e-10));
    EXPECT_GT(sp.eigenvectors.col(0).minCoeff(), 0.0);  // ground state does not change sign
    // Rayleigh quotient of the ground state
    std::vector<double> v(sp.eigenvectors.col(0).data(), sp.eigenvectors.col(0).data() + 255);
    EXPECT_NEAR(fem_energy(sys, v), sp.eigenvalues[0], 1e-10);
}

TEST(Dirichlet, MaximumPrinciple) {
    for (double s : {0.25, 0.5, 1.0}) {
        const MaximumPrincipleReport rep = maximum_principle_suite(system(-1, 1, 127, s), 50, 12345);
        EXPECT_EQ(rep.trials, 50);
        EXPECT_EQ(rep.failures, 0) << s;
        EXPECT_GT(rep.min_value, 0.0) << s;
    }
}

TEST(Dirichlet, EigenvalueConvergesUnderRefinement) {
    const double l256 = solve_eigs(system(-1, 1, 256), 1).eigenvalues[0];
    const double l512 = solve_eigs(system(-1, 1, 512), 1).eigenvalues[0];
    EXPECT_LT(std::fabs(l256 - l512) / l512, 0.01);
    // conforming Galerkin: nested meshes give decreasing eigenvalues
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {31, 63, 127, 255, 511}) {
        const double l = solve_eigs(system(-1, 1, n), 1).eigenvalues[0];
        EXPECT_LT(l, prev) << n;
        prev = l;
    }
}

TEST(Dirichlet, DomainMonotonicity) {
    QuadratureSpec q;
    const DomainMonotonicity d = domain_monotonicity_check({1, 0.5}, {-1, 1, 255}, {-0.5, 0.5, 255}, q);
    EXPECT_TRUE(d.holds);
    EXPECT_GT(d.lambda_inner, d.lambda_outer);
    EXPECT_LT(d.slack, 1e-2 * d.lambda_inner);
    EXPECT_THROW(domain_monotonicity_check({1, 0.5}, {-0.5, 0.5, 63}, {-1, 1, 63}, q), std::invalid_argument);
}

TEST(Dirichlet, EigenfunctionsStayBounded) {
    const FemSystem a = system(-1, 1, 127), b = system(-1, 1, 255);
    const double ra = eigenfunction_linf_ratio(solve_eigs(a, 4), a, 4);
    const double rb = eigenfunction_linf_ratio(solve_eigs(b, 4), b, 4);
    EXPECT_GT(ra, 1.0 / std::sqrt(2.0));  // |phi|_inf >= |phi|_2 / sqrt(|Omega|)
    EXPECT_NEAR(ra / rb, 1.0, 0.02);
}
