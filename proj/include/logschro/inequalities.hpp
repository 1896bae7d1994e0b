#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "logschro/dirichlet.hpp"
#include "logschro/kernel.hpp"
#include "logschro/spectral.hpp"

namespace logschro {

struct FormValue {
    double b_s = 0.0;
    double gagliardo = 0.0;  // 2 b_s
};

// A 1D function that vanishes outside [breaks.front(), breaks.back()] and is smooth between
// consecutive breaks. Breaks also set the cell size of the quadrature, so smooth functions need
// them reasonably dense.
struct PiecewiseFunction {
    std::function<double(double)> f;
    std::vector<double> breaks;  // sorted, at least two
};

// Whole: (1/2) \int_R \int_R over the zero extension. Regional: (1/2) \int_Om \int_Om with
// Om = (breaks.front(), breaks.back()).
enum class FormDomain { Whole, Regional };

// Double-integral form by fixed composite Gauss rules in r = |x - y| and in x. N = 1.
FormValue quadratic_form_direct(const PiecewiseFunction& u, const OperatorParams& params, FormDomain domain,
                                const QuadratureSpec& quad);

// Hat interpolant of nodal values. values has mesh.n entries (zero at a and b) or mesh.n + 2 (a, interior, b).
PiecewiseFunction nodal_function(const Mesh1D& mesh, const std::vector<double>& values);

// Form matrix of the hat basis by the same rule as quadratic_form_direct. Whole: the n interior hats
// (reproduces the dirichlet stiffness). Regional: all n + 2 nodes of the closed interval.
Eigen::MatrixXd form_matrix_direct(const Mesh1D& mesh, const OperatorParams& params, FormDomain domain,
                                   const QuadratureSpec& quad);
// Mass matrix of all n + 2 hats restricted to the interval.
Eigen::MatrixXd regional_mass(const Mesh1D& mesh);

struct PoincareConstant {
    double C = 0.0;          // shipped: max(statement, derived)
    double R_star = 0.0;
    double R_max = 0.0;
    double C_statement = 0.0;  // Xi(R_star) as displayed
    double C_derived = 0.0;    // min over R of 1 / (2 log(1+R^{2s}) (1 - theta(R)))
};

// Xi(R) = 2 / (log(1+R^{2s}) (1 - (2pi)^{-N} R^N |Om| |B_1|))
double poincare_xi(const OperatorParams& params, double volume, double R);
PoincareConstant poincare_constant(const OperatorParams& params, double volume);

// C gagliardo(u) - |u|^2, the squared form of the inequality.
double verify_poincare(double gagliardo, double l2_squared, double C);
double verify_poincare(const FemSystem& sys, const std::vector<double>& u, double C);

// Weight from the strip (-a, a) x R^{N-1}: \int_{|y_1| >= a} |x - y|^{-N-2s} dy.
double strip_poincare_weight(const OperatorParams& params, double a, double x1);

// \int |u|^2 log |u|^2, with |u| < 1e-150 contributing 0
double entropy(const GridFunction& u);
double entropy(const std::function<double(double)>& u, const QuadratureSpec& quad);

// B_N |u|^2 + |u|^2 log |u|^2 + (N/2s) b_s(u,u) - \int |u|^2 log |u|^2, spectral form on the grid.
double log_sobolev_deficit(const GridFunction& u, const OperatorParams& params);

// \int log|xi| |u^(xi)|^2 dxi (unitary transform) in real space, through the logarithmic Laplacian:
// (1/2)\int_0^1 D(r)/r dr - \int_1^inf A(r)/r dr - gamma |u|^2, D the squared increment and A the autocorrelation.
double log_energy(const std::function<double(double)>& u, const QuadratureSpec& quad);

// Sharp variant: N \int log|xi| |u^|^2 + B_N |u|^2 + |u|^2 log |u|^2 - \int |u|^2 log |u|^2. N = 1.
struct BecknerTerms {
    double lhs = 0.0;  // entropy
    double rhs = 0.0;
    double deficit = 0.0;
};
BecknerTerms beckner_deficit(const std::function<double(double)>& u, const QuadratureSpec& quad);

struct LatticeReport {
    double g_u = 0.0, g_abs = 0.0, g_plus = 0.0, g_minus = 0.0;
    double abs_margin() const { return g_u - g_abs; }
    double parts_margin() const { return g_u - g_plus - g_minus; }
};

// Gagliardo forms of u, |u|, u+ and u- for a zero-boundary nodal function; sign changes become extra breaks.
LatticeReport lattice_check(const Mesh1D& mesh, const std::vector<double>& interior, const OperatorParams& params,
                            const QuadratureSpec& quad);

// Smallest nonzero eigenvalue of the regional form over the mass: its inverse is a Poincare-Wirtinger constant.
double wirtinger_gap(const Mesh1D& mesh, const OperatorParams& params, const QuadratureSpec& quad);

}  // namespace logschro
