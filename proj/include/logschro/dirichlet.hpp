#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "logschro/kernel.hpp"

namespace logschro {

struct Mesh1D {
    double a = -1.0;
    double b = 1.0;
    int n = 64;  // interior nodes

    void validate() const;
    double h() const { return (b - a) / (n + 1); }
    double node(int i) const { return a + (i + 1) * h(); }
};

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Piecewise-linear hats, extended by zero outside (a, b).
struct FemSystem {
    Mesh1D mesh;
    OperatorParams params;
    Eigen::MatrixXd stiffness;  // b_s(phi_i, phi_j) with the 1/2 in front of the double integral
    Eigen::MatrixXd mass;
};

// b_s(phi_0, phi_m) for hats of width h: depends only on m, so the stiffness is Toeplitz.
double hat_form(const KernelTable& kernel, double h, int m);

FemSystem assemble(const Mesh1D& mesh, const OperatorParams& params, const QuadratureSpec& quad);

// Solves stiffness u = mass f.
std::vector<double> solve_poisson(const FemSystem& sys, const std::vector<double>& f);

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors;     // mass-orthonormal columns
    double max_residual = 0.0;        // max_k |K v - lambda M v|
};

Spectrum solve_eigs(const FemSystem& sys, int k);

struct MaximumPrincipleReport {
    int trials = 0;
    int failures = 0;
    double min_value = 0.0;       // over all trials and interior nodes
    double min_scaled_min = 0.0;  // min over trials of min(u)/max(u)
};

// Random f >= 0, not identically zero: half dense uniform, half sparse spikes.
MaximumPrincipleReport maximum_principle_suite(const FemSystem& sys, int trials, std::uint64_t seed);

struct DomainMonotonicity {
    double lambda_outer = 0.0;
    double lambda_inner = 0.0;
    double slack = 0.0;  // |lambda_1(n) - lambda_1(n/2)| on the inner domain, a discretization estimate
    bool holds = false;  // lambda_inner >= lambda_outer - slack
};

DomainMonotonicity domain_monotonicity_check(const OperatorParams& params, const Mesh1D& outer, const Mesh1D& inner,
                                             const QuadratureSpec& quad);

// max over the first k eigenfunctions of |phi|_inf / |phi|_L2
double eigenfunction_linf_ratio(const Spectrum& spectrum, const FemSystem& sys, int k);

// u^T stiffness u
double fem_energy(const FemSystem& sys, const std::vector<double>& u);
double fem_l2_norm(const FemSystem& sys, const std::vector<double>& u);

}  // namespace logschro
