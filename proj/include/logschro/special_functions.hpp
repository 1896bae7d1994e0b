#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "logschro/quadrature.hpp"

namespace logschro {

struct OperatorParams {
    int N = 1;
    double s = 0.5;

    // Throws std::invalid_argument on N outside {1,2,3} or s outside (0,1].
    void validate() const;
    bool is_one() const { return s == 1.0; }
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

double gamma_fn(double x);
double log_gamma(double x);  // x > 0
double digamma_fn(double x);

// Gamma(a, z) for real a and z > 0. Negative (and zero) a goes through
//   z^a e^{-z} \int_0^inf e^{-tz} (1+t)^{a-1} dt,
// positive a through the series / Lentz continued fraction pair.
double upper_incomplete_gamma(double a, double z);
double upper_incomplete_gamma_integral(double a, double z, const QuadratureSpec& quad);

// Modified Bessel function of the second kind via its Laplace-type integral.
// r > 700 underflows to 0 and raises *underflow if provided.
double bessel_k(double nu, double r, bool* underflow = nullptr);
// nu = 0 is outside bessel_k's integral representation; cosh form instead.
double bessel_k0(double r);

struct ConstantsTable {
    std::optional<double> C_Ns;      // tail constant, unavailable at s = 1
    std::optional<double> kappa_Ns;  // zero constant from the comparability proof, unavailable at s = 1
    double gamma_N = 0.0;
    double omega_Nm1 = 0.0;
    double B_N = 0.0;
    double A_N = 0.0;
};

ConstantsTable constants(const OperatorParams& params);

// Exact small-r limit of r^N K_s(r): 2s / omega_{N-1}.
double kernel_zero_limit(const OperatorParams& params);

}  // namespace logschro
