#pragma once

#include <memory>
#include <string>
#include <vector>

#include "logschro/quadrature.hpp"
#include "logschro/special_functions.hpp"

namespace logschro {

// Below this radius the kernel is replaced by its r^{-N} asymptote.
inline constexpr double kKernelSurrogateRadius = 1e-6;

struct KernelValue {
    double value = 0.0;
    bool surrogate = false;  // small-r asymptote used instead of quadrature
    bool underflow = false;  // s = 1 branch past r = 700
};

// K_s(r) = \int_0^inf p_s(r,t) e^{-t}/t dt. s = 1 and s = 1/2 go to their closed forms.
KernelValue kernel_ex(const OperatorParams& params, double r, const QuadratureSpec& quad);
double kernel(const OperatorParams& params, double r, const QuadratureSpec& quad);

// The subordination integral itself, for every s in (0,1] including s = 1.
double kernel_subordination(const OperatorParams& params, double r, const QuadratureSpec& quad);

// Closed form for s = 1/2.
double kernel_half(int N, double r, const QuadratureSpec& quad);

// s = 1: c_N r^{-N/2} K_{N/2}(r) with c_N from kernel_one_prefactor.
double kernel_one(int N, double r, bool* underflow = nullptr);
double kernel_one_prefactor(int N);
// Refits c_N against kernel_subordination at s = 1 on r in [1, 10].
double calibrate_kernel_one_prefactor(int N, const QuadratureSpec& quad);

// \int_{|z| >= delta} K_s(z) dz
double tail_mass(const OperatorParams& params, double delta, const QuadratureSpec& quad);
// same integral for any r0 > 0
double kernel_mass_beyond(const OperatorParams& params, double r0, const QuadratureSpec& quad);

// K_s tabulated as log(r^N K_s(r)) on a uniform grid in log r and read back by 6-point
// Lagrange interpolation. Outside [kKernelSurrogateRadius, r_max] the small-r limit and the
// r^{-N-2s} law take over. s = 1/2 and s = 1 skip the table (closed forms are cheap).
class KernelTable {
public:
    KernelTable(const OperatorParams& params, const QuadratureSpec& quad, double step = 0.05, double r_max = 1e10);
    double operator()(double r) const;
    const OperatorParams& params() const { return params_; }
    const QuadratureSpec& quad() const { return quad_; }
    // \int_{|z| >= r0} K_s(z) dz from the table
    double mass_beyond(double r0) const;

private:
    OperatorParams params_;
    QuadratureSpec quad_;
    bool direct_ = false;
    double w0_ = 0.0, step_ = 0.0, r_max_ = 0.0, tail_exp_ = 0.0;
    std::vector<double> g_;
};

// One table per (N, s, tol, split rule), built on first use; safe to call concurrently.
std::shared_ptr<const KernelTable> shared_kernel_table(const OperatorParams& params, const QuadratureSpec& quad);

struct IntegrabilityResult {
    double value = 0.0;
    bool diverged = false;
};

// \int min(1, |z|^eps) K_s(z) dz; weighted = false drops the weight near the origin.
IntegrabilityResult levy_integrability(const OperatorParams& params, double eps, const QuadratureSpec& quad,
                                       bool weighted = true);

enum class Regime { Zero, Infinity };

struct AsymptoticFit {
    double constant = 0.0;
    double exponent = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double residual = 0.0;  // rms of log deviations from the fitted law
    double correction = 0.0;  // c1 of a c + c1/log(1/r) fit, zero for power laws
    bool residual_too_large = false;
};

inline constexpr double kFitResidualLimit = 0.02;

// K_s(r) ~ c r^{-p} over a log-spaced window near 0 or infinity.
AsymptoticFit fit_asymptote(const OperatorParams& params, Regime regime, const QuadratureSpec& quad);
// K_s(r) ~ c r^{-p} e^{-r}, the s = 1 tail.
AsymptoticFit fit_exponential_tail(const OperatorParams& params, const QuadratureSpec& quad);

}  // namespace logschro
