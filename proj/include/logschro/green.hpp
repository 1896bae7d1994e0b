#pragma once

#include <vector>

#include "logschro/kernel.hpp"
#include "logschro/spectral.hpp"
#include "logschro/stable_density.hpp"

namespace logschro {

// e^{-tau} \int_0^inf tau^{t-1}/Gamma(t) dt, the potential density of the Gamma subordinator.
double renewal_density(double tau, const QuadratureSpec& quad);

// (1/Gamma(t)) \int_0^inf p_s(r, tau) tau^{t-1} e^{-tau} dtau for 0 < t < N/2.
// +inf at r = 0: the singularity there is r^{2st-N}.
double q_density(const OperatorParams& params, double t, double r, const QuadratureSpec& quad);

// \int_0^inf q_t dt is infinite when N <= 2s (N = 1 with s >= 1/2, N = 2 with s = 1).
bool green_recurrent(const OperatorParams& params);

inline constexpr double kGreenReferenceRadius = 1e6;

struct GreenValue {
    double value = 0.0;
    bool renormalized = false;  // recurrent case: G(r) - G(reference_radius)
};

GreenValue green_ex(const OperatorParams& params, double r, const QuadratureSpec& quad,
                    double reference_radius = kGreenReferenceRadius);
double green(const OperatorParams& params, double r, const QuadratureSpec& quad);

struct GreenSample {
    double r = 0.0;
    double value = 0.0;
    double weighted_zero = 0.0;  // r^N log(1/r)^2 G
    double weighted_inf = 0.0;   // r^{N+2s} log(r)^2 G
    bool renormalized = false;
    bool near_one = false;  // |log r| < 1e-3, both weights degenerate
};

GreenSample green_sample(const OperatorParams& params, double r, const QuadratureSpec& quad);
// One sample per radius, evaluated concurrently.
std::vector<GreenSample> green_table(const OperatorParams& params, const std::vector<double>& radii,
                                     const QuadratureSpec& quad);

// Fits c + c1/log(1/r) to the weighted sequence; constant = c, correction = c1.
AsymptoticFit green_asymptote(const OperatorParams& params, Regime regime, const QuadratureSpec& quad);

// (G * f) on the grid of f by product integration with exact cell masses of G. N = 1 only.
GridFunction green_convolve(const OperatorParams& params, const GridFunction& f, const QuadratureSpec& quad);

}  // namespace logschro
