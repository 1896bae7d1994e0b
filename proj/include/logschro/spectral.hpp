#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "logschro/quadrature.hpp"
#include "logschro/special_functions.hpp"
#include "logschro/stable_density.hpp"

namespace logschro {

// Periodic box [-L, L)^N with n points per axis.
struct GridSpec {
    int N = 1;
    double L = 12.0;
    int n = 512;

    void validate() const;  // n >= 16 and a power of two, L > 0, N in {1,2,3}
    size_t size() const;
    double dx() const { return 2.0 * L / n; }
    double coord(int i) const { return -L + i * dx(); }
    Point point(size_t flat) const;  // row-major, last axis fastest
    double cell_volume() const;
};

struct GridFunction {
    GridSpec spec;
    std::vector<double> values;

    void validate() const;
};

GridFunction sample(const GridSpec& spec, const std::function<double(const Point&)>& f);

class BoundaryDecayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ImaginaryResidueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kBoundaryDecay = 1e-10;
inline constexpr double kImaginaryResidue = 1e-10;

// log(1 + |xi|^{2s})
double symbol(const OperatorParams& params, const Point& xi);
double symbol_radial(double s, double k);

// \int_0^inf (1 - e^{-t lambda}) e^{-t} t^{-1} dt, to be compared with log(1 + lambda)
double frullani_integral(double lambda, const QuadratureSpec& quad);
// the same with lambda = |xi|^{2s}
double frullani_check(double s, double xi, const QuadratureSpec& quad);

// Whole: u stands for a decaying function on R^N and must vanish (to kBoundaryDecay) at the box
// boundary. Periodic: u is a function on the torus; no check.
enum class Boundary { Whole, Periodic };

// Generic radial Fourier multiplier m(|xi|).
GridFunction apply_multiplier(const GridFunction& u, const std::function<double(double)>& m,
                              Boundary b = Boundary::Whole);

GridFunction apply_operator(const GridFunction& u, const OperatorParams& params, Boundary b = Boundary::Whole);
// multiplier 1/(lambda + |xi|^{2s})
GridFunction resolvent_apply(const GridFunction& u, const OperatorParams& params, double lambda,
                             Boundary b = Boundary::Whole);
// multiplier (1 + |xi|^{2s})^{-t}, 0 < t < N/2
GridFunction semigroup_apply(const GridFunction& u, const OperatorParams& params, double t,
                             Boundary b = Boundary::Whole);

// \int log(1+|xi|^{2s}) |u^(xi)|^2 dxi as a grid sum
double quadratic_form_spectral(const GridFunction& u, const OperatorParams& params, Boundary b = Boundary::Whole);

struct ContinuityModulus {
    double modulus = 0.0;         // sup |apply(u; s1) - apply(u; s2)|
    double lipschitz_bound = 0.0;  // L with modulus <= L |s1 - s2|
};

ContinuityModulus s_continuity_modulus(const GridFunction& u, double s1, double s2, Boundary b = Boundary::Whole);

double max_abs_diff(const GridFunction& a, const GridFunction& b);

}  // namespace logschro
