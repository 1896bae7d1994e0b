#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace logschro {

enum class SplitRule {
    PowerLaw,  // split at t = r^{2s}
    Unit       // split at t = 1
};

struct QuadratureSpec {
    double tol = 1e-10;      // relative
    double abs_tol = 0.0;    // absolute floor, 0 disables
    int max_subdiv = 4000;
    SplitRule split_radius_rule = SplitRule::PowerLaw;

    void validate() const;
    QuadratureSpec with_tol(double t) const {
        QuadratureSpec q = *this;
        q.tol = t;
        return q;
    }
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double value, double estimate)
        : std::runtime_error(what), value_(value), estimate_(estimate) {}
    double value() const { return value_; }
    double estimate() const { return estimate_; }

private:
    double value_;
    double estimate_;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule.
inline constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208323457460, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error, roundoff;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double rk = fc * kWgk[10];
    double rg = 0.0;
    double mean_abs = std::fabs(rk);
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        rk += kWgk[j] * (f1 + f2);
        mean_abs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
    }
    double err = std::fabs((rk - rg) * h);
    // QUADPACK-style sharpening of the raw difference
    const double scale = mean_abs * std::fabs(h);
    if (scale > 0 && err > 0) err = scale * std::min(1.0, std::pow(200.0 * err / scale, 1.5));
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * scale;
    err = std::max(err, roundoff);
    if (!std::isfinite(rk)) err = std::numeric_limits<double>::infinity();
    return {a, b, rk * h, err, roundoff};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod on a finite interval. Never throws.
template <class F>
QuadResult quad(F&& f, double a, double b, const QuadratureSpec& spec) {
    QuadResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    std::vector<detail::Segment> heap;
    heap.reserve(64);
    heap.push_back(detail::gk21(f, a, b));
    double total = heap[0].value;
    double err = heap[0].error;
    double noise = heap[0].roundoff;
    const double eps = std::numeric_limits<double>::epsilon();
    while (true) {
        const double target = std::max(spec.abs_tol, spec.tol * std::fabs(total));
        // the second clause accepts results whose error is pure cancellation noise
        if (err <= target || err <= 2.0 * noise) {
            out.converged = true;
            break;
        }
        if (static_cast<int>(heap.size()) >= spec.max_subdiv) break;
        std::pop_heap(heap.begin(), heap.end());
        const detail::Segment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b ||
            (worst.b - worst.a) < 4 * eps * std::max(std::fabs(worst.a), std::fabs(worst.b))) {
            // interval cannot be split further; keep it and give up on refinement
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        const detail::Segment left = detail::gk21(f, worst.a, mid);
        const detail::Segment right = detail::gk21(f, mid, worst.b);
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        noise += left.roundoff + right.roundoff - worst.roundoff;
        // resum now and then; repeated subtraction drifts
        if (heap.size() % 64 == 0 || err <= std::max(spec.abs_tol, spec.tol * std::fabs(total))) {
            total = 0.0;
            err = 0.0;
            noise = 0.0;
            for (const auto& s : heap) {
                total += s.value;
                err += s.error;
                noise += s.roundoff;
            }
        }
    }
    out.value = sign * total;
    out.error = err;
    out.intervals = static_cast<int>(heap.size());
    return out;
}

// [a, inf) through x = a + u/(1-u).
template <class F>
QuadResult quad_inf(F&& f, double a, const QuadratureSpec& spec) {
    auto g = [&](double u) {
        const double w = 1.0 - u;
        const double x = a + u / w;
        const double v = f(x);
        return v == 0.0 ? 0.0 : v / (w * w);
    };
    return quad(g, 0.0, 1.0, spec);
}

// (-inf, inf) as two half-lines around c.
template <class F>
QuadResult quad_line(F&& f, double c, const QuadratureSpec& spec) {
    QuadResult r = quad_inf([&](double x) { return f(x); }, c, spec);
    QuadResult l = quad_inf([&](double x) { return f(2 * c - x); }, c, spec);
    QuadResult out;
    out.value = r.value + l.value;
    out.error = r.error + l.error;
    out.intervals = r.intervals + l.intervals;
    out.converged = r.converged && l.converged;
    return out;
}

inline double require(const QuadResult& r, const char* what) {
    if (!r.converged)
        throw QuadratureError(std::string(what) + ": quadrature did not converge (estimate " +
                                  std::to_string(r.error) + ")",
                              r.value, r.error);
    return r.value;
}

template <class F>
double integrate(F&& f, double a, double b, const QuadratureSpec& spec, const char* what = "integral") {
    return require(quad(std::forward<F>(f), a, b, spec), what);
}

template <class F>
double integrate_inf(F&& f, double a, const QuadratureSpec& spec, const char* what = "integral") {
    return require(quad_inf(std::forward<F>(f), a, spec), what);
}

}  // namespace logschro
