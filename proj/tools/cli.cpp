#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iomanip>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "logschro/dirichlet.hpp"
#include "logschro/green.hpp"
#include "logschro/inequalities.hpp"
#include "logschro/kernel.hpp"
#include "logschro/pointwise.hpp"
#include "logschro/spectral.hpp"
#include "logschro/stable_density.hpp"

namespace logschro::cli {

using json = nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;
const std::vector<std::pair<std::string, std::string>> kCommands{
    {"constants", "named constants for (N, s)"},
    {"kernel-table", "K_s(r) on a log-spaced radius grid"},
    {"density-table", "stable density p_s(r, t) on a log-spaced radius grid"},
    {"apply", "apply the operator to a grid CSV, or pointwise to a builtin"},
    {"green", "Green function and its weighted asymptotes"},
    {"solve", "Dirichlet problem on (a, b), N = 1"},
    {"eigs", "first k Dirichlet eigenpairs on (a, b), N = 1"},
    {"verify", "property checks with margins, exit 1 on failure"},
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- config ----

// Options are bound to staging values; only those actually given on the command line override.
struct Staged {
    int N = 1;
    double s = 0.5, L = 12.0, a = -1.0, b = 1.0, r_min = 1e-4, r_max = 1e3, t = 1.0, tol = 1e-10;
    int n = 512, mesh_n = 127, k = 4, points = 60;
    bool periodic = false, pointwise = false, poisson = false;
    std::string function, f, input, out, config;
    std::uint64_t seed = 0;
};

template <class T>
void from_json_key(const json& j, const char* key, T& dst) {
    try {
        dst = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config: key '") + key + "' has the wrong type");
    }
}

void apply_file(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot read " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("config: " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("config: top level must be an object");
    static const std::vector<std::string> known{"schema", "N",       "s",      "L",     "n",      "periodic",
                                                "pointwise", "function", "a",   "b",     "mesh_n", "k",
                                                "f",      "r_min",   "r_max",  "points", "t",     "tol",
                                                "input",  "out",     "seed"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw UsageError("config: unknown key '" + key + "'");
    if (!j.contains("schema")) throw UsageError("config: missing key 'schema'");
    int schema = 0;
    from_json_key(j, "schema", schema);
    if (schema != kSchemaVersion)
        throw UsageError("config: schema " + std::to_string(schema) + " is not supported (expected " +
                         std::to_string(kSchemaVersion) + ")");
    auto get = [&](const char* key, auto& dst) {
        if (j.contains(key)) from_json_key(j, key, dst);
    };
    get("N", c.params.N);
    get("s", c.params.s);
    get("L", c.L);
    get("n", c.n);
    get("periodic", c.periodic);
    get("pointwise", c.pointwise);
    get("function", c.function);
    get("a", c.a);
    get("b", c.b);
    get("mesh_n", c.mesh_n);
    get("k", c.k);
    get("f", c.f);
    get("r_min", c.r_min);
    get("r_max", c.r_max);
    get("points", c.points);
    get("t", c.t);
    get("tol", c.tol);
    get("input", c.input);
    get("out", c.out);
    get("seed", c.seed);
}

void validate(const RunConfig& c) {
    try {
        c.params.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!(c.tol > 0.0 && c.tol < 1e-2)) throw UsageError("tol must lie in (0, 1e-2)");
    if (c.command == "kernel-table" || c.command == "density-table" || c.command == "green") {
        if (!(c.r_min > 0.0 && c.r_max > c.r_min)) throw UsageError("need 0 < r-min < r-max");
        if (c.points < 2) throw UsageError("points must be at least 2");
    }
    if (c.command == "density-table" && !(c.t > 0.0)) throw UsageError("t must be positive");
    if (c.command == "apply") {
        const bool pow2 = c.n >= 16 && (c.n & (c.n - 1)) == 0;
        if (!c.pointwise && !pow2) throw UsageError("n must be a power of two >= 16");
        if (!(c.L > 0.0)) throw UsageError("L must be positive");
        if (c.input.empty()) throw UsageError("apply needs --input");
    }
    if (c.command == "solve" || c.command == "eigs" || c.command == "verify") {
        if (!(c.a < c.b)) throw UsageError("need a < b");
        if (c.mesh_n < 4) throw UsageError("mesh-n must be at least 4");
    }
    if ((c.command == "solve" || c.command == "eigs") && c.params.N != 1)
        throw UsageError("solve and eigs work on intervals: N must be 1");
    if (c.command == "eigs" && (c.k < 1 || c.k > c.mesh_n)) throw UsageError("need 1 <= k <= mesh-n");
}

// ---- output ----

std::string header(const RunConfig& c) {
    std::ostringstream os;
    os << "# logschro-kit v" << kVersion << ", N=" << c.params.N << ", s=" << fmt(c.params.s);
    return os.str();
}

// --out, else $LOGSCHRO_OUTPUT_DIR/<command>.<ext>, else the given stream
class Sink {
public:
    Sink(const RunConfig& c, const char* ext, std::ostream& fallback) : stream_(&fallback) {
        std::string path = c.out;
        if (path.empty()) {
            if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir)
                path = (std::filesystem::path(dir) / (c.command + "." + ext)).string();
        }
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot write " + path);
            stream_ = file_.get();
            path_ = path;
        }
    }
    std::ostream& os() { return *stream_; }
    bool to_file() const { return !path_.empty(); }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
    std::string path_;
};

QuadratureSpec quad_of(const RunConfig& c) {
    QuadratureSpec q;
    q.tol = c.tol;
    return q;
}

std::vector<double> log_spaced(double lo, double hi, int m) {
    std::vector<double> r(m);
    for (int i = 0; i < m; ++i) r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1));
    r.front() = lo;
    r.back() = hi;
    return r;
}

// rows computed by a small worker pool, written in index order
template <class F>
std::vector<std::string> parallel_rows(size_t m, F&& row) {
    std::vector<std::string> out(m);
    const size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> fs;
    for (size_t w = 0; w < workers; ++w)
        fs.push_back(std::async(std::launch::async, [&, w] {
            for (size_t i = w; i < m; i += workers) out[i] = row(i);
        }));
    for (auto& f : fs) f.get();
    return out;
}

// counter-keyed generator: item i of suite k does not depend on evaluation order
std::mt19937_64 item_rng(std::uint64_t seed, std::uint64_t suite, std::uint64_t item) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(suite), static_cast<std::uint32_t>(item)};
    return std::mt19937_64(seq);
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (rows.empty()) continue;  // column header
            throw std::runtime_error(path + ": non-numeric row '" + line + "'");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---- commands ----

int cmd_constants(const RunConfig& c, std::ostream& out) {
    const ConstantsTable t = constants(c.params);
    Sink sink(c, "csv", out);
    auto& os = sink.os();
    os << header(c) << "\nname,value\n";
    auto opt = [&](const char* name, const std::optional<double>& v) {
        os << name << ',' << (v ? fmt(*v) : "unavailable") << '\n';
    };
    opt("C_Ns", t.C_Ns);
    opt("kappa_Ns", t.kappa_Ns);
    os << "gamma_N," << fmt(t.gamma_N) << "\nomega_Nm1," << fmt(t.omega_Nm1) << "\nB_N," << fmt(t.B_N)
       << "\nA_N," << fmt(t.A_N) << "\nzero_limit," << fmt(kernel_zero_limit(c.params)) << '\n';
    return 0;
}

int cmd_kernel_table(const RunConfig& c, std::ostream& out) {
    const auto r = log_spaced(c.r_min, c.r_max, c.points);
    const QuadratureSpec q = quad_of(c);
    const int N = c.params.N;
    const double s = c.params.s;
    const auto rows = parallel_rows(r.size(), [&](size_t i) {
        const KernelValue k = kernel_ex(c.params, r[i], q);
        const char* flag = k.underflow ? "underflow" : k.surrogate ? "surrogate" : "ok";
        return fmt(r[i]) + ',' + fmt(k.value) + ',' + fmt(std::pow(r[i], N) * k.value) + ',' +
               fmt(std::pow(r[i], N + 2 * s) * k.value) + ',' + flag;
    });
    Sink sink(c, "csv", out);
    sink.os() << header(c) << "\nr,K,rN_K,rN2s_K,flag\n";
    for (const auto& row : rows) sink.os() << row << '\n';
    return 0;
}

int cmd_density_table(const RunConfig& c, std::ostream& out) {
    const auto r = log_spaced(c.r_min, c.r_max, c.points);
    const QuadratureSpec q = quad_of(c);
    static const char* routes[] = {"gaussian", "cauchy", "series", "fourier", "origin"};
    const auto rows = parallel_rows(r.size(), [&](size_t i) {
        DensityQuery dq{c.params, Point{r[i], 0.0, 0.0}, c.t};
        const DensityValue d = density_ex(dq, q);
        return fmt(r[i]) + ',' + fmt(d.value) + ',' + routes[static_cast<int>(d.route)] + ',' +
               (d.floored ? "floored" : "ok");
    });
    Sink sink(c, "csv", out);
    sink.os() << header(c) << ", t=" << fmt(c.t) << "\nr,p,route,flag\n";
    for (const auto& row : rows) sink.os() << row << '\n';
    return 0;
}

std::function<double(const Point&)> builtin_function(const std::string& name, int N) {
    auto r2 = [N](const Point& x) {
        double a = 0.0;
        for (int d = 0; d < N; ++d) a += x[d] * x[d];
        return a;
    };
    if (name == "gaussian") return [r2](const Point& x) { return std::exp(-0.5 * r2(x)); };
    if (name == "bump") return [r2](const Point& x) { return r2(x) < 1.0 ? std::exp(-1.0 / (1.0 - r2(x))) : 0.0; };
    if (name == "cosgauss") return [r2](const Point& x) { return std::cos(2.0 * x[0]) * std::exp(-0.5 * r2(x)); };
    throw std::invalid_argument("unknown function '" + name + "' (gaussian, bump, cosgauss)");
}

int cmd_apply(const RunConfig& c, std::ostream& out) {
    const int N = c.params.N;
    const auto rows = read_csv(c.input);
    std::vector<std::string> lines;
    if (c.pointwise) {
        CallableFunction u{builtin_function(c.function, N)};
        if (c.function == "bump") u.support_radius = 1.0;
        for (const auto& row : rows)
            if (static_cast<int>(row.size()) < N) throw std::runtime_error("apply: sample rows need N coordinates");
        const auto table = shared_kernel_table(c.params, quad_of(c));
        lines = parallel_rows(rows.size(), [&](size_t i) {
            Point x{};
            std::string line;
            for (int d = 0; d < N; ++d) {
                x[d] = rows[i][d];
                line += fmt(x[d]) + ',';
            }
            return line + fmt(apply_pointwise_ex(u, x, *table).value);
        });
    } else {
        const GridSpec g{N, c.L, c.n};
        if (rows.size() != g.size())
            throw std::runtime_error("apply: expected " + std::to_string(g.size()) + " rows, got " +
                                     std::to_string(rows.size()));
        GridFunction u{g, std::vector<double>(g.size())};
        for (size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<int>(rows[i].size()) != N + 1) throw std::runtime_error("apply: rows need N + 1 columns");
            const Point p = g.point(i);
            for (int d = 0; d < N; ++d)
                if (std::fabs(rows[i][d] - p[d]) > 1e-9 * c.L)
                    throw std::runtime_error("apply: row " + std::to_string(i) + " is not on the grid");
            u.values[i] = rows[i][N];
        }
        const GridFunction v = apply_operator(u, c.params, c.periodic ? Boundary::Periodic : Boundary::Whole);
        for (size_t i = 0; i < rows.size(); ++i) {
            std::string line;
            for (int d = 0; d < N; ++d) line += fmt(rows[i][d]) + ',';
            lines.push_back(line + fmt(v.values[i]));
        }
    }
    Sink sink(c, "csv", out);
    sink.os() << header(c) << '\n';
    for (int d = 0; d < N; ++d) sink.os() << 'x' << d + 1 << ',';
    sink.os() << "value\n";
    for (const auto& l : lines) sink.os() << l << '\n';
    return 0;
}

int cmd_green(const RunConfig& c, std::ostream& out) {
    const auto r = log_spaced(c.r_min, c.r_max, c.points);
    const auto g = green_table(c.params, r, quad_of(c));
    Sink sink(c, "csv", out);
    sink.os() << header(c) << "\nr,G,weighted_zero,weighted_inf,renormalized\n";
    for (const auto& x : g)
        sink.os() << fmt(x.r) << ',' << fmt(x.value) << ',' << fmt(x.weighted_zero) << ',' << fmt(x.weighted_inf)
                  << ',' << (x.renormalized ? 1 : 0) << '\n';
    return 0;
}

std::vector<double> load_rhs(const RunConfig& c, const Mesh1D& m) {
    std::vector<double> f(m.n, 0.0);
    if (c.f == "one") {
        std::fill(f.begin(), f.end(), 1.0);
    } else if (c.f == "spike") {
        f[m.n / 2] = 1.0 / m.h();
    } else if (c.f.rfind("random-seed=", 0) == 0) {
        const std::uint64_t seed = std::stoull(c.f.substr(12));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int i = 0; i < m.n; ++i) {
            auto rng = item_rng(seed, 0, i);
            f[i] = unif(rng);
        }
    } else {
        const auto rows = read_csv(c.f);
        if (static_cast<int>(rows.size()) != m.n)
            throw std::runtime_error("f: expected " + std::to_string(m.n) + " rows, got " + std::to_string(rows.size()));
        for (int i = 0; i < m.n; ++i) f[i] = rows[i].back();
    }
    return f;
}

// nodal CSV to the sink; the JSON summary to out, or to err when the CSV already took out
void emit_summary(Sink& sink, const json& summary, std::ostream& out, std::ostream& err) {
    (sink.to_file() ? out : err) << summary.dump() << '\n';
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Mesh1D m{c.a, c.b, c.mesh_n};
    const FemSystem sys = assemble(m, c.params, quad_of(c));
    const std::vector<double> f = load_rhs(c, m);
    const std::vector<double> u = solve_poisson(sys, f);
    const Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
    const Eigen::VectorXd rhs = sys.mass * Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
    Sink sink(c, "csv", out);
    sink.os() << header(c) << "\nx,f,u\n";
    for (int i = 0; i < m.n; ++i) sink.os() << fmt(m.node(i)) << ',' << fmt(f[i]) << ',' << fmt(u[i]) << '\n';
    json s;
    s["command"] = "solve";
    s["n"] = m.n;
    s["residual"] = (sys.stiffness * uv - rhs).norm() / std::max(rhs.norm(), 1e-300);
    s["min"] = uv.minCoeff();
    s["max"] = uv.maxCoeff();
    emit_summary(sink, s, out, err);
    return 0;
}

int cmd_eigs(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Mesh1D m{c.a, c.b, c.mesh_n};
    const FemSystem sys = assemble(m, c.params, quad_of(c));
    const Spectrum sp = solve_eigs(sys, c.k);
    Sink sink(c, "csv", out);
    sink.os() << header(c) << "\nx";
    for (int j = 0; j < c.k; ++j) sink.os() << ",phi_" << j + 1;
    sink.os() << '\n';
    for (int i = 0; i < m.n; ++i) {
        sink.os() << fmt(m.node(i));
        for (int j = 0; j < c.k; ++j) sink.os() << ',' << fmt(sp.eigenvectors(i, j));
        sink.os() << '\n';
    }
    json s;
    s["command"] = "eigs";
    s["lambda"] = sp.eigenvalues;
    std::vector<double> res;
    for (int j = 0; j < c.k; ++j) {
        const Eigen::VectorXd v = sp.eigenvectors.col(j);
        res.push_back((sys.stiffness * v - sp.eigenvalues[j] * (sys.mass * v)).norm());
    }
    s["residuals"] = res;
    emit_summary(sink, s, out, err);
    return 0;
}

// ---- verify ----

struct Check {
    std::string name;
    double margin = 0.0;  // pass iff margin >= 0
    double tolerance = 0.0;
    std::string detail;
    std::string error;
};

using CheckFn = std::function<Check()>;

std::vector<CheckFn> verify_suite(const RunConfig& c) {
    const OperatorParams p = c.params;
    const QuadratureSpec q = quad_of(c);
    const std::uint64_t seed = c.seed;
    std::vector<CheckFn> v;

    v.push_back([=] {
        double worst = 0.0;
        for (double lam : {1e-3, 1.0, 1e3}) worst = std::max(worst, std::fabs(frullani_integral(lam, q) - std::log1p(lam)));
        return Check{"frullani", 1e-8 - worst, 1e-8, "max |error| " + fmt(worst), ""};
    });
    v.push_back([=] {
        // random band-limited functions on a whole-space grid
        const GridSpec g{p.N, p.N == 1 ? 64.0 : 16.0, p.N == 1 ? 4096 : (p.N == 2 ? 256 : 64)};
        double worst = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 20; ++t) {
            auto rng = item_rng(seed, 1, t);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            const double sigma = 0.7 + 1.3 * unif(rng);
            double a[4], w[4], ph[4];
            for (int k = 0; k < 4; ++k) a[k] = 2 * unif(rng) - 1, w[k] = 3 * unif(rng), ph[k] = 2 * kPi * unif(rng);
            const GridFunction u = sample(g, [&](const Point& x) {
                double acc = 0.0, r2 = 0.0;
                for (int k = 0; k < 4; ++k) acc += a[k] * std::cos(w[k] * x[0] + ph[k]);
                for (int d = 0; d < p.N; ++d) r2 += x[d] * x[d];
                return acc * std::exp(-0.5 * r2 / (sigma * sigma));
            });
            worst = std::min(worst, log_sobolev_deficit(u, p));
        }
        return Check{"log_sobolev", worst + 1e-8, 1e-8, "min deficit over 20 functions", ""};
    });
    if (p.N != 1) return v;

    const Mesh1D mesh{c.a, c.b, c.mesh_n};
    const double vol = c.b - c.a;
    v.push_back([=] {
        const FemSystem sys = assemble(mesh, p, q);
        const double C = poincare_constant(p, vol).C_derived;
        const Spectrum sp = solve_eigs(sys, mesh.n);
        double worst = std::numeric_limits<double>::infinity();
        for (int j = 0; j < mesh.n; ++j) {
            const Eigen::VectorXd e = sp.eigenvectors.col(j);
            worst = std::min(worst, verify_poincare(sys, {e.data(), e.data() + e.size()}, C));
        }
        return Check{"poincare_eigenfunctions", worst, 0.0, "C = " + fmt(C) + ", unit-norm eigenfunctions", ""};
    });
    v.push_back([=] {
        const FemSystem sys = assemble(mesh, p, q);
        const double C = poincare_constant(p, vol).C_derived;
        double worst = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 50; ++t) {
            auto rng = item_rng(seed, 2, t);
            std::normal_distribution<double> nd;
            std::vector<double> u(mesh.n);
            for (double& x : u) x = nd(rng);
            const double l2 = std::pow(fem_l2_norm(sys, u), 2);
            worst = std::min(worst, verify_poincare(sys, u, C) / l2);
        }
        return Check{"poincare_random", worst, 0.0, "relative margin over 50 nodal functions", ""};
    });
    v.push_back([=] {
        const double lam = solve_eigs(assemble(mesh, p, q), 1).eigenvalues[0];
        const double C = poincare_constant(p, vol).C_derived;
        return Check{"poincare_lambda1", lam - 1.0 / (2.0 * C), 0.0, "lambda_1 = " + fmt(lam), ""};
    });
    v.push_back([=] {
        const auto rep = maximum_principle_suite(assemble(mesh, p, q), 50, seed);
        return Check{"maximum_principle", rep.failures == 0 ? rep.min_value : -1.0, 0.0,
                     "min u over 50 nonnegative right-hand sides", ""};
    });
    v.push_back([=] {
        double worst = std::numeric_limits<double>::infinity();
        for (int t = 0; t < 50; ++t) {
            auto rng = item_rng(seed, 3, t);
            std::normal_distribution<double> nd;
            std::vector<double> u(mesh.n);
            for (double& x : u) x = nd(rng);
            const LatticeReport r = lattice_check(mesh, u, p, q);
            worst = std::min({worst, r.abs_margin() / r.g_u, r.parts_margin() / r.g_u});
        }
        return Check{"lattice", worst + 1e-12, 1e-12, "relative margin over 50 nodal functions", ""};
    });
    v.push_back([=] {
        const double gap = wirtinger_gap(mesh, p, q);
        return Check{"wirtinger_gap", gap, 0.0, "smallest nonzero regional eigenvalue", ""};
    });
    v.push_back([=] {
        const BecknerTerms t = beckner_deficit([](double x) { return 1.0 / std::sqrt(kPi * (1 + x * x)); }, q);
        const double rel = std::fabs(t.deficit) / std::fabs(t.lhs);
        return Check{"beckner_extremal", 1e-3 - rel, 1e-3, "relative deficit " + fmt(rel), ""};
    });
    v.push_back([=] {
        PiecewiseFunction u{[](double x) { return std::exp(-0.5 * x * x); }, {}};
        for (int i = 0; i <= 360; ++i) u.breaks.push_back(-9.0 + 0.05 * i);
        const double d = quadratic_form_direct(u, p, FormDomain::Whole, q).b_s;
        const double sp = quadratic_form_spectral(sample(GridSpec{1, 128.0, 4096}, [](const Point& x) {
                                                      return std::exp(-0.5 * x[0] * x[0]);
                                                  }),
                                                  p);
        const double rel = std::fabs(d / sp - 1.0);
        return Check{"form_equivalence", 5e-3 - rel, 5e-3, "Gaussian, relative difference " + fmt(rel), ""};
    });
    return v;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
    const auto suite = verify_suite(c);
    std::vector<std::future<Check>> fs;
    for (const auto& fn : suite)
        fs.push_back(std::async(std::launch::async, [fn] {
            try {
                return fn();
            } catch (const std::exception& e) {
                return Check{"", -std::numeric_limits<double>::infinity(), 0.0, "", e.what()};
            }
        }));
    json report;
    report["version"] = kVersion;
    report["N"] = c.params.N;
    report["s"] = c.params.s;
    report["seed"] = c.seed;
    json checks = json::array();
    bool all = true;
    for (size_t i = 0; i < fs.size(); ++i) {
        Check ch = fs[i].get();
        json j;
        j["check"] = ch.name.empty() ? "check_" + std::to_string(i) : ch.name;
        const bool pass = ch.error.empty() && ch.margin >= 0.0;
        if (ch.error.empty())
            j["margin"] = ch.margin;
        else
            j["margin"] = nullptr;
        j["tolerance"] = ch.tolerance;
        j["pass"] = pass;
        if (!ch.detail.empty()) j["detail"] = ch.detail;
        if (!ch.error.empty()) j["error"] = ch.error;
        all = all && pass;
        checks.push_back(j);
    }
    report["checks"] = checks;
    report["pass"] = all;
    if (c.params.N != 1) report["skipped"] = "mesh-based checks need N = 1";
    Sink sink(c, "json", out);
    sink.os() << report.dump(2) << '\n';
    if (sink.to_file()) out << (all ? "PASS" : "FAIL") << '\n';
    return all ? 0 : 1;
}

}  // namespace

RunConfig parse_config(int argc, const char* const* argv, std::ostream& out) {
    CLI::App app{"logschro: kernel, Green function, Dirichlet solver and inequality checks for the "
                 "log(1 + |xi|^{2s}) operator"};
    app.set_version_flag("--version", std::string("logschro-kit v") + kVersion);
    app.require_subcommand(1);
    Staged st;
    std::map<std::string, CLI::Option*> opts;
    opts["config"] = app.add_option("--config", st.config, "JSON config file (flags win)");
    opts["N"] = app.add_option("--N", st.N, "dimension");
    opts["s"] = app.add_option("--s", st.s, "order in (0,1]");
    opts["L"] = app.add_option("--L", st.L, "grid half-width");
    opts["n"] = app.add_option("--n", st.n, "grid points per axis");
    opts["periodic"] = app.add_flag("--periodic", st.periodic, "apply on the torus");
    opts["pointwise"] = app.add_flag("--pointwise", st.pointwise, "apply by the singular integral at sample points");
    opts["function"] = app.add_option("--function", st.function, "builtin for --pointwise: gaussian, bump, cosgauss");
    opts["a"] = app.add_option("--a", st.a, "interval left end");
    opts["b"] = app.add_option("--b", st.b, "interval right end");
    opts["mesh_n"] = app.add_option("--mesh-n", st.mesh_n, "interior mesh nodes");
    opts["k"] = app.add_option("--k", st.k, "number of eigenpairs");
    opts["f"] = app.add_option("--f", st.f, "right-hand side: one, spike, random-seed=K or CSV path");
    opts["r_min"] = app.add_option("--r-min", st.r_min, "table start");
    opts["r_max"] = app.add_option("--r-max", st.r_max, "table end");
    opts["points"] = app.add_option("--points", st.points, "table rows, log-spaced");
    opts["t"] = app.add_option("--t", st.t, "density time");
    opts["tol"] = app.add_option("--tol", st.tol, "relative quadrature tolerance");
    opts["input"] = app.add_option("--input", st.input, "input CSV");
    opts["out"] = app.add_option("--out", st.out, std::string("output file (default $") + kOutputDirEnv + "/<command>.*, else stdout)");
    opts["seed"] = app.add_option("--seed", st.seed, "seed for randomized suites");
    app.add_flag("--poisson", st.poisson, "solve: Poisson problem (the only mode)");
    for (const auto& [name, help] : kCommands) app.add_subcommand(name, help)->fallthrough();

    RunConfig c;
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return c;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help();
        return c;
    } catch (const CLI::CallForVersion&) {
        out << "logschro-kit v" << kVersion << '\n';
        return c;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    c.command = app.get_subcommands().front()->get_name();
    if (!st.config.empty()) apply_file(st.config, c);
    const bool from_file = !st.config.empty();

    auto take = [&](const char* key, auto& dst, const auto& val) {
        if (opts.at(key)->count() == 0) return;
        if (from_file && dst != val) {
            std::ostringstream os;
            os << key << ": flag value " << val << " overrides file value " << dst;
            c.provenance.push_back(os.str());
        }
        dst = val;
    };
    take("N", c.params.N, st.N);
    take("s", c.params.s, st.s);
    take("L", c.L, st.L);
    take("n", c.n, st.n);
    take("periodic", c.periodic, st.periodic);
    take("pointwise", c.pointwise, st.pointwise);
    take("function", c.function, st.function);
    take("a", c.a, st.a);
    take("b", c.b, st.b);
    take("mesh_n", c.mesh_n, st.mesh_n);
    take("k", c.k, st.k);
    take("f", c.f, st.f);
    take("r_min", c.r_min, st.r_min);
    take("r_max", c.r_max, st.r_max);
    take("points", c.points, st.points);
    take("t", c.t, st.t);
    take("tol", c.tol, st.tol);
    take("input", c.input, st.input);
    take("out", c.out, st.out);
    take("seed", c.seed, st.seed);
    validate(c);
    return c;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    for (const auto& line : c.provenance) err << "config: " << line << '\n';
    try {
        if (c.command == "constants") return cmd_constants(c, out);
        if (c.command == "kernel-table") return cmd_kernel_table(c, out);
        if (c.command == "density-table") return cmd_density_table(c, out);
        if (c.command == "apply") return cmd_apply(c, out);
        if (c.command == "green") return cmd_green(c, out);
        if (c.command == "solve") return cmd_solve(c, out, err);
        if (c.command == "eigs") return cmd_eigs(c, out, err);
        if (c.command == "verify") return cmd_verify(c, out);
        throw std::invalid_argument("unknown command '" + c.command + "'");
    } catch (const std::exception& e) {
        json j;
        j["error"] = e.what();
        j["command"] = c.command;
        if (const auto* qe = dynamic_cast<const QuadratureError*>(&e)) {
            j["kind"] = "quadrature";
            j["estimate"] = qe->estimate();
        } else {
            j["kind"] = "runtime";
        }
        err << j.dump() << '\n';
        return 1;
    }
}

}  // namespace logschro::cli
