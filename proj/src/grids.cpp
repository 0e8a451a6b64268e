#include "moserlab/grids.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace moserlab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr std::size_t min_nodes = 16;

// Full Gauss-Legendre rule mapped to [0, 1].
template <unsigned N>
struct UnitGauss {
    std::vector<double> x, w;
    UnitGauss() {
        using G = boost::math::quadrature::gauss<double, N>;
        const auto& a = G::abscissa();
        const auto& b = G::weights();
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a[k] == 0.0) {
                x.push_back(0.5);
                w.push_back(0.5 * b[k]);
                continue;
            }
            x.push_back(0.5 * (1.0 - a[k]));
            w.push_back(0.5 * b[k]);
            x.push_back(0.5 * (1.0 + a[k]));
            w.push_back(0.5 * b[k]);
        }
    }
};

const UnitGauss<7>& cell_rule() {
    static const UnitGauss<7> rule;
    return rule;
}

const UnitGauss<20>& core_rule() {
    static const UnitGauss<20> rule;
    return rule;
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct DoublyParameters {
    double h;
    double beta;
    long xi_hi;
    long xi_lo;
};

// Splits n nodes into a geometric boundary layer of n_b nodes and a uniform-t
// body. The body step is snapped to log 2 / m so powers of two sit on nodes;
// beta is then fixed by the requested boundary depth.
DoublyParameters doubly_parameters(std::size_t n, const GridOptions& opt) {
    const long n_b = std::max<long>(8, static_cast<long>(n / 64));
    const long xi_hi = static_cast<long>(n) - 1 - n_b;
    double h = opt.t_max / static_cast<double>(xi_hi);
    long m = static_cast<long>(std::floor(std::numbers::ln2 / h));
    if (m >= 2) m -= m % 2;
    if (m >= 1) h = std::numbers::ln2 / static_cast<double>(m);

    auto depth = [&](double beta) { return (h / beta) * softplus(-beta * static_cast<double>(n_b)); };
    double lo = 1e-4, hi = 100.0;
    if (depth(hi) > opt.gap_min) throw std::invalid_argument("doubly graded grid: gap_min too small for n");
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (depth(mid) > opt.gap_min ? lo : hi) = mid;
    }
    return {h, std::sqrt(lo * hi), xi_hi, -n_b};
}

}  // namespace

std::string_view to_string(WeightKind w) {
    switch (w) {
        case WeightKind::lebesgue: return "lebesgue";
        case WeightKind::hyperbolic: return "hyperbolic";
        case WeightKind::hardy_origin: return "hardy-origin";
        case WeightKind::hardy_boundary: return "hardy-boundary";
    }
    return "?";
}

std::string_view to_string(Grading g) {
    switch (g) {
        case Grading::uniform: return "uniform";
        case Grading::log_origin: return "log";
        case Grading::boundary: return "boundary";
        case Grading::doubly: return "double";
    }
    return "?";
}

WeightKind parse_weight_kind(std::string_view name) {
    if (name == "lebesgue") return WeightKind::lebesgue;
    if (name == "hyperbolic") return WeightKind::hyperbolic;
    if (name == "hardy-origin") return WeightKind::hardy_origin;
    if (name == "hardy-boundary") return WeightKind::hardy_boundary;
    throw std::invalid_argument("unknown weight kind '" + std::string(name) + "'");
}

Grading parse_grading(std::string_view name) {
    if (name == "uniform") return Grading::uniform;
    if (name == "log" || name == "log-graded-at-0") return Grading::log_origin;
    if (name == "boundary" || name == "boundary-graded-at-1") return Grading::boundary;
    if (name == "double" || name == "doubly" || name == "doubly-graded") return Grading::doubly;
    throw std::invalid_argument("unknown grading '" + std::string(name) + "'");
}

RadialPoint radial_point_from_t(double t) { return {std::exp(-t), t, -std::expm1(-t)}; }

double weight_density_t(WeightKind w, const RadialPoint& p) {
    switch (w) {
        case WeightKind::lebesgue: return 2 * pi * p.r * p.r;
        case WeightKind::hyperbolic: {
            const double q = p.r / (p.gap * (1.0 + p.r));
            return 2 * pi * q * q;
        }
        case WeightKind::hardy_origin: return 2 * pi / (p.t * p.t);
        case WeightKind::hardy_boundary: {
            const double q = p.r / p.gap;
            return 2 * pi * q * q;
        }
    }
    return 0.0;
}

double disk_measure(WeightKind w, double rho) { return annulus_measure(w, 0.0, rho); }

double annulus_measure(WeightKind w, double a, double b) {
    if (!(0.0 <= a && a <= b && b < 1.0)) throw std::invalid_argument("annulus_measure: need 0 <= a <= b < 1");
    switch (w) {
        case WeightKind::lebesgue: return pi * (b - a) * (b + a);
        case WeightKind::hyperbolic:
            return pi * (b - a) * (b + a) / ((1 - a) * (1 + a) * (1 - b) * (1 + b));
        case WeightKind::hardy_origin: {
            if (b == 0.0) return 0.0;
            const double tb = -std::log(b);
            if (a == 0.0) return 2 * pi / tb;
            const double ta = -std::log(a);
            return 2 * pi * (ta - tb) / (ta * tb);
        }
        case WeightKind::hardy_boundary: {
            const double x = (b - a) / (1 - a);
            return 2 * pi * ((b - a) * b / ((1 - a) * (1 - b)) + (std::log1p(-x) + x));
        }
    }
    return 0.0;
}

RadialGrid::RadialGrid(Grading grading, std::vector<double> t_nodes, std::vector<double> jacobian,
                       std::vector<double> graded_coordinate, GridOptions options, std::string id)
    : grading_(grading),
      options_(options),
      id_(std::move(id)),
      t_(std::move(t_nodes)),
      jac_(std::move(jacobian)),
      graded_(std::move(graded_coordinate)) {
    const std::size_t n = t_.size();
    if (n < min_nodes) throw std::invalid_argument("radial grid needs at least 16 nodes");
    if (jac_.size() != n || graded_.size() != n) throw std::invalid_argument("radial grid: array size mismatch");
    r_.resize(n);
    gap_.resize(n);
    trap_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(t_[i] > 0.0) || (i > 0 && !(t_[i] < t_[i - 1])))
            throw std::invalid_argument("radial grid: t nodes must be positive and strictly decreasing");
        const auto p = radial_point_from_t(t_[i]);
        r_[i] = p.r;
        gap_[i] = p.gap;
        if (!(r_[i] > 0.0 && r_[i] < 1.0) || (i > 0 && !(r_[i] > r_[i - 1])))
            throw std::invalid_argument("radial grid: radii not strictly inside (0,1)");
        trap_[i] = jac_[i] * ((i == 0 || i + 1 == n) ? 0.5 : 1.0);
    }

    const auto& cell = cell_rule();
    rule_.reserve((n + 1) * cell.x.size() + core_rule().x.size());
    const auto& core = core_rule();
    for (std::size_t g = 0; g < core.x.size(); ++g) {
        const double tau = core.x[g];
        const double t = t_[0] / tau;
        rule_.push_back({radial_point_from_t(t), core.w[g] * t_[0] / (tau * tau), 0, -1, 1.0});
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double hi = t_[i], lo = t_[i + 1], len = hi - lo;
        for (std::size_t g = 0; g < cell.x.size(); ++g) {
            const double t = lo + cell.x[g] * len;
            rule_.push_back({radial_point_from_t(t), cell.w[g] * len, static_cast<int>(i),
                             static_cast<int>(i + 1), cell.x[g]});
        }
    }
    const double last = t_[n - 1];
    for (std::size_t g = 0; g < cell.x.size(); ++g) {
        const double t = cell.x[g] * last;
        rule_.push_back({radial_point_from_t(t), cell.w[g] * last, static_cast<int>(n - 1), -1, cell.x[g]});
    }
}

long RadialGrid::locate(double t) const {
    if (t > t_.front()) return -1;
    // t_ is descending: first node with t_i < t, minus one.
    const auto it = std::upper_bound(t_.begin(), t_.end(), t, [](double v, double e) { return v > e; });
    return static_cast<long>(it - t_.begin()) - 1;
}

RadialGridPtr build_radial_grid(std::size_t n, Grading grading, GridOptions options) {
    if (n < min_nodes) throw std::invalid_argument("build_radial_grid: n must be >= 16, got " + std::to_string(n));
    if (!(options.t_max > 0) || !(options.gap_min > 0 && options.gap_min < 0.5))
        throw std::invalid_argument("build_radial_grid: invalid grid options");
    std::vector<double> t(n), jac(n), graded(n);
    const double dn = static_cast<double>(n);
    switch (grading) {
        case Grading::uniform:
            for (std::size_t i = 0; i < n; ++i) {
                const double r = static_cast<double>(i + 1) / (dn + 1);
                t[i] = std::log((dn + 1) / static_cast<double>(i + 1));
                jac[i] = 1.0 / ((dn + 1) * r);
                graded[i] = r;
            }
            break;
        case Grading::log_origin:
            for (std::size_t i = 0; i < n; ++i) {
                t[i] = options.t_max * static_cast<double>(n - i) / dn;
                jac[i] = options.t_max / dn;
                graded[i] = t[i];
            }
            break;
        case Grading::boundary: {
            const double sigma_max = -std::log(options.gap_min);
            for (std::size_t i = 0; i < n; ++i) {
                const double sigma = sigma_max * static_cast<double>(i + 1) / dn;
                const double gap = std::exp(-sigma);
                t[i] = -std::log1p(-gap);
                jac[i] = (sigma_max / dn) * gap / (1.0 - gap);
                graded[i] = sigma;
            }
            break;
        }
        case Grading::doubly: {
            const auto par = doubly_parameters(n, options);
            for (std::size_t i = 0; i < n; ++i) {
                const double xi = static_cast<double>(par.xi_hi - static_cast<long>(i));
                t[i] = (par.h / par.beta) * softplus(par.beta * xi);
                jac[i] = par.h * sigmoid(par.beta * xi);
                graded[i] = par.h * xi;
            }
            break;
        }
    }
    std::string id = std::string(to_string(grading)) + "-n" + std::to_string(n);
    if (grading != Grading::uniform) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "-tmax%g-gap%g", options.t_max, options.gap_min);
        id += buf;
    }
    return std::make_shared<const RadialGrid>(grading, std::move(t), std::move(jac), std::move(graded), options,
                                              std::move(id));
}

RadialGridPtr default_radial_grid() {
    static const RadialGridPtr grid = build_radial_grid(4096, Grading::doubly);
    return grid;
}

PolarGrid::PolarGrid(RadialGridPtr radial, std::size_t n_angles) : radial_(std::move(radial)), n_angles_(n_angles) {
    if (!radial_) throw std::invalid_argument("polar grid: null radial grid");
    if (n_angles_ < 8 || n_angles_ % 2 != 0)
        throw std::invalid_argument("polar grid: angle count must be even and >= 8");
}

double PolarGrid::angle(std::size_t j) const { return 2 * pi * static_cast<double>(j) / static_cast<double>(n_angles_); }
double PolarGrid::angle_step() const { return 2 * pi / static_cast<double>(n_angles_); }
std::string PolarGrid::id() const { return radial_->id() + "-m" + std::to_string(n_angles_); }

PolarGridPtr build_polar_grid(RadialGridPtr radial, std::size_t n_angles) {
    return std::make_shared<const PolarGrid>(std::move(radial), n_angles);
}

QuadratureWarning check_weight_grid(WeightKind w, Grading g) {
    const bool graded_origin = g == Grading::log_origin || g == Grading::doubly;
    const bool graded_boundary = g == Grading::boundary || g == Grading::doubly;
    switch (w) {
        case WeightKind::lebesgue: return QuadratureWarning::none;
        case WeightKind::hardy_origin:
            return graded_origin ? QuadratureWarning::none : QuadratureWarning::singular_weight_on_ungraded_grid;
        case WeightKind::hyperbolic:
        case WeightKind::hardy_boundary:
            return graded_boundary ? QuadratureWarning::none : QuadratureWarning::singular_weight_on_ungraded_grid;
    }
    return QuadratureWarning::none;
}

Integral integrate_checked(const RadialGrid& grid, std::span<const double> samples, WeightKind w) {
    const std::size_t n = grid.size();
    if (samples.size() != n) throw std::invalid_argument("integrate: sample count does not match grid");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(samples[i]))
            throw std::domain_error("integrate: non-finite sample at node " + std::to_string(i));

    const auto trap = grid.trapezoid_weights();
    double sum = samples[0] * disk_measure(w, grid.r()[0]);
    for (std::size_t i = 0; i < n; ++i) sum += trap[i] * samples[i] * weight_density_t(w, grid.point(i));
    sum += samples[n - 1] * weight_density_t(w, grid.point(n - 1)) * grid.t()[n - 1];
    return {sum, check_weight_grid(w, grid.grading())};
}

double integrate(const RadialGrid& grid, std::span<const double> samples, WeightKind w) {
    return integrate_checked(grid, samples, w).value;
}

Integral integrate_polar_checked(const PolarGrid& grid, std::span<const double> samples, WeightKind w) {
    const std::size_t nr = grid.n_radial(), m = grid.n_angles();
    if (samples.size() != nr * m) throw std::invalid_argument("integrate_polar: sample count does not match grid");
    std::vector<double> ring(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += samples[i * m + j];
        ring[i] = s / static_cast<double>(m);
    }
    return integrate_checked(grid.radial(), ring, w);
}

double integrate_polar(const PolarGrid& grid, std::span<const double> samples, WeightKind w) {
    return integrate_polar_checked(grid, samples, w).value;
}

}  // namespace moserlab
