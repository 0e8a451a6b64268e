#include "moserlab/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace moserlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct TSlot {
    std::size_t lo;  // node index carrying weight (1 - x)
    std::size_t hi;  // node index carrying weight x
    double x;
    double scale;  // multiplies the whole value (boundary cell)
};

TSlot t_slot(const RadialGrid& g, double t) {
    const long i = g.locate(t);
    const std::size_t n = g.size();
    if (i < 0) return {0, 0, 0.0, 1.0};
    if (static_cast<std::size_t>(i) + 1 >= n) return {n - 1, n - 1, 0.0, std::max(t, 0.0) / g.t()[n - 1]};
    const auto k = static_cast<std::size_t>(i);
    const double x = (g.t()[k] - t) / (g.t()[k] - g.t()[k + 1]);
    return {k, k + 1, x, 1.0};
}

}  // namespace

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw std::domain_error(std::string(what) + ": non-finite value at index " + std::to_string(i));
}

RadialFunction::RadialFunction(RadialGridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("RadialFunction: null grid");
    if (values_.size() != grid_->size()) throw std::invalid_argument("RadialFunction: value count does not match grid");
    require_finite(values_, "RadialFunction");
}

RadialFunction RadialFunction::zero(RadialGridPtr grid) {
    const auto n = grid->size();
    return {std::move(grid), std::vector<double>(n, 0.0)};
}

RadialFunction RadialFunction::sample(RadialGridPtr grid, const std::function<double(const RadialPoint&)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->point(i));
    return {std::move(grid), std::move(v)};
}

double RadialFunction::at_t(double t) const {
    const auto s = t_slot(*grid_, t);
    return s.scale * ((1.0 - s.x) * values_[s.lo] + s.x * values_[s.hi]);
}

double RadialFunction::at(double r) const {
    if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("RadialFunction::at: r outside [0,1]");
    if (r == 0.0) return values_.front();
    return at_t(-std::log(r));
}

RadialFunction RadialFunction::scaled(double lambda) const {
    std::vector<double> v(values_);
    for (auto& x : v) x *= lambda;
    return {grid_, std::move(v)};
}

RadialFunction RadialFunction::operator+(const RadialFunction& other) const {
    if (other.grid_ != grid_) throw std::invalid_argument("RadialFunction: sum over different grids");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
    return {grid_, std::move(v)};
}

DiskFunction::DiskFunction(PolarGridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw std::invalid_argument("DiskFunction: null grid");
    if (values_.size() != grid_->size()) throw std::invalid_argument("DiskFunction: value count does not match grid");
    require_finite(values_, "DiskFunction");
}

DiskFunction DiskFunction::zero(PolarGridPtr grid) {
    const auto n = grid->size();
    return {std::move(grid), std::vector<double>(n, 0.0)};
}

DiskFunction DiskFunction::lift(PolarGridPtr grid, const RadialFunction& u) {
    if (grid->radial_ptr() != u.grid_ptr() && grid->radial().id() != u.grid().id())
        throw std::invalid_argument("DiskFunction::lift: radial grids differ");
    const std::size_t m = grid->n_angles();
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < u.size(); ++i) std::fill_n(v.begin() + static_cast<long>(i * m), m, u[i]);
    return {std::move(grid), std::move(v)};
}

DiskFunction DiskFunction::sample(PolarGridPtr grid, const std::function<double(const RadialPoint&, double)>& f) {
    const std::size_t n = grid->n_radial(), m = grid->n_angles();
    std::vector<double> v(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = grid->radial().point(i);
        for (std::size_t j = 0; j < m; ++j) v[i * m + j] = f(p, grid->angle(j));
    }
    return {std::move(grid), std::move(v)};
}

double DiskFunction::at(double t, double theta) const {
    const auto s = t_slot(grid_->radial(), t);
    const std::size_t m = grid_->n_angles();
    double a = theta / grid_->angle_step();
    a -= std::floor(a / static_cast<double>(m)) * static_cast<double>(m);
    auto j0 = static_cast<std::size_t>(a);
    if (j0 >= m) j0 = 0;
    const double y = a - std::floor(a);
    const std::size_t j1 = (j0 + 1) % m;
    auto row = [&](std::size_t i) { return (1.0 - y) * values_[i * m + j0] + y * values_[i * m + j1]; };
    return s.scale * ((1.0 - s.x) * row(s.lo) + s.x * row(s.hi));
}

double DiskFunction::at(std::complex<double> z) const {
    const double r = std::abs(z);
    if (r >= 1.0) return 0.0;
    if (r == 0.0) return at(std::numeric_limits<double>::infinity(), 0.0);
    return at(-std::log(r), std::arg(z));
}

DiskFunction DiskFunction::scaled(double lambda) const {
    std::vector<double> v(values_);
    for (auto& x : v) x *= lambda;
    return {grid_, std::move(v)};
}

DiskFunction DiskFunction::operator+(const DiskFunction& other) const {
    if (other.grid_ != grid_) throw std::invalid_argument("DiskFunction: sum over different grids");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
    return {grid_, std::move(v)};
}

std::vector<double> rule_values(const RadialFunction& u) {
    const auto rule = u.grid().interpolant_rule();
    std::vector<double> out(rule.size());
    for (std::size_t g = 0; g < rule.size(); ++g) {
        const auto& q = rule[g];
        double v = q.phi_left * u[static_cast<std::size_t>(q.left)];
        if (q.right >= 0) v += (1.0 - q.phi_left) * u[static_cast<std::size_t>(q.right)];
        out[g] = v;
    }
    return out;
}

double integrate_rule(const RadialGrid& grid, std::span<const double> point_values, WeightKind w) {
    const auto rule = grid.interpolant_rule();
    if (point_values.size() != rule.size()) throw std::invalid_argument("integrate_rule: size mismatch");
    double sum = 0.0;
    for (std::size_t g = 0; g < rule.size(); ++g)
        sum += rule[g].weight * weight_density_t(w, rule[g].at) * point_values[g];
    return sum;
}

double dirichlet_energy_radial(const RadialFunction& u) {
    const auto t = u.grid().t();
    const std::size_t n = u.size();
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = u[i + 1] - u[i];
        e += d * d / (t[i] - t[i + 1]);
    }
    e += u[n - 1] * u[n - 1] / t[n - 1];
    return two_pi * e;
}

double dirichlet_norm_radial(const RadialFunction& u) { return std::sqrt(dirichlet_energy_radial(u)); }

double dirichlet_energy_disk(const DiskFunction& u) {
    const auto& g = u.grid();
    const auto t = g.radial().t();
    const std::size_t n = g.n_radial(), m = g.n_angles();
    const double dth = g.angle_step();
    const auto v = u.values();

    double radial = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double e = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double d = v[(i + 1) * m + j] - v[i * m + j];
            e += d * d / (t[i] - t[i + 1]);
        }
        const double last = v[(n - 1) * m + j];
        e += last * last / t[n - 1];
        radial += e * dth;
    }

    std::vector<double> d(m), d_next(m);
    auto diffs = [&](std::size_t i, std::vector<double>& out) {
        for (std::size_t j = 0; j < m; ++j) out[j] = (v[i * m + (j + 1) % m] - v[i * m + j]) / dth;
    };
    double angular = 0.0;
    diffs(0, d);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        diffs(i + 1, d_next);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += d[j] * d[j] + d[j] * d_next[j] + d_next[j] * d_next[j];
        angular += (t[i] - t[i + 1]) * s * dth / 3.0;
        std::swap(d, d_next);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += d[j] * d[j];
    angular += t[n - 1] * s * dth / 3.0;
    return radial + angular;
}

double dirichlet_norm_disk(const DiskFunction& u) { return std::sqrt(dirichlet_energy_disk(u)); }

std::size_t sup2star_argmax(const RadialFunction& u) {
    const auto t = u.grid().t();
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double q = std::abs(u[i]) / std::sqrt(t[i]);
        if (q > best_v) {
            best_v = q;
            best = i;
        }
    }
    return best;
}

double sup2star_norm(const RadialFunction& u, Sup2StarConvention convention) {
    const std::size_t i = sup2star_argmax(u);
    const double q = std::abs(u[i]) / std::sqrt(u.grid().t()[i]);
    return convention == Sup2StarConvention::lemma_consistent ? std::sqrt(two_pi) * q : q / std::sqrt(two_pi);
}

namespace {

double weighted_square(const RadialFunction& u, WeightKind w) {
    auto v = rule_values(u);
    for (auto& x : v) x *= x;
    return integrate_rule(u.grid(), v, w);
}

double weighted_square(const DiskFunction& u, WeightKind w) {
    std::vector<double> v(u.values().begin(), u.values().end());
    for (auto& x : v) x *= x;
    return integrate_polar(u.grid(), v, w);
}

}  // namespace

double hardy_origin(const RadialFunction& u) { return weighted_square(u, WeightKind::hardy_origin); }
double hardy_origin(const DiskFunction& u) { return weighted_square(u, WeightKind::hardy_origin); }
double hardy_boundary(const RadialFunction& u) { return weighted_square(u, WeightKind::hardy_boundary); }
double hardy_boundary(const DiskFunction& u) { return weighted_square(u, WeightKind::hardy_boundary); }

double pointwise_bound_margin(const RadialFunction& u) {
    const double e = dirichlet_energy_radial(u);
    const auto t = u.grid().t();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) margin = std::min(margin, e * t[i] - two_pi * u[i] * u[i]);
    return margin;
}

NormReport norm_report(const RadialFunction& u) {
    return {dirichlet_norm_radial(u), sup2star_norm(u), hardy_origin(u), hardy_boundary(u), pointwise_bound_margin(u)};
}

}  // namespace moserlab
