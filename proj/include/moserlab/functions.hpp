#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "moserlab/grids.hpp"

namespace moserlab {

/// Radial function on a RadialGrid. Between nodes the interpolant is linear
/// in t = log(1/r); it is constant (= u_0) inside r_0 and falls linearly in t
/// to zero on [r_{n-1}, 1).
class RadialFunction {
public:
    RadialFunction(RadialGridPtr grid, std::vector<double> values);

    static RadialFunction zero(RadialGridPtr grid);
    static RadialFunction sample(RadialGridPtr grid, const std::function<double(const RadialPoint&)>& f);

    const RadialGrid& grid() const { return *grid_; }
    const RadialGridPtr& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Interpolant at t = log(1/r).
    double at_t(double t) const;
    double at(double r) const;

    RadialFunction scaled(double lambda) const;
    RadialFunction operator+(const RadialFunction& other) const;

private:
    RadialGridPtr grid_;
    std::vector<double> values_;
};

/// Function on a PolarGrid, values row-major with the radial index outer.
/// Interpolation is bilinear in (t, theta), periodic in theta, with the same
/// core and boundary extensions as RadialFunction.
class DiskFunction {
public:
    DiskFunction(PolarGridPtr grid, std::vector<double> values);

    static DiskFunction zero(PolarGridPtr grid);
    static DiskFunction lift(PolarGridPtr grid, const RadialFunction& u);
    /// f(p, theta) with p the radial point of the node.
    static DiskFunction sample(PolarGridPtr grid, const std::function<double(const RadialPoint&, double)>& f);

    const PolarGrid& grid() const { return *grid_; }
    const PolarGridPtr& grid_ptr() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t i, std::size_t j) const { return values_[i * grid_->n_angles() + j]; }

    double at(double t, double theta) const;
    double at(std::complex<double> z) const;

    DiskFunction scaled(double lambda) const;
    DiskFunction operator+(const DiskFunction& other) const;

private:
    PolarGridPtr grid_;
    std::vector<double> values_;
};

/// Interpolant of u at every point of grid.interpolant_rule().
std::vector<double> rule_values(const RadialFunction& u);

/// Sum of weight * density * values over the interpolant rule.
double integrate_rule(const RadialGrid& grid, std::span<const double> point_values, WeightKind w);

/// 2*pi * int |u_t|^2 dt of the interpolant; exact for the representation.
double dirichlet_energy_radial(const RadialFunction& u);
double dirichlet_norm_radial(const RadialFunction& u);

/// int int (u_t^2 + u_theta^2) dt dtheta of the bilinear interpolant. The
/// angular part of the constant core cell is not included.
double dirichlet_energy_disk(const DiskFunction& u);
double dirichlet_norm_disk(const DiskFunction& u);

enum class Sup2StarConvention { lemma_consistent, scaled };

/// lemma_consistent:  max_i sqrt(2 pi) |u_i| / sqrt(t_i)
/// scaled:            max_i |u_i| / sqrt(2 pi t_i)
double sup2star_norm(const RadialFunction& u, Sup2StarConvention convention = Sup2StarConvention::lemma_consistent);

/// Index of the node attaining sup2star_norm.
std::size_t sup2star_argmax(const RadialFunction& u);

double hardy_origin(const RadialFunction& u);
double hardy_origin(const DiskFunction& u);
double hardy_boundary(const RadialFunction& u);
double hardy_boundary(const DiskFunction& u);

/// min_i ( |grad u|^2 t_i - 2 pi u_i^2 ).
double pointwise_bound_margin(const RadialFunction& u);

/// Tolerance granted to grid versions of the pointwise bound.
inline double lemma_slack(double energy) { return 1e-6 * (1.0 + energy); }

struct NormReport {
    double dirichlet = 0.0;
    double sup2star = 0.0;
    double hardy_origin = 0.0;
    double hardy_boundary = 0.0;
    double pointwise_margin = 0.0;
};

NormReport norm_report(const RadialFunction& u);

/// Throws std::domain_error when any value is not finite.
void require_finite(std::span<const double> values, const char* what);

}  // namespace moserlab
