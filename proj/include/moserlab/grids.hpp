#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace moserlab {

/// Measures on the unit disk, given as densities w(r) against Lebesgue area.
///   lebesgue        1
///   hyperbolic      1/(1-r^2)^2
///   hardy_origin    1/(r^2 log^2(1/r))
///   hardy_boundary  1/(1-r)^2
enum class WeightKind { lebesgue, hyperbolic, hardy_origin, hardy_boundary };

enum class Grading { uniform, log_origin, boundary, doubly };

std::string_view to_string(WeightKind w);
std::string_view to_string(Grading g);
WeightKind parse_weight_kind(std::string_view name);
Grading parse_grading(std::string_view name);

/// A radius carried in the three forms the lab needs: r, t = log(1/r) and
/// the boundary gap 1 - r. The gap is stored separately because r rounds to
/// 1 long before 1 - r loses precision.
struct RadialPoint {
    double r;
    double t;
    double gap;
};

RadialPoint radial_point_from_t(double t);

/// Density of the weight with respect to dt on (0, inf), i.e. 2*pi*w(r)*r^2,
/// so that  int_D f w dx = int_0^inf f * weight_density_t dt  for radial f.
double weight_density_t(WeightKind w, const RadialPoint& p);

/// Weighted measure of the disk {|x| < rho}.
double disk_measure(WeightKind w, double rho);

/// Weighted measure of the annulus {a < |x| < b}, evaluated without
/// cancellation for nearby radii.
double annulus_measure(WeightKind w, double a, double b);

struct GridOptions {
    double t_max = 40.0;      ///< deepest node near the origin, r_min = e^{-t_max}
    double gap_min = 1e-12;   ///< smallest 1 - r near the boundary
};

/// One Gauss point of the rule that integrates the t-linear interpolant of
/// nodal data. `left` is the node whose hat function is `phi_left` at the
/// point; `right` is the other node of the cell (-1 at the boundary cell and
/// at the core cell).
struct InterpolantPoint {
    RadialPoint at;
    double weight;  ///< quadrature weight in dt
    int left;
    int right;
    double phi_left;
};

/// Graded mesh of (0,1). Nodes are stored by ascending r, so t is
/// descending; node 0 is the innermost one. Endpoints r = 0 and r = 1 are
/// never nodes: the data is extended by a constant for r < r_0 and linearly
/// in t down to zero on [r_{n-1}, 1).
class RadialGrid {
public:
    RadialGrid(Grading grading, std::vector<double> t_nodes, std::vector<double> jacobian,
               std::vector<double> graded_coordinate, GridOptions options, std::string id);

    std::size_t size() const { return t_.size(); }
    Grading grading() const { return grading_; }
    const GridOptions& options() const { return options_; }
    const std::string& id() const { return id_; }

    std::span<const double> r() const { return r_; }
    std::span<const double> t() const { return t_; }
    std::span<const double> gap() const { return gap_; }
    RadialPoint point(std::size_t i) const { return {r_[i], t_[i], gap_[i]}; }

    /// |dt/dxi| at each node, xi being the graded coordinate in index units.
    std::span<const double> jacobian() const { return jac_; }
    /// Graded coordinate of each node in its natural units (r, t, sigma, or h*xi).
    std::span<const double> graded_coordinate() const { return graded_; }

    /// Trapezoid weights in dt for the composite rule in the graded coordinate.
    std::span<const double> trapezoid_weights() const { return trap_; }

    /// Gauss rule for the piecewise-linear-in-t interpolant, core and
    /// boundary cells included.
    std::span<const InterpolantPoint> interpolant_rule() const { return rule_; }

    /// Index of the cell [t_{i+1}, t_i] containing t, i.e. the largest i with
    /// t_i >= t. Returns -1 when t > t_0 and size()-1 when t < t_{n-1}.
    long locate(double t) const;

private:
    Grading grading_;
    GridOptions options_;
    std::string id_;
    std::vector<double> r_, t_, gap_, jac_, graded_, trap_;
    std::vector<InterpolantPoint> rule_;
};

using RadialGridPtr = std::shared_ptr<const RadialGrid>;

/// Builds a graded radial grid with n >= 16 nodes.
///
/// uniform     r_i = (i+1)/(n+1)
/// log_origin  t equispaced on [t_max/n, t_max]
/// boundary    sigma = log(1/(1-r)) equispaced on [sigma_max/n, sigma_max],
///             sigma_max = log(1/gap_min)
/// doubly      t(xi) = (h/beta) * log(1 + e^{beta*xi}) over integer xi. The
///             map is uniform in t (step h = log 2 / m) away from the boundary
///             and geometric in 1 - r near it. h is chosen so that
///             t = j log 2 lands on a node for every integer j, which puts the
///             corner of the Moser profile m_k on a node when k is a power of 2.
RadialGridPtr build_radial_grid(std::size_t n, Grading grading, GridOptions options = {});

/// Production default: doubly graded, n = 4096, t_max = 40.
RadialGridPtr default_radial_grid();

class PolarGrid {
public:
    PolarGrid(RadialGridPtr radial, std::size_t n_angles);

    const RadialGrid& radial() const { return *radial_; }
    const RadialGridPtr& radial_ptr() const { return radial_; }
    std::size_t n_radial() const { return radial_->size(); }
    std::size_t n_angles() const { return n_angles_; }
    std::size_t size() const { return n_radial() * n_angles_; }
    double angle(std::size_t j) const;
    double angle_step() const;
    std::string id() const;

private:
    RadialGridPtr radial_;
    std::size_t n_angles_;
};

using PolarGridPtr = std::shared_ptr<const PolarGrid>;

PolarGridPtr build_polar_grid(RadialGridPtr radial, std::size_t n_angles);

enum class QuadratureWarning { none, singular_weight_on_ungraded_grid };

struct Integral {
    double value = 0.0;
    QuadratureWarning warning = QuadratureWarning::none;
};

/// Whether the grid is graded toward the end(s) where the weight is singular.
QuadratureWarning check_weight_grid(WeightKind w, Grading g);

/// 2*pi * int_0^1 f(r) w(r) r dr from nodal samples f_i: composite trapezoid
/// in the graded coordinate, a constant-extension core cell on (0, r_0) with
/// the weight integrated exactly, and a one-point boundary cell on (r_{n-1}, 1).
/// Throws std::domain_error on a non-finite sample.
Integral integrate_checked(const RadialGrid& grid, std::span<const double> samples, WeightKind w);
double integrate(const RadialGrid& grid, std::span<const double> samples, WeightKind w);

/// Tensor rule on a polar grid: trapezoid in theta (periodic), then the
/// radial rule above. Samples are row-major, radial index outer.
Integral integrate_polar_checked(const PolarGrid& grid, std::span<const double> samples, WeightKind w);
double integrate_polar(const PolarGrid& grid, std::span<const double> samples, WeightKind w);

/// Values of a grid-dependent quantity along a refinement ladder.
struct RefinementStudy {
    std::vector<std::size_t> sizes;
    std::vector<double> values;
    bool diverging = false;  ///< increments fail to contract under refinement
};

template <class Quantity>
RefinementStudy refinement_study(Quantity&& quantity, Grading grading, std::vector<std::size_t> sizes,
                                 GridOptions options = {}) {
    RefinementStudy study;
    study.sizes = std::move(sizes);
    for (auto n : study.sizes) study.values.push_back(quantity(*build_radial_grid(n, grading, options)));
    std::size_t growing = 0;
    for (std::size_t i = 2; i < study.values.size(); ++i) {
        const double d1 = study.values[i - 1] - study.values[i - 2];
        const double d2 = study.values[i] - study.values[i - 1];
        if (d2 > 0 && d1 > 0 && d2 >= 0.5 * d1) ++growing;
    }
    study.diverging = study.values.size() >= 3 && growing == study.values.size() - 2;
    return study;
}

}  // namespace moserlab
