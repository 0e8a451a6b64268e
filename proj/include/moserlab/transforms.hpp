#pragma once

#include <complex>
#include <random>

#include "moserlab/functions.hpp"

namespace moserlab {

struct DilationParam {
    double s;
    explicit DilationParam(double s);
};

struct MobiusParam {
    std::complex<double> zeta;
    explicit MobiusParam(std::complex<double> zeta);
};

/// eta_zeta(z) = (z - zeta) / (1 - conj(zeta) z)
std::complex<double> mobius_map(std::complex<double> zeta, std::complex<double> z);

/// h_s u(r) = s^{-1/2} u(r^s), i.e. t -> s^{-1/2} u(s t), resampled on u's grid.
RadialFunction dilate(const RadialFunction& u, DilationParam s);

/// z -> u(eta_zeta(z)) on `target` (u's own grid when omitted).
DiskFunction mobius_pullback(const DiskFunction& u, MobiusParam zeta);
DiskFunction mobius_pullback(const DiskFunction& u, MobiusParam zeta, PolarGridPtr target);

/// m_k(r) = min(log(1/r), log k) / sqrt(2 pi log k), unit Dirichlet energy.
/// Requires k > 1 and log k inside the node range.
RadialFunction moser_function(RadialGridPtr grid, double k);
double moser_plateau(double k);

/// Piecewise linear in t: 0 outside (t_lo, t_hi), `peak` at t_peak.
RadialFunction tent_function(RadialGridPtr grid, double t_lo, double t_peak, double t_hi, double peak);

/// Bumps supported in |z - c| < R, with q = |z - c|^2 / R^2:
///   smooth      A exp(1 - 1/(1 - q))
///   polynomial  A (1 - q)^3
enum class BumpShape { smooth, polynomial };

double bump_value(std::complex<double> z, std::complex<double> center, double radius, double amplitude,
                  BumpShape shape = BumpShape::smooth);
RadialFunction radial_bump(RadialGridPtr grid, double radius, double amplitude, BumpShape shape = BumpShape::smooth);
DiskFunction disk_bump(PolarGridPtr grid, std::complex<double> center, double radius, double amplitude,
                       BumpShape shape = BumpShape::smooth);

/// Random function, piecewise linear in t through 2..12 knots placed
/// log-uniformly in t in [1e-3, 30] with values in [-1, 1]; zero at r = 1.
RadialFunction random_radial_function(RadialGridPtr grid, std::mt19937_64& rng);

/// u + h_{1/k} v. v must vanish at the first and last node, and its
/// transported support must stay on the grid.
RadialFunction dilation_sequence(const RadialFunction& u, const RadialFunction& v, long k);

struct MobiusSequenceTerm {
    DiskFunction value;
    std::complex<double> zeta;
    bool disjoint;      ///< max |u * (w o eta)| < 1e-12 over nodes
    double delta;       ///< w vanishes outside |z| < 1 - delta
};

/// u + w o eta_{zeta_k} with zeta_k = 1 - 1/k.
MobiusSequenceTerm mobius_sequence(const DiskFunction& u, const DiskFunction& w, long k);

/// Largest radius at which |u| >= tol on some node, expressed as 1 - r.
double support_gap(const DiskFunction& u, double tol = 1e-12);

/// Symmetric decreasing rearrangement about the origin with respect to the
/// Lebesgue or hyperbolic measure. u must be nonnegative.
RadialFunction rearrange_decreasing(const DiskFunction& u, WeightKind measure);

/// Radial bounds of the rearrangement cells: b_0 = 0 < b_1 < ... < b_n < 1,
/// node i sitting in (b_i, b_{i+1}).
std::vector<double> cell_bounds(const RadialGrid& grid);

}  // namespace moserlab
