#include "moserlab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace moserlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double support_tol = 1e-12;

}  // namespace

DilationParam::DilationParam(double s_) : s(s_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("dilation parameter must be finite and > 0");
}

MobiusParam::MobiusParam(std::complex<double> z) : zeta(z) {
    if (!(std::abs(z) < 1.0)) throw std::invalid_argument("mobius parameter must satisfy |zeta| < 1");
}

std::complex<double> mobius_map(std::complex<double> zeta, std::complex<double> z) {
    return (z - zeta) / (1.0 - std::conj(zeta) * z);
}

RadialFunction dilate(const RadialFunction& u, DilationParam p) {
    if (p.s == 1.0) return u;
    const auto t = u.grid().t();
    const double f = 1.0 / std::sqrt(p.s);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f * u.at_t(p.s * t[i]);
    return {u.grid_ptr(), std::move(v)};
}

DiskFunction mobius_pullback(const DiskFunction& u, MobiusParam zeta) {
    return mobius_pullback(u, zeta, u.grid_ptr());
}

DiskFunction mobius_pullback(const DiskFunction& u, MobiusParam p, PolarGridPtr target) {
    if (!target) throw std::invalid_argument("mobius_pullback: null target grid");
    if (p.zeta == 0.0 && target == u.grid_ptr()) return u;
    const auto zeta = p.zeta;
    const double zeta_gap = (1.0 - std::abs(zeta)) * (1.0 + std::abs(zeta));
    const auto& rg = target->radial();
    const std::size_t n = target->n_radial(), m = target->n_angles();
    std::vector<double> v(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pt = rg.point(i);
        const double z_gap = pt.gap * (1.0 + pt.r);
        for (std::size_t j = 0; j < m; ++j) {
            const auto z = std::polar(pt.r, target->angle(j));
            const auto den = 1.0 - std::conj(zeta) * z;
            const auto w = (z - zeta) / den;
            const double aw = std::abs(w);
            double tw;
            if (aw == 0.0) {
                tw = std::numeric_limits<double>::infinity();
            } else if (aw < 0.5) {
                tw = -std::log(aw);
            } else {
                const double q = zeta_gap * z_gap / std::norm(den);
                tw = -0.5 * std::log1p(-q);
            }
            v[i * m + j] = u.at(tw, std::arg(w));
        }
    }
    return {std::move(target), std::move(v)};
}

double moser_plateau(double k) { return std::sqrt(std::log(k) / two_pi); }

RadialFunction moser_function(RadialGridPtr grid, double k) {
    if (!(k > 1.0) || !std::isfinite(k)) throw std::invalid_argument("moser_function: k must be > 1");
    const double L = std::log(k);
    if (L > grid->t().front() || L < grid->t().back())
        throw std::invalid_argument("moser_function: log k outside the grid's t range");
    const double c = 1.0 / std::sqrt(two_pi * L);
    return RadialFunction::sample(std::move(grid), [&](const RadialPoint& p) { return std::min(p.t, L) * c; });
}

RadialFunction tent_function(RadialGridPtr grid, double t_lo, double t_peak, double t_hi, double peak) {
    if (!(0.0 < t_lo && t_lo < t_peak && t_peak < t_hi)) throw std::invalid_argument("tent_function: need 0 < t_lo < t_peak < t_hi");
    return RadialFunction::sample(std::move(grid), [&](const RadialPoint& p) {
        if (p.t <= t_lo || p.t >= t_hi) return 0.0;
        return p.t <= t_peak ? peak * (p.t - t_lo) / (t_peak - t_lo) : peak * (t_hi - p.t) / (t_hi - t_peak);
    });
}

double bump_value(std::complex<double> z, std::complex<double> center, double radius, double amplitude,
                  BumpShape shape) {
    const double q = std::norm(z - center) / (radius * radius);
    if (q >= 1.0) return 0.0;
    if (shape == BumpShape::polynomial) {
        const double d = 1.0 - q;
        return amplitude * d * d * d;
    }
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - q));
}

RadialFunction radial_bump(RadialGridPtr grid, double radius, double amplitude, BumpShape shape) {
    if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("radial_bump: radius must lie in (0,1)");
    return RadialFunction::sample(
        std::move(grid), [&](const RadialPoint& p) { return bump_value(p.r, 0.0, radius, amplitude, shape); });
}

DiskFunction disk_bump(PolarGridPtr grid, std::complex<double> center, double radius, double amplitude,
                       BumpShape shape) {
    if (!(radius > 0.0) || !(std::abs(center) + radius <= 1.0))
        throw std::invalid_argument("disk_bump: support must lie in the closed disk");
    return DiskFunction::sample(std::move(grid), [&](const RadialPoint& p, double th) {
        return bump_value(std::polar(p.r, th), center, radius, amplitude, shape);
    });
}

RadialFunction random_radial_function(RadialGridPtr grid, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(2, 12);
    std::uniform_real_distribution<double> log_t(std::log(1e-3), std::log(30.0));
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    const int m = count(rng);
    std::vector<double> kt{0.0}, kv{0.0};
    std::vector<double> ts(static_cast<std::size_t>(m));
    for (auto& x : ts) x = std::exp(log_t(rng));
    std::sort(ts.begin(), ts.end());
    for (double x : ts) {
        if (x <= kt.back()) continue;
        kt.push_back(x);
        kv.push_back(value(rng));
    }
    return RadialFunction::sample(std::move(grid), [&](const RadialPoint& p) {
        if (p.t >= kt.back()) return kv.back();
        const auto j = static_cast<std::size_t>(std::upper_bound(kt.begin(), kt.end(), p.t) - kt.begin());
        const double x = (p.t - kt[j - 1]) / (kt[j] - kt[j - 1]);
        return (1.0 - x) * kv[j - 1] + x * kv[j];
    });
}

RadialFunction dilation_sequence(const RadialFunction& u, const RadialFunction& v, long k) {
    if (k < 1) throw std::invalid_argument("dilation_sequence: k must be >= 1");
    if (u.grid_ptr() != v.grid_ptr()) throw std::invalid_argument("dilation_sequence: u and v on different grids");
    const std::size_t n = v.size();
    std::size_t lo = n, hi = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(v[i]) >= support_tol) {
            lo = std::min(lo, i);
            hi = i;
        }
    if (lo == n) return u;
    if (lo == 0 || hi + 1 >= n)
        throw std::invalid_argument("dilation_sequence: v is not supported away from r = 0 and r = 1");
    const auto t = v.grid().t();
    if (static_cast<double>(k) * t[lo - 1] > t.front())
        throw std::invalid_argument("dilation_sequence: transported support leaves the grid for k = " + std::to_string(k));
    return u + dilate(v, DilationParam(1.0 / static_cast<double>(k)));
}

double support_gap(const DiskFunction& u, double tol) {
    const auto& rg = u.grid().radial();
    const std::size_t n = rg.size(), m = u.grid().n_angles();
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = 0; j < m; ++j)
            if (std::abs(u.value(i, j)) >= tol) return i + 1 < n ? rg.gap()[i + 1] : 0.0;
    return 1.0;
}

MobiusSequenceTerm mobius_sequence(const DiskFunction& u, const DiskFunction& w, long k) {
    if (k < 1) throw std::invalid_argument("mobius_sequence: k must be >= 1");
    if (u.grid_ptr() != w.grid_ptr()) throw std::invalid_argument("mobius_sequence: u and w on different grids");
    const double delta = support_gap(w);
    if (!(delta > 0.0)) throw std::invalid_argument("mobius_sequence: w is not compactly supported in the disk");
    const std::complex<double> zeta = 1.0 - 1.0 / static_cast<double>(k);
    const auto moved = mobius_pullback(w, MobiusParam(zeta));
    double overlap = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i)
        overlap = std::max(overlap, std::abs(u.values()[i] * moved.values()[i]));
    return {u + moved, zeta, overlap < support_tol, delta};
}

std::vector<double> cell_bounds(const RadialGrid& grid) {
    const auto r = grid.r();
    const std::size_t n = grid.size();
    std::vector<double> b(n + 1);
    b[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) b[i] = std::sqrt(r[i - 1] * r[i]);
    b[n] = 1.0 - 0.5 * grid.gap()[n - 1];
    return b;
}

RadialFunction rearrange_decreasing(const DiskFunction& u, WeightKind measure) {
    if (measure != WeightKind::lebesgue && measure != WeightKind::hyperbolic)
        throw std::invalid_argument("rearrange_decreasing: measure must be lebesgue or hyperbolic");
    const auto vals = u.values();
    for (double x : vals)
        if (x < 0.0) throw std::invalid_argument("rearrange_decreasing: samples must be nonnegative");
    const auto& rg = u.grid().radial();
    const std::size_t n = rg.size(), m = u.grid().n_angles();
    const auto b = cell_bounds(rg);
    std::vector<double> ring(n);
    for (std::size_t i = 0; i < n; ++i) ring[i] = annulus_measure(measure, b[i], b[i + 1]) / static_cast<double>(m);

    // Cells are split into sub-cells in angle, valued by linear interpolation along the ring.
    constexpr std::size_t sub = 8;
    std::vector<double> sample(vals.size() * sub);
    std::vector<std::size_t> ring_of(sample.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double here = vals[i * m + j];
            for (std::size_t k = 0; k < sub; ++k) {
                const double off = (static_cast<double>(k) + 0.5) / sub - 0.5;
                const std::size_t nb = off < 0 ? (j + m - 1) % m : (j + 1) % m;
                const std::size_t idx = (i * m + j) * sub + k;
                sample[idx] = here + std::abs(off) * (vals[i * m + nb] - here);
                ring_of[idx] = i;
            }
        }
    std::vector<std::size_t> order(sample.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return sample[a] > sample[c]; });

    // Each sorted sub-cell gets an anchor in cumulative measure at the relative
    // position of its own node inside its ring; the profile interpolates between anchors.
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = disk_measure(measure, b[i]);
        theta[i] = (disk_measure(measure, rg.r()[i]) - lo) / (disk_measure(measure, b[i + 1]) - lo);
    }
    std::vector<double> anchor(order.size()), value(order.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t ri = ring_of[order[k]];
        const double w = ring[ri] / sub;
        anchor[k] = acc + w * theta[ri];
        value[k] = sample[order[k]];
        acc += w;
    }

    std::vector<double> out(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = disk_measure(measure, rg.r()[i]);
        while (pos + 1 < anchor.size() && anchor[pos + 1] <= target) ++pos;
        if (target <= anchor[0]) {
            out[i] = value[0];
        } else if (pos + 1 >= anchor.size()) {
            out[i] = value.back();
        } else {
            const double w = (target - anchor[pos]) / (anchor[pos + 1] - anchor[pos]);
            out[i] = value[pos] + w * (value[pos + 1] - value[pos]);
        }
    }
    return {u.grid().radial_ptr(), std::move(out)};
}

}  // namespace moserlab
