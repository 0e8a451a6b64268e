#include "moserlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "moserlab/parallel.hpp"

namespace moserlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool is_divergent(const Evaluation& ev) {
    return ev.status == EvalStatus::divergent || ev.value > divergence_threshold;
}

}  // namespace

RadialFunction project_to_ball(const RadialFunction& u, double radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("project_to_ball: radius must be >= 0");
    if (radius == 0.0) return RadialFunction::zero(u.grid_ptr());
    const double norm = dirichlet_norm_radial(u);
    if (norm <= radius) return u;
    return u.scaled(radius / norm);
}

std::vector<double> energy_riesz_map(const RadialGrid& grid, std::span<const double> grad) {
    const std::size_t n = grid.size();
    if (grad.size() != n) throw std::invalid_argument("energy_riesz_map: size mismatch");
    const auto t = grid.t();
    // Tridiagonal K: off-diagonal -2pi/dt_i, diagonal sum of neighbours.
    std::vector<double> diag(n, 0.0), off(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double c = two_pi / (t[i] - t[i + 1]);
        off[i] = -c;
        diag[i] += c;
        diag[i + 1] += c;
    }
    diag[n - 1] += two_pi / t[n - 1];

    std::vector<double> c(n), d(n), x(n);
    c[0] = n > 1 ? off[0] / diag[0] : 0.0;
    d[0] = grad[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double den = diag[i] - off[i - 1] * c[i - 1];
        c[i] = i + 1 < n ? off[i] / den : 0.0;
        d[i] = (grad[i] - off[i - 1] * d[i - 1]) / den;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

OptimizationTrace maximize(const OptimizationProblem& problem, const OptimizerSettings& settings) {
    if (!(problem.radius >= 0.0) || !std::isfinite(problem.radius))
        throw std::invalid_argument("maximize: radius must be finite and >= 0");
    if (!(settings.step_size > 0.0)) throw std::invalid_argument("maximize: step size must be > 0");
    const auto& spec = problem.spec;
    const auto grid = problem.init.grid_ptr();

    OptimizationTrace trace{{}, project_to_ball(problem.init, problem.radius), 0.0, false, false, 0.0, 0, 0};
    auto current = evaluate(spec, trace.final_u);
    if (is_divergent(current)) {
        trace.divergent = true;
        trace.witness_exponent = current.max_exponent;
        trace.final_objective = current.value;
        trace.objective.push_back(current.value);
        return trace;
    }
    trace.objective.push_back(current.value);
    if (problem.radius == 0.0) {
        trace.converged = true;
        trace.final_objective = current.value;
        return trace;
    }

    std::optional<RadialFunction> kick;
    for (std::size_t step = 0; step < settings.steps; ++step) {
        const auto& u = trace.final_u;
        const auto grad = gradient(spec, u);
        auto dir = energy_riesz_map(*grid, grad);
        double dot = 0.0;
        for (std::size_t i = 0; i < dir.size(); ++i) dot += dir[i] * grad[i];
        if (!(dot > 0.0) || !std::isfinite(dot)) {
            if (dirichlet_energy_radial(u) != 0.0) {
                trace.converged = true;
                break;
            }
            if (!kick) kick = moser_function(grid, 2.0);
            dir.assign(kick->values().begin(), kick->values().end());
            dot = 1.0;  // m_2 has unit energy
        }
        const double scale = 1.0 / std::sqrt(dot);

        double eta = settings.step_size;
        bool accepted = false;
        for (std::size_t h = 0; h <= settings.max_halvings; ++h, eta *= 0.5) {
            std::vector<double> v(u.values().begin(), u.values().end());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += eta * scale * dir[i];
            auto candidate = project_to_ball(RadialFunction(grid, std::move(v)), problem.radius);
            const auto ev = evaluate(spec, candidate);
            if (is_divergent(ev)) {
                trace.divergent = true;
                trace.witness_exponent = ev.max_exponent;
                trace.final_objective = current.value;
                return trace;
            }
            if (ev.ok() && ev.value >= current.value) {
                trace.final_u = std::move(candidate);
                current = ev;
                trace.objective.push_back(ev.value);
                ++trace.accepted;
                accepted = true;
                break;
            }
            ++trace.rejected;
        }
        if (!accepted) {
            trace.converged = true;
            break;
        }
    }
    trace.final_objective = current.value;
    return trace;
}

std::vector<ScanRow> criticality_scan(RadialGridPtr grid, const std::vector<double>& p_values, double radius,
                                      const std::vector<double>& concentration_ks,
                                      const OptimizerSettings& settings) {
    for (double p : p_values)
        if (!(p > 0.0)) throw std::invalid_argument("criticality_scan: exponents must be > 0");
    std::vector<ScanRow> rows(p_values.size());
    parallel_for(p_values.size(), [&](std::size_t r) {
        ScanRow row;
        row.p = p_values[r];
        row.ks = concentration_ks;
        const auto spec = FunctionalSpec::tm(row.p);
        for (double k : concentration_ks) row.moser.push_back(evaluate(spec, moser_function(grid, k)));

        const auto trace = maximize({spec, radius, RadialFunction::zero(grid)}, settings);
        row.optimizer_value = trace.final_objective;
        row.optimizer_divergent = trace.divergent;

        row.row_max = trace.final_objective;
        for (std::size_t j = 0; j < row.moser.size(); ++j) {
            const auto& ev = row.moser[j];
            row.row_max = std::max(row.row_max, ev.value);
            if (!row.divergence_k && is_divergent(ev)) row.divergence_k = row.ks[j];
            if (!row.divergence_k && j >= 2) {
                const double v0 = row.moser[j - 2].value, v1 = row.moser[j - 1].value, v2 = ev.value;
                const double s1 = std::log(v1 / v0) / std::log(row.ks[j - 1] / row.ks[j - 2]);
                const double s2 = std::log(v2 / v1) / std::log(row.ks[j] / row.ks[j - 1]);
                if (v0 < v1 && v1 < v2 && s1 > growth_slope && s2 > growth_slope) row.divergence_k = row.ks[j];
            }
        }
        row.divergent = row.divergence_k.has_value() || row.optimizer_divergent;
        if (row.moser.size() >= 2) {
            const double a = row.moser[row.moser.size() - 2].value, b = row.moser.back().value;
            row.tail_change = std::abs(b - a) / std::abs(a);
        }
        rows[r] = std::move(row);
    });
    return rows;
}

OnofriResult onofri_constant(const std::vector<RadialFunction>& ensemble) {
    if (ensemble.empty()) throw std::invalid_argument("onofri_constant: empty ensemble");
    OnofriResult out;
    out.residuals.assign(ensemble.size(), std::numeric_limits<double>::quiet_NaN());
    out.status.assign(ensemble.size(), EvalStatus::ok);
    const auto spec = FunctionalSpec::onofri();
    parallel_for(ensemble.size(), [&](std::size_t i) {
        const auto ev = evaluate(spec, ensemble[i]);
        out.status[i] = ev.status;
        if (ev.ok()) out.residuals[i] = ev.value - dirichlet_energy_radial(ensemble[i]) / (16.0 * std::numbers::pi);
    });
    bool any = false;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        if (out.status[i] == EvalStatus::divergent) out.divergent = true;
        if (out.status[i] != EvalStatus::ok) continue;
        if (!any || out.residuals[i] > out.constant) {
            out.constant = out.residuals[i];
            out.argmax = i;
            any = true;
        }
    }
    if (!any) throw std::domain_error("onofri_constant: all probes empty-integrand");
    return out;
}

}  // namespace moserlab
