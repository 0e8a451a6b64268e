#pragma once

#include <optional>
#include <vector>

#include "moserlab/functionals.hpp"

namespace moserlab {

struct OptimizationProblem {
    FunctionalSpec spec;
    double radius = 1.0;  ///< constraint |grad u|_2 <= radius
    RadialFunction init;
};

struct OptimizerSettings {
    std::size_t steps = 400;
    double step_size = 1e-2;       ///< initial length of each step in the energy norm
    std::size_t max_halvings = 30;
};

struct OptimizationTrace {
    std::vector<double> objective;  ///< objective[0] at the projected start, one entry per accepted step
    RadialFunction final_u;
    double final_objective = 0.0;
    bool converged = false;         ///< no improving step left before the step budget ran out
    bool divergent = false;
    double witness_exponent = 0.0;  ///< exponent met when divergence was flagged
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// u / max(1, |grad u| / radius); zero when radius is zero.
RadialFunction project_to_ball(const RadialFunction& u, double radius);

/// Solves K g = grad, K being the matrix of the Dirichlet energy
/// (u^T K u = dirichlet_energy_radial(u)). g is the gradient with respect to
/// the energy inner product.
std::vector<double> energy_riesz_map(const RadialGrid& grid, std::span<const double> grad);

/// Projected gradient ascent over radial functions in the energy ball. Each
/// step moves step_size along the energy-normalized gradient, projects, and
/// halves the step until the objective does not decrease. From a critical
/// start (u = 0) the first direction is the Moser profile m_2.
OptimizationTrace maximize(const OptimizationProblem& problem, const OptimizerSettings& settings = {});

struct ScanRow {
    double p = 0.0;
    std::vector<double> ks;
    std::vector<Evaluation> moser;       ///< TM(p) of m_k per k
    double optimizer_value = 0.0;
    bool optimizer_divergent = false;
    double row_max = 0.0;
    bool divergent = false;
    std::optional<double> divergence_k;  ///< first k at which the flag was raised
    double tail_change = 0.0;            ///< relative change between the last two k
};

/// Rule for "values increase without bound": overflow, a value above
/// divergence_threshold, or three strictly increasing Moser values whose
/// successive log-log slopes in k both exceed 0.1.
constexpr double growth_slope = 0.1;

std::vector<ScanRow> criticality_scan(RadialGridPtr grid, const std::vector<double>& p_values, double radius,
                                      const std::vector<double>& concentration_ks,
                                      const OptimizerSettings& settings = {});

struct OnofriResult {
    double constant = 0.0;
    std::size_t argmax = 0;
    std::vector<double> residuals;       ///< NaN for skipped probes
    std::vector<EvalStatus> status;
    bool divergent = false;
};

/// max over the ensemble of log int (e^u-1-u) dmu_hyp - |grad u|^2/(16 pi).
/// Throws std::domain_error when every probe is empty.
OnofriResult onofri_constant(const std::vector<RadialFunction>& ensemble);

}  // namespace moserlab
