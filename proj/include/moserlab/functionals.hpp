#pragma once

#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "moserlab/functions.hpp"
#include "moserlab/transforms.hpp"

namespace moserlab {

inline constexpr double exponent_cap = 700.0;
inline constexpr double divergence_threshold = 1e12;

/// Integrand F(r, u) = w(r) * g(r, u) with w one of the four weights.
struct GenericF {
    std::string name;
    WeightKind weight = WeightKind::lebesgue;
    std::function<double(const RadialPoint&, double)> g;
    /// dg/du; central differences are used when empty.
    std::function<double(const RadialPoint&, double)> dg;
};

enum class FunctionalKind { tm, wtm, onofri_lhs, beckner_lhs, generic };

/// tm           int e^{p u^2} dx
/// wtm          int (e^{p u^2} - 1) / (1 - |x|^2)^2 dx
/// onofri_lhs   log int (e^u - 1 - u) / (1 - |x|^2)^2 dx,   u >= 0
/// beckner_lhs  log A + 1/A,  A = (1/pi) int e^u dx,        u >= 0
/// generic      int w(|x|) g(|x|, u) dx
struct FunctionalSpec {
    FunctionalKind kind = FunctionalKind::tm;
    double p = 4.0 * std::numbers::pi;
    GenericF F;

    static FunctionalSpec tm(double p = 4.0 * std::numbers::pi);
    static FunctionalSpec wtm(double p = 4.0 * std::numbers::pi);
    static FunctionalSpec onofri();
    static FunctionalSpec beckner();
    static FunctionalSpec generic(GenericF F);

    std::string name() const;
};

enum class EvalStatus { ok, divergent, empty_integrand };
std::string_view to_string(EvalStatus s);

struct Evaluation {
    double value = 0.0;
    EvalStatus status = EvalStatus::ok;
    double max_exponent = 0.0;  ///< largest exponent met at a node (p u^2, or u)

    bool ok() const { return status == EvalStatus::ok; }
};

/// Radial functions are integrated through the interpolant rule of the grid,
/// disk functions through the polar trapezoid rule. Exponents above
/// exponent_cap give status divergent with value +inf. Throws
/// std::invalid_argument for negative u in the Onofri and Beckner forms.
Evaluation evaluate(const FunctionalSpec& spec, const RadialFunction& u);
Evaluation evaluate(const FunctionalSpec& spec, const DiskFunction& u);

/// Gradient of the radial evaluation with respect to the nodal values.
/// Throws std::domain_error when the evaluation is not ok.
std::vector<double> gradient(const FunctionalSpec& spec, const RadialFunction& u);

/// Builtin integrands:
///   zero, lebesgue-square, hardy-origin-integrand, hardy-boundary-integrand,
///   hyperbolic-square, hyperbolic-exp, literal-dinv1, weighted-dinv-quartic,
///   poly:<weight>:c0,c1,...   (sum c_j u^j against the named weight)
GenericF builtin_integrand(std::string_view name);
std::vector<std::string> builtin_integrand_names();

/// Parses "tm", "wtm", "onofri", "beckner" or a builtin integrand name.
FunctionalSpec parse_functional(std::string_view name, double p = 4.0 * std::numbers::pi);

struct NamedRadial {
    std::string id;
    RadialFunction u;
};

struct NamedDisk {
    std::string id;
    DiskFunction u;
};

enum class InvarianceFamily { mobius, dilation };
std::string_view to_string(InvarianceFamily f);

struct InvarianceProbe {
    std::string function_id;
    std::string parameter;
    double defect = 0.0;
    EvalStatus status = EvalStatus::ok;
};

struct InvarianceReport {
    InvarianceFamily family = InvarianceFamily::mobius;
    std::vector<InvarianceProbe> probes;
    double max_defect = 0.0;
    std::string grid_id;
};

std::string format_zeta(std::complex<double> z);

/// |J(u o eta_zeta) - J(u)| for every (u, zeta), in testset-major order.
InvarianceReport mobius_defect(const FunctionalSpec& spec, const std::vector<NamedDisk>& testset,
                               const std::vector<std::complex<double>>& zetas);

/// |J(h_s u) - J(u)| for every (u, s), in testset-major order.
InvarianceReport dilation_defect(const FunctionalSpec& spec, const std::vector<NamedRadial>& testset,
                                 const std::vector<double>& svals);

struct InvarianceProbeSet {
    std::vector<NamedDisk> disk;
    std::vector<std::complex<double>> zetas;
    std::vector<NamedRadial> radial;
    std::vector<double> svals;
};

/// Bumps {radius 1/2 at 0, radius 1/4 at 0.2i} with zetas {0.3, 0.5i, 0.6+0.2i};
/// Moser profiles {m_8, m_64} with s in {1/3, 1/2, 2, 3}; all scaled by amplitude.
InvarianceProbeSet default_invariance_probes(PolarGridPtr polar, double amplitude = 1.0);

struct JointInvarianceRow {
    std::string family;
    double mobius_defect = 0.0;
    double dilation_defect = 0.0;
    bool is_zero = false;
};

/// One row per candidate integrand. The numerical content of "both defects
/// vanish only for F = 0" is that every non-zero row has a defect above the
/// threshold in at least one column.
std::vector<JointInvarianceRow> joint_invariance_scan(const std::vector<GenericF>& families,
                                                      const InvarianceProbeSet& probes);

bool corollary_holds(const std::vector<JointInvarianceRow>& rows, double threshold);

}  // namespace moserlab
