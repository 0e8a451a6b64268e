#include "moserlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "moserlab/parallel.hpp"

namespace moserlab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// e^u - 1 - u without cancellation for small u.
double exp_remainder(double u) {
    if (std::abs(u) < 1e-3) return u * u * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0)));
    return std::expm1(u) - u;
}

struct Integrand {
    WeightKind weight;
    std::function<double(const RadialPoint&, double)> g;
    std::function<double(const RadialPoint&, double)> dg;
};

Integrand integrand_of(const FunctionalSpec& spec) {
    const double p = spec.p;
    switch (spec.kind) {
        case FunctionalKind::tm:
            return {WeightKind::lebesgue, [p](const RadialPoint&, double u) { return std::exp(p * u * u); },
                    [p](const RadialPoint&, double u) { return 2.0 * p * u * std::exp(p * u * u); }};
        case FunctionalKind::wtm:
            return {WeightKind::hyperbolic, [p](const RadialPoint&, double u) { return std::expm1(p * u * u); },
                    [p](const RadialPoint&, double u) { return 2.0 * p * u * std::exp(p * u * u); }};
        case FunctionalKind::onofri_lhs:
            return {WeightKind::hyperbolic, [](const RadialPoint&, double u) { return exp_remainder(u); },
                    [](const RadialPoint&, double u) { return std::expm1(u); }};
        case FunctionalKind::beckner_lhs:
            return {WeightKind::lebesgue, [](const RadialPoint&, double u) { return std::exp(u); },
                    [](const RadialPoint&, double u) { return std::exp(u); }};
        case FunctionalKind::generic: {
            if (!spec.F.g) throw std::invalid_argument("generic functional without integrand");
            auto dg = spec.F.dg;
            if (!dg) {
                dg = [g = spec.F.g](const RadialPoint& at, double u) {
                    const double h = 1e-6 * std::max(1.0, std::abs(u));
                    return (g(at, u + h) - g(at, u - h)) / (2.0 * h);
                };
            }
            return {spec.F.weight, spec.F.g, dg};
        }
    }
    throw std::logic_error("unknown functional kind");
}

void require_nonnegative(const FunctionalSpec& spec, std::span<const double> values) {
    if (spec.kind != FunctionalKind::onofri_lhs && spec.kind != FunctionalKind::beckner_lhs) return;
    for (double v : values)
        if (v < 0.0) throw std::invalid_argument(spec.name() + " requires u >= 0");
}

double max_exponent(const FunctionalSpec& spec, std::span<const double> values) {
    double e = 0.0;
    switch (spec.kind) {
        case FunctionalKind::tm:
        case FunctionalKind::wtm:
            for (double v : values) e = std::max(e, spec.p * v * v);
            break;
        case FunctionalKind::onofri_lhs:
        case FunctionalKind::beckner_lhs:
            for (double v : values) e = std::max(e, v);
            break;
        case FunctionalKind::generic:
            break;
    }
    return e;
}

Evaluation finish(const FunctionalSpec& spec, double integral, double exponent) {
    Evaluation ev{integral, EvalStatus::ok, exponent};
    if (!std::isfinite(integral)) return {inf, EvalStatus::divergent, exponent};
    if (spec.kind == FunctionalKind::onofri_lhs) {
        if (integral <= 0.0) return {-inf, EvalStatus::empty_integrand, exponent};
        ev.value = std::log(integral);
    } else if (spec.kind == FunctionalKind::beckner_lhs) {
        const double a = integral / pi;
        ev.value = std::log(a) + 1.0 / a;
    }
    return ev;
}

}  // namespace

FunctionalSpec FunctionalSpec::tm(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be finite and > 0");
    return {FunctionalKind::tm, p, {}};
}

FunctionalSpec FunctionalSpec::wtm(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be finite and > 0");
    return {FunctionalKind::wtm, p, {}};
}

FunctionalSpec FunctionalSpec::onofri() { return {FunctionalKind::onofri_lhs, 4.0 * pi, {}}; }
FunctionalSpec FunctionalSpec::beckner() { return {FunctionalKind::beckner_lhs, 4.0 * pi, {}}; }

FunctionalSpec FunctionalSpec::generic(GenericF F) {
    if (!F.g) throw std::invalid_argument("generic functional without integrand");
    return {FunctionalKind::generic, 4.0 * pi, std::move(F)};
}

std::string FunctionalSpec::name() const {
    char buf[64];
    switch (kind) {
        case FunctionalKind::tm: std::snprintf(buf, sizeof buf, "tm(p=%.17g)", p); return buf;
        case FunctionalKind::wtm: std::snprintf(buf, sizeof buf, "wtm(p=%.17g)", p); return buf;
        case FunctionalKind::onofri_lhs: return "onofri";
        case FunctionalKind::beckner_lhs: return "beckner";
        case FunctionalKind::generic: return "generic:" + F.name;
    }
    return "?";
}

std::string_view to_string(EvalStatus s) {
    switch (s) {
        case EvalStatus::ok: return "ok";
        case EvalStatus::divergent: return "divergent";
        case EvalStatus::empty_integrand: return "empty-integrand";
    }
    return "?";
}

Evaluation evaluate(const FunctionalSpec& spec, const RadialFunction& u) {
    require_nonnegative(spec, u.values());
    const double e = max_exponent(spec, u.values());
    if (e > exponent_cap) return {inf, EvalStatus::divergent, e};
    const auto in = integrand_of(spec);
    const auto& grid = u.grid();
    const auto rule = grid.interpolant_rule();
    const auto vals = rule_values(u);
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
        sum += rule[q].weight * weight_density_t(in.weight, rule[q].at) * in.g(rule[q].at, vals[q]);
    return finish(spec, sum, e);
}

Evaluation evaluate(const FunctionalSpec& spec, const DiskFunction& u) {
    require_nonnegative(spec, u.values());
    const double e = max_exponent(spec, u.values());
    if (e > exponent_cap) return {inf, EvalStatus::divergent, e};
    const auto in = integrand_of(spec);
    const auto& g = u.grid();
    const std::size_t n = g.n_radial(), m = g.n_angles();
    std::vector<double> f(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = g.radial().point(i);
        for (std::size_t j = 0; j < m; ++j) f[i * m + j] = in.g(p, u.value(i, j));
    }
    return finish(spec, integrate_polar(g, f, in.weight), e);
}

std::vector<double> gradient(const FunctionalSpec& spec, const RadialFunction& u) {
    const auto ev = evaluate(spec, u);
    if (!ev.ok()) throw std::domain_error("gradient: functional is " + std::string(to_string(ev.status)));
    const auto in = integrand_of(spec);
    const auto rule = u.grid().interpolant_rule();
    const auto vals = rule_values(u);
    std::vector<double> grad(u.size(), 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& pt = rule[q];
        const double c = pt.weight * weight_density_t(in.weight, pt.at) * in.dg(pt.at, vals[q]);
        grad[static_cast<std::size_t>(pt.left)] += c * pt.phi_left;
        if (pt.right >= 0) grad[static_cast<std::size_t>(pt.right)] += c * (1.0 - pt.phi_left);
    }
    double factor = 1.0;
    if (spec.kind == FunctionalKind::onofri_lhs) {
        factor = 1.0 / std::exp(ev.value);
    } else if (spec.kind == FunctionalKind::beckner_lhs) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q)
            sum += rule[q].weight * weight_density_t(WeightKind::lebesgue, rule[q].at) * std::exp(vals[q]);
        const double a = sum / pi;
        factor = (1.0 / a - 1.0 / (a * a)) / pi;
    }
    if (factor != 1.0)
        for (auto& x : grad) x *= factor;
    return grad;
}

namespace {

GenericF square_against(std::string name, WeightKind w) {
    return {std::move(name), w, [](const RadialPoint&, double u) { return u * u; },
            [](const RadialPoint&, double u) { return 2.0 * u; }};
}

GenericF polynomial(std::string_view spec) {
    // poly:<weight>:c0,c1,...
    const auto rest = spec.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("poly integrand needs 'poly:<weight>:c0,c1,...'");
    const WeightKind w = parse_weight_kind(rest.substr(0, colon));
    std::vector<double> c;
    std::stringstream ss{std::string(rest.substr(colon + 1))};
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.empty() || !std::isfinite(v))
            throw std::invalid_argument("poly integrand: bad coefficient '" + item + "'");
        c.push_back(v);
    }
    if (c.empty()) throw std::invalid_argument("poly integrand: no coefficients");
    auto g = [c](const RadialPoint&, double u) {
        double s = 0.0;
        for (std::size_t j = c.size(); j-- > 0;) s = s * u + c[j];
        return s;
    };
    auto dg = [c](const RadialPoint&, double u) {
        double s = 0.0;
        for (std::size_t j = c.size(); j-- > 1;) s = s * u + static_cast<double>(j) * c[j];
        return s;
    };
    return {std::string(spec), w, g, dg};
}

}  // namespace

GenericF builtin_integrand(std::string_view name) {
    if (name == "zero")
        return {"zero", WeightKind::lebesgue, [](const RadialPoint&, double) { return 0.0; },
                [](const RadialPoint&, double) { return 0.0; }};
    if (name == "lebesgue-square") return square_against("lebesgue-square", WeightKind::lebesgue);
    if (name == "hardy-origin-integrand") return square_against("hardy-origin-integrand", WeightKind::hardy_origin);
    if (name == "hardy-boundary-integrand")
        return square_against("hardy-boundary-integrand", WeightKind::hardy_boundary);
    if (name == "hyperbolic-square") return square_against("hyperbolic-square", WeightKind::hyperbolic);
    if (name == "hyperbolic-exp")
        return {"hyperbolic-exp", WeightKind::hyperbolic,
                [](const RadialPoint&, double u) { return std::expm1(std::min(u * u, 10.0)); }, {}};
    // H(u / sqrt(log 1/r)) with H(x) = x^2 against Lebesgue measure.
    if (name == "literal-dinv1")
        return {"literal-dinv1", WeightKind::lebesgue, [](const RadialPoint& p, double u) { return u * u / p.t; },
                [](const RadialPoint& p, double u) { return 2.0 * u / p.t; }};
    // (r^2 log 1/r)^{-1} phi(u / sqrt(log 1/r)) with phi(x) = x^4.
    if (name == "weighted-dinv-quartic")
        return {"weighted-dinv-quartic", WeightKind::hardy_origin,
                [](const RadialPoint& p, double u) { return u * u * u * u / p.t; },
                [](const RadialPoint& p, double u) { return 4.0 * u * u * u / p.t; }};
    if (name.starts_with("poly:")) return polynomial(name);
    throw std::invalid_argument("unknown integrand '" + std::string(name) + "'");
}

std::vector<std::string> builtin_integrand_names() {
    return {"zero",           "lebesgue-square",   "hardy-origin-integrand", "hardy-boundary-integrand",
            "hyperbolic-square", "hyperbolic-exp", "literal-dinv1",          "weighted-dinv-quartic"};
}

FunctionalSpec parse_functional(std::string_view name, double p) {
    if (name == "tm") return FunctionalSpec::tm(p);
    if (name == "wtm") return FunctionalSpec::wtm(p);
    if (name == "onofri") return FunctionalSpec::onofri();
    if (name == "beckner") return FunctionalSpec::beckner();
    return FunctionalSpec::generic(builtin_integrand(name));
}

std::string_view to_string(InvarianceFamily f) { return f == InvarianceFamily::mobius ? "mobius" : "dilation"; }

std::string format_zeta(std::complex<double> z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

namespace {

InvarianceProbe defect_probe(const Evaluation& before, const Evaluation& after, std::string id, std::string param) {
    InvarianceProbe probe{std::move(id), std::move(param), 0.0, EvalStatus::ok};
    if (!before.ok() || !after.ok()) {
        probe.status = before.ok() ? after.status : before.status;
        probe.defect = (before.status == after.status && before.status == EvalStatus::empty_integrand) ? 0.0 : inf;
        if (probe.defect == 0.0) probe.status = EvalStatus::ok;
        return probe;
    }
    probe.defect = std::abs(after.value - before.value);
    return probe;
}

void finalize(InvarianceReport& report) {
    report.max_defect = 0.0;
    for (const auto& p : report.probes) report.max_defect = std::max(report.max_defect, p.defect);
}

}  // namespace

InvarianceReport mobius_defect(const FunctionalSpec& spec, const std::vector<NamedDisk>& testset,
                               const std::vector<std::complex<double>>& zetas) {
    InvarianceReport report;
    report.family = InvarianceFamily::mobius;
    if (!testset.empty()) report.grid_id = testset.front().u.grid().id();
    std::vector<Evaluation> base(testset.size());
    parallel_for(testset.size(), [&](std::size_t i) { base[i] = evaluate(spec, testset[i].u); });
    report.probes.resize(testset.size() * zetas.size());
    parallel_for(report.probes.size(), [&](std::size_t q) {
        const auto& f = testset[q / zetas.size()];
        const auto z = zetas[q % zetas.size()];
        const auto moved = evaluate(spec, mobius_pullback(f.u, MobiusParam(z)));
        report.probes[q] = defect_probe(base[q / zetas.size()], moved, f.id, format_zeta(z));
    });
    finalize(report);
    return report;
}

InvarianceReport dilation_defect(const FunctionalSpec& spec, const std::vector<NamedRadial>& testset,
                                 const std::vector<double>& svals) {
    InvarianceReport report;
    report.family = InvarianceFamily::dilation;
    if (!testset.empty()) report.grid_id = testset.front().u.grid().id();
    std::vector<Evaluation> base(testset.size());
    parallel_for(testset.size(), [&](std::size_t i) { base[i] = evaluate(spec, testset[i].u); });
    report.probes.resize(testset.size() * svals.size());
    parallel_for(report.probes.size(), [&](std::size_t q) {
        const auto& f = testset[q / svals.size()];
        const double s = svals[q % svals.size()];
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", s);
        const auto moved = evaluate(spec, dilate(f.u, DilationParam(s)));
        report.probes[q] = defect_probe(base[q / svals.size()], moved, f.id, buf);
    });
    finalize(report);
    return report;
}

InvarianceProbeSet default_invariance_probes(PolarGridPtr polar, double amplitude) {
    InvarianceProbeSet set;
    const auto radial = polar->radial_ptr();
    set.disk.push_back({"bump(0,1/2)", disk_bump(polar, 0.0, 0.5, amplitude)});
    set.disk.push_back({"bump(0.2i,1/4)", disk_bump(polar, {0.0, 0.2}, 0.25, amplitude)});
    set.zetas = {{0.3, 0.0}, {0.0, 0.5}, {0.6, 0.2}};
    set.radial.push_back({"m_8", moser_function(radial, 8.0).scaled(amplitude)});
    set.radial.push_back({"m_64", moser_function(radial, 64.0).scaled(amplitude)});
    set.svals = {1.0 / 3.0, 0.5, 2.0, 3.0};
    return set;
}

std::vector<JointInvarianceRow> joint_invariance_scan(const std::vector<GenericF>& families,
                                                      const InvarianceProbeSet& probes) {
    std::vector<JointInvarianceRow> rows;
    for (const auto& F : families) {
        const auto spec = FunctionalSpec::generic(F);
        JointInvarianceRow row;
        row.family = F.name;
        row.is_zero = F.name == "zero";
        row.mobius_defect = mobius_defect(spec, probes.disk, probes.zetas).max_defect;
        row.dilation_defect = dilation_defect(spec, probes.radial, probes.svals).max_defect;
        rows.push_back(row);
    }
    return rows;
}

bool corollary_holds(const std::vector<JointInvarianceRow>& rows, double threshold) {
    for (const auto& r : rows) {
        const bool both_small = r.mobius_defect < threshold && r.dilation_defect < threshold;
        if (r.is_zero ? !(r.mobius_defect == 0.0 && r.dilation_defect == 0.0) : both_small) return false;
    }
    return true;
}

}  // namespace moserlab
