#include "moserlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "moserlab/optimizer.hpp"

namespace moserlab::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_plain(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) throw ValidationError("invalid number '" + s + "'");
    return v;
}

}  // namespace

double parse_number(std::string_view token) {
    const std::string s = trim(token);
    if (s.empty()) throw ValidationError("empty number");
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        const double den = parse_number(s.substr(slash + 1));
        if (den == 0.0) throw ValidationError("division by zero in '" + s + "'");
        return parse_number(s.substr(0, slash)) / den;
    }
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        const std::string head = s.substr(0, s.size() - 2);
        if (head.empty() || head == "+") return std::numbers::pi;
        if (head == "-") return -std::numbers::pi;
        return parse_plain(head) * std::numbers::pi;
    }
    return parse_plain(s);
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        if (item.empty()) throw ValidationError("empty item in list '" + std::string(text) + "'");
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_number(item));
            continue;
        }
        const std::string a = trim(item.substr(0, dots)), b = trim(item.substr(dots + 2));
        const bool pow_a = a.rfind("2^", 0) == 0, pow_b = b.rfind("2^", 0) == 0;
        if (pow_a != pow_b) throw ValidationError("mixed range '" + item + "'");
        const double lo = parse_number(pow_a ? a.substr(2) : a), hi = parse_number(pow_b ? b.substr(2) : b);
        if (lo != std::floor(lo) || hi != std::floor(hi) || hi < lo || hi - lo > 1e6)
            throw ValidationError("range needs integer bounds lo <= hi: '" + item + "'");
        for (double e = lo; e <= hi; e += 1.0) out.push_back(pow_a ? std::ldexp(1.0, static_cast<int>(e)) : e);
    }
    return out;
}

std::complex<double> parse_complex(std::string_view token) {
    std::string s;
    for (char c : token)
        if (c != ' ') s += c;
    if (s.empty()) throw ValidationError("empty complex number");
    if (s.back() != 'i') return {parse_number(s), 0.0};
    s.pop_back();
    std::size_t split_at = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;)
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split_at = i;
            break;
        }
    auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_number(t);
    };
    if (split_at == std::string::npos) return {0.0, imag_of(s)};
    return {parse_number(s.substr(0, split_at)), imag_of(s.substr(split_at))};
}

std::vector<std::complex<double>> parse_complex_list(std::string_view text) {
    std::vector<std::complex<double>> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_complex(item));
    return out;
}

GridSpec parse_grid_spec(std::string_view text) {
    GridSpec g;
    if (trim(text).empty()) return g;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("grid item '" + item + "' is not key=value");
        const std::string key = trim(item.substr(0, eq)), value = trim(item.substr(eq + 1));
        auto count = [&](const std::string& v) {
            const double x = parse_number(v);
            if (x < 1 || x != std::floor(x) || x > 1e8) throw ValidationError("grid " + key + " must be a positive integer");
            return static_cast<std::size_t>(x);
        };
        if (key == "n") {
            g.n = count(value);
        } else if (key == "grading") {
            try {
                g.grading = parse_grading(value);
            } catch (const std::invalid_argument& e) {
                throw ValidationError(e.what());
            }
        } else if (key == "angles") {
            g.angles = count(value);
        } else if (key == "tmax") {
            g.options.t_max = parse_number(value);
        } else if (key == "gapmin") {
            g.options.gap_min = parse_number(value);
        } else {
            throw ValidationError("unknown grid key '" + key + "'");
        }
    }
    if (g.n < 16) throw ValidationError("grid n must be >= 16");
    if (g.angles < 8 || g.angles % 2) throw ValidationError("grid angles must be even and >= 8");
    return g;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_grid_spec(const GridSpec& g) {
    return "n=" + std::to_string(g.n) + ",grading=" + std::string(to_string(g.grading)) +
           ",angles=" + std::to_string(g.angles) + ",tmax=" + format_number(g.options.t_max) +
           ",gapmin=" + format_number(g.options.gap_min);
}

namespace {

json jnum(double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); }

// Typed access to merged parameters; every value read is echoed in resolved form.
class Params {
public:
    explicit Params(json given) : given_(std::move(given)), echo_(json::object()) {}

    std::string raw(const std::string& key, const std::string& def) const {
        if (!given_.contains(key)) return def;
        const auto& v = given_.at(key);
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number()) return format_number(v.get<double>());
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_array()) {
            std::string s;
            for (const auto& x : v) {
                if (!s.empty()) s += ',';
                s += x.is_string() ? x.get<std::string>() : format_number(x.get<double>());
            }
            return s;
        }
        throw ValidationError("parameter '" + key + "' has an unsupported type");
    }

    std::string str(const std::string& key, const std::string& def) {
        auto v = raw(key, def);
        echo_[key] = v;
        return v;
    }

    double num(const std::string& key, const std::string& def) {
        const double v = wrap(key, [&] { return parse_number(raw(key, def)); });
        echo_[key] = v;
        return v;
    }

    long integer(const std::string& key, const std::string& def, long lo = 0) {
        const double v = wrap(key, [&] { return parse_number(raw(key, def)); });
        if (v != std::floor(v) || v < static_cast<double>(lo) || v > 1e12)
            throw ValidationError("parameter '" + key + "' must be an integer >= " + std::to_string(lo));
        echo_[key] = static_cast<long>(v);
        return static_cast<long>(v);
    }

    std::vector<double> nums(const std::string& key, const std::string& def) {
        auto v = wrap(key, [&] { return parse_number_list(raw(key, def)); });
        if (v.empty()) throw ValidationError("parameter '" + key + "' is empty");
        echo_[key] = v;
        return v;
    }

    std::vector<std::complex<double>> complexes(const std::string& key, const std::string& def) {
        auto v = wrap(key, [&] { return parse_complex_list(raw(key, def)); });
        json arr = json::array();
        for (auto z : v) {
            if (!(std::abs(z) < 1.0)) throw ValidationError("parameter '" + key + "': |zeta| must be < 1");
            arr.push_back(format_zeta(z));
        }
        echo_[key] = arr;
        return v;
    }

    void set_echo(const std::string& key, json v) { echo_[key] = std::move(v); }
    const json& echo() const { return echo_; }

private:
    template <class F>
    auto wrap(const std::string& key, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const std::invalid_argument& e) {
            throw ValidationError("parameter '" + key + "': " + e.what());
        }
    }

    json given_;
    json echo_;
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string cell(double v) { return format_number(v); }
std::string cell(const std::string& s) { return s; }
std::string cell(bool b) { return b ? "true" : "false"; }
std::string cell(long v) { return std::to_string(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(std::string_view s) { return std::string(s); }

template <class... A>
std::vector<std::string> row(const A&... a) {
    return {cell(a)...};
}

class Report {
public:
    explicit Report(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw OutputError("cannot create output directory '" + dir_.string() + "'");
    }

    void text(const std::string& name, const std::string& content) {
        const auto path = dir_ / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw OutputError("cannot write '" + path.string() + "'");
        f << content;
        if (!f) throw OutputError("write failed for '" + path.string() + "'");
        files_.push_back(name);
    }

    void table(const std::string& name, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
        std::ostringstream os;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
            os << '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        text(name, os.str());
    }

    void plot(const std::string& stem, const std::string& xlabel, const std::string& ylabel,
              const std::vector<std::pair<double, double>>& points, bool logx) {
        std::ostringstream dat;
        dat << "# " << xlabel << ' ' << ylabel << '\n';
        for (const auto& [x, y] : points) dat << format_number(x) << ' ' << format_number(y) << '\n';
        text(stem + ".dat", dat.str());
        std::ostringstream gp;
        gp << "set terminal pngcairo size 800,600\n"
           << "set output '" << stem << ".png'\n"
           << (logx ? "set logscale x\n" : "") << "set xlabel '" << xlabel << "'\n"
           << "set ylabel '" << ylabel << "'\n"
           << "plot '" << stem << ".dat' using 1:2 with lines title '" << ylabel << "'\n";
        text(stem + ".gp", gp.str());
    }

    void finish(const std::string& command, const json& config, const std::string& grid_id, const json& results) {
        json summary;
        summary["tool"] = "moserlab";
        summary["version"] = tool_version;
        summary["command"] = command;
        summary["config"] = config;
        summary["grid"] = grid_id;
        summary["results"] = results;
        summary["files"] = files_;
        text("summary.json", summary.dump(2) + "\n");

        std::vector<std::vector<std::string>> rows;
        flatten("", results, rows);
        table("summary.csv", {"key", "value"}, rows);
    }

private:
    static void flatten(const std::string& prefix, const json& j, std::vector<std::vector<std::string>>& rows) {
        if (j.is_object()) {
            for (const auto& [k, v] : j.items()) flatten(prefix.empty() ? k : prefix + "." + k, v, rows);
        } else if (j.is_array()) {
            for (std::size_t i = 0; i < j.size(); ++i) flatten(prefix + "." + std::to_string(i), j[i], rows);
        } else if (j.is_number()) {
            rows.push_back({prefix, j.is_number_integer() ? std::to_string(j.get<long>()) : format_number(j.get<double>())});
        } else if (j.is_boolean()) {
            rows.push_back({prefix, cell(j.get<bool>())});
        } else if (j.is_string()) {
            rows.push_back({prefix, j.get<std::string>()});
        }
    }

    fs::path dir_;
    std::vector<std::string> files_;
};

struct Context {
    Params params;
    GridSpec grid;
    Report report;
    std::uint64_t seed;
};

RadialGridPtr radial_grid(const GridSpec& g) {
    try {
        return build_radial_grid(g.n, g.grading, g.options);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

BumpShape bump_shape(Params& p) {
    const auto s = p.str("shape", "smooth");
    if (s == "smooth") return BumpShape::smooth;
    if (s == "polynomial") return BumpShape::polynomial;
    throw ValidationError("shape must be smooth or polynomial");
}

RadialFunction radial_profile(Params& p, const RadialGridPtr& g) {
    const auto name = p.str("profile", "moser");
    if (name == "zero") return RadialFunction::zero(g);
    const double amp = p.num("amplitude", "1");
    if (name == "moser") {
        const double k = p.num("k", "64");
        try {
            return moser_function(g, k).scaled(amp);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
    }
    if (name == "one-minus-r") return RadialFunction::sample(g, [amp](const RadialPoint& q) { return amp * q.gap; });
    if (name == "bump") {
        const double radius = p.num("radius", "0.5");
        if (!(radius > 0.0 && radius < 1.0)) throw ValidationError("radius must lie in (0,1)");
        return radial_bump(g, radius, amp, bump_shape(p));
    }
    if (name == "tent") {
        const auto knots = p.nums("knots", "0.5,1,2");
        if (knots.size() != 3 || !(0.0 < knots[0] && knots[0] < knots[1] && knots[1] < knots[2]))
            throw ValidationError("tent needs three increasing positive t-knots");
        return tent_function(g, knots[0], knots[1], knots[2], amp);
    }
    throw ValidationError("unknown profile '" + name + "' (moser, one-minus-r, bump, tent, zero)");
}

DiskFunction disk_profile(Params& p, const PolarGridPtr& pg) {
    const auto center = p.complexes("center", "0");
    if (center.size() != 1) throw ValidationError("center must be a single complex number");
    if (center[0] == 0.0) return DiskFunction::lift(pg, radial_profile(p, pg->radial_ptr()));
    if (p.raw("profile", "bump") != "bump") throw ValidationError("an off-center profile must be a bump");
    p.str("profile", "bump");
    const double amp = p.num("amplitude", "1");
    const double radius = p.num("radius", "0.5");
    if (!(radius > 0.0) || !(std::abs(center[0]) + radius <= 1.0))
        throw ValidationError("bump support must lie in the disk");
    return disk_bump(pg, center[0], radius, amp, bump_shape(p));
}

FunctionalSpec functional(Params& p) {
    const auto name = p.str("functional", "tm");
    const double exponent = p.num("p", "4pi");
    try {
        return parse_functional(name, exponent);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

json evaluation_json(const Evaluation& ev) {
    return {{"value", jnum(ev.value)}, {"status", std::string(to_string(ev.status))}, {"max_exponent", jnum(ev.max_exponent)}};
}

void profile_plot(Report& rep, const std::string& stem, const RadialFunction& u) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < u.size(); ++i) pts.emplace_back(u.grid().r()[i], u[i]);
    rep.plot(stem, "r", "u", pts, true);
}

void profile_table(Report& rep, const std::string& name, const RadialFunction& u) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < u.size(); ++i) rows.push_back(row(u.grid().r()[i], u.grid().t()[i], u[i]));
    rep.table(name, {"r", "t", "u"}, rows);
}

std::string cmd_eval(Context& c, json& res) {
    const auto spec = functional(c.params);
    const auto domain = c.params.str("domain", "radial");
    auto g = radial_grid(c.grid);
    Evaluation ev;
    double norm = 0.0;
    std::string grid_id;
    if (domain == "radial") {
        const auto u = radial_profile(c.params, g);
        ev = evaluate(spec, u);
        norm = dirichlet_norm_radial(u);
        grid_id = g->id();
        profile_plot(c.report, "profile", u);
    } else if (domain == "disk") {
        const auto pg = build_polar_grid(g, c.grid.angles);
        const auto u = disk_profile(c.params, pg);
        ev = evaluate(spec, u);
        norm = dirichlet_norm_disk(u);
        grid_id = pg->id();
    } else {
        throw ValidationError("domain must be radial or disk");
    }
    res = evaluation_json(ev);
    res["functional"] = spec.name();
    res["dirichlet_norm"] = norm;
    c.report.table("eval.csv", {"functional", "value", "status", "max_exponent", "dirichlet_norm"},
                   {row(spec.name(), ev.value, to_string(ev.status), ev.max_exponent, norm)});
    return grid_id;
}

std::string cmd_norms(Context& c, json& res) {
    auto g = radial_grid(c.grid);
    const auto u = radial_profile(c.params, g);
    const auto rep = norm_report(u);
    const double e = rep.dirichlet * rep.dirichlet;
    res = {{"dirichlet", rep.dirichlet},
           {"sup2star", rep.sup2star},
           {"sup2star_scaled", sup2star_norm(u, Sup2StarConvention::scaled)},
           {"sup2star_argmax_r", g->r()[sup2star_argmax(u)]},
           {"hardy_origin", rep.hardy_origin},
           {"hardy_boundary", rep.hardy_boundary},
           {"pointwise_margin", rep.pointwise_margin},
           {"slack", lemma_slack(e)}};
    c.report.table("norms.csv", {"dirichlet", "sup2star", "sup2star_scaled", "sup2star_argmax_r", "hardy_origin", "hardy_boundary",
                                 "pointwise_margin", "slack"},
                   {row(rep.dirichlet, rep.sup2star, sup2star_norm(u, Sup2StarConvention::scaled), g->r()[sup2star_argmax(u)],
                        rep.hardy_origin, rep.hardy_boundary, rep.pointwise_margin, lemma_slack(e))});
    profile_plot(c.report, "profile", u);

    const long count = c.params.integer("random", "0");
    if (count > 0) {
        std::mt19937_64 rng(c.seed);
        std::vector<std::vector<std::string>> rows;
        double worst = std::numeric_limits<double>::infinity();
        bool all_ok = true;
        for (long i = 0; i < count; ++i) {
            const auto v = random_radial_function(g, rng);
            const double ve = dirichlet_energy_radial(v);
            const double m = pointwise_bound_margin(v);
            const bool ok = m >= -lemma_slack(ve);
            all_ok = all_ok && ok;
            worst = std::min(worst, m / (1.0 + ve));
            rows.push_back(row(i, ve, m, lemma_slack(ve), ok));
        }
        c.report.table("random_margins.csv", {"index", "energy", "margin", "slack", "ok"}, rows);
        res["random_count"] = count;
        res["random_min_scaled_margin"] = worst;
        res["random_all_ok"] = all_ok;
    }
    return g->id();
}

std::string cmd_transform(Context& c, json& res) {
    const auto kind = c.params.str("kind", "dilate");
    auto g = radial_grid(c.grid);
    if (kind == "dilate") {
        const double s = c.params.num("s", "2");
        if (!(s > 0.0)) throw ValidationError("s must be > 0");
        const auto u = radial_profile(c.params, g);
        const auto v = dilate(u, DilationParam(s));
        res = {{"dirichlet_before", dirichlet_norm_radial(u)}, {"dirichlet_after", dirichlet_norm_radial(v)},
               {"hardy_origin_before", hardy_origin(u)},       {"hardy_origin_after", hardy_origin(v)},
               {"sup2star_before", sup2star_norm(u)},          {"sup2star_after", sup2star_norm(v)}};
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < u.size(); ++i) rows.push_back(row(g->r()[i], g->t()[i], u[i], v[i]));
        c.report.table("transform.csv", {"r", "t", "before", "after"}, rows);
        profile_plot(c.report, "dilated", v);
        return g->id();
    }
    const auto pg = build_polar_grid(g, c.grid.angles);
    if (kind == "mobius") {
        const auto zetas = c.params.complexes("zeta", "0.5");
        const auto u = disk_profile(c.params, pg);
        const auto sq = FunctionalSpec::generic(builtin_integrand("hyperbolic-square"));
        const double e0 = dirichlet_norm_disk(u), h0 = evaluate(sq, u).value;
        std::vector<std::vector<std::string>> rows;
        json arr = json::array();
        for (auto z : zetas) {
            const auto v = mobius_pullback(u, MobiusParam(z));
            const double e1 = dirichlet_norm_disk(v), h1 = evaluate(sq, v).value;
            rows.push_back(row(format_zeta(z), e0, e1, h0, h1, v.at(z)));
            arr.push_back({{"zeta", format_zeta(z)}, {"dirichlet_before", e0}, {"dirichlet_after", e1},
                           {"hyperbolic_square_before", h0}, {"hyperbolic_square_after", h1}, {"value_at_zeta", v.at(z)}});
        }
        c.report.table("mobius.csv", {"zeta", "dirichlet_before", "dirichlet_after", "hyperbolic_square_before",
                                      "hyperbolic_square_after", "value_at_zeta"}, rows);
        res = {{"probes", arr}, {"u_at_origin", u.at(std::complex<double>(0.0))}};
        return pg->id();
    }
    if (kind == "rearrange") {
        const auto m = c.params.str("measure", "lebesgue");
        WeightKind w;
        try {
            w = parse_weight_kind(m);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
        if (w != WeightKind::lebesgue && w != WeightKind::hyperbolic)
            throw ValidationError("measure must be lebesgue or hyperbolic");
        const auto u = disk_profile(c.params, pg);
        for (double x : u.values())
            if (x < 0.0) throw ValidationError("rearrangement needs a nonnegative profile");
        const auto star = rearrange_decreasing(u, w);
        std::vector<double> sq(u.values().begin(), u.values().end());
        for (auto& x : sq) x *= x;
        std::vector<double> sq_star(star.values().begin(), star.values().end());
        for (auto& x : sq_star) x *= x;
        res = {{"square_integral_before", integrate_polar(*pg, sq, w)},
               {"square_integral_after", integrate(*g, sq_star, w)},
               {"dirichlet_before", dirichlet_norm_disk(u)},
               {"dirichlet_after", dirichlet_norm_radial(star)}};
        profile_table(c.report, "rearranged.csv", star);
        profile_plot(c.report, "rearranged", star);
        return pg->id();
    }
    throw ValidationError("transform kind must be dilate, mobius or rearrange");
}

std::string cmd_sequence(Context& c, json& res) {
    const auto kind = c.params.str("kind", "dilation");
    const auto ks = c.params.nums("ks", kind == "dilation" ? "1,4,16,64,128" : "1,8,32,64");
    for (double k : ks)
        if (k < 1 || k != std::floor(k)) throw ValidationError("ks must be positive integers");
    auto g = radial_grid(c.grid);
    std::vector<std::vector<std::string>> rows;
    json arr = json::array();
    if (kind == "dilation") {
        const auto u = tent_function(g, 0.5, 1.0, 2.0, 0.5 * std::sqrt(1.0 / (2.0 * std::numbers::pi)));
        const auto v = tent_function(g, 0.1, 0.2, 0.3, std::sqrt(0.2 / (2.0 * std::numbers::pi)));
        const double su = sup2star_norm(u), sv = sup2star_norm(v);
        const double eu = dirichlet_energy_radial(u), ev = dirichlet_energy_radial(v);
        for (double k : ks) {
            RadialFunction uk = u;
            try {
                uk = dilation_sequence(u, v, static_cast<long>(k));
            } catch (const std::invalid_argument& e) {
                throw ValidationError(e.what());
            }
            const double s = sup2star_norm(uk), e = dirichlet_energy_radial(uk);
            rows.push_back(row(static_cast<long>(k), s, std::max(su, sv), e, eu + ev));
            arr.push_back({{"k", static_cast<long>(k)}, {"sup2star", s}, {"energy", e}});
        }
        c.report.table("sequence.csv", {"k", "sup2star", "max_sup2star_parts", "energy", "energy_sum_parts"}, rows);
        res = {{"terms", arr}, {"sup2star_u", su}, {"sup2star_v", sv}, {"energy_u", eu}, {"energy_v", ev}};
        return g->id();
    }
    if (kind == "mobius") {
        const double amp = c.params.num("amplitude", "0.5");
        const auto pg = build_polar_grid(g, c.grid.angles);
        const auto u = disk_bump(pg, 0.0, 0.25, amp, BumpShape::polynomial);
        const auto w = disk_bump(pg, 0.0, 0.25, amp, BumpShape::polynomial);
        const auto W = FunctionalSpec::wtm();
        const double ju = evaluate(W, u).value, jw = evaluate(W, w).value;
        for (double k : ks) {
            const auto term = mobius_sequence(u, w, static_cast<long>(k));
            const auto ev = evaluate(W, term.value);
            const double defect = ev.value - ju - jw;
            rows.push_back(row(static_cast<long>(k), term.zeta.real(), term.disjoint, term.delta, ev.value, ju + jw, defect));
            arr.push_back({{"k", static_cast<long>(k)}, {"zeta", term.zeta.real()}, {"disjoint", term.disjoint},
                           {"delta", term.delta}, {"wtm", jnum(ev.value)}, {"defect", jnum(defect)}});
        }
        c.report.table("sequence.csv", {"k", "zeta", "disjoint", "delta", "wtm_uk", "wtm_u_plus_wtm_w", "defect"}, rows);
        res = {{"terms", arr}, {"wtm_u", ju}, {"wtm_w", jw}};
        return pg->id();
    }
    throw ValidationError("sequence kind must be dilation or mobius");
}

void invariance_table(Report& rep, const std::string& name, const std::string& spec_name, const InvarianceReport& r) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : r.probes)
        rows.push_back(row(to_string(r.family), spec_name, p.function_id, p.parameter, p.defect, to_string(p.status),
                           r.max_defect, r.grid_id));
    rep.table(name, {"family", "spec", "function_id", "parameter", "defect", "status", "max_defect", "grid_id"}, rows);
}

std::string cmd_invariance(Context& c, json& res) {
    const auto family = c.params.str("family", "mobius");
    const double amp = c.params.num("amplitude", "1");
    auto g = radial_grid(c.grid);
    const auto pg = build_polar_grid(g, c.grid.angles);
    auto probes = default_invariance_probes(pg, amp);
    if (family == "joint") {
        const double threshold = c.params.num("threshold", "1e-3");
        std::vector<GenericF> fams;
        for (const auto& n : builtin_integrand_names()) fams.push_back(builtin_integrand(n));
        const auto rows = joint_invariance_scan(fams, probes);
        std::vector<std::vector<std::string>> t;
        json arr = json::array();
        for (const auto& r : rows) {
            t.push_back(row(r.family, r.mobius_defect, r.dilation_defect, r.is_zero));
            arr.push_back({{"family", r.family}, {"mobius_max_defect", jnum(r.mobius_defect)},
                           {"dilation_max_defect", jnum(r.dilation_defect)}});
        }
        c.report.table("joint.csv", {"family", "mobius_max_defect", "dilation_max_defect", "is_zero"}, t);
        res = {{"rows", arr}, {"corollary_holds", corollary_holds(rows, threshold)}};
        return pg->id();
    }
    const auto name = c.params.str("spec", "hyperbolic-square");
    FunctionalSpec spec;
    try {
        spec = parse_functional(name, c.params.num("p", "4pi"));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    InvarianceReport r;
    if (family == "mobius") {
        r = mobius_defect(spec, probes.disk, c.params.complexes("zeta", "0.3,0.5i,0.6+0.2i"));
    } else if (family == "dilation") {
        const auto s = c.params.nums("s", "1/3,1/2,2,3");
        for (double x : s)
            if (!(x > 0.0)) throw ValidationError("s values must be > 0");
        r = dilation_defect(spec, probes.radial, s);
    } else {
        throw ValidationError("family must be mobius, dilation or joint");
    }
    invariance_table(c.report, "invariance.csv", spec.name(), r);
    res = {{"family", std::string(to_string(r.family))}, {"spec", spec.name()}, {"max_defect", jnum(r.max_defect)},
           {"probes", r.probes.size()}};
    return r.grid_id;
}

OptimizerSettings optimizer_settings(Params& p) {
    OptimizerSettings s;
    s.steps = static_cast<std::size_t>(p.integer("steps", "400"));
    s.step_size = p.num("step-size", "1e-2");
    if (!(s.step_size > 0.0)) throw ValidationError("step-size must be > 0");
    return s;
}

std::string cmd_scan(Context& c, json& res) {
    const auto ps = c.params.nums("p", "2pi,3pi,4pi,5pi");
    for (double p : ps)
        if (!(p > 0.0)) throw ValidationError("exponents must be > 0");
    const auto ks = c.params.nums("ks", "2^4..2^12");
    for (double k : ks)
        if (!(k > 1.0)) throw ValidationError("ks must be > 1");
    const double radius = c.params.num("radius", "1");
    if (!(radius >= 0.0)) throw ValidationError("radius must be >= 0");
    const auto settings = optimizer_settings(c.params);
    auto g = radial_grid(c.grid);
    std::vector<ScanRow> rows;
    try {
        rows = criticality_scan(g, ps, radius, ks, settings);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    std::vector<std::vector<std::string>> detail, summary;
    std::ostringstream dat;
    json arr = json::array();
    for (const auto& r : rows) {
        dat << "# p = " << format_number(r.p) << '\n';
        for (std::size_t j = 0; j < r.ks.size(); ++j) {
            detail.push_back(row(r.p, r.ks[j], r.moser[j].value, to_string(r.moser[j].status), r.moser[j].max_exponent));
            dat << format_number(r.ks[j]) << ' ' << format_number(r.moser[j].value) << '\n';
        }
        dat << "\n\n";
        const double dk = r.divergence_k.value_or(std::numeric_limits<double>::quiet_NaN());
        summary.push_back(row(r.p, r.row_max, r.optimizer_value, r.optimizer_divergent, r.divergent, dk, r.tail_change));
        arr.push_back({{"p", r.p}, {"row_max", jnum(r.row_max)}, {"optimizer_value", jnum(r.optimizer_value)},
                       {"divergent", r.divergent}, {"divergence_k", r.divergence_k ? json(dk) : json("none")},
                       {"tail_change", jnum(r.tail_change)}});
    }
    c.report.table("scan.csv", {"p", "k", "value", "status", "max_exponent"}, detail);
    c.report.table("scan_rows.csv", {"p", "row_max", "optimizer_value", "optimizer_divergent", "divergent",
                                     "divergence_k", "tail_change"}, summary);
    c.report.text("scan.dat", dat.str());
    std::ostringstream gp;
    gp << "set terminal pngcairo size 800,600\nset output 'scan.png'\nset logscale xy\n"
       << "set xlabel 'k'\nset ylabel 'TM(p) of m_k'\n"
       << "plot for [i=0:" << (rows.empty() ? 0 : rows.size() - 1) << "] 'scan.dat' index i using 1:2 with linespoints title sprintf('row %d', i)\n";
    c.report.text("scan.gp", gp.str());
    res = {{"rows", arr}};
    return g->id();
}

std::string cmd_maximize(Context& c, json& res) {
    const auto spec = functional(c.params);
    const double radius = c.params.num("radius", "1");
    if (!(radius >= 0.0)) throw ValidationError("radius must be >= 0");
    const auto settings = optimizer_settings(c.params);
    auto g = radial_grid(c.grid);
    const auto init_name = c.params.str("init", "zero");
    RadialFunction init = RadialFunction::zero(g);
    if (init_name == "moser") {
        init = moser_function(g, c.params.num("k", "4"));
    } else if (init_name != "zero") {
        throw ValidationError("init must be zero or moser");
    }
    OptimizationTrace tr{{}, init, 0.0, false, false, 0.0, 0, 0};
    try {
        tr = maximize({spec, radius, init}, settings);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < tr.objective.size(); ++i) {
        rows.push_back(row(i, tr.objective[i]));
        pts.emplace_back(static_cast<double>(i), tr.objective[i]);
    }
    c.report.table("trace.csv", {"step", "objective"}, rows);
    c.report.plot("trace", "step", "objective", pts, false);
    profile_table(c.report, "final_profile.csv", tr.final_u);
    profile_plot(c.report, "final_profile", tr.final_u);
    res = {{"functional", spec.name()},
           {"final_objective", jnum(tr.final_objective)},
           {"accepted", tr.accepted},
           {"rejected", tr.rejected},
           {"converged", tr.converged},
           {"divergent", tr.divergent},
           {"witness_exponent", tr.witness_exponent},
           {"dirichlet_norm", dirichlet_norm_radial(tr.final_u)}};
    return g->id();
}

std::string cmd_onofri(Context& c, json& res) {
    const auto which = c.params.str("ensemble", "both");
    if (which != "linear" && which != "moser" && which != "both") throw ValidationError("ensemble must be linear, moser or both");
    auto g = radial_grid(c.grid);
    std::vector<RadialFunction> ens;
    std::vector<std::string> ids;
    if (which != "moser")
        for (double a : c.params.nums("alphas", "1..8")) {
            ens.push_back(RadialFunction::sample(g, [a](const RadialPoint& q) { return a * q.gap; }));
            ids.push_back("linear(alpha=" + format_number(a) + ")");
            if (a < 0) throw ValidationError("alphas must be >= 0");
        }
    if (which != "linear") {
        const auto ks = c.params.nums("ks", "2^2..2^10");
        for (double b : c.params.nums("betas", "1,2,4")) {
            if (b < 0) throw ValidationError("betas must be >= 0");
            for (double k : ks) {
                try {
                    ens.push_back(moser_function(g, k).scaled(b));
                } catch (const std::invalid_argument& e) {
                    throw ValidationError(e.what());
                }
                ids.push_back("moser(k=" + format_number(k) + ",beta=" + format_number(b) + ")");
            }
        }
    }
    OnofriResult r;
    try {
        r = onofri_constant(ens);
    } catch (const std::domain_error& e) {
        throw ValidationError(e.what());
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < ens.size(); ++i) rows.push_back(row(ids[i], r.residuals[i], to_string(r.status[i])));
    c.report.table("onofri.csv", {"probe", "residual", "status"}, rows);
    res = {{"constant", r.constant}, {"argmax", ids[r.argmax]}, {"divergent", r.divergent}, {"probes", ens.size()}};
    return g->id();
}

std::string cmd_report(Context& c, json& res) {
    const auto inputs = c.params.str("inputs", "");
    if (inputs.empty()) throw ValidationError("report needs --inputs DIR[,DIR...]");
    json entries = json::array();
    std::vector<std::vector<std::string>> rows;
    for (const auto& dir : split(inputs, ',')) {
        const auto path = fs::path(dir) / "summary.json";
        std::ifstream f(path);
        if (!f) throw ValidationError("cannot read '" + path.string() + "'");
        json s;
        try {
            s = json::parse(f);
        } catch (const json::parse_error& e) {
            throw ValidationError("malformed '" + path.string() + "': " + e.what());
        }
        std::vector<std::vector<std::string>> flat;
        std::function<void(const std::string&, const json&)> walk = [&](const std::string& pre, const json& j) {
            if (j.is_object()) {
                for (const auto& [k, v] : j.items()) walk(pre.empty() ? k : pre + "." + k, v);
            } else if (j.is_array()) {
                for (std::size_t i = 0; i < j.size(); ++i) walk(pre + "." + std::to_string(i), j[i]);
            } else if (j.is_number()) {
                rows.push_back(row(dir, s.value("command", ""), pre,
                                   j.is_number_integer() ? std::to_string(j.get<long>()) : format_number(j.get<double>())));
            } else if (j.is_boolean() || j.is_string()) {
                rows.push_back(row(dir, s.value("command", ""), pre, j.is_boolean() ? cell(j.get<bool>()) : j.get<std::string>()));
            }
        };
        walk("", s.value("results", json::object()));
        entries.push_back({{"source", dir}, {"summary", s}});
    }
    c.report.text("dossier.json", json({{"entries", entries}}).dump(2) + "\n");
    c.report.table("dossier.csv", {"source", "command", "key", "value"}, rows);
    res = {{"sources", entries.size()}};
    return "n/a";
}

using Command = std::string (*)(Context&, json&);

struct CommandDef {
    const char* name;
    const char* help;
    Command fn;
    std::vector<std::pair<const char*, const char*>> keys;
};

const std::vector<CommandDef>& commands() {
    static const std::vector<CommandDef> defs = {
        {"eval", "Evaluate a functional on a profile", cmd_eval,
         {{"functional", "tm | wtm | onofri | beckner | builtin integrand"},
          {"p", "exponent, e.g. 4pi"},
          {"profile", "moser | one-minus-r | bump | tent | zero"},
          {"k", "Moser parameter"},
          {"amplitude", "profile amplitude"},
          {"radius", "bump radius"},
          {"shape", "bump shape: smooth | polynomial"},
          {"knots", "tent t-knots a,b,c"},
          {"center", "bump center (complex), disk domain"},
          {"domain", "radial | disk"}}},
        {"norms", "Norms, bounds and the pointwise margin of a profile", cmd_norms,
         {{"profile", "profile name"},
          {"k", "Moser parameter"},
          {"amplitude", "profile amplitude"},
          {"radius", "bump radius"},
          {"shape", "bump shape"},
          {"knots", "tent t-knots"},
          {"random", "number of seeded random functions for the margin check"}}},
        {"transform", "Apply a dilation, Mobius pullback or rearrangement", cmd_transform,
         {{"kind", "dilate | mobius | rearrange"},
          {"s", "dilation parameter"},
          {"zeta", "Mobius parameter list"},
          {"measure", "lebesgue | hyperbolic"},
          {"profile", "profile name"},
          {"k", "Moser parameter"},
          {"amplitude", "profile amplitude"},
          {"radius", "bump radius"},
          {"shape", "bump shape"},
          {"knots", "tent t-knots"},
          {"center", "bump center (complex)"}}},
        {"sequence", "Dilation-concentration and Mobius-translation sequences", cmd_sequence,
         {{"kind", "dilation | mobius"}, {"ks", "indices, e.g. 1,4,16 or 2^4..2^7"}, {"amplitude", "bump amplitude (mobius)"}}},
        {"invariance", "Invariance defects of a functional", cmd_invariance,
         {{"family", "mobius | dilation | joint"},
          {"spec", "functional or builtin integrand"},
          {"p", "exponent for tm/wtm"},
          {"zeta", "Mobius parameters"},
          {"s", "dilation parameters"},
          {"amplitude", "test function amplitude"},
          {"threshold", "joint threshold"}}},
        {"scan", "Criticality scan over exponents", cmd_scan,
         {{"p", "exponents"}, {"ks", "Moser parameters"}, {"radius", "energy radius"}, {"steps", "ascent steps"},
          {"step-size", "initial step"}}},
        {"maximize", "Projected gradient ascent on the energy ball", cmd_maximize,
         {{"functional", "functional"},
          {"p", "exponent"},
          {"radius", "energy radius"},
          {"steps", "ascent steps"},
          {"step-size", "initial step"},
          {"init", "zero | moser"},
          {"k", "Moser parameter for init"}}},
        {"onofri", "Empirical Onofri constant", cmd_onofri,
         {{"ensemble", "linear | moser | both"}, {"alphas", "amplitudes of alpha(1-r)"}, {"ks", "Moser parameters"},
          {"betas", "Moser amplitudes"}}},
        {"report", "Aggregate summaries into one dossier", cmd_report, {{"inputs", "comma list of output directories"}}},
    };
    return defs;
}

json load_config(const std::string& path, const std::string& command) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read config '" + path + "'");
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    if (j.contains("command") && j["command"] != command)
        throw ValidationError("config is for command '" + j["command"].get<std::string>() + "'");
    if (j.contains("config") && j["config"].is_object()) j = j["config"];
    return j;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"moserlab: Trudinger-Moser functionals on the unit disk"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    struct Bound {
        const CommandDef* def;
        CLI::App* sub;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
    };
    std::vector<Bound> bound(commands().size());
    for (std::size_t i = 0; i < commands().size(); ++i) {
        auto& b = bound[i];
        b.def = &commands()[i];
        b.sub = app.add_subcommand(b.def->name, b.def->help);
        std::vector<std::pair<std::string, std::string>> keys = {
            {"grid", "grid spec n=..,grading=..,angles=..,tmax=..,gapmin=.."},
            {"out", "output directory"},
            {"seed", "seed for randomized ensembles"},
            {"config", "JSON config file; flags override it"}};
        for (const auto& [k, h] : b.def->keys) keys.emplace_back(k, h);
        for (const auto& [k, h] : keys) b.options[k] = b.sub->add_option("--" + k, b.values[k], h);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    for (auto& b : bound) {
        if (!b.sub->parsed()) continue;
        const std::string name = b.def->name;
        try {
            json given = json::object();
            if (b.options["config"]->count() > 0) given = load_config(b.values["config"], name);
            for (const auto& [k, opt] : b.options)
                if (k != "config" && opt->count() > 0) given[k] = b.values[k];

            Params params(given);
            const auto grid = parse_grid_spec(params.raw("grid", ""));
            params.set_echo("grid", format_grid_spec(grid));
            const long seed = params.integer("seed", "0");
            const auto out_dir = params.raw("out", "moserlab-out/" + name);
            Context ctx{std::move(params), grid, Report(out_dir), static_cast<std::uint64_t>(seed)};
            json results;
            const auto grid_id = b.def->fn(ctx, results);
            json config = ctx.params.echo();
            config.erase("out");
            ctx.report.finish(name, config, grid_id, results);
            out << "wrote " << (fs::path(out_dir) / "summary.json").string() << '\n';
            return exit_ok;
        } catch (const ValidationError& e) {
            err << "error: " << e.what() << '\n';
            return exit_validation;
        } catch (const OutputError& e) {
            err << "error: " << e.what() << '\n';
            return exit_unwritable;
        } catch (const std::invalid_argument& e) {
            err << "error: " << e.what() << '\n';
            return exit_validation;
        } catch (const std::exception& e) {
            err << "internal error: " << e.what() << '\n';
            return exit_internal;
        }
    }
    return exit_validation;
}

}  // namespace moserlab::cli
