#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vds/delay.hpp"
#include "vds/feasibility.hpp"
#include "vds/grid.hpp"
#include "vds/io.hpp"
#include "vds/kernel.hpp"
#include "vds/solver.hpp"

namespace vds {

struct GridConfig {
    int dim = 1;
    double length = 1.0; // 1D extent
    int n = 256;         // 1D interior points
    double lx = 1.0, ly = 1.0;
    int nx = 64, ny = 64;
    bool operator==(const GridConfig&) const = default;
};

struct KernelConfig {
    std::string form = "prony"; // prony | powerlaw | zero
    std::vector<std::array<double, 2>> modes{{0.5, 1.0}};
    double g0 = 0.5;
    double p = 2.0;
    bool operator==(const KernelConfig&) const = default;
};

struct WitnessConfig {
    std::string form = "auto"; // auto | constant | hyperbolic
    double a = 1.0;
    bool operator==(const WitnessConfig&) const = default;
};

struct DelayConfig {
    std::string form = "constant"; // constant | sin
    double tau = 1.0;              // constant value, or center of the sine
    double amp = 0.0;
    double omega = 0.0;
    bool transport_check = false;
    int n_rho = 64;
    bool operator==(const DelayConfig&) const = default;
};

struct SolverSectionConfig {
    double a0 = 1.0;
    double a1 = 0.5;
    double dt_safety = 0.5;
    double t_end = 40.0;
    int output_every = 20;
    std::string engine = "recursive"; // recursive | direct
    std::vector<double> snapshots;
    std::string snapshot_format = "csv"; // csv | binary
    bool operator==(const SolverSectionConfig&) const = default;
};

struct EnergyConfig {
    double big_n = 10.0;
    double eps = 0.01;
    std::optional<double> t0; // fit window start; empty = 2 * tau_max
    double c7 = 1.0;
    double monotone_tol = 1e-8;
    bool operator==(const EnergyConfig&) const = default;
};

struct FieldConfig {
    std::string form = "zero"; // sine | gaussian | zero
    std::vector<int> mode{1};
    double amp = 1.0;
    std::vector<double> center{0.5};
    double width = 0.1;
    bool operator==(const FieldConfig&) const = default;
};

struct InitConfig {
    FieldConfig u0{.form = "sine"};
    FieldConfig u1{.form = "zero"};
    std::string f0 = "default"; // default (constant extension of u1) | zero
    bool operator==(const InitConfig&) const = default;
};

struct RunConfig {
    GridConfig grid;
    KernelConfig kernel;
    WitnessConfig witness;
    DelayConfig delay;
    SolverSectionConfig solver;
    EnergyConfig energy;
    InitConfig init;
    bool operator==(const RunConfig&) const = default;
};

// Section -> key -> raw value text, as written in the file.
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<std::string> violations;
    bool ok() const { return config.has_value(); }
};

struct config_error : std::runtime_error {
    std::vector<std::string> violations;
    explicit config_error(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}

    static std::string join(const std::vector<std::string>& v)
    {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& s : v)
            os << "\n  " << s;
        return os.str();
    }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

inline const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"grid", {"dim", "L", "n", "Lx", "Ly", "nx", "ny"}},
        {"kernel", {"form", "modes", "g0", "p"}},
        {"witness", {"form", "a"}},
        {"delay", {"form", "tau", "amp", "omega", "transport_check", "n_rho"}},
        {"solver",
         {"a0", "a1", "dt_safety", "t_end", "output_every", "engine", "snapshots",
          "snapshot_format"}},
        {"energy", {"N", "eps", "t0", "c7", "monotone_tol"}},
        {"init",
         {"u0", "u0_mode", "u0_amp", "u0_center", "u0_width", "u1", "u1_mode", "u1_amp",
          "u1_center", "u1_width", "f0"}},
    };
    return s;
}

// Collects typed lookups against one section of the raw map, recording one
// violation per offending key and remembering which keys were consumed.
class SectionReader {
public:
    SectionReader(const RawConfig& raw, std::string section, std::vector<std::string>& violations)
        : section_(std::move(section)), violations_(violations)
    {
        auto it = raw.find(section_);
        if (it != raw.end())
            kv_ = &it->second;
    }

    bool has(const std::string& key) const { return kv_ && kv_->count(key) > 0; }

    void forbid(const std::string& key, const std::string& why)
    {
        if (has(key))
            fail(key, why);
    }

    void number(const std::string& key, double& out)
    {
        if (!has(key))
            return;
        try {
            out = parse_double(kv_->at(key));
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + kv_->at(key) + "'");
        }
    }

    void integer(const std::string& key, int& out)
    {
        if (!has(key))
            return;
        double x = 0.0;
        try {
            x = parse_double(kv_->at(key));
        } catch (const std::exception&) {
            fail(key, "expected an integer, got '" + kv_->at(key) + "'");
            return;
        }
        if (x != std::floor(x) || std::abs(x) > 1e9) {
            fail(key, "expected an integer, got '" + kv_->at(key) + "'");
            return;
        }
        out = static_cast<int>(x);
    }

    void word(const std::string& key, std::string& out)
    {
        if (!has(key))
            return;
        std::string v = kv_->at(key);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            v = v.substr(1, v.size() - 2);
        out = v;
    }

    void boolean(const std::string& key, bool& out)
    {
        if (!has(key))
            return;
        const std::string& v = kv_->at(key);
        if (v == "true")
            out = true;
        else if (v == "false")
            out = false;
        else
            fail(key, "expected true or false, got '" + v + "'");
    }

    void number_list(const std::string& key, std::vector<double>& out)
    {
        if (!has(key))
            return;
        auto parsed = parse_flat_list(kv_->at(key));
        if (!parsed)
            fail(key, "expected a list like [1, 2.5], got '" + kv_->at(key) + "'");
        else
            out = *parsed;
    }

    void integer_list(const std::string& key, std::vector<int>& out)
    {
        if (!has(key))
            return;
        auto parsed = parse_flat_list(kv_->at(key));
        if (!parsed) {
            fail(key, "expected a list like [1, 2], got '" + kv_->at(key) + "'");
            return;
        }
        std::vector<int> ints;
        for (double x : *parsed) {
            if (x != std::floor(x) || std::abs(x) > 1e9) {
                fail(key, "expected integers in the list");
                return;
            }
            ints.push_back(static_cast<int>(x));
        }
        out = std::move(ints);
    }

    void pair_list(const std::string& key, std::vector<std::array<double, 2>>& out)
    {
        if (!has(key))
            return;
        auto parsed = parse_nested_list(kv_->at(key));
        if (!parsed)
            fail(key, "expected a list of pairs like [[0.5, 1.0]], got '" + kv_->at(key) + "'");
        else
            out = *parsed;
    }

    void fail(const std::string& key, const std::string& why)
    {
        violations_.push_back(section_ + "." + key + ": " + why);
    }

    void fail_section(const std::string& why) { violations_.push_back(section_ + ": " + why); }

    static std::optional<std::vector<double>> parse_flat_list(std::string_view text)
    {
        std::string t = trim(text);
        if (t.size() < 2 || t.front() != '[' || t.back() != ']')
            return std::nullopt;
        std::string body = trim(std::string_view(t).substr(1, t.size() - 2));
        std::vector<double> out;
        if (body.empty())
            return out;
        std::size_t pos = 0;
        while (pos <= body.size()) {
            std::size_t comma = body.find(',', pos);
            std::string item = trim(std::string_view(body).substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos));
            try {
                out.push_back(parse_double(item));
            } catch (const std::exception&) {
                return std::nullopt;
            }
            if (comma == std::string::npos)
                break;
            pos = comma + 1;
        }
        return out;
    }

    static std::optional<std::vector<std::array<double, 2>>> parse_nested_list(std::string_view text)
    {
        std::string t = trim(text);
        if (t.size() < 2 || t.front() != '[' || t.back() != ']')
            return std::nullopt;
        std::string body = trim(std::string_view(t).substr(1, t.size() - 2));
        std::vector<std::array<double, 2>> out;
        if (body.empty())
            return out;
        std::size_t pos = 0;
        while (pos < body.size()) {
            std::size_t open = body.find('[', pos);
            if (open == std::string::npos)
                return std::nullopt;
            std::size_t close = body.find(']', open);
            if (close == std::string::npos)
                return std::nullopt;
            auto inner = parse_flat_list(std::string_view(body).substr(open, close - open + 1));
            if (!inner || inner->size() != 2)
                return std::nullopt;
            out.push_back({(*inner)[0], (*inner)[1]});
            pos = close + 1;
            while (pos < body.size() &&
                   (body[pos] == ',' || std::isspace(static_cast<unsigned char>(body[pos]))))
                ++pos;
        }
        return out;
    }

private:
    std::string section_;
    const std::map<std::string, std::string>* kv_ = nullptr;
    std::vector<std::string>& violations_;
};

} // namespace detail

// Split the sectioned key = value text into a raw map. Syntax problems are
// reported with line numbers; unknown sections and keys are reported here so
// nothing is silently ignored.
inline RawConfig parse_raw_config(std::string_view text, std::vector<std::string>& violations)
{
    RawConfig raw;
    std::string section;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line =
            detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                       : nl - pos));
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                violations.push_back("line " + std::to_string(lineno) + ": unterminated section header");
                continue;
            }
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (detail::schema().count(section) == 0)
                violations.push_back("line " + std::to_string(lineno) + ": unknown section [" +
                                     section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        if (section.empty()) {
            violations.push_back("line " + std::to_string(lineno) + ": key outside any section");
            continue;
        }
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        auto sch = detail::schema().find(section);
        if (sch != detail::schema().end() && sch->second.count(key) == 0) {
            violations.push_back(section + "." + key + ": unknown key");
            continue;
        }
        if (raw[section].count(key))
            violations.push_back(section + "." + key + ": duplicate key");
        raw[section][key] = value;
    }
    return raw;
}

namespace detail {

inline void read_field(SectionReader& r, const std::string& prefix, FieldConfig& f, int dim)
{
    r.word(prefix, f.form);
    if (f.form != "sine" && f.form != "gaussian" && f.form != "zero") {
        r.fail(prefix, "unknown form '" + f.form + "' (sine, gaussian, zero)");
        return;
    }
    if (f.form == "sine") {
        r.integer_list(prefix + "_mode", f.mode);
        r.number(prefix + "_amp", f.amp);
        r.forbid(prefix + "_center", "only meaningful for gaussian data");
        r.forbid(prefix + "_width", "only meaningful for gaussian data");
        if (static_cast<int>(f.mode.size()) != dim)
            r.fail(prefix + "_mode", "need one mode number per dimension");
        for (int m : f.mode)
            if (m < 1)
                r.fail(prefix + "_mode", "mode numbers must be >= 1");
    } else if (f.form == "gaussian") {
        r.number_list(prefix + "_center", f.center);
        r.number(prefix + "_width", f.width);
        r.number(prefix + "_amp", f.amp);
        r.forbid(prefix + "_mode", "only meaningful for sine data");
        if (static_cast<int>(f.center.size()) != dim)
            r.fail(prefix + "_center", "need one coordinate per dimension");
        if (!(f.width > 0.0))
            r.fail(prefix + "_width", "width must be positive");
    } else {
        r.forbid(prefix + "_mode", "only meaningful for sine data");
        r.forbid(prefix + "_amp", "only meaningful for sine or gaussian data");
        r.forbid(prefix + "_center", "only meaningful for gaussian data");
        r.forbid(prefix + "_width", "only meaningful for gaussian data");
    }
}

} // namespace detail

// Validate the raw map and produce a fully populated RunConfig, or the full
// list of violations. Every module-level constructor rule is mirrored here so
// all problems surface at once with field paths.
inline ParseResult materialize_config(const RawConfig& raw, std::vector<std::string> violations = {})
{
    using detail::SectionReader;
    RunConfig c;

    SectionReader grid(raw, "grid", violations);
    grid.integer("dim", c.grid.dim);
    if (c.grid.dim != 1 && c.grid.dim != 2)
        grid.fail("dim", "dim must be 1 or 2");
    if (c.grid.dim == 1) {
        grid.number("L", c.grid.length);
        grid.integer("n", c.grid.n);
        grid.forbid("Lx", "only meaningful in 2D");
        grid.forbid("Ly", "only meaningful in 2D");
        grid.forbid("nx", "only meaningful in 2D");
        grid.forbid("ny", "only meaningful in 2D");
        if (!(c.grid.length > 0.0))
            grid.fail("L", "extent must be positive");
        if (c.grid.n < 1)
            grid.fail("n", "need at least one interior point");
    } else if (c.grid.dim == 2) {
        grid.number("Lx", c.grid.lx);
        grid.number("Ly", c.grid.ly);
        grid.integer("nx", c.grid.nx);
        grid.integer("ny", c.grid.ny);
        grid.forbid("L", "only meaningful in 1D");
        grid.forbid("n", "only meaningful in 1D");
        if (!(c.grid.lx > 0.0) || !(c.grid.ly > 0.0))
            grid.fail_section("extents must be positive");
        if (c.grid.nx < 1 || c.grid.ny < 1)
            grid.fail_section("need at least one interior point per direction");
        else if (c.grid.lx > 0.0 && c.grid.ly > 0.0) {
            const double hx = c.grid.lx / (c.grid.nx + 1);
            const double hy = c.grid.ly / (c.grid.ny + 1);
            if (std::abs(hx - hy) > 1e-12 * hx)
                grid.fail_section("cells must be square: Lx/(nx+1) must equal Ly/(ny+1)");
        }
    }

    SectionReader kernel(raw, "kernel", violations);
    kernel.word("form", c.kernel.form);
    double kernel_mass = 0.0;
    if (c.kernel.form == "prony") {
        kernel.pair_list("modes", c.kernel.modes);
        kernel.forbid("g0", "only meaningful for the powerlaw form");
        kernel.forbid("p", "only meaningful for the powerlaw form");
        if (c.kernel.modes.empty())
            kernel.fail("modes", "need at least one [amplitude, rate] mode");
        double positive = 0.0;
        bool shape_ok = true;
        for (const auto& m : c.kernel.modes) {
            if (m[0] < 0.0) {
                kernel.fail("modes", "amplitudes must be >= 0");
                shape_ok = false;
                break;
            }
            if (m[1] <= 0.0) {
                kernel.fail("modes", "rates must be > 0");
                shape_ok = false;
                break;
            }
            positive += m[0];
            kernel_mass += m[0] / m[1];
        }
        if (shape_ok && !c.kernel.modes.empty() && positive <= 0.0)
            kernel.fail("modes", "all amplitudes are zero; use form = zero instead");
    } else if (c.kernel.form == "powerlaw") {
        kernel.number("g0", c.kernel.g0);
        kernel.number("p", c.kernel.p);
        kernel.forbid("modes", "only meaningful for the prony form");
        if (!(c.kernel.g0 > 0.0))
            kernel.fail("g0", "amplitude must be > 0");
        if (!(c.kernel.p > 1.0))
            kernel.fail("p", "exponent must be > 1");
        else if (c.kernel.g0 > 0.0)
            kernel_mass = c.kernel.g0 / (c.kernel.p - 1.0);
    } else if (c.kernel.form == "zero") {
        kernel.forbid("modes", "only meaningful for the prony form");
        kernel.forbid("g0", "only meaningful for the powerlaw form");
        kernel.forbid("p", "only meaningful for the powerlaw form");
    } else {
        kernel.fail("form", "unknown form '" + c.kernel.form + "' (prony, powerlaw, zero)");
    }
    if (kernel_mass >= 1.0)
        kernel.fail_section("total kernel mass = " + format_double(kernel_mass) +
                            " must stay below 1 so the elastic stiffness remains positive");

    SectionReader witness(raw, "witness", violations);
    witness.word("form", c.witness.form);
    if (c.witness.form == "auto") {
        witness.forbid("a", "only meaningful for explicit witness forms");
    } else if (c.witness.form == "constant" || c.witness.form == "hyperbolic") {
        witness.number("a", c.witness.a);
        if (!(c.witness.a > 0.0))
            witness.fail("a", "scale must be positive");
    } else {
        witness.fail("form", "unknown form '" + c.witness.form + "' (auto, constant, hyperbolic)");
    }

    SectionReader delay(raw, "delay", violations);
    delay.word("form", c.delay.form);
    delay.number("tau", c.delay.tau);
    delay.boolean("transport_check", c.delay.transport_check);
    delay.integer("n_rho", c.delay.n_rho);
    if (c.delay.form == "constant") {
        delay.forbid("amp", "only meaningful for the sin form");
        delay.forbid("omega", "only meaningful for the sin form");
        if (!(c.delay.tau > 0.0))
            delay.fail("tau", "delay must be positive");
    } else if (c.delay.form == "sin") {
        delay.number("amp", c.delay.amp);
        delay.number("omega", c.delay.omega);
        if (c.delay.amp < 0.0)
            delay.fail("amp", "amplitude must be >= 0");
        if (c.delay.omega < 0.0)
            delay.fail("omega", "omega must be >= 0");
        if (!(c.delay.tau - c.delay.amp > 0.0))
            delay.fail_section("tau - amp = " + format_double(c.delay.tau - c.delay.amp) +
                               " must stay positive");
        const double d = c.delay.amp * c.delay.omega;
        if (d >= 1.0)
            delay.fail_section("d = amp*omega = " + format_double(d) +
                               " >= 1 violates the delay slope bound d < 1");
    } else {
        delay.fail("form", "unknown form '" + c.delay.form + "' (constant, sin)");
    }
    if (c.delay.n_rho < 2)
        delay.fail("n_rho", "need at least 2 cells");

    SectionReader solver(raw, "solver", violations);
    solver.number("a0", c.solver.a0);
    solver.number("a1", c.solver.a1);
    solver.number("dt_safety", c.solver.dt_safety);
    solver.number("t_end", c.solver.t_end);
    solver.integer("output_every", c.solver.output_every);
    solver.word("engine", c.solver.engine);
    solver.number_list("snapshots", c.solver.snapshots);
    solver.word("snapshot_format", c.solver.snapshot_format);
    if (!(c.solver.a0 >= 0.0))
        solver.fail("a0", "interior damping must be >= 0");
    if (!std::isfinite(c.solver.a1))
        solver.fail("a1", "must be finite");
    if (!(c.solver.dt_safety > 0.0 && c.solver.dt_safety <= 1.0))
        solver.fail("dt_safety", "must lie in (0, 1]");
    if (!(c.solver.t_end > 0.0))
        solver.fail("t_end", "must be positive");
    if (c.solver.output_every < 1)
        solver.fail("output_every", "must be >= 1");
    if (c.solver.engine == "recursive") {
        if (c.kernel.form == "powerlaw")
            solver.fail("engine", "recursive engine requires a Prony kernel");
    } else if (c.solver.engine != "direct") {
        solver.fail("engine", "unknown engine '" + c.solver.engine + "' (recursive, direct)");
    }
    for (double s : c.solver.snapshots)
        if (!(s >= 0.0)) {
            solver.fail("snapshots", "snapshot times must be >= 0");
            break;
        }
    if (c.solver.snapshot_format != "csv" && c.solver.snapshot_format != "binary")
        solver.fail("snapshot_format", "unknown format '" + c.solver.snapshot_format +
                                           "' (csv, binary)");

    SectionReader energy(raw, "energy", violations);
    energy.number("N", c.energy.big_n);
    energy.number("eps", c.energy.eps);
    energy.number("c7", c.energy.c7);
    energy.number("monotone_tol", c.energy.monotone_tol);
    if (energy.has("t0")) {
        std::string word;
        energy.word("t0", word);
        if (word == "auto") {
            c.energy.t0.reset();
        } else {
            try {
                c.energy.t0 = parse_double(word);
                if (!(*c.energy.t0 >= 0.0))
                    energy.fail("t0", "must be >= 0 (or auto)");
            } catch (const std::exception&) {
                energy.fail("t0", "expected a number or auto, got '" + word + "'");
            }
        }
    }
    if (!(c.energy.big_n > 0.0))
        energy.fail("N", "must be positive");
    if (!(c.energy.eps >= 0.0))
        energy.fail("eps", "must be >= 0");
    if (!(c.energy.c7 >= 0.0))
        energy.fail("c7", "must be >= 0");
    if (!(c.energy.monotone_tol > 0.0))
        energy.fail("monotone_tol", "must be positive");

    SectionReader init(raw, "init", violations);
    detail::read_field(init, "u0", c.init.u0, c.grid.dim);
    detail::read_field(init, "u1", c.init.u1, c.grid.dim);
    init.word("f0", c.init.f0);
    if (c.init.f0 != "default" && c.init.f0 != "zero")
        init.fail("f0", "unknown history '" + c.init.f0 + "' (default, zero)");

    ParseResult res;
    res.violations = std::move(violations);
    if (res.violations.empty())
        res.config = std::move(c);
    return res;
}

inline ParseResult parse_config(std::string_view text)
{
    std::vector<std::string> violations;
    RawConfig raw = parse_raw_config(text, violations);
    return materialize_config(raw, std::move(violations));
}

// Override one key for a sweep; the parameter must name a schema entry.
inline void apply_override(RawConfig& raw, const std::string& param, const std::string& value,
                           std::vector<std::string>& violations)
{
    const std::size_t dot = param.find('.');
    if (dot == std::string::npos) {
        violations.push_back(param + ": sweep parameter must look like section.key");
        return;
    }
    const std::string section = param.substr(0, dot);
    const std::string key = param.substr(dot + 1);
    auto sch = detail::schema().find(section);
    if (sch == detail::schema().end()) {
        violations.push_back(param + ": unknown section");
        return;
    }
    if (sch->second.count(key) == 0) {
        violations.push_back(param + ": unknown key");
        return;
    }
    raw[section][key] = value;
}

namespace detail {

inline std::string render_number_list(const std::vector<double>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ", ";
        s += format_double(v[i]);
    }
    return s + "]";
}

inline std::string render_int_list(const std::vector<int>& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ", ";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

inline void render_field(std::ostringstream& os, const std::string& prefix, const FieldConfig& f)
{
    os << prefix << " = " << f.form << '\n';
    if (f.form == "sine") {
        os << prefix << "_mode = " << render_int_list(f.mode) << '\n';
        os << prefix << "_amp = " << format_double(f.amp) << '\n';
    } else if (f.form == "gaussian") {
        os << prefix << "_amp = " << format_double(f.amp) << '\n';
        os << prefix << "_center = " << render_number_list(f.center) << '\n';
        os << prefix << "_width = " << format_double(f.width) << '\n';
    }
}

} // namespace detail

// Canonical text form: every applicable key, full round-trip numbers.
inline std::string serialize_config(const RunConfig& c)
{
    std::ostringstream os;
    os << "[grid]\n";
    os << "dim = " << c.grid.dim << '\n';
    if (c.grid.dim == 1) {
        os << "L = " << format_double(c.grid.length) << '\n';
        os << "n = " << c.grid.n << '\n';
    } else {
        os << "Lx = " << format_double(c.grid.lx) << '\n';
        os << "Ly = " << format_double(c.grid.ly) << '\n';
        os << "nx = " << c.grid.nx << '\n';
        os << "ny = " << c.grid.ny << '\n';
    }

    os << "\n[kernel]\n";
    os << "form = " << c.kernel.form << '\n';
    if (c.kernel.form == "prony") {
        os << "modes = [";
        for (std::size_t i = 0; i < c.kernel.modes.size(); ++i) {
            if (i)
                os << ", ";
            os << '[' << format_double(c.kernel.modes[i][0]) << ", "
               << format_double(c.kernel.modes[i][1]) << ']';
        }
        os << "]\n";
    } else if (c.kernel.form == "powerlaw") {
        os << "g0 = " << format_double(c.kernel.g0) << '\n';
        os << "p = " << format_double(c.kernel.p) << '\n';
    }

    os << "\n[witness]\n";
    os << "form = " << c.witness.form << '\n';
    if (c.witness.form != "auto")
        os << "a = " << format_double(c.witness.a) << '\n';

    os << "\n[delay]\n";
    os << "form = " << c.delay.form << '\n';
    os << "tau = " << format_double(c.delay.tau) << '\n';
    if (c.delay.form == "sin") {
        os << "amp = " << format_double(c.delay.amp) << '\n';
        os << "omega = " << format_double(c.delay.omega) << '\n';
    }
    os << "transport_check = " << (c.delay.transport_check ? "true" : "false") << '\n';
    os << "n_rho = " << c.delay.n_rho << '\n';

    os << "\n[solver]\n";
    os << "a0 = " << format_double(c.solver.a0) << '\n';
    os << "a1 = " << format_double(c.solver.a1) << '\n';
    os << "dt_safety = " << format_double(c.solver.dt_safety) << '\n';
    os << "t_end = " << format_double(c.solver.t_end) << '\n';
    os << "output_every = " << c.solver.output_every << '\n';
    os << "engine = " << c.solver.engine << '\n';
    os << "snapshots = " << detail::render_number_list(c.solver.snapshots) << '\n';
    os << "snapshot_format = " << c.solver.snapshot_format << '\n';

    os << "\n[energy]\n";
    os << "N = " << format_double(c.energy.big_n) << '\n';
    os << "eps = " << format_double(c.energy.eps) << '\n';
    os << "t0 = " << (c.energy.t0 ? format_double(*c.energy.t0) : std::string("auto")) << '\n';
    os << "c7 = " << format_double(c.energy.c7) << '\n';
    os << "monotone_tol = " << format_double(c.energy.monotone_tol) << '\n';

    os << "\n[init]\n";
    detail::render_field(os, "u0", c.init.u0);
    detail::render_field(os, "u1", c.init.u1);
    os << "f0 = " << c.init.f0 << '\n';
    return os.str();
}

// --- builders from a validated config ---------------------------------------

inline Grid build_grid(const GridConfig& g)
{
    if (g.dim == 1)
        return Grid::interval(g.length, g.n);
    return Grid::rectangle(g.lx, g.ly, g.nx, g.ny);
}

inline RelaxationKernel build_kernel(const KernelConfig& k)
{
    if (k.form == "prony") {
        std::vector<PronyMode> modes;
        modes.reserve(k.modes.size());
        for (const auto& m : k.modes)
            modes.push_back({m[0], m[1]});
        return RelaxationKernel::prony(std::move(modes));
    }
    if (k.form == "powerlaw")
        return RelaxationKernel::power_law(k.g0, k.p);
    return RelaxationKernel::zero();
}

inline DecayWitness build_witness(const WitnessConfig& w, const RelaxationKernel& kernel)
{
    if (w.form == "constant")
        return DecayWitness::constant(w.a);
    if (w.form == "hyperbolic")
        return DecayWitness::hyperbolic(w.a);
    return kernel.canonical_witness();
}

inline DelayProfile build_delay(const DelayConfig& d)
{
    if (d.form == "sin")
        return DelayProfile::sinusoidal(d.tau, d.amp, d.omega);
    return DelayProfile::constant(d.tau);
}

inline GridFunction build_field(const Grid& grid, const FieldConfig& f)
{
    if (f.form == "zero")
        return GridFunction(grid);
    const double pi = 3.14159265358979323846;
    if (f.form == "sine") {
        if (grid.dim() == 1) {
            const double k = f.mode[0] * pi / grid.lx();
            return GridFunction::sample(grid,
                                        [&](double x, double) { return f.amp * std::sin(k * x); });
        }
        const double kx = f.mode[0] * pi / grid.lx();
        const double ky = f.mode[1] * pi / grid.ly();
        return GridFunction::sample(grid, [&](double x, double y) {
            return f.amp * std::sin(kx * x) * std::sin(ky * y);
        });
    }
    const double w2 = 2.0 * f.width * f.width;
    if (grid.dim() == 1) {
        const double cx = f.center[0];
        return GridFunction::sample(grid, [&](double x, double) {
            return f.amp * std::exp(-(x - cx) * (x - cx) / w2);
        });
    }
    const double cx = f.center[0], cy = f.center[1];
    return GridFunction::sample(grid, [&](double x, double y) {
        return f.amp * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / w2);
    });
}

inline InitialData build_initial_data(const Grid& grid, const InitConfig& init)
{
    InitialData data{build_field(grid, init.u0), build_field(grid, init.u1), nullptr};
    if (init.f0 == "zero")
        data.history = [](double, std::vector<double>& out) {
            std::fill(out.begin(), out.end(), 0.0);
        };
    // "default" leaves the solver's constant extension of u1 in place
    return data;
}

} // namespace vds
