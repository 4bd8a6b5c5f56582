#include "msteer/config.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace msteer {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return s.substr(b, e - b);
}

double parse_number(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty()) {
        throw Error(ErrorCode::ParseError, "empty number in " + what);
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw Error(ErrorCode::ParseError, "bad number '" + t + "' in " + what);
    }
    return v;
}

// split at top-level occurrences of sep (ignores anything inside parens)
std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') {
            ++depth;
        } else if (ch == ')') {
            --depth;
        }
        if (ch == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

// name(arg, arg, ...) -> name + numeric args
void parse_call(const std::string& s, std::string& name, std::vector<double>& args) {
    const std::string t = trim(s);
    const size_t open = t.find('(');
    if (open == std::string::npos || t.back() != ')') {
        throw Error(ErrorCode::ParseError, "expected name(args): '" + t + "'");
    }
    name = trim(t.substr(0, open));
    if (name.empty()) {
        throw Error(ErrorCode::ParseError, "missing family name in '" + t + "'");
    }
    args.clear();
    const std::string inner = t.substr(open + 1, t.size() - open - 2);
    if (!trim(inner).empty()) {
        for (const auto& a : split_top_level(inner, ',')) {
            args.push_back(parse_number(a, name + "(...)"));
        }
    }
}

DensityComponent make_component(const std::string& name, const std::vector<double>& args,
                                double weight) {
    auto need = [&](size_t n) {
        if (args.size() != n) {
            std::ostringstream os;
            os << name << " takes " << n << " arguments, got " << args.size();
            throw Error(ErrorCode::ParseError, os.str());
        }
    };
    DensityComponent c;
    c.weight = weight;
    if (name == "gaussian") {
        need(2);
        c.family = Family::Gaussian;
        c.loc = args[0];
        c.scale = args[1];
    } else if (name == "laplace") {
        need(2);
        c.family = Family::Laplace;
        c.loc = args[0];
        c.scale = args[1];
    } else if (name == "genlogistic") {
        need(2);
        c.family = Family::GenLogistic;
        c.loc = args[0];
        c.shape = args[1];
    } else if (name == "uniform") {
        need(2);
        c.family = Family::Uniform;
        c.lo = args[0];
        c.hi = args[1];
    } else if (name == "cauchy") {
        need(2);
        c.family = Family::Cauchy;
        c.loc = args[0];
        c.scale = args[1];
    } else if (name == "point") {
        need(1);
        c.family = Family::PointMass;
        c.loc = args[0];
    } else if (name == "truncated_gaussian") {
        need(4);
        c.family = Family::TruncatedGaussian;
        c.loc = args[0];
        c.scale = args[1];
        c.lo = args[2];
        c.hi = args[3];
    } else {
        throw Error(ErrorCode::ParseError, "unknown density family '" + name + "'");
    }
    return c;
}

} // namespace

DensitySpec parse_density(const std::string& text) {
    std::vector<DensityComponent> components;
    for (const auto& raw_term : split_top_level(text, '+')) {
        const std::string term = trim(raw_term);
        if (term.empty()) {
            throw Error(ErrorCode::ParseError, "empty mixture term in '" + text + "'");
        }
        double weight = 1.0;
        std::string call = term;
        const auto star = split_top_level(term, '*');
        if (star.size() == 2) {
            weight = parse_number(star[0], "mixture weight");
            call = trim(star[1]);
        } else if (star.size() > 2) {
            throw Error(ErrorCode::ParseError, "too many '*' in '" + term + "'");
        }
        std::string name;
        std::vector<double> args;
        parse_call(call, name, args);
        components.push_back(make_component(name, args, weight));
    }
    return DensitySpec(std::move(components));
}

namespace {

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "on" || v == "1") {
        return true;
    }
    if (v == "false" || v == "off" || v == "0") {
        return false;
    }
    std::ostringstream os;
    os << "line " << line << ": expected true/false, got '" << v << "'";
    throw Error(ErrorCode::ParseError, os.str());
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool saw_mode = false, saw_order = false, saw_horizon = false, saw_constraint = false;
    std::vector<std::string> violations;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string s = trim(raw);
        if (s.empty()) {
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "line " << line << ": expected key = value";
            throw Error(ErrorCode::ParseError, os.str());
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (value.empty()) {
            std::ostringstream os;
            os << "line " << line << ": key '" << key << "' has no value";
            throw Error(ErrorCode::ParseError, os.str());
        }

        auto fail_here = [&](const std::string& msg) {
            std::ostringstream os;
            os << "line " << line << " (" << key << "): " << msg;
            throw Error(ErrorCode::ParseError, os.str());
        };

        try {
            if (key == "mode") {
                if (value == "density") {
                    cfg.mode = SteeringMode::Density;
                } else if (value == "occupation") {
                    cfg.mode = SteeringMode::Occupation;
                } else {
                    fail_here("mode must be density or occupation");
                }
                saw_mode = true;
            } else if (key == "order") {
                cfg.order = static_cast<int>(parse_number(value, key));
                saw_order = true;
            } else if (key == "horizon") {
                cfg.horizon = static_cast<int>(parse_number(value, key));
                saw_horizon = true;
            } else if (key == "coeffs") {
                std::string name;
                std::vector<double> args;
                parse_call(value, name, args);
                if (name == "uniform") {
                    if (args.size() != 2) {
                        fail_here("coeffs = uniform(lo, hi)");
                    }
                    cfg.coeffs.kind = CoeffKind::Uniform;
                    cfg.coeffs.lo = args[0];
                    cfg.coeffs.hi = args[1];
                } else if (name == "list") {
                    cfg.coeffs.kind = CoeffKind::Explicit;
                    cfg.coeffs.values = args;
                } else {
                    fail_here("coeffs must be uniform(lo, hi) or list(...)");
                }
            } else if (key == "initial") {
                cfg.initial = parse_density(value);
            } else if (key == "initial_samples") {
                cfg.initial_samples = value;
            } else if (key == "terminal") {
                cfg.terminal = parse_density(value);
            } else if (key == "constraint") {
                if (value == "none") {
                    cfg.constraint = Support::real_line();
                } else {
                    std::string name;
                    std::vector<double> args;
                    parse_call(value, name, args);
                    if (name != "interval" || args.size() != 2) {
                        fail_here("constraint must be none or interval(lo, hi)");
                    }
                    if (!(args[0] < args[1])) {
                        violations.push_back("constraint interval needs lo < hi");
                    } else {
                        cfg.constraint = Support::interval(args[0], args[1]);
                    }
                }
                saw_constraint = true;
            } else if (key == "agents") {
                cfg.agents = static_cast<int>(parse_number(value, key));
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(parse_number(value, key));
            } else if (key == "output") {
                cfg.output = value;
            } else if (key == "nodes") {
                cfg.nodes = static_cast<int>(parse_number(value, key));
            } else if (key == "tol") {
                cfg.tol = parse_number(value, key);
            } else if (key == "heavy_tail") {
                cfg.heavy_tail = parse_bool(value, line);
            } else if (key == "history") {
                cfg.history = parse_bool(value, line);
            } else {
                fail_here("unknown key");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError) {
                throw;
            }
            // semantic problem inside a value (weights, intervals, ...)
            std::ostringstream os;
            os << "line " << line << " (" << key << "): " << e.what();
            violations.push_back(os.str());
        }
    }

    if (!saw_mode) {
        violations.push_back("mode is required");
    }
    if (!saw_order) {
        violations.push_back("order is required");
    } else if (cfg.order < 1) {
        violations.push_back("order must be >= 1");
    }
    if (!saw_horizon) {
        violations.push_back("horizon is required");
    } else if (cfg.horizon < 1) {
        violations.push_back("horizon must be >= 1");
    }
    if (!cfg.terminal.has_value()) {
        violations.push_back("terminal density is required");
    }
    if (cfg.coeffs.kind == CoeffKind::Uniform) {
        if (!(cfg.coeffs.lo < cfg.coeffs.hi)) {
            violations.push_back("coeffs uniform(lo, hi) needs lo < hi");
        }
        if (!(cfg.coeffs.lo > 0.0 && cfg.coeffs.hi < 1.0)) {
            violations.push_back("coefficient range must stay inside (0,1)");
        }
    } else if (saw_horizon && cfg.horizon >= 1 &&
               static_cast<int>(cfg.coeffs.values.size()) != cfg.horizon) {
        violations.push_back("coeffs list length must equal horizon");
    }
    if (cfg.mode == SteeringMode::Density) {
        if (!cfg.initial.has_value()) {
            violations.push_back("density mode requires an initial density");
        }
        if (cfg.initial_samples.has_value()) {
            violations.push_back("initial_samples is only valid in occupation mode");
        }
    } else {
        if (cfg.initial.has_value() == cfg.initial_samples.has_value()) {
            violations.push_back(
                "occupation mode needs exactly one of initial / initial_samples");
        }
        if (cfg.initial.has_value() && cfg.agents < 1) {
            violations.push_back("occupation mode with an initial density needs agents >= 1");
        }
    }
    if (cfg.nodes < 64) {
        violations.push_back("nodes must be >= 64");
    }
    if (!(cfg.tol > 0.0)) {
        violations.push_back("tol must be positive");
    }
    if (cfg.initial.has_value() && !cfg.initial->has_finite_moments()) {
        violations.push_back("initial density must have finite moments");
    }
    if (cfg.terminal.has_value() && !cfg.terminal->has_finite_moments()) {
        violations.push_back("terminal density must have finite moments");
    }
    (void)saw_constraint;

    if (!violations.empty()) {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& v : violations) {
            os << "\n  - " << v;
        }
        throw Error(ErrorCode::ValidationError, os.str());
    }
    return cfg;
}

} // namespace msteer
