#include "vortex/run_config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "vortex/errors.hpp"

namespace vortex {

namespace {

class ExpressionParser {
public:
    explicit ExpressionParser(const std::string& text) : s_(text) {}

    double parse() {
        const double v = sum();
        skip_space();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    double sum() {
        double v = product();
        for (;;) {
            skip_space();
            if (accept('+')) v += product();
            else if (accept('-')) v -= product();
            else return v;
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            skip_space();
            if (accept('*')) v *= unary();
            else if (accept('/')) v /= unary();
            else return v;
        }
    }

    double unary() {
        skip_space();
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return atom();
    }

    double atom() {
        skip_space();
        if (accept('(')) {
            const double v = sum();
            skip_space();
            if (!accept(')')) fail("missing ')'");
            return v;
        }
        if (s_.compare(pos_, 2, "pi") == 0) {
            pos_ += 2;
            return pi;
        }
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail(pos_ < s_.size() ? "expected a number" : "unexpected end of expression");
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("cannot evaluate '" + s_ + "': " + why);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

} // namespace

double evaluate_expression(const std::string& text) {
    const double v = ExpressionParser(text).parse();
    if (!std::isfinite(v)) throw ConfigError("expression '" + text + "' is not finite");
    return v;
}

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> defaults = {
        {"quadrature", 1e-8},         // relative, integrals with closed forms
        {"mixed_integral", 1e-8},     // times pi
        {"eigenfunction", 1e-7},      // times V / 2 pi
        {"poincare_lelong", 1e-6},
        {"structural", 1e-6},
        {"classical_futaki", 1e-7},   // times V
        {"emh_closed_form", 1e-6},    // times 1 + |closed form|
        {"futaki_invariance", 1e-6},  // times max(1, |closed form|)
        {"gauss_bonnet", 1e-10},
        {"conserved_integral", 1e-6},
        {"radial_match", 1e-6},
        {"futaki_at_solution", 1e-7},
    };
    return defaults;
}

double RunConfig::tolerance(const std::string& name) const {
    const auto it = tolerances.find(name);
    if (it == tolerances.end()) throw InvalidArgument("unknown tolerance '" + name + "'");
    return it->second;
}

void RunConfig::override_seed(std::uint64_t base) {
    const std::size_t n = seeds.empty() ? 10 : seeds.size();
    seeds.clear();
    for (std::size_t i = 0; i < n; ++i) seeds.push_back(base + i);
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig run;
    int N = 2, ell = 1;
    double tau = 1.0, V = 16.0 * pi;
    std::optional<double> a;
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");

        auto number = [&] {
            try {
                return evaluate_expression(value);
            } catch (const ConfigError& e) {
                throw ConfigError(where + key + ": " + e.what());
            }
        };
        auto integer = [&] {
            const double v = number();
            if (v != std::floor(v) || std::abs(v) > 1e9) {
                throw ConfigError(where + key + " must be an integer (got " + value + ")");
            }
            return static_cast<int>(v);
        };

        if (key == "config.N") N = integer();
        else if (key == "config.ell") ell = integer();
        else if (key == "config.tau") tau = number();
        else if (key == "config.V") V = number();
        else if (key == "config.a") a = number();
        else if (key == "grid.n_theta") run.n_theta = integer();
        else if (key == "grid.n_phi") run.n_phi = integer();
        else if (key == "solver.max_newton_iters") run.solver.max_newton_iters = integer();
        else if (key == "solver.newton_tol") run.solver.newton_tol = number();
        else if (key == "solver.linear_tol") run.solver.linear_tol = number();
        else if (key == "solver.damping") run.solver.damping = number();
        else if (key == "solver.continuation_steps") run.solver.continuation_steps = integer();
        else if (key == "solver.init_strategy") {
            try {
                run.solver.init_strategy = parse_init_strategy(unquote(value));
            } catch (const InvalidArgument& e) {
                throw ConfigError(where + e.what());
            }
        } else if (key == "seeds") {
            run.seeds.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                const std::string t = trim(item);
                if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
                    throw ConfigError(where + "seeds must be non-negative integers (got '" + t + "')");
                }
                run.seeds.push_back(std::stoull(t));
            }
        } else if (key == "output_dir") {
            run.output_dir = unquote(value);
        } else if (key.rfind("tolerances.", 0) == 0) {
            const std::string name = key.substr(11);
            if (!run.tolerances.count(name)) throw ConfigError(where + "unknown tolerance '" + name + "'");
            const double v = number();
            if (!(v > 0.0)) throw ConfigError(where + key + " must be positive");
            run.tolerances[name] = v;
        } else {
            throw ConfigError(where + "unknown key '" + key + "'");
        }
    }

    try {
        run.config = VortexConfig::make(N, ell, tau, V, a);
        run.solver.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (run.n_theta < 8 || run.n_phi < 8) {
        throw ConfigError("grid.n_theta and grid.n_phi must be >= 8 (got " + std::to_string(run.n_theta) +
                          " x " + std::to_string(run.n_phi) + ")");
    }
    if (run.seeds.size() < 2) throw ConfigError("seeds must list at least two values");
    return run;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace vortex
