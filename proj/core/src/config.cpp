#include "mbcool/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace mbcool {

namespace {

constexpr std::array<std::pair<Experiment, std::string_view>, 6> kExperimentNames{{
    {Experiment::Entropy, "entropy"},
    {Experiment::Uncertainty, "uncertainty"},
    {Experiment::FidelityHist, "fidelity_hist"},
    {Experiment::QfuncDump, "qfunc_dump"},
    {Experiment::FeedbackHist, "feedback_hist"},
    {Experiment::Qsweep, "qsweep"},
}};

constexpr double kReferenceTemperatureMilliKelvin = 50.0;
constexpr double kReferenceOmega = 5.0e7;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(std::string_view v, int line) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ConfigError(line, "expected a finite number, got '" + std::string(v) + "'");
    return out;
}

template <class Int>
Int to_integer(std::string_view v, int line) {
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(line, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

bool to_bool(std::string_view v, int line) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError(line, "expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> to_list(std::string_view v, int line) {
    if (!v.empty() && v.front() == '[') {
        if (v.back() != ']') throw ConfigError(line, "unterminated list");
        v = v.substr(1, v.size() - 2);
    }
    std::vector<double> out;
    while (!trim(v).empty()) {
        const auto comma = v.find(',');
        out.push_back(to_double(trim(v.substr(0, comma)), line));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError(line, "list must not be empty");
    return out;
}

void require(bool ok, int line, const std::string& what) {
    if (!ok) throw ConfigError(line, what);
}

// Keys resolved after all lines are read, because they exclude each other.
struct DeferredKeys {
    std::optional<std::pair<double, int>> theta_T, nbar0, temperature_mK, omega;
    std::optional<std::pair<double, int>> gamma_tilde, q_factor;
};

using Handler = std::function<void(RunConfig&, DeferredKeys&, std::string_view, int)>;

const std::map<std::string_view, Handler>& handlers() {
    static const std::map<std::string_view, Handler> table = [] {
        std::map<std::string_view, Handler> t;
        auto real = [](double SystemParams::*field, auto check, const char* what) {
            return [=](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
                const double x = to_double(v, line);
                require(check(x), line, what);
                c.params.*field = x;
            };
        };
        auto positive = [](double x) { return x > 0.0; };
        auto nonneg = [](double x) { return x >= 0.0; };
        auto any = [](double) { return true; };

        t["kappa"] = real(&SystemParams::kappa, any, "");
        t["chi"] = real(&SystemParams::chi, any, "");
        t["interaction_angle"] = real(&SystemParams::interaction_angle, positive, "interaction_angle must be > 0");
        t["wait_angle"] = real(&SystemParams::wait_angle, nonneg, "wait_angle must be >= 0");
        t["eps_skip"] = real(&SystemParams::eps_skip, positive, "eps_skip must be > 0");

        auto temp = [nonneg](std::optional<std::pair<double, int>> DeferredKeys::*slot, bool strict) {
            return [=](RunConfig&, DeferredKeys& k, std::string_view v, int line) {
                const double x = to_double(v, line);
                require(strict ? x > 0.0 : nonneg(x), line, strict ? "value must be > 0" : "value must be >= 0");
                k.*slot = std::pair{x, line};
            };
        };
        t["theta_T"] = temp(&DeferredKeys::theta_T, false);
        t["nbar0"] = temp(&DeferredKeys::nbar0, false);
        t["temperature_mK"] = temp(&DeferredKeys::temperature_mK, false);
        t["omega"] = temp(&DeferredKeys::omega, true);
        t["gamma_tilde"] = temp(&DeferredKeys::gamma_tilde, false);
        t["q_factor"] = temp(&DeferredKeys::q_factor, true);

        t["bath_nbar"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.bath.nbar = to_double(v, line);
            require(c.params.bath.nbar >= 0.0, line, "bath_nbar must be >= 0");
        };
        t["n_measurements"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.n_measurements = to_integer<int>(v, line);
            require(c.params.n_measurements >= 1, line, "n_measurements must be >= 1");
        };
        t["feedback_enabled"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.feedback_enabled = to_bool(v, line);
        };
        t["coupling_during_wait"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.coupling_during_wait = to_bool(v, line);
        };
        t["dim"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.dim = to_integer<int>(v, line);
            require(c.params.dim == 0 || c.params.dim >= 2, line, "dim must be 0 (auto) or >= 2");
        };
        t["tail_tol"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.truncation.tail_tol = to_double(v, line);
            require(c.params.truncation.tail_tol > 0.0, line, "tail_tol must be > 0");
        };
        t["pad"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.truncation.pad = to_integer<int>(v, line);
            require(*c.params.truncation.pad >= 0, line, "pad must be >= 0");
        };
        t["step_angle"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.params.step_angle = to_double(v, line);
            require(*c.params.step_angle > 0.0, line, "step_angle must be > 0");
        };
        t["trajectories"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.trajectories = to_integer<int>(v, line);
            require(c.trajectories >= 1, line, "trajectories must be >= 1");
        };
        t["master_seed"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.master_seed = to_integer<std::uint64_t>(v, line);
        };
        t["output_dir"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            require(!v.empty(), line, "output_dir must not be empty");
            c.output_dir = std::string(v);
        };
        t["experiment"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            const auto e = parse_experiment(v);
            require(e.has_value(), line, "unknown experiment '" + std::string(v) + "'");
            c.experiment = *e;
        };
        t["q_factors"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.q_factors = to_list(v, line);
            for (double q : c.q_factors) require(q > 0.0, line, "q_factors must be > 0");
        };
        t["nbars"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.nbars = to_list(v, line);
            for (double n : c.nbars) require(n >= 0.0, line, "nbars must be >= 0");
        };
        t["burn_in"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.burn_in = to_integer<int>(v, line);
            require(c.burn_in >= 0, line, "burn_in must be >= 0");
        };
        t["q_grid_resolution"] = [](RunConfig& c, DeferredKeys&, std::string_view v, int line) {
            c.q_grid_resolution = to_integer<int>(v, line);
            require(c.q_grid_resolution >= 2, line, "q_grid_resolution must be >= 2");
        };
        return t;
    }();
    return table;
}

void resolve_deferred(RunConfig& c, const DeferredKeys& k) {
    const std::optional<std::pair<double, int>>* groups[] = {&k.theta_T, &k.nbar0, &k.temperature_mK, &k.omega};
    int first = -1;
    for (int g = 0; g < 4; ++g) {
        if (!groups[g]->has_value()) continue;
        const bool same_group = first >= 2 && g >= 2;
        if (first >= 0 && !same_group) {
            throw ConfigError((*groups[g])->second,
                              "theta_T, nbar0 and temperature_mK/omega are mutually exclusive");
        }
        if (first < 0) first = g;
    }
    if (k.theta_T) {
        c.params.theta_T = k.theta_T->first;
    } else if (k.nbar0) {
        c.params.theta_T = theta_for_occupation(k.nbar0->first);
    } else if (k.temperature_mK || k.omega) {
        const double mk = k.temperature_mK ? k.temperature_mK->first : kReferenceTemperatureMilliKelvin;
        const double omega = k.omega ? k.omega->first : kReferenceOmega;
        c.params.theta_T = theta_from_temperature(mk * 1e-3, omega);
    }

    if (k.gamma_tilde && k.q_factor)
        throw ConfigError(k.q_factor->second, "gamma_tilde and q_factor are mutually exclusive");
    if (k.gamma_tilde) c.params.bath.gamma_tilde = k.gamma_tilde->first;
    if (k.q_factor) c.params.bath.gamma_tilde = BathParams::from_q(k.q_factor->first, 0.0).gamma_tilde;
}

}  // namespace

std::string_view experiment_name(Experiment e) {
    for (const auto& [id, name] : kExperimentNames)
        if (id == e) return name;
    return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
    for (const auto& [id, n] : kExperimentNames)
        if (n == name) return id;
    return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
    static const std::vector<Experiment> all = [] {
        std::vector<Experiment> v;
        for (const auto& entry : kExperimentNames) v.push_back(entry.first);
        return v;
    }();
    return all;
}

void RunConfig::validate() const {
    params.validate();
    if (trajectories < 1) throw ConfigError(0, "trajectories must be >= 1");
    if (burn_in < 0) throw ConfigError(0, "burn_in must be >= 0");
    if (q_grid_resolution < 2) throw ConfigError(0, "q_grid_resolution must be >= 2");
    if (experiment == Experiment::Qsweep) {
        if (q_factors.empty() || nbars.empty()) throw ConfigError(0, "qsweep needs nonempty q_factors and nbars");
        if (params.n_measurements <= burn_in)
            throw ConfigError(0, "qsweep needs n_measurements > burn_in");
    }
}

RunConfig parse_config(std::string_view text) {
    RunConfig config;
    DeferredKeys deferred;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));

        const auto it = handlers().find(key);
        if (it == handlers().end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
        if (const auto prev = seen.find(key); prev != seen.end()) {
            throw ConfigError(line_no, "duplicate key '" + std::string(key) + "' (first on line " +
                                           std::to_string(prev->second) + ")");
        }
        seen.emplace(std::string(key), line_no);
        if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
        it->second(config, deferred, value, line_no);
    }
    resolve_deferred(config, deferred);
    config.validate();
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    const SystemParams& p = c.params;
    std::ostringstream out;
    auto kv = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
        return s;
    };

    kv("experiment", std::string(experiment_name(c.experiment)));
    kv("trajectories", std::to_string(c.trajectories));
    kv("master_seed", std::to_string(c.master_seed));
    kv("output_dir", c.output_dir);
    kv("kappa", fmt_double(p.kappa));
    kv("chi", fmt_double(p.chi));
    kv("interaction_angle", fmt_double(p.interaction_angle));
    kv("wait_angle", fmt_double(p.wait_angle));
    kv("theta_T", fmt_double(p.theta_T));
    kv("n_measurements", std::to_string(p.n_measurements));
    kv("feedback_enabled", p.feedback_enabled ? "true" : "false");
    kv("coupling_during_wait", p.coupling_during_wait ? "true" : "false");
    kv("gamma_tilde", fmt_double(p.bath.gamma_tilde));
    kv("bath_nbar", fmt_double(p.bath.nbar));
    kv("dim", std::to_string(p.dim));
    kv("tail_tol", fmt_double(p.truncation.tail_tol));
    if (p.truncation.pad) kv("pad", std::to_string(*p.truncation.pad));
    kv("eps_skip", fmt_double(p.eps_skip));
    if (p.step_angle) kv("step_angle", fmt_double(*p.step_angle));
    kv("burn_in", std::to_string(c.burn_in));
    kv("q_grid_resolution", std::to_string(c.q_grid_resolution));
    if (!c.q_factors.empty()) kv("q_factors", list(c.q_factors));
    if (!c.nbars.empty()) kv("nbars", list(c.nbars));
    return out.str();
}

RunConfig preset(Experiment e) {
    RunConfig c;
    c.experiment = e;
    SystemParams& p = c.params;
    switch (e) {
        case Experiment::Entropy:
            c.trajectories = 200;
            p.n_measurements = 160;
            p.wait_angle = 0.0;
            break;
        case Experiment::Uncertainty:
            c.trajectories = 2000;
            p.n_measurements = 160;
            p.wait_angle = 0.0;
            break;
        case Experiment::FidelityHist:
            c.trajectories = 500;
            p.n_measurements = 150;
            break;
        case Experiment::QfuncDump:
            c.trajectories = 4;
            p.n_measurements = 150;
            p.wait_angle = 0.0;
            break;
        case Experiment::FeedbackHist:
            c.trajectories = 100;
            p.n_measurements = 160;
            p.feedback_enabled = true;
            break;
        case Experiment::Qsweep:
            c.trajectories = 20;
            p.n_measurements = 160;
            p.feedback_enabled = true;
            c.q_factors = {1e3, 1e4, 1e5};
            c.nbars = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
            break;
    }
    return c;
}

}  // namespace mbcool
