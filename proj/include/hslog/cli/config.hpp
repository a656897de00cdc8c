#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "../params.hpp"

namespace hslog::cli {

struct RunConfig {
    double p = 2.0;
    double alpha0 = 2.0;
    double alpha1 = 2.0;
    double theta = 2.0;
    double tau = 1.0;
    double beta = 0.5;
    int M = 2000;
    double gamma = 3.0;
    double r0 = 0.2;
    std::vector<double> epsilon_list{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6};
    std::vector<double> beta_list{1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> mp_epsilon_list{1e-3, 1e-4, 1e-5};
    std::vector<double> mp_rate_epsilon_list{1e-5, 3.16227766016838e-6, 1e-6, 3.16227766016838e-7, 1e-7};
    std::vector<double> ncs_epsilon_list{1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    std::vector<double> tail_radii{0.05, 0.1, 0.2};
    double shoot_tol = 1e-10;
    double weak_tol = 1e-4;
    int weak_tests = 20;
    double amp_min = 1e-2;
    double amp_max = 1e4;
    int amp_scan = 61;
    double r_min = 1e-6;
    double level_tol = 5e-3;
    double tail_tol = 1e-2;
    int random_profiles = 100;
    std::uint64_t seed = 20240611;
    std::string output_dir = ".";

    ParamSet params() const { return validate_params(p, alpha0, alpha1, theta); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ValidationError("config: '" + key + "' expects a number, got '" + v + "'");
    }
    if (used != v.size()) throw ValidationError("config: '" + key + "' expects a number, got '" + v + "'");
    return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long x = 0;
    try {
        x = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw ValidationError("config: '" + key + "' expects an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ValidationError("config: '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw ValidationError("config: '" + key + "' must be a nonempty list");
    return out;
}

}  // namespace detail

// Flat "key = value" lines; '#' starts a comment. Unknown or repeated keys are errors.
inline RunConfig parse_config(std::istream& is) {
    RunConfig c;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto real = [](double& dst) -> Setter { return [&dst](auto& k, auto& v) { dst = detail::parse_real(k, v); }; };
    auto integer = [](int& dst) -> Setter {
        return [&dst](auto& k, auto& v) { dst = static_cast<int>(detail::parse_int(k, v)); };
    };
    auto list = [](std::vector<double>& dst) -> Setter {
        return [&dst](auto& k, auto& v) { dst = detail::parse_list(k, v); };
    };
    const std::map<std::string, Setter> keys{
        {"p", real(c.p)},
        {"alpha0", real(c.alpha0)},
        {"alpha1", real(c.alpha1)},
        {"theta", real(c.theta)},
        {"tau", real(c.tau)},
        {"beta", real(c.beta)},
        {"M", integer(c.M)},
        {"gamma", real(c.gamma)},
        {"r0", real(c.r0)},
        {"epsilon_list", list(c.epsilon_list)},
        {"beta_list", list(c.beta_list)},
        {"mp_epsilon_list", list(c.mp_epsilon_list)},
        {"mp_rate_epsilon_list", list(c.mp_rate_epsilon_list)},
        {"ncs_epsilon_list", list(c.ncs_epsilon_list)},
        {"tail_radii", list(c.tail_radii)},
        {"shoot_tol", real(c.shoot_tol)},
        {"weak_tol", real(c.weak_tol)},
        {"weak_tests", integer(c.weak_tests)},
        {"amp_min", real(c.amp_min)},
        {"amp_max", real(c.amp_max)},
        {"amp_scan", integer(c.amp_scan)},
        {"r_min", real(c.r_min)},
        {"level_tol", real(c.level_tol)},
        {"tail_tol", real(c.tail_tol)},
        {"random_profiles", integer(c.random_profiles)},
        {"seed", [&c](auto& k, auto& v) {
             const long long s = detail::parse_int(k, v);
             if (s < 0) throw ValidationError("config: 'seed' must be ≥ 0");
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"output_dir", [&c](auto&, auto& v) { c.output_dir = v; }},
    };

    std::map<std::string, int> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (seen[key]++) throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        if (val.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");
        it->second(key, val);
    }

    c.params();
    if (!(c.tau > 0.0)) throw ValidationError("tau must be > 0");
    if (!(c.beta > 0.0)) throw ValidationError("beta must be > 0");
    if (c.M < 2) throw ValidationError("M must be ≥ 2");
    if (!(c.gamma >= 1.0)) throw ValidationError("gamma must be ≥ 1");
    if (!(c.r0 > 0.0 && c.r0 < 0.5)) throw ValidationError("r0 must lie in (0, 1/2)");
    for (const auto* l : {&c.epsilon_list, &c.mp_epsilon_list, &c.mp_rate_epsilon_list, &c.ncs_epsilon_list}) {
        for (double e : *l) {
            if (!(e > 0.0)) throw ValidationError("epsilon values must be > 0");
        }
    }
    for (double b : c.beta_list) {
        if (!(b > 0.0)) throw ValidationError("beta_list values must be > 0");
    }
    if (c.weak_tests < 2) throw ValidationError("weak_tests must be ≥ 2");
    if (c.amp_scan < 2) throw ValidationError("amp_scan must be ≥ 2");
    if (!(c.amp_min > 0.0 && c.amp_max > c.amp_min)) throw ValidationError("need 0 < amp_min < amp_max");
    if (c.random_profiles < 0) throw ValidationError("random_profiles must be ≥ 0");
    return c;
}

// Defaults alone, validated the same way as a file.
inline RunConfig parse_config_defaults() {
    std::istringstream empty;
    return parse_config(empty);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace hslog::cli
