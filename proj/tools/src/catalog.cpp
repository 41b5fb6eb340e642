#include "pvlab/cli/catalog.hpp"

#include "pvlab/errors.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace pvlab::cli {

namespace {

using nlohmann::json;
using std::numbers::pi;
using std::numbers::sqrt2;

[[noreturn]] void config_error(const std::string& msg)
{
    throw Error(ErrorCode::ConfigError, msg);
}

void allow_keys(const json& j, const std::set<std::string>& keys, const std::string& where)
{
    if (!j.is_object())
        config_error(where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!keys.contains(k))
            config_error("unknown key '" + k + "' in " + where);
}

double num(const json& j, const char* key, double fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number())
        config_error(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

int integer(const json& j, const char* key, int fallback)
{
    if (!j.contains(key))
        return fallback;
    if (!j.at(key).is_number_integer())
        config_error(std::string("'") + key + "' must be an integer");
    return j.at(key).get<int>();
}

struct Entry {
    const char* help;
    std::set<std::string> keys;
};

const std::map<std::string, Entry>& entries()
{
    static const std::map<std::string, Entry> e{
        {"zero", {"identically zero", {}}},
        {"constant", {"amplitude", {"amplitude"}}},
        {"cos_mode", {"amplitude * sqrt2 cos(k pi x) [* sqrt2 cos(l pi y) in 2D]", {"amplitude", "k", "l"}}},
        {"sin_mode", {"amplitude * sqrt2 sin(k pi x) [* sqrt2 sin(l pi y) in 2D]", {"amplitude", "k", "l"}}},
        {"polynomial", {"sum_i coefficients[i] x^i (1D) or x^i y^i terms given by 'powers' (2D)",
                        {"coefficients", "powers"}}},
        {"exponential", {"amplitude * exp(rate_x x + rate_y y)", {"amplitude", "rate_x", "rate_y"}}},
        {"broadband", {"sum_{k<=kmax} s_k k^-decay sqrt2 cos(k pi x), s_k random signs from the seed",
                       {"amplitude", "kmax", "decay"}}},
    };
    return e;
}

} // namespace

std::vector<std::string> catalog_names()
{
    std::vector<std::string> names;
    for (const auto& [k, v] : entries())
        names.push_back(k);
    return names;
}

std::string catalog_help()
{
    std::ostringstream os;
    for (const auto& [k, v] : entries()) {
        os << k << ": " << v.help;
        if (!v.keys.empty()) {
            os << " [keys:";
            for (const auto& key : v.keys)
                os << ' ' << key;
            os << ']';
        }
        os << '\n';
    }
    return os.str();
}

ScalarFn scalar_field(const json& spec, int dim, std::uint64_t seed)
{
    if (!spec.is_object() || !spec.contains("field") || !spec.at("field").is_string())
        config_error("a field entry needs a string 'field'");
    const std::string name = spec.at("field").get<std::string>();
    const auto it = entries().find(name);
    if (it == entries().end())
        config_error("unknown catalog field '" + name + "'");
    std::set<std::string> keys = it->second.keys;
    keys.insert("field");
    allow_keys(spec, keys, "field '" + name + "'");
    const double amp = num(spec, "amplitude", 1.0);

    if (name == "zero")
        return [](const Point&) { return 0.0; };
    if (name == "constant")
        return [amp](const Point&) { return amp; };
    if (name == "cos_mode" || name == "sin_mode") {
        const int k = integer(spec, "k", 1);
        const int l = integer(spec, "l", dim == 2 ? 1 : 0);
        if (k < 0 || l < 0)
            config_error("mode numbers must be nonnegative");
        const bool cosine = name == "cos_mode";
        return [=](const Point& x) {
            auto f = [cosine](int m, double s) {
                return m == 0 && cosine ? 1.0 : sqrt2 * (cosine ? std::cos(m * pi * s) : std::sin(m * pi * s));
            };
            return amp * f(k, x[0]) * (dim == 2 ? f(l, x[1]) : 1.0);
        };
    }
    if (name == "polynomial") {
        if (!spec.contains("coefficients") || !spec.at("coefficients").is_array())
            config_error("polynomial needs a 'coefficients' array");
        const auto c = spec.at("coefficients").get<std::vector<double>>();
        std::vector<std::array<int, 2>> powers;
        if (spec.contains("powers")) {
            for (const auto& p : spec.at("powers"))
                powers.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
            if (powers.size() != c.size())
                config_error("polynomial 'powers' and 'coefficients' differ in length");
        } else {
            for (std::size_t i = 0; i < c.size(); ++i)
                powers.push_back({static_cast<int>(i), 0});
        }
        return [c, powers](const Point& x) {
            double v = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i)
                v += c[i] * std::pow(x[0], powers[i][0]) * std::pow(x[1], powers[i][1]);
            return v;
        };
    }
    if (name == "exponential") {
        const double rx = num(spec, "rate_x", 1.0), ry = num(spec, "rate_y", 0.0);
        return [=](const Point& x) { return amp * std::exp(rx * x[0] + ry * x[1]); };
    }
    // broadband
    const int kmax = integer(spec, "kmax", 64);
    const double decay = num(spec, "decay", 0.5);
    if (kmax < 1)
        config_error("broadband needs kmax >= 1");
    std::mt19937_64 rng(seed);
    std::vector<double> a(kmax + 1, 0.0);
    for (int k = 1; k <= kmax; ++k)
        a[k] = amp * ((rng() >> 63) ? 1.0 : -1.0) * std::pow(static_cast<double>(k), -decay);
    return [a, kmax](const Point& x) {
        double v = 0.0;
        for (int k = 1; k <= kmax; ++k)
            v += a[k] * sqrt2 * std::cos(k * pi * x[0]);
        return v;
    };
}

VectorFn vector_field(const json& spec, int dim, std::uint64_t seed)
{
    if (dim == 1) {
        const ScalarFn f = scalar_field(spec, dim, seed);
        return [f](const Point& x) { return std::array<double, 2>{f(x), 0.0}; };
    }
    if (!spec.is_object() || !spec.contains("components"))
        config_error("2D vector fields need 'components': [x, y]");
    allow_keys(spec, {"components"}, "vector field");
    const json& c = spec.at("components");
    if (!c.is_array() || c.size() != 2)
        config_error("'components' must hold two field entries");
    const ScalarFn fx = scalar_field(c.at(0), dim, seed);
    const ScalarFn fy = scalar_field(c.at(1), dim, seed + 1);
    return [fx, fy](const Point& x) { return std::array<double, 2>{fx(x), fy(x)}; };
}

ExpPoly time_profile(const json& spec)
{
    allow_keys(spec, {"coeff", "power", "rate"}, "time profile");
    ExpPoly e;
    e.coeff = num(spec, "coeff", 1.0);
    e.power = integer(spec, "power", 0);
    e.rate = num(spec, "rate", 0.0);
    if (e.power < 0)
        config_error("time profile power must be nonnegative");
    return e;
}

Vec read_coefficients(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        config_error("cannot read coefficient file '" + path + "'");
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        try {
            v.push_back(std::stod(line));
        } catch (const std::exception&) {
            config_error("malformed number in '" + path + "': " + line);
        }
    }
    return Eigen::Map<Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace pvlab::cli
