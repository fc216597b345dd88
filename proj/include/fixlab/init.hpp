#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "fixlab/dynamics.hpp"

namespace fixlab {

/// Law of the initial configuration: a point mass, u_n (uniform over
/// configurations with exactly n ones) or the Bernoulli product measure mu_u.
struct InitialDistribution {
    enum class Kind { Point, UniformN, Bernoulli };

    Kind kind = Kind::Point;
    Config point;
    int n = 0;
    double u = 0.0;

    static InitialDistribution at(const Config &eta) { return {Kind::Point, eta, 0, 0.0}; }
    static InitialDistribution uniform_n(int n) { return {Kind::UniformN, {}, n, 0.0}; }
    static InitialDistribution bernoulli(double u) { return {Kind::Bernoulli, {}, 0, u}; }

    /// Throws DomainError unless the parameters make sense on N vertices.
    void validate(int n_vertices) const {
        switch (kind) {
        case Kind::Point:
            if (point.size() != n_vertices)
                throw DomainError("initial configuration has " + std::to_string(point.size()) +
                                  " sites, graph has " + std::to_string(n_vertices));
            break;
        case Kind::UniformN:
            // n = 0 and n = N are accepted as the two absorbing point masses.
            if (n < 0 || n > n_vertices)
                throw DomainError("uniform_n needs 0 <= n <= N, got n = " + std::to_string(n));
            break;
        case Kind::Bernoulli:
            if (!(u >= 0.0 && u <= 1.0))
                throw DomainError("bernoulli density must lie in [0, 1]");
            break;
        }
    }

    std::string to_string() const {
        switch (kind) {
        case Kind::Point:
            return "point:" + point.to_string();
        case Kind::UniformN:
            return "un:" + std::to_string(n);
        case Kind::Bernoulli: {
            std::string s = std::to_string(u);
            return "bern:" + s;
        }
        }
        return "?";
    }
};

/// "un:3", "point:1010" or "bern:0.25".
inline InitialDistribution parse_init(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw DomainError("initial distribution must look like un:N, point:BITS or bern:U");
    const std::string_view kind = text.substr(0, colon);
    const std::string arg(text.substr(colon + 1));
    try {
        if (kind == "un" || kind == "uniform")
            return InitialDistribution::uniform_n(std::stoi(arg));
        if (kind == "point")
            return InitialDistribution::at(Config::parse(arg));
        if (kind == "bern" || kind == "bernoulli")
            return InitialDistribution::bernoulli(std::stod(arg));
    } catch (const std::logic_error &) {
        throw DomainError("bad initial distribution argument '" + arg + "'");
    }
    throw DomainError("unknown initial distribution kind '" + std::string(kind) + "'");
}

} // namespace fixlab
