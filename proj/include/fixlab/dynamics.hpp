#pragma once

// Configurations, payoffs, fitness and the exact flip rates of the voter,
// death-birth and imitation chains.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fixlab/error.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

/// Spin configuration on at most 64 vertices; bit x is eta(x), 1 = cooperator.
class Config {
  public:
    static constexpr int kMaxVertices = 64;

    Config() = default;
    Config(int n_vertices, std::uint64_t bits) : n_(n_vertices), bits_(bits & mask(n_vertices)) {
        if (n_vertices < 0 || n_vertices > kMaxVertices)
            throw DomainError("Config supports 0..64 vertices, got " + std::to_string(n_vertices));
    }

    static Config zeros(int n) { return Config(n, 0); }
    static Config ones(int n) { return Config(n, ~std::uint64_t{0}); }

    /// "1000" -> vertex 0 is a cooperator, vertices 1..3 defectors.
    static Config parse(std::string_view s) {
        if (s.size() > static_cast<std::size_t>(kMaxVertices))
            throw DomainError("Config supports 0..64 vertices, got " + std::to_string(s.size()));
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                bits |= std::uint64_t{1} << i;
            else if (s[i] != '0')
                throw DomainError("configuration string must contain only 0/1: " + std::string(s));
        }
        return Config(static_cast<int>(s.size()), bits);
    }

    int size() const { return n_; }
    std::uint64_t bits() const { return bits_; }
    int operator[](Vertex x) const { return static_cast<int>((bits_ >> x) & 1U); }
    int ones_count() const { return std::popcount(bits_); }
    bool all_ones() const { return bits_ == mask(n_); }
    bool all_zeros() const { return bits_ == 0; }
    bool absorbed() const { return all_ones() || all_zeros(); }

    /// eta^x: the configuration with the opinion at x reversed.
    Config flipped(Vertex x) const {
        Config c = *this;
        c.bits_ ^= std::uint64_t{1} << x;
        return c;
    }
    void flip(Vertex x) { bits_ ^= std::uint64_t{1} << x; }

    std::string to_string() const {
        std::string s(static_cast<std::size_t>(n_), '0');
        for (int x = 0; x < n_; ++x)
            if ((*this)[x])
                s[static_cast<std::size_t>(x)] = '1';
        return s;
    }

    friend bool operator==(const Config &, const Config &) = default;

  private:
    static constexpr std::uint64_t mask(int n) {
        if (n <= 0)
            return 0;
        return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    }

    int n_ = 0;
    std::uint64_t bits_ = 0;
};

/// 2x2 game, entry (i, j) is what an i-player receives from a j-player.
struct PayoffMatrix {
    double p11 = 0, p10 = 0, p01 = 0, p00 = 0;

    static PayoffMatrix canonical(double b, double c) { return {b - c, -c, b, 0.0}; }

    double operator()(int i, int j) const {
        if (i == 1)
            return j == 1 ? p11 : p10;
        return j == 1 ? p01 : p00;
    }
    double max_abs() const {
        return std::max({std::abs(p11), std::abs(p10), std::abs(p01), std::abs(p00)});
    }
    bool is_canonical() const { return p00 == 0.0 && p11 == p01 + p10; }
    double benefit() const { return p01; }
    double cost() const { return -p10; }

    friend bool operator==(const PayoffMatrix &, const PayoffMatrix &) = default;
};

enum class Rule { Voter, DeathBirth, Imitation };

inline std::string_view rule_name(Rule r) {
    switch (r) {
    case Rule::Voter:
        return "voter";
    case Rule::DeathBirth:
        return "db";
    case Rule::Imitation:
        return "im";
    }
    return "?";
}

inline Rule parse_rule(std::string_view s) {
    if (s == "voter")
        return Rule::Voter;
    if (s == "db" || s == "death-birth" || s == "deathbirth")
        return Rule::DeathBirth;
    if (s == "im" || s == "imitation")
        return Rule::Imitation;
    throw DomainError("unknown rule '" + std::string(s) + "' (voter|db|im)");
}

/// Auxiliary laziness factor: 1 for voter and death-birth, k/(k+1) for imitation.
inline double rule_lambda(Rule r, int k) {
    return r == Rule::Imitation ? static_cast<double>(k) / (k + 1) : 1.0;
}

/// Largest admissible intensity of selection (exclusive); keeps every
/// fitness >= 0.1 (1 - w).
inline double w_max(const PayoffMatrix &payoff, int k) { return 0.9 / (1.0 + k * payoff.max_abs()); }

struct ChainSpec {
    Rule rule = Rule::Voter;
    double w = 0.0;
    double lambda = 1.0;
    PayoffMatrix payoff;
};

/// Validated constructor: requires 0 <= w < w_max(payoff, k).
inline ChainSpec make_spec(Rule rule, const PayoffMatrix &payoff, double w, int k) {
    if (!(w >= 0.0))
        throw WMaxViolation("intensity of selection must be >= 0");
    if (rule != Rule::Voter && !(w < w_max(payoff, k)))
        throw WMaxViolation("w = " + std::to_string(w) + " is not below w_max = " +
                            std::to_string(w_max(payoff, k)));
    return ChainSpec{rule, w, rule_lambda(rule, k), payoff};
}

/// Number of neighbours of x holding opinion 1.
inline int ones_around(const Graph &g, const Config &eta, Vertex x) {
    int n = 0;
    for (Vertex y : g.neighbors(x))
        n += eta[y];
    return n;
}

/// Voter flip rate: fraction of neighbours disagreeing with x.
inline double voter_rate(const Graph &g, const Config &eta, Vertex x) {
    const int n1 = ones_around(g, eta, x);
    const int disagree = eta[x] ? g.degree(x) - n1 : n1;
    return static_cast<double>(disagree) / g.degree(x);
}

namespace detail {
inline double fitness_from_counts(const PayoffMatrix &pi, double w, int i, int n1, int n0) {
    const double rho = (1.0 - w) + w * (pi(i, 1) * n1 + pi(i, 0) * n0);
    if (!(rho > 0.0))
        throw WMaxViolation("non-positive fitness " + std::to_string(rho) + " at w = " + std::to_string(w));
    return rho;
}
} // namespace detail

/// rho_i(x) = (1 - w) + w (Pi_{i1} n_1(x) + Pi_{i0} n_0(x)).
inline double fitness(const Graph &g, const Config &eta, const ChainSpec &spec, int i, Vertex x) {
    const int n1 = ones_around(g, eta, x);
    return detail::fitness_from_counts(spec.payoff, spec.w, i, n1, g.degree(x) - n1);
}

/// c^w(x, eta): rate at which x adopts the opposite opinion.
///
/// Death-birth: r_i(x) with i = 1 - eta(x), the fitness share of i-neighbours.
/// Imitation: the same share with x's own fitness added to the denominator,
/// rescaled by (k+1)/k so that P^w(eta, eta^x) = (lambda/N) c^w(x, eta) with
/// lambda = k/(k+1). At w = 0 every rule returns voter_rate bit for bit.
inline double update_rate(const Graph &g, const Config &eta, const ChainSpec &spec, Vertex x) {
    if (spec.rule == Rule::Voter)
        return voter_rate(g, eta, x);
    const int target = 1 - eta[x];
    double num = 0.0;
    double den = 0.0;
    for (Vertex y : g.neighbors(x)) {
        const double rho = fitness(g, eta, spec, eta[y], y);
        den += rho;
        if (eta[y] == target)
            num += rho;
    }
    if (num == 0.0)
        return 0.0;
    if (spec.rule == Rule::DeathBirth)
        return num / den;
    const double k = g.degree(x);
    den += fitness(g, eta, spec, eta[x], x);
    return (num * (k + 1.0)) / (den * k);
}

/// One-step law of P^w from eta: entry 0 is the holding mass at eta itself,
/// followed by every eta^x with positive flip mass.
inline std::vector<std::pair<Config, double>> step_distribution(const Graph &g, const Config &eta,
                                                                const ChainSpec &spec) {
    std::vector<std::pair<Config, double>> out;
    out.emplace_back(eta, 0.0);
    const double scale = spec.lambda / static_cast<double>(g.size());
    double moved = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
        const double p = scale * update_rate(g, eta, spec, static_cast<Vertex>(x));
        if (p > 0.0) {
            out.emplace_back(eta.flipped(static_cast<Vertex>(x)), p);
            moved += p;
        }
    }
    if (moved > 1.0 + 1e-12)
        throw ConsistencyError("flip mass exceeds 1; lambda/N scaling is wrong");
    out.front().second = std::max(0.0, 1.0 - moved);
    return out;
}

/// Local densities around x: f_i over neighbours, f_ij over two-step walks
/// x ~ y ~ z (z may be x).
struct LocalFreqs {
    double f1 = 0, f0 = 0;
    double f11 = 0, f10 = 0, f01 = 0, f00 = 0;

    double f(int i) const { return i ? f1 : f0; }
    double ff(int i, int j) const { return i ? (j ? f11 : f10) : (j ? f01 : f00); }
};

inline LocalFreqs local_freqs(const Graph &g, const Config &eta, Vertex x) {
    const double k = g.degree(x);
    std::array<std::array<int, 2>, 2> pairs{};
    int n1 = 0;
    for (Vertex y : g.neighbors(x)) {
        n1 += eta[y];
        const int m1 = ones_around(g, eta, y);
        pairs[eta[y]][1] += m1;
        pairs[eta[y]][0] += g.degree(y) - m1;
    }
    LocalFreqs lf;
    lf.f1 = n1 / k;
    lf.f0 = (k - n1) / k;
    const double k2 = k * k;
    lf.f11 = pairs[1][1] / k2;
    lf.f10 = pairs[1][0] / k2;
    lf.f01 = pairs[0][1] / k2;
    lf.f00 = pairs[0][0] / k2;
    return lf;
}

/// Reduces an equal-gains-from-switching matrix to canonical (b, c) form and
/// rescales w so the death-birth and imitation chains are unchanged.
inline std::pair<PayoffMatrix, double> reduce_equal_gains(const PayoffMatrix &pi_star, double w, int k) {
    const double lhs = pi_star.p11 - pi_star.p10;
    const double rhs = pi_star.p01 - pi_star.p00;
    if (std::abs(lhs - rhs) > 1e-12)
        throw UnsupportedPayoff("payoff violates equal-gains-from-switching (" + std::to_string(lhs) +
                                " != " + std::to_string(rhs) + ")");
    const double denom = 1.0 + k * pi_star.p00 * w;
    if (!(denom > 0.0))
        throw UnsupportedPayoff("1 + k Pi00 w must be positive");
    if (pi_star.p00 == 0.0)
        return {pi_star, w};
    PayoffMatrix adj{pi_star.p11 - pi_star.p00, pi_star.p10 - pi_star.p00, pi_star.p01 - pi_star.p00, 0.0};
    return {adj, w / denom};
}

} // namespace fixlab
