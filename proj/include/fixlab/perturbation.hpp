#pragma once

// First-order perturbation terms h_1/h_0 of the two game rules around the
// voter model, the difference kernel D, pi-averages, p_1 and K^w = P^w - P.

#include <utility>
#include <vector>

#include "fixlab/dynamics.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

/// Per-vertex values H(x, eta) for one fixed configuration.
struct PerturbationField {
    Rule rule = Rule::Voter;
    std::vector<double> values;

    double operator[](Vertex x) const { return values[static_cast<std::size_t>(x)]; }
};

namespace detail {
inline void require_canonical(const PayoffMatrix &payoff) {
    if (!payoff.is_canonical())
        throw UnsupportedPayoff("perturbation terms need the canonical (b, c) payoff; "
                                "reduce general matrices with reduce_equal_gains first");
}

inline double h_death_birth(const LocalFreqs &f, double b, double c, double k, int i) {
    const double h1 = -(b + c) * k * f.f0 * f.f1 + k * b * f.f00 + k * f.f0 * (b * f.f11 - b * f.f00);
    return i == 1 ? h1 : -h1;
}

inline double h_imitation(const LocalFreqs &f, double b, double c, double k, int i) {
    const double shared = (b - c) * f.f11 - c * f.f10 + b * f.f01;
    if (i == 1)
        return k * ((b - c) * f.f11 - c * f.f10) - k * k / (k + 1) * f.f1 * shared -
               k / (k + 1) * b * f.f1 * f.f1;
    return k * b * f.f01 - k * k / (k + 1) * f.f0 * shared - k / (k + 1) * f.f0 * ((b - c) * f.f1 - c * f.f0);
}
} // namespace detail

/// h_i(x, eta): the w-coefficient of the rate at which x turns into an i-player.
/// Identically zero for the voter rule.
inline double h_value(Rule rule, const Graph &g, const Config &eta, const PayoffMatrix &payoff, int i,
                      Vertex x) {
    if (rule == Rule::Voter)
        return 0.0;
    detail::require_canonical(payoff);
    const LocalFreqs f = local_freqs(g, eta, x);
    const double k = g.degree(x);
    const double b = payoff.benefit();
    const double c = payoff.cost();
    return rule == Rule::DeathBirth ? detail::h_death_birth(f, b, c, k, i) : detail::h_imitation(f, b, c, k, i);
}

/// D(x, eta) = (1 - eta(x)) h_1(x, eta) - eta(x) h_0(x, eta).
inline double difference_kernel(Rule rule, const Graph &g, const Config &eta, const PayoffMatrix &payoff,
                                Vertex x) {
    return eta[x] ? -h_value(rule, g, eta, payoff, 0, x) : h_value(rule, g, eta, payoff, 1, x);
}

inline PerturbationField difference_field(Rule rule, const Graph &g, const Config &eta,
                                          const PayoffMatrix &payoff) {
    PerturbationField field{rule, {}};
    field.values.reserve(g.size());
    for (std::size_t x = 0; x < g.size(); ++x)
        field.values.push_back(difference_kernel(rule, g, eta, payoff, static_cast<Vertex>(x)));
    return field;
}

inline double pi_average(const Graph &g, const PerturbationField &field) {
    const VertexDistribution pi = stationary(g);
    double s = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x)
        s += field.values[x] * pi.weights[x];
    return s;
}

/// D-bar(eta): pi-average of the difference kernel.
inline double mean_difference(Rule rule, const Graph &g, const Config &eta, const PayoffMatrix &payoff) {
    return pi_average(g, difference_field(rule, g, eta, payoff));
}

/// p_1(eta) = sum_x eta(x) pi(x), evaluated as sum of degrees over 2#E.
inline double p1(const Graph &g, const Config &eta) {
    long long deg = 0;
    for (std::size_t x = 0; x < g.size(); ++x)
        if (eta[static_cast<Vertex>(x)])
            deg += g.degree(static_cast<Vertex>(x));
    return static_cast<double>(deg) / (2.0 * static_cast<double>(g.edge_count()));
}

/// K^w f(eta) = sum_x [P^w(eta, eta^x) - P(eta, eta^x)] (f(eta^x) - f(eta)),
/// from exact rates. P is the voter kernel with the same lambda.
template <class F>
double apply_signed_kernel(const Graph &g, const ChainSpec &spec, F &&f, const Config &eta) {
    const double scale = spec.lambda / static_cast<double>(g.size());
    const double here = f(eta);
    double s = 0.0;
    for (std::size_t xi = 0; xi < g.size(); ++xi) {
        const auto x = static_cast<Vertex>(xi);
        const double dk = update_rate(g, eta, spec, x) - voter_rate(g, eta, x);
        if (dk != 0.0)
            s += scale * dk * (f(eta.flipped(x)) - here);
    }
    return s;
}

/// (c^w - c - w h_{1-eta(x)}) / w^2: the second-order remainder g_w.
inline double rate_residual(const Graph &g, const ChainSpec &spec, const Config &eta, Vertex x) {
    const double cw = update_rate(g, eta, spec, x);
    const double c = voter_rate(g, eta, x);
    const double h = h_value(spec.rule, g, eta, spec.payoff, 1 - eta[x], x);
    return (cw - c - spec.w * h) / (spec.w * spec.w);
}

} // namespace fixlab
