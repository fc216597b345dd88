#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixlab/exact.hpp"

using namespace fixlab;

namespace {

const std::vector<Rule> kRules{Rule::Voter, Rule::DeathBirth, Rule::Imitation};
const std::vector<std::pair<double, double>> kPayoffs{{2, 1}, {10, 1}, {1, 3}};

// Pushes the whole law of the chain forward with step_distribution until the
// transient mass is negligible. Returns the masses absorbed at all-ones and
// at all-zeros.
std::pair<double, double> propagated_absorption(const Graph &g, const ChainSpec &spec, const Config &start) {
    const int n = static_cast<int>(g.size());
    const std::uint64_t states = std::uint64_t{1} << n;
    std::vector<double> mu(states, 0.0), next(states);
    mu[start.bits()] = 1.0;
    double at_ones = 0, at_zeros = 0, transient = 1;
    for (int step = 0; step < 200000 && transient > 1e-14; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::uint64_t s = 1; s + 1 < states; ++s) {
            if (mu[s] == 0.0)
                continue;
            for (const auto &[cfg, p] : step_distribution(g, Config(n, s), spec))
                next[cfg.bits()] += mu[s] * p;
        }
        at_ones += next[states - 1];
        at_zeros += next[0];
        next[states - 1] = 0;
        next[0] = 0;
        mu.swap(next);
        transient = 0;
        for (double m : mu)
            transient += m;
    }
    return {at_ones, at_zeros};
}

double propagated_fixation(const Graph &g, const ChainSpec &spec, const Config &start) {
    return propagated_absorption(g, spec, start).first;
}

// Direct evaluation of (lambda/N) sum_n E[D-bar(xi_n)] for the discrete voter chain.
double propagated_potential(const Graph &g, Rule rule, const PayoffMatrix &pi, const Config &start) {
    const int n = static_cast<int>(g.size());
    const std::uint64_t states = std::uint64_t{1} << n;
    const ChainSpec voter{Rule::Voter, 0.0, rule_lambda(rule, g.degree()), pi};
    std::vector<double> dbar(states), mu(states, 0.0), next(states);
    for (std::uint64_t s = 0; s < states; ++s)
        dbar[s] = mean_difference(rule, g, Config(n, s), pi);
    mu[start.bits()] = 1.0;
    double total = 0, transient = 1;
    for (int step = 0; step < 400000 && transient > 1e-15; ++step) {
        transient = 0;
        for (std::uint64_t s = 1; s + 1 < states; ++s) {
            total += mu[s] * dbar[s];
            transient += mu[s];
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (std::uint64_t s = 1; s + 1 < states; ++s)
            if (mu[s] != 0.0)
                for (const auto &[cfg, p] : step_distribution(g, Config(n, s), voter))
                    next[cfg.bits()] += mu[s] * p;
        mu.swap(next);
    }
    return voter.lambda / n * total;
}

std::vector<Graph> small_suite() { return {cycle_graph(4), cycle_graph(5), cycle_graph(6), complete_graph(3), complete_graph(4)}; }

} // namespace

TEST(FixationExact, SpecExamples) {
    {
        const StateSpace space(cycle_graph(4), Rule::Voter, PayoffMatrix::canonical(0, 0));
        EXPECT_NEAR(fixation_exact(space, 0.0, InitialDistribution::at(Config::parse("1010"))), 0.5, 1e-12);
    }
    {
        const StateSpace space(complete_graph(3), Rule::DeathBirth, PayoffMatrix::canonical(2, 1));
        EXPECT_NEAR(fixation_exact(space, 0.0, InitialDistribution::uniform_n(1)), 1.0 / 3, 1e-12);
    }
    {
        const StateSpace space(cycle_graph(5), Rule::DeathBirth, PayoffMatrix::canonical(10, 1));
        const double p = fixation_exact(space, 1e-3, InitialDistribution::uniform_n(1));
        EXPECT_NEAR(p, 0.2 + 1e-3 * 0.4, 5e-6);
        EXPECT_GT(p, 0.2);
    }
}

TEST(FixationExact, NeutralEqualsDensityOnEveryState) {
    for (const Graph &g : {cycle_graph(4), cycle_graph(6), complete_graph(4), petersen_graph()})
        for (Rule rule : kRules) {
            const StateSpace space(g, rule, PayoffMatrix::canonical(2, 1));
            const auto h = fixation_vector(space, 0.0);
            for (std::uint64_t s = 0; s < space.states(); ++s)
                EXPECT_NEAR(h[s], p1(g, space.config(s)), 1e-12);
        }
}

TEST(FixationExact, SparsePathNeutral) {
    const Graph g = torus_graph(3, 4);
    const StateSpace space(g, Rule::DeathBirth, PayoffMatrix::canonical(5, 1));
    const auto h = fixation_vector(space, 0.0);
    for (std::uint64_t s = 0; s < space.states(); s += 37)
        EXPECT_NEAR(h[s], p1(g, space.config(s)), 1e-12);
    EXPECT_NEAR(fixation_exact(space, 0.0, InitialDistribution::uniform_n(3)), 0.25, 1e-12);
}

TEST(FixationExact, MatchesDistributionPropagation) {
    for (const Graph &g : {complete_graph(3), cycle_graph(4), complete_graph(4)})
        for (Rule rule : kRules)
            for (auto [b, c] : kPayoffs) {
                const PayoffMatrix pi = PayoffMatrix::canonical(b, c);
                const StateSpace space(g, rule, pi);
                const double w = rule == Rule::Voter ? 0.0 : 0.5 * space.w_limit();
                const ChainSpec spec = make_spec(rule, pi, w, g.degree());
                const auto h = fixation_vector(space, w);
                for (std::uint64_t s = 1; s + 1 < space.states(); ++s)
                    EXPECT_NEAR(h[s], propagated_fixation(g, spec, space.config(s)), 1e-11)
                        << rule_name(rule) << ' ' << space.config(s).to_string();
            }
}

TEST(FixationExact, AbsorptionProbabilitiesSumToOne) {
    for (Rule rule : kRules) {
        const Graph g = cycle_graph(5);
        const PayoffMatrix pi = PayoffMatrix::canonical(10, 1);
        const double w = rule == Rule::Voter ? 0.0 : 0.04;
        const StateSpace space(g, rule, pi);
        const auto h = fixation_vector(space, w);
        const ChainSpec spec = make_spec(rule, pi, w, 2);
        for (std::uint64_t s : {1ULL, 3ULL, 5ULL, 11ULL, 30ULL}) {
            const auto [ones, zeros] = propagated_absorption(g, spec, space.config(s));
            EXPECT_NEAR(ones + zeros, 1.0, 1e-12);
            EXPECT_NEAR(h[s] + zeros, 1.0, 1e-11);
        }
    }
}

TEST(FixationExact, LambdaInvariance) {
    for (Rule rule : kRules) {
        StateSpace space(cycle_graph(6), rule, PayoffMatrix::canonical(10, 1));
        const double w = rule == Rule::Voter ? 0.0 : 0.04;
        const auto before = fixation_vector(space, w);
        space.set_lambda(space.lambda() / 2);
        const auto after = fixation_vector(space, w);
        for (std::size_t s = 0; s < before.size(); ++s)
            EXPECT_NEAR(before[s], after[s], 1e-12);
    }
}

TEST(FixationExact, MonotoneInStartingCount) {
    const Graph g = petersen_graph();
    const StateSpace space(g, Rule::Imitation, PayoffMatrix::canonical(3, 1));
    double prev = -1;
    for (int n = 0; n <= 10; ++n) {
        const double p = fixation_exact(space, 0.0, InitialDistribution::uniform_n(n));
        EXPECT_NEAR(p, n / 10.0, 1e-12);
        EXPECT_GT(p, prev);
        prev = p;
    }
}

TEST(FixationExact, BernoulliStartAtNeutral) {
    const StateSpace space(cycle_graph(6), Rule::DeathBirth, PayoffMatrix::canonical(2, 1));
    EXPECT_NEAR(fixation_exact(space, 0.0, InitialDistribution::bernoulli(0.3)), 0.3, 1e-12);
    EXPECT_NEAR(fixation_exact(space, 0.01, InitialDistribution::bernoulli(0.0)), 0.0, 1e-15);
    EXPECT_NEAR(fixation_exact(space, 0.01, InitialDistribution::bernoulli(1.0)), 1.0, 1e-15);
}

TEST(FixationExact, Errors) {
    EXPECT_THROW(StateSpace(random_regular_graph(16, 3, 1), Rule::DeathBirth, PayoffMatrix::canonical(2, 1)),
                 DomainError);
    const StateSpace space(cycle_graph(5), Rule::DeathBirth, PayoffMatrix::canonical(100, 1));
    EXPECT_THROW(fixation_exact(space, 0.5, InitialDistribution::uniform_n(1)), WMaxViolation);
    EXPECT_THROW(fixation_exact(space, -0.001, InitialDistribution::uniform_n(1)), WMaxViolation);
    EXPECT_THROW(fixation_exact(space, 0.0, InitialDistribution::uniform_n(6)), DomainError);
    EXPECT_THROW(fixation_exact(space, 0.0, InitialDistribution::at(Config::parse("101"))), DomainError);
}

TEST(ZeroPotential, SpecExamples) {
    {
        const StateSpace space(cycle_graph(5), Rule::DeathBirth, PayoffMatrix::canonical(10, 1));
        EXPECT_NEAR(zero_potential(space, InitialDistribution::at(Config::ones(5))), 0.0, 1e-15);
        EXPECT_NEAR(zero_potential(space, InitialDistribution::uniform_n(1)), 0.4, 1e-10);
        EXPECT_NEAR(w_derivative_at_zero(space, InitialDistribution::uniform_n(1)), 0.4, 1e-5);
    }
    {
        const StateSpace space(complete_graph(4), Rule::Imitation, PayoffMatrix::canonical(1, 1));
        EXPECT_NEAR(zero_potential(space, InitialDistribution::uniform_n(2)), -2.0, 1e-10);
    }
    {
        const StateSpace space(complete_graph(3), Rule::DeathBirth, PayoffMatrix::canonical(2, 1));
        EXPECT_NEAR(w_derivative_at_zero(space, InitialDistribution::uniform_n(1)), -2.0 / 3, 1e-5);
    }
    for (Rule rule : {Rule::DeathBirth, Rule::Imitation}) {
        const StateSpace space(cycle_graph(5), rule, PayoffMatrix::canonical(0, 0));
        EXPECT_NEAR(w_derivative_at_zero(space, InitialDistribution::uniform_n(2)), 0.0, 1e-12);
        EXPECT_NEAR(zero_potential(space, InitialDistribution::uniform_n(2)), 0.0, 1e-15);
    }
}

TEST(ZeroPotential, MatchesDirectSummation) {
    for (const Graph &g : {complete_graph(3), cycle_graph(4), complete_graph(4)})
        for (Rule rule : {Rule::DeathBirth, Rule::Imitation}) {
            const PayoffMatrix pi = PayoffMatrix::canonical(10, 1);
            const StateSpace space(g, rule, pi);
            const auto pot = zero_potential_vector(space);
            for (std::uint64_t s = 1; s + 1 < space.states(); ++s)
                EXPECT_NEAR(pot[s], propagated_potential(g, rule, pi, space.config(s)), 1e-10);
        }
}

TEST(ZeroPotential, DerivativeTriangle) {
    std::vector<Graph> graphs = small_suite();
    graphs.push_back(petersen_graph());
    for (const Graph &g : graphs)
        for (Rule rule : {Rule::DeathBirth, Rule::Imitation})
            for (auto [b, c] : kPayoffs) {
                const StateSpace space(g, rule, PayoffMatrix::canonical(b, c));
                for (int n = 1; n < space.vertices(); ++n) {
                    const auto init = InitialDistribution::uniform_n(n);
                    EXPECT_NEAR(w_derivative_at_zero(space, init), zero_potential(space, init), 1e-5)
                        << rule_name(rule) << " N=" << g.size() << " n=" << n << " b=" << b;
                }
                const auto point = InitialDistribution::at(Config::parse(std::string(g.size() - 1, '0') + "1"));
                EXPECT_NEAR(w_derivative_at_zero(space, point), zero_potential(space, point), 1e-5);
            }
}

TEST(ZeroPotential, FirstOrderApproximation) {
    // P^w - (n/N + w I) is O(w^2)
    const StateSpace space(cycle_graph(6), Rule::Imitation, PayoffMatrix::canonical(4, 1));
    const auto init = InitialDistribution::uniform_n(2);
    const double pot = zero_potential(space, init);
    double prev = 0;
    for (double w : {4e-3, 2e-3, 1e-3}) {
        const double err = std::abs(fixation_exact(space, w, init) - (2.0 / 6 + w * pot));
        if (prev > 0)
            EXPECT_NEAR(prev / err, 4.0, 0.5);
        prev = err;
    }
}
