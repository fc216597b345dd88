#pragma once

// Exact fixation probabilities, 0-potentials and w-derivatives by linear
// solves over all 2^N configurations.

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fixlab/binomial.hpp"
#include "fixlab/dynamics.hpp"
#include "fixlab/init.hpp"
#include "fixlab/perturbation.hpp"

namespace fixlab {

/// Full state space of one (graph, rule, payoff). State index = bit pattern
/// of the configuration; 0 is all-defector and 2^N - 1 all-cooperator.
class StateSpace {
  public:
    static constexpr int kDefaultMaxVertices = 14;
    /// Up to this size the absorption systems are factorized densely.
    static constexpr int kDenseMaxVertices = 10;

    StateSpace(Graph g, Rule rule, PayoffMatrix payoff, int max_vertices = kDefaultMaxVertices)
        : graph_(std::move(g)), rule_(rule), payoff_(payoff),
          lambda_(rule_lambda(rule, graph_.degree())) {
        if (static_cast<int>(graph_.size()) > max_vertices)
            throw DomainError("exact solves are limited to N <= " + std::to_string(max_vertices) + ", got N = " +
                              std::to_string(graph_.size()));
        if (graph_.size() < 2)
            throw DomainError("exact solves need N >= 2");
    }

    const Graph &graph() const { return graph_; }
    int vertices() const { return static_cast<int>(graph_.size()); }
    Rule rule() const { return rule_; }
    const PayoffMatrix &payoff() const { return payoff_; }
    std::uint64_t states() const { return std::uint64_t{1} << vertices(); }
    std::uint64_t ones_index() const { return states() - 1; }
    static constexpr std::uint64_t zeros_index() { return 0; }
    Config config(std::uint64_t index) const { return Config(vertices(), index); }

    double lambda() const { return lambda_; }
    /// Fixation probabilities do not depend on lambda; exposed to check that.
    void set_lambda(double lambda) {
        if (!(lambda > 0.0 && lambda <= 1.0))
            throw DomainError("lambda must lie in (0, 1]");
        lambda_ = lambda;
    }

    double w_limit() const { return w_max(payoff_, graph_.degree()); }

    /// Chain at intensity w. Negative w is allowed for finite differences as
    /// long as |w| < w_max.
    ChainSpec chain(double w) const {
        if (rule_ != Rule::Voter && !(std::abs(w) < w_limit()))
            throw WMaxViolation("|w| = " + std::to_string(std::abs(w)) + " is not below w_max = " +
                                std::to_string(w_limit()));
        return ChainSpec{rule_, w, lambda_, payoff_};
    }

  private:
    Graph graph_;
    Rule rule_;
    PayoffMatrix payoff_;
    double lambda_;
};

/// Weights nu(eta) of an initial distribution over all states.
inline std::vector<double> initial_weights(const StateSpace &space, const InitialDistribution &init) {
    const int n_vertices = space.vertices();
    init.validate(n_vertices);
    std::vector<double> weights(space.states(), 0.0);
    switch (init.kind) {
    case InitialDistribution::Kind::Point:
        weights[init.point.bits()] = 1.0;
        break;
    case InitialDistribution::Kind::UniformN: {
        const double mass = 1.0 / static_cast<double>(binomial(n_vertices, init.n));
        for (std::uint64_t s = 0; s < space.states(); ++s)
            if (std::popcount(s) == init.n)
                weights[s] = mass;
        break;
    }
    case InitialDistribution::Kind::Bernoulli:
        for (std::uint64_t s = 0; s < space.states(); ++s) {
            const int ones = std::popcount(s);
            weights[s] = std::pow(init.u, ones) * std::pow(1.0 - init.u, n_vertices - ones);
        }
        break;
    }
    return weights;
}

inline double expect(const StateSpace &space, const InitialDistribution &init, std::span<const double> values) {
    const std::vector<double> weights = initial_weights(space, init);
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] != 0.0)
            s += weights[i] * values[i];
    return s;
}

namespace detail {

/// Solves, for every transient state eta,
///   scale * sum_x rate(eta, x) (v(eta) - v(eta^x)) = source(eta)
/// with v(all ones) = at_ones and v(all zeros) = 0. Returns v on all states.
inline std::vector<double> solve_transient(const StateSpace &space,
                                           const std::function<double(const Config &, Vertex)> &rate,
                                           double scale, const std::function<double(const Config &)> &source,
                                           double at_ones) {
    const int n = space.vertices();
    const std::uint64_t states = space.states();
    const auto m = static_cast<Eigen::Index>(states - 2);
    auto unknown = [](std::uint64_t s) { return static_cast<Eigen::Index>(s - 1); };

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(n + 1));
    for (std::uint64_t s = 1; s + 1 < states; ++s) {
        const Config eta = space.config(s);
        const Eigen::Index row = unknown(s);
        double diag = 0.0;
        for (Vertex x = 0; x < n; ++x) {
            const double r = scale * rate(eta, x);
            if (r == 0.0)
                continue;
            diag += r;
            const std::uint64_t t = s ^ (std::uint64_t{1} << x);
            if (t == space.ones_index())
                rhs[row] += r * at_ones;
            else if (t != StateSpace::zeros_index())
                entries.emplace_back(row, unknown(t), -r);
        }
        if (diag == 0.0)
            throw ConsistencyError("transient state " + eta.to_string() + " has no outgoing flips");
        entries.emplace_back(row, row, diag);
        rhs[row] += source(eta);
    }

    Eigen::SparseMatrix<double> a(m, m);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();

    Eigen::VectorXd sol;
    const double tol = 1e-12 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
    auto residual = [&](const Eigen::VectorXd &v) { return (a * v - rhs).lpNorm<Eigen::Infinity>(); };

    if (n <= StateSpace::kDenseMaxVertices) {
        Eigen::MatrixXd dense(a);
        sol = dense.partialPivLu().solve(rhs);
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> iterative;
        iterative.setTolerance(1e-14);
        iterative.setMaxIterations(5000);
        iterative.compute(a);
        sol = iterative.solve(rhs);
        if (iterative.info() != Eigen::Success || !(residual(sol) <= tol)) {
            Eigen::SparseLU<Eigen::SparseMatrix<double>> direct;
            direct.compute(a);
            if (direct.info() != Eigen::Success)
                throw ConsistencyError("absorption system is singular");
            sol = direct.solve(rhs);
        }
    }
    if (!sol.allFinite() || !(residual(sol) <= tol))
        throw ConsistencyError("absorption solve did not reach residual 1e-12");

    std::vector<double> out(states, 0.0);
    out[space.ones_index()] = at_ones;
    for (std::uint64_t s = 1; s + 1 < states; ++s)
        out[s] = sol[unknown(s)];
    return out;
}

} // namespace detail

/// P^w_eta(tau_1 < infinity) for every state eta.
inline std::vector<double> fixation_vector(const StateSpace &space, double w) {
    const ChainSpec spec = space.chain(w);
    const Graph &g = space.graph();
    return detail::solve_transient(
        space, [&](const Config &eta, Vertex x) { return update_rate(g, eta, spec, x); },
        spec.lambda / space.vertices(), [](const Config &) { return 0.0; }, 1.0);
}

inline double fixation_exact(const StateSpace &space, double w, const InitialDistribution &init) {
    if (w < 0.0)
        throw WMaxViolation("intensity of selection must be >= 0");
    const std::vector<double> h = fixation_vector(space, w);
    return expect(space, init, h);
}

/// I(eta) = int_0^infty E_eta[D-bar(xi_s)] ds under the voter model, for
/// every state. Obtained from the discrete-time potential
/// g = sum_n E[D-bar(xi_n)] via I = (lambda/N) g.
inline std::vector<double> zero_potential_vector(const StateSpace &space) {
    const Graph &g = space.graph();
    const double scale = space.lambda() / space.vertices();
    if (space.rule() == Rule::Voter)
        return std::vector<double>(space.states(), 0.0);
    std::vector<double> potential = detail::solve_transient(
        space, [&](const Config &eta, Vertex x) { return voter_rate(g, eta, x); }, scale,
        [&](const Config &eta) { return mean_difference(space.rule(), g, eta, space.payoff()); }, 0.0);
    for (double &v : potential)
        v *= scale;
    return potential;
}

inline double zero_potential(const StateSpace &space, const InitialDistribution &init) {
    const std::vector<double> potential = zero_potential_vector(space);
    return expect(space, init, potential);
}

/// d/dw P^w_init(tau_1 < infinity) at w = 0 by central differences with one
/// Richardson step (h and h/2, h = 1e-3 unless w_max forces smaller).
inline double w_derivative_at_zero(const StateSpace &space, const InitialDistribution &init) {
    if (space.rule() == Rule::Voter)
        return 0.0;
    double h = 1e-3;
    while (!(h < space.w_limit() / 2.0))
        h /= 2.0;
    auto at = [&](double w) { return expect(space, init, fixation_vector(space, w)); };
    const double coarse = (at(h) - at(-h)) / (2.0 * h);
    const double fine = (at(h / 2) - at(-h / 2)) / h;
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace fixlab
