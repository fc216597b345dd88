#pragma once

// Hitting and meeting times of random walks, the Bernoulli transform and the
// constant Gamma in B I(u) = Gamma u (1 - u).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fixlab/binomial.hpp"
#include "fixlab/dynamics.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

/// Dense N x N table indexed (x, y).
class PairTable {
  public:
    PairTable() = default;
    explicit PairTable(std::size_t n) : n_(n), v_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(Vertex x, Vertex y) const { return v_[index(x, y)]; }
    double &operator()(Vertex x, Vertex y) { return v_[index(x, y)]; }

    double max_asymmetry() const {
        double worst = 0.0;
        for (std::size_t x = 0; x < n_; ++x)
            for (std::size_t y = x + 1; y < n_; ++y)
                worst = std::max(worst, std::abs(v_[x * n_ + y] - v_[y * n_ + x]));
        return worst;
    }

  private:
    std::size_t index(Vertex x, Vertex y) const {
        return static_cast<std::size_t>(x) * n_ + static_cast<std::size_t>(y);
    }

    std::size_t n_ = 0;
    std::vector<double> v_;
};

/// f(x, y) = E_x[T_y], expected steps of the discrete walk (equivalently the
/// expected time of the rate-1 continuous walk).
struct HittingTable : PairTable {
    using PairTable::PairTable;
};

/// m(x, y) = E[M_{x,y}] for two independent rate-1 walks.
struct MeetingTable : PairTable {
    using PairTable::PairTable;
};

/// Solves f(x, y) = 1 + (1/k) sum_{z ~ x} f(z, y), f(y, y) = 0, one target at a time.
inline HittingTable hitting_times(const Graph &g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    HittingTable f(g.size());
    if (n == 1)
        return f;
    for (Eigen::Index y = 0; y < n; ++y) {
        auto slot = [y](Eigen::Index x) { return x < y ? x : x - 1; };
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n - 1, n - 1);
        for (Eigen::Index x = 0; x < n; ++x) {
            if (x == y)
                continue;
            const double step = 1.0 / g.degree(static_cast<Vertex>(x));
            for (Vertex z : g.neighbors(static_cast<Vertex>(x)))
                if (z != y)
                    a(slot(x), slot(z)) -= step;
        }
        const Eigen::VectorXd sol = a.partialPivLu().solve(Eigen::VectorXd::Ones(n - 1));
        for (Eigen::Index x = 0; x < n; ++x)
            if (x != y)
                f(static_cast<Vertex>(x), static_cast<Vertex>(y)) = sol[slot(x)];
    }
    return f;
}

/// Largest violation of the first-step equations over x != y.
inline double hitting_residual(const Graph &g, const HittingTable &f) {
    double worst = 0.0;
    for (std::size_t xi = 0; xi < g.size(); ++xi)
        for (std::size_t yi = 0; yi < g.size(); ++yi) {
            if (xi == yi)
                continue;
            const auto x = static_cast<Vertex>(xi), y = static_cast<Vertex>(yi);
            double avg = 0.0;
            for (Vertex z : g.neighbors(x))
                avg += f(z, y);
            worst = std::max(worst, std::abs(f(x, y) - 1.0 - avg / g.degree(x)));
        }
    return worst;
}

/// E_x[T_x^+] = 1 + (1/k) sum_{z ~ x} f(z, x).
inline double return_time(const Graph &g, const HittingTable &f, Vertex x) {
    double avg = 0.0;
    for (Vertex z : g.neighbors(x))
        avg += f(z, x);
    return 1.0 + avg / g.degree(x);
}

/// Two independent rate-1 walks; from a distinct pair one of them jumps at
/// total rate 2. The diagonal is absorbing. Solved over unordered pairs.
inline MeetingTable meeting_times(const Graph &g) {
    const int n = static_cast<int>(g.size());
    MeetingTable m(g.size());
    if (n == 1)
        return m;
    auto pair_index = [n](int x, int y) -> Eigen::Index {
        if (x > y)
            std::swap(x, y);
        // row-major index of (x, y), x < y, in the strict upper triangle
        return static_cast<Eigen::Index>(x) * (2 * n - x - 1) / 2 + (y - x - 1);
    };
    const auto unknowns = static_cast<Eigen::Index>(n) * (n - 1) / 2;
    std::vector<Eigen::Triplet<double>> entries;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            const Eigen::Index row = pair_index(x, y);
            entries.emplace_back(row, row, 2.0);
            const double kx = 1.0 / g.degree(x), ky = 1.0 / g.degree(y);
            for (Vertex z : g.neighbors(x))
                if (z != y)
                    entries.emplace_back(row, pair_index(z, y), -kx);
            for (Vertex z : g.neighbors(y))
                if (z != x)
                    entries.emplace_back(row, pair_index(x, z), -ky);
        }
    Eigen::SparseMatrix<double> a(unknowns, unknowns);
    a.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw ConsistencyError("meeting-time system is singular");
    const Eigen::VectorXd sol = lu.solve(Eigen::VectorXd::Ones(unknowns));
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            m(x, y) = m(y, x) = sol[pair_index(x, y)];
    return m;
}

/// Averages of a pair table along two independent discrete walks X, Y that
/// both start at the same vertex z.
struct WalkAverages {
    double x0_x1 = 0; // T(X_0, X_1)
    double x1_y1 = 0; // T(X_1, Y_1)
    double y1_y2 = 0; // T(Y_1, Y_2)
    double y0_y2 = 0; // T(Y_0, Y_2)
    double x1_y2 = 0; // T(X_1, Y_2)
};

inline WalkAverages walk_averages_at(const Graph &g, const PairTable &t, Vertex z) {
    const double k = g.degree(z);
    WalkAverages a;
    for (Vertex x1 : g.neighbors(z)) {
        a.x0_x1 += t(z, x1) / k;
        for (Vertex y1 : g.neighbors(z)) {
            a.x1_y1 += t(x1, y1) / (k * k);
            for (Vertex y2 : g.neighbors(y1))
                a.x1_y2 += t(x1, y2) / (k * k * g.degree(y1));
        }
        for (Vertex y2 : g.neighbors(x1)) {
            a.y1_y2 += t(x1, y2) / (k * g.degree(x1));
            a.y0_y2 += t(z, y2) / (k * g.degree(x1));
        }
    }
    return a;
}

/// Walk averages with the common start z drawn from pi.
inline WalkAverages walk_averages(const Graph &g, const PairTable &t) {
    const VertexDistribution pi = stationary(g);
    WalkAverages avg;
    for (std::size_t zi = 0; zi < g.size(); ++zi) {
        const WalkAverages a = walk_averages_at(g, t, static_cast<Vertex>(zi));
        const double p = pi.weights[zi];
        avg.x0_x1 += p * a.x0_x1;
        avg.x1_y1 += p * a.x1_y1;
        avg.y1_y2 += p * a.y1_y2;
        avg.y0_y2 += p * a.y0_y2;
        avg.x1_y2 += p * a.x1_y2;
    }
    return avg;
}

/// (E f(X_0,X_1), E f(X_1,Y_1), E f(X_1,Y_2)) with z ~ pi. On vertex-transitive
/// graphs these are N-1, N-2 and (1+1/k)(N-1) + 1/k - 2.
struct WalkIdentities {
    double q1 = 0, q2 = 0, q3 = 0;
};

inline WalkIdentities walk_identities(const Graph &g, const HittingTable &f) {
    const WalkAverages a = walk_averages(g, f);
    return {a.x0_x1, a.x1_y1, a.x1_y2};
}

inline WalkIdentities walk_identities(const Graph &g) { return walk_identities(g, hitting_times(g)); }

inline WalkIdentities walk_identities_predicted(int n_vertices, int k) {
    const double n = n_vertices;
    return {n - 1, n - 2, (1.0 + 1.0 / k) * (n - 1) + 1.0 / k - 2.0};
}

// ---------------------------------------------------------------------------
// Bernoulli transform
// ---------------------------------------------------------------------------

/// sum_i coeffs[i] u^i with degree bounded by `order` (the number of sites N).
template <class T>
struct Polynomial {
    int order = 0;
    std::vector<T> coeffs; // size order + 1

    double operator()(double u) const {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
            acc = acc * u + static_cast<double>(*it);
        return acc;
    }
};

/// A_f(0..N) -> monomial coefficients of sum_n A_f(n) u^n (1-u)^{N-n}.
template <class T>
Polynomial<T> bernoulli_transform(std::span<const T> a) {
    if (a.empty())
        throw DomainError("Bernoulli transform needs N + 1 >= 1 coefficients");
    const int n = static_cast<int>(a.size()) - 1;
    Polynomial<T> p{n, std::vector<T>(a.size(), T{})};
    for (int i = 0; i <= n; ++i)
        for (int m = 0; m <= i; ++m) {
            const T term = a[static_cast<std::size_t>(m)] * static_cast<T>(binomial(n - m, i - m));
            p.coeffs[static_cast<std::size_t>(i)] += ((i - m) % 2 == 0) ? term : -term;
        }
    return p;
}

/// A_f(n) = sum_{i <= n} alpha_i C(N - i, n - i).
template <class T>
std::vector<T> invert_transform(const Polynomial<T> &p) {
    const int n = p.order;
    if (static_cast<int>(p.coeffs.size()) != n + 1)
        throw DomainError("polynomial must carry order + 1 coefficients");
    std::vector<T> a(p.coeffs.size(), T{});
    for (int m = 0; m <= n; ++m)
        for (int i = 0; i <= m; ++i)
            a[static_cast<std::size_t>(m)] += p.coeffs[static_cast<std::size_t>(i)] * static_cast<T>(binomial(n - i, m - i));
    return a;
}

/// A_f(n) = sum of f over configurations with exactly n ones, for a function
/// tabulated by configuration bit pattern.
inline std::vector<double> level_sums(std::span<const double> values, int n_vertices) {
    if (values.size() != (std::size_t{1} << n_vertices))
        throw DomainError("value table must have 2^N entries");
    std::vector<double> a(static_cast<std::size_t>(n_vertices) + 1, 0.0);
    for (std::size_t s = 0; s < values.size(); ++s)
        a[static_cast<std::size_t>(std::popcount(s))] += values[s];
    return a;
}

/// Expectation under u_n of the function whose Bernoulli transform is p.
inline double un_expectation(const Polynomial<double> &p, int n) {
    if (n < 1 || n > p.order - 1)
        throw DomainError("u_n expectation needs 1 <= n <= N - 1, got n = " + std::to_string(n));
    double a = 0.0;
    for (int i = 0; i <= n; ++i)
        a += p.coeffs[static_cast<std::size_t>(i)] * static_cast<double>(binomial(p.order - i, n - i));
    return a / static_cast<double>(binomial(p.order, n));
}

/// Gamma u (1 - u) as a polynomial of the given order.
inline Polynomial<double> gamma_polynomial(double gamma, int order) {
    Polynomial<double> p{order, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0)};
    if (order >= 1)
        p.coeffs[1] = gamma;
    if (order >= 2)
        p.coeffs[2] = -gamma;
    return p;
}

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

/// Closed forms for k-regular graphs on N vertices (canonical b, c).
inline double gamma_closed_form(Rule rule, int k, int n_vertices, double b, double c) {
    const double kk = k, n = n_vertices;
    switch (rule) {
    case Rule::Voter:
        return 0.0;
    case Rule::DeathBirth:
        return kk / 2.0 * ((b / kk - c) * (n - 2) + b * (2.0 / kk - 2.0));
    case Rule::Imitation:
        return kk * (kk + 2) / (2.0 * (kk + 1)) *
               ((b / (kk + 2) - c) * (n - 1) - ((2 * kk + 1) * b - c * kk) / (kk + 2));
    }
    return 0.0;
}

/// Gamma assembled from pi-averaged meeting times of walks.
inline double gamma_walk_route(Rule rule, const Graph &g, const MeetingTable &m, double b, double c) {
    if (rule == Rule::Voter)
        return 0.0;
    const double k = g.degree();
    const WalkAverages e = walk_averages(g, m);
    if (rule == Rule::DeathBirth)
        return k * (-c * e.x1_y1 - b * e.y1_y2 + b * e.x1_y2);
    return k * (-b * e.y1_y2 - (2 * c + b) / (k + 1) * e.x0_x1 + b / (k + 1) * e.y0_y2 -
                (k * c - b) / (k + 1) * e.x1_y1 + k * b / (k + 1) * e.x1_y2);
}

struct GammaRoutes {
    double closed_form = 0;
    double walk_route = 0;
};

inline GammaRoutes gamma_routes(Rule rule, const Graph &g, const PayoffMatrix &payoff) {
    if (!payoff.is_canonical())
        throw UnsupportedPayoff("Gamma needs the canonical (b, c) payoff");
    const double b = payoff.benefit(), c = payoff.cost();
    return {gamma_closed_form(rule, g.degree(), static_cast<int>(g.size()), b, c),
            gamma_walk_route(rule, g, meeting_times(g), b, c)};
}

/// Gamma from the closed form, checked against the walk route. Throws
/// ConsistencyError when they differ by more than 1e-8 (relative to
/// max(1, |Gamma|)), which can happen on regular graphs whose hitting times
/// are not symmetric.
inline double gamma(Rule rule, const Graph &g, const PayoffMatrix &payoff) {
    const GammaRoutes r = gamma_routes(rule, g, payoff);
    if (std::abs(r.closed_form - r.walk_route) > 1e-8 * std::max(1.0, std::abs(r.closed_form)))
        throw ConsistencyError("Gamma routes disagree: closed form " + std::to_string(r.closed_form) +
                               ", walk route " + std::to_string(r.walk_route));
    return r.closed_form;
}

} // namespace fixlab
