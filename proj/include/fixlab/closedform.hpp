#pragma once

// Explicit first-order fixation formulas on k-regular graphs and the b/c
// sign rules they imply.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "fixlab/dynamics.hpp"
#include "fixlab/error.hpp"

namespace fixlab {

/// P^w_{u_n}(tau_1 < infinity) = neutral + w * coefficient + O(w^2), with
/// coefficient = prefactor * bracket.
struct FirstOrderResult {
    double neutral = 0;
    double prefactor = 0;
    double bracket = 0;
    double coefficient = 0;

    double first_order(double w) const { return neutral + w * coefficient; }
};

/// The bracket alone; it is affine in N and fixes the sign for every n.
inline double bc_bracket(Rule rule, int k, int n_vertices, double b, double c) {
    const double kk = k, n = n_vertices;
    switch (rule) {
    case Rule::Voter:
        return 0.0;
    case Rule::DeathBirth:
        return (b / kk - c) * (n - 2) + b * (2.0 / kk - 2.0);
    case Rule::Imitation:
        return (b / (kk + 2) - c) * (n - 1) - ((2 * kk + 1) * b - c * kk) / (kk + 2);
    }
    return 0.0;
}

inline FirstOrderResult first_order_coefficient(Rule rule, int k, int n_vertices, int n, double b, double c) {
    if (n_vertices < 3)
        throw DomainError("first-order formula needs N >= 3");
    if (k < 2 || k > n_vertices - 1)
        throw DomainError("first-order formula needs 2 <= k <= N - 1");
    if (n < 1 || n > n_vertices - 1)
        throw DomainError("first-order formula needs 1 <= n <= N - 1");
    const double kk = k, nn = n_vertices, m = n;
    FirstOrderResult r;
    r.neutral = m / nn;
    const double spread = m * (nn - m) / (nn * (nn - 1));
    switch (rule) {
    case Rule::Voter:
        r.prefactor = spread;
        break;
    case Rule::DeathBirth:
        r.prefactor = kk / 2.0 * spread;
        break;
    case Rule::Imitation:
        r.prefactor = kk * (kk + 2) / (2.0 * (kk + 1)) * spread;
        break;
    }
    r.bracket = bc_bracket(rule, k, n_vertices, b, c);
    r.coefficient = r.prefactor * r.bracket;
    return r;
}

enum class Selection { Favors, Opposes, Critical };

inline std::string_view selection_name(Selection s) {
    switch (s) {
    case Selection::Favors:
        return "favors";
    case Selection::Opposes:
        return "opposes";
    case Selection::Critical:
        return "critical";
    }
    return "?";
}

/// Critical band |bracket| <= 1e-12 max(1, |b|, |c|) N.
inline Selection classify_bracket(double bracket, int n_vertices, double b, double c) {
    const double band = 1e-12 * std::max({1.0, std::abs(b), std::abs(c)}) * n_vertices;
    if (std::abs(bracket) <= band)
        return Selection::Critical;
    return bracket > 0 ? Selection::Favors : Selection::Opposes;
}

inline Selection bc_sign(Rule rule, int k, int n_vertices, double b, double c) {
    if (n_vertices < 3 || k < 2)
        throw DomainError("b/c rule needs N >= 3 and k >= 2");
    return classify_bracket(bc_bracket(rule, k, n_vertices, b, c), n_vertices, b, c);
}

/// Asymptotic slope of the bracket in N: b/k - c or b/(k+2) - c.
inline double bc_slope(Rule rule, int k, double b, double c) {
    switch (rule) {
    case Rule::DeathBirth:
        return b / k - c;
    case Rule::Imitation:
        return b / (k + 2) - c;
    case Rule::Voter:
        return 0.0;
    }
    return 0.0;
}

/// Least N0 >= 3 such that for every N >= N0 the bracket strictly has the
/// sign of the asymptotic slope. Throws CriticalRatio when the slope is zero.
inline int critical_size(Rule rule, int k, double b, double c) {
    if (k < 2)
        throw DomainError("critical size needs k >= 2");
    const double slope = bc_slope(rule, k, b, c);
    if (rule == Rule::Voter || std::abs(slope) <= 1e-12 * std::max({1.0, std::abs(b), std::abs(c)}))
        throw CriticalRatio("critical ratio: b/c sits exactly at the threshold, no N0 exists");
    const Selection target = slope > 0 ? Selection::Favors : Selection::Opposes;
    // bracket(N) = slope * N + intercept
    const double intercept = bc_bracket(rule, k, 0, b, c);
    const double root = -intercept / slope;
    int n0 = std::max(3, static_cast<int>(std::floor(root)) - 1);
    while (classify_bracket(bc_bracket(rule, k, n0, b, c), n0, b, c) != target)
        ++n0;
    return n0;
}

/// Death-birth coefficient on the complete graph K_N (k = N - 1).
inline double complete_graph_coefficient(int n_vertices, int n, double b, double c) {
    if (n_vertices < 3 || n < 1 || n > n_vertices - 1)
        throw DomainError("complete-graph formula needs N >= 3 and 1 <= n <= N - 1");
    const double nn = n_vertices, m = n;
    return m * (nn - m) / (2.0 * nn) * (-c * (nn - 2) - (2.0 - nn / (nn - 1)) * b);
}

/// Closed-form solution of z' = -c z (1 - z), z(0) = z0.
inline double replicator_fraction(double z0, double c, double t) {
    if (!(z0 >= 0.0 && z0 <= 1.0))
        throw DomainError("initial fraction must lie in [0, 1]");
    if (!(t >= 0.0))
        throw DomainError("time must be >= 0");
    const double decay = std::exp(-c * t);
    return z0 * decay / (1.0 - z0 + z0 * decay);
}

} // namespace fixlab
