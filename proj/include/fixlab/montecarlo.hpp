#pragma once

// Monte Carlo fixation estimates from the embedded jump chain, with one
// independently seeded stream per replica.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iterator>
#include <random>
#include <thread>
#include <vector>

#include "fixlab/dynamics.hpp"
#include "fixlab/init.hpp"

namespace fixlab {

using RngStream = std::mt19937_64;

/// Stream for replica r of a run seeded with `seed`, seeded with
/// a splitmix64 output of (seed, r).
inline RngStream replica_stream(std::uint64_t seed, std::uint64_t replica) {
    auto splitmix = [](std::uint64_t &state) {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t state = seed ^ (replica * 0xd1b54a32d192ed03ULL);
    splitmix(state);
    return RngStream(splitmix(state));
}

inline Config sample_init(const InitialDistribution &init, const Graph &g, RngStream &rng) {
    const int n = static_cast<int>(g.size());
    init.validate(n);
    switch (init.kind) {
    case InitialDistribution::Kind::Point:
        return init.point;
    case InitialDistribution::Kind::UniformN: {
        std::vector<Vertex> all(static_cast<std::size_t>(n));
        for (int x = 0; x < n; ++x)
            all[static_cast<std::size_t>(x)] = x;
        std::vector<Vertex> chosen;
        chosen.reserve(static_cast<std::size_t>(init.n));
        std::sample(all.begin(), all.end(), std::back_inserter(chosen), init.n, rng);
        Config eta = Config::zeros(n);
        for (Vertex x : chosen)
            eta.flip(x);
        return eta;
    }
    case InitialDistribution::Kind::Bernoulli: {
        std::bernoulli_distribution coin(init.u);
        Config eta = Config::zeros(n);
        for (int x = 0; x < n; ++x)
            if (coin(rng))
                eta.flip(x);
        return eta;
    }
    }
    return Config::zeros(n);
}

enum class Absorption { AtOnes, AtZeros, Censored };

struct ReplicaOutcome {
    Absorption result = Absorption::Censored;
    std::uint64_t steps = 0;
};

inline constexpr std::uint64_t kDefaultMaxSteps = 100'000'000;

/// Jump-chain simulation: flip x with probability c^w(x)/sum_y c^w(y) until
/// absorbed or max_steps flips have happened. Rates are refreshed only in the
/// radius-2 ball of the flipped vertex.
class ReplicaRunner {
  public:
    ReplicaRunner(const Graph &g, const ChainSpec &spec) : g_(g), spec_(spec), ball_(g.size()) {
        if (static_cast<int>(g.size()) > Config::kMaxVertices)
            throw DomainError("simulation supports at most 64 vertices");
        for (std::size_t x = 0; x < g.size(); ++x) {
            auto &ball = ball_[x];
            ball.push_back(static_cast<Vertex>(x));
            for (Vertex y : g.neighbors(static_cast<Vertex>(x))) {
                ball.push_back(y);
                for (Vertex z : g.neighbors(y))
                    ball.push_back(z);
            }
            std::sort(ball.begin(), ball.end());
            ball.erase(std::unique(ball.begin(), ball.end()), ball.end());
        }
        rates_.resize(g.size());
    }

    ReplicaOutcome run(Config eta, RngStream &rng, std::uint64_t max_steps) {
        ReplicaOutcome out;
        if (eta.all_ones()) {
            out.result = Absorption::AtOnes;
            return out;
        }
        if (eta.all_zeros()) {
            out.result = Absorption::AtZeros;
            return out;
        }
        for (std::size_t x = 0; x < g_.size(); ++x)
            rates_[x] = update_rate(g_, eta, spec_, static_cast<Vertex>(x));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        while (out.steps < max_steps) {
            double total = 0.0;
            for (double r : rates_)
                total += r;
            if (!(total > 0.0))
                throw ConsistencyError("transient configuration with zero total rate");
            double target = unit(rng) * total;
            std::size_t pick = 0;
            for (; pick + 1 < rates_.size(); ++pick) {
                if (target < rates_[pick] && rates_[pick] > 0.0)
                    break;
                target -= rates_[pick];
            }
            while (rates_[pick] == 0.0)
                --pick; // rounding pushed the draw past the last positive rate
            eta.flip(static_cast<Vertex>(pick));
            ++out.steps;
            if (eta.all_ones()) {
                out.result = Absorption::AtOnes;
                return out;
            }
            if (eta.all_zeros()) {
                out.result = Absorption::AtZeros;
                return out;
            }
            for (Vertex v : ball_[pick])
                rates_[static_cast<std::size_t>(v)] = update_rate(g_, eta, spec_, v);
        }
        out.result = Absorption::Censored;
        return out;
    }

  private:
    const Graph &g_;
    ChainSpec spec_;
    std::vector<std::vector<Vertex>> ball_;
    std::vector<double> rates_;
};

inline ReplicaOutcome run_replica(const Graph &g, const ChainSpec &spec, const Config &eta0, RngStream &rng,
                                  std::uint64_t max_steps = kDefaultMaxSteps) {
    ReplicaRunner runner(g, spec);
    return runner.run(eta0, rng, max_steps);
}

struct SimPlan {
    std::uint64_t replicas = 1;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = kDefaultMaxSteps;
    InitialDistribution init;
};

struct Estimate {
    double p_hat = 0;
    double std_error = 0;
    std::uint64_t n_absorbed_1 = 0;
    std::uint64_t n_absorbed_0 = 0;
    std::uint64_t n_censored = 0;

    friend bool operator==(const Estimate &, const Estimate &) = default;
};

struct ReplicaCounts {
    std::uint64_t ones = 0, zeros = 0, censored = 0;

    ReplicaCounts &operator+=(const ReplicaCounts &o) {
        ones += o.ones;
        zeros += o.zeros;
        censored += o.censored;
        return *this;
    }
};

/// Runs replicas [first, last) of a plan; replica r always uses
/// replica_stream(plan.seed, r) for both its initial draw and its dynamics.
inline ReplicaCounts run_replicas(const Graph &g, const ChainSpec &spec, const SimPlan &plan, std::uint64_t first,
                                  std::uint64_t last) {
    ReplicaRunner runner(g, spec);
    ReplicaCounts counts;
    for (std::uint64_t r = first; r < last; ++r) {
        RngStream rng = replica_stream(plan.seed, r);
        const Config eta0 = sample_init(plan.init, g, rng);
        switch (runner.run(eta0, rng, plan.max_steps).result) {
        case Absorption::AtOnes:
            ++counts.ones;
            break;
        case Absorption::AtZeros:
            ++counts.zeros;
            break;
        case Absorption::Censored:
            ++counts.censored;
            break;
        }
    }
    return counts;
}

inline Estimate make_estimate(const ReplicaCounts &c) {
    const std::uint64_t decided = c.ones + c.zeros;
    if (decided == 0)
        throw EstimateUnavailable("every replica was censored before absorption");
    Estimate e;
    e.n_absorbed_1 = c.ones;
    e.n_absorbed_0 = c.zeros;
    e.n_censored = c.censored;
    e.p_hat = static_cast<double>(c.ones) / static_cast<double>(decided);
    e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(decided));
    return e;
}

/// Replicas [first, last) split over `threads` workers. The counts are
/// integer sums of per-replica outcomes, so they do not depend on the split.
inline ReplicaCounts run_replicas_parallel(const Graph &g, const ChainSpec &spec, const SimPlan &plan,
                                           std::uint64_t first, std::uint64_t last, unsigned threads) {
    const std::uint64_t count = last > first ? last - first : 0;
    threads = std::max(1U, static_cast<unsigned>(std::min<std::uint64_t>({threads, count, 1024})));
    if (threads == 1)
        return run_replicas(g, spec, plan, first, last);

    std::vector<ReplicaCounts> parts(threads);
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (count + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t a = std::min(last, first + t * chunk);
            const std::uint64_t z = std::min(last, a + chunk);
            pool.emplace_back([&, t, a, z] {
                try {
                    parts[t] = run_replicas(g, spec, plan, a, z);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    ReplicaCounts total;
    for (const auto &p : parts)
        total += p;
    return total;
}

/// Aggregated estimate; identical for any thread count.
inline Estimate estimate_fixation(const Graph &g, const ChainSpec &spec, const SimPlan &plan, unsigned threads = 1) {
    if (plan.replicas < 1)
        throw DomainError("need at least one replica");
    if (plan.max_steps < 1)
        throw DomainError("max_steps must be >= 1");
    plan.init.validate(static_cast<int>(g.size()));
    return make_estimate(run_replicas_parallel(g, spec, plan, 0, plan.replicas, threads));
}

} // namespace fixlab
