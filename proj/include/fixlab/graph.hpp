#pragma once

// Finite simple connected k-regular graphs and their random-walk quantities.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fixlab/error.hpp"

namespace fixlab {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

/// Immutable k-regular graph on vertices 0..N-1 with sorted adjacency lists.
/// Instances only exist in a validated state.
class Graph {
  public:
    /// Validates and builds. Throws SimplicityError, RegularityError or
    /// ConnectivityError naming the first violated invariant.
    static Graph from_edges(std::size_t n_vertices, std::span<const Edge> edges) {
        if (n_vertices == 0)
            throw ConstructionError("graph must have at least one vertex");
        std::vector<std::vector<Vertex>> adj(n_vertices);
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n_vertices ||
                static_cast<std::size_t>(v) >= n_vertices)
                throw ConstructionError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                        ") references a vertex outside 0.." +
                                        std::to_string(n_vertices - 1));
            if (u == v)
                throw SimplicityError("self-loop at vertex " + std::to_string(u));
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        for (std::size_t x = 0; x < n_vertices; ++x) {
            auto &nb = adj[x];
            std::sort(nb.begin(), nb.end());
            auto dup = std::adjacent_find(nb.begin(), nb.end());
            if (dup != nb.end())
                throw SimplicityError("duplicate edge (" + std::to_string(x) + "," +
                                      std::to_string(*dup) + ")");
        }

        const std::size_t k = adj[0].size();
        std::vector<std::size_t> offending;
        for (std::size_t x = 0; x < n_vertices; ++x)
            if (adj[x].size() != k)
                offending.push_back(x);
        if (!offending.empty()) {
            std::ostringstream msg;
            msg << "graph is not regular; degrees:";
            for (std::size_t x = 0; x < n_vertices; ++x)
                msg << ' ' << adj[x].size();
            throw RegularityError(msg.str());
        }
        if (k == 0 && n_vertices > 1)
            throw ConnectivityError("graph has no edges");
        if (!connected(adj))
            throw ConnectivityError("graph is disconnected");

        Graph g;
        g.adj_ = std::move(adj);
        g.degree_ = static_cast<int>(k);
        return g;
    }

    /// Vertices are taken to be 0..max label.
    static Graph from_edges(std::span<const Edge> edges) {
        if (edges.empty())
            throw ConstructionError("empty edge list");
        Vertex top = 0;
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0)
                throw ConstructionError("negative vertex label");
            top = std::max({top, u, v});
        }
        return from_edges(static_cast<std::size_t>(top) + 1, edges);
    }

    std::size_t size() const { return adj_.size(); }
    int degree() const { return degree_; }
    int degree(Vertex) const { return degree_; }
    std::size_t edge_count() const { return size() * static_cast<std::size_t>(degree_) / 2; }

    std::span<const Vertex> neighbors(Vertex x) const { return adj_[static_cast<std::size_t>(x)]; }

    bool adjacent(Vertex x, Vertex y) const {
        auto nb = neighbors(x);
        return std::binary_search(nb.begin(), nb.end(), y);
    }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count());
        for (std::size_t x = 0; x < size(); ++x)
            for (Vertex y : adj_[x])
                if (static_cast<Vertex>(x) < y)
                    out.emplace_back(static_cast<Vertex>(x), y);
        return out;
    }

  private:
    Graph() = default;

    static bool connected(const std::vector<std::vector<Vertex>> &adj) {
        std::vector<char> seen(adj.size(), 0);
        std::vector<Vertex> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            Vertex x = stack.back();
            stack.pop_back();
            for (Vertex y : adj[static_cast<std::size_t>(x)])
                if (!seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    ++count;
                    stack.push_back(y);
                }
        }
        return count == adj.size();
    }

    std::vector<std::vector<Vertex>> adj_;
    int degree_ = 0;
};

/// Probability weights over vertices.
struct VertexDistribution {
    std::vector<double> weights;

    double operator[](Vertex x) const { return weights[static_cast<std::size_t>(x)]; }
};

/// pi(x) = d(x) / (2 #E), the invariant law of the simple random walk.
inline VertexDistribution stationary(const Graph &g) {
    const double two_e = 2.0 * static_cast<double>(g.edge_count());
    VertexDistribution pi;
    pi.weights.reserve(g.size());
    for (std::size_t x = 0; x < g.size(); ++x)
        pi.weights.push_back(g.degree(static_cast<Vertex>(x)) / two_e);
    return pi;
}

inline Graph from_edge_list(std::span<const Edge> edges) { return Graph::from_edges(edges); }

// ---------------------------------------------------------------------------
// Named families
// ---------------------------------------------------------------------------

inline Graph cycle_graph(int n) {
    if (n < 3)
        throw ConstructionError("cycle needs N >= 3");
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
        e.emplace_back(i, (i + 1) % n);
    return Graph::from_edges(static_cast<std::size_t>(n), e);
}

inline Graph complete_graph(int n) {
    if (n < 2)
        throw ConstructionError("complete graph needs N >= 2");
    std::vector<Edge> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            e.emplace_back(i, j);
    return Graph::from_edges(static_cast<std::size_t>(n), e);
}

/// Periodic rows x cols grid; vertex (r, c) has label r * cols + c.
inline Graph torus_graph(int rows, int cols) {
    if (rows < 3 || cols < 3)
        throw ConstructionError("torus sides must be >= 3");
    std::vector<Edge> e;
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            e.emplace_back(id(r, c), id(r, (c + 1) % cols));
            e.emplace_back(id(r, c), id((r + 1) % rows, c));
        }
    return Graph::from_edges(static_cast<std::size_t>(rows * cols), e);
}

inline Graph petersen_graph() {
    static constexpr Edge kEdges[] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0},  // outer
                                      {0, 5}, {1, 6}, {2, 7}, {3, 8}, {4, 9},  // spokes
                                      {5, 7}, {7, 9}, {9, 6}, {6, 8}, {8, 5}}; // inner star
    return Graph::from_edges(10, kEdges);
}

/// Configuration (pairing) model with rejection of loops, multi-edges and
/// disconnected outcomes. Deterministic in `seed`.
inline Graph random_regular_graph(int n, int k, std::uint64_t seed, int max_tries = 1000) {
    if (n < 1 || k < 1 || k >= n)
        throw ConstructionError("random_regular needs 1 <= k < N");
    if ((static_cast<long long>(n) * k) % 2 != 0)
        throw ConstructionError("random_regular needs N*k even");
    std::mt19937_64 rng(seed);
    std::vector<Vertex> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * k);
    for (int attempt = 0; attempt < max_tries; ++attempt) {
        stubs.clear();
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < k; ++j)
                stubs.push_back(v);
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::vector<Edge> e;
        bool simple = true;
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            Vertex u = std::min(stubs[i], stubs[i + 1]);
            Vertex v = std::max(stubs[i], stubs[i + 1]);
            if (u == v) {
                simple = false;
                break;
            }
            e.emplace_back(u, v);
        }
        if (!simple)
            continue;
        std::sort(e.begin(), e.end());
        if (std::adjacent_find(e.begin(), e.end()) != e.end())
            continue;
        try {
            return Graph::from_edges(static_cast<std::size_t>(n), e);
        } catch (const ConnectivityError &) {
            continue;
        }
    }
    throw ConstructionError("random_regular: no simple connected pairing after " +
                            std::to_string(max_tries) + " tries");
}

enum class GraphKind { Cycle, Complete, Torus2d, RandomRegular, Petersen };

struct NamedGraphParams {
    int n = 0;          // cycle, complete, random_regular
    int rows = 0;       // torus2d
    int cols = 0;       // torus2d
    int k = 0;          // random_regular
    std::uint64_t seed = 0;
};

inline Graph build_named(GraphKind kind, const NamedGraphParams &p) {
    switch (kind) {
    case GraphKind::Cycle:
        return cycle_graph(p.n);
    case GraphKind::Complete:
        return complete_graph(p.n);
    case GraphKind::Torus2d:
        return torus_graph(p.rows, p.cols);
    case GraphKind::RandomRegular:
        return random_regular_graph(p.n, p.k, p.seed);
    case GraphKind::Petersen:
        return petersen_graph();
    }
    throw ConstructionError("unknown graph kind");
}

/// Edge-list text: one "u v" pair per line, '#' starts a comment.
inline std::vector<Edge> parse_edge_list(std::istream &in) {
    std::vector<Edge> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        long long u = 0, v = 0;
        if (!(fields >> u)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            throw ConstructionError("edge list line " + std::to_string(lineno) + ": expected 'u v'");
        }
        std::string rest;
        if (!(fields >> v) || (fields >> rest))
            throw ConstructionError("edge list line " + std::to_string(lineno) + ": expected 'u v'");
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    return edges;
}

inline void write_edge_list(std::ostream &out, const Graph &g) {
    for (auto [u, v] : g.edges())
        out << u << ' ' << v << '\n';
}

} // namespace fixlab
