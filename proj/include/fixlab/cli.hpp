#pragma once

// The `fixlab` command line: exact, bc-rule, sweep, mc and tables.
//
// Exit codes: 0 success, 1 usage, 2 domain violation, 3 internal
// consistency failure.

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fixlab/closedform.hpp"
#include "fixlab/coalescent.hpp"
#include "fixlab/exact.hpp"
#include "fixlab/montecarlo.hpp"
#include "fixlab/perturbation.hpp"
#include "fixlab/record.hpp"

namespace fixlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitConsistency = 3;

/// Tolerance on |dP/dw(0) - 0-potential| before `exact` reports failure.
inline constexpr double kDerivativeTolerance = 1e-5;

struct GameFlags {
    std::string graph;
    std::string rule = "db";
    double b = 0.0;
    double c = 0.0;
    std::string payoff;
    double w = 0.0;
    std::string init = "un:1";
};

/// Game actually simulated after the optional equal-gains reduction.
struct ResolvedGame {
    Rule rule = Rule::Voter;
    PayoffMatrix payoff;
    double w = 0.0;
    std::optional<PayoffMatrix> input_payoff;
};

inline ResolvedGame resolve_game(const GameFlags &f, int k) {
    ResolvedGame g;
    g.rule = parse_rule(f.rule);
    if (!f.payoff.empty()) {
        g.input_payoff = parse_payoff(f.payoff);
        auto [adj, wa] = reduce_equal_gains(*g.input_payoff, f.w, k);
        g.payoff = adj;
        g.w = wa;
    } else {
        g.payoff = PayoffMatrix::canonical(f.b, f.c);
        g.w = f.w;
    }
    make_spec(g.rule, g.payoff, g.w, k); // validates w < w_max
    return g;
}

inline nlohmann::ordered_json game_inputs(const GameFlags &f, const ResolvedGame &g, const Graph &graph) {
    nlohmann::ordered_json j;
    j["graph"] = f.graph;
    j["N"] = graph.size();
    j["k"] = graph.degree();
    j["rule"] = std::string(rule_name(g.rule));
    if (g.input_payoff)
        j["payoff_input"] = {{g.input_payoff->p11, g.input_payoff->p10}, {g.input_payoff->p01, g.input_payoff->p00}};
    j["b"] = g.payoff.benefit();
    j["c"] = g.payoff.cost();
    j["w"] = f.w;
    j["w_adjusted"] = g.w;
    j["init"] = f.init;
    return j;
}

/// Neutral (w = 0) fixation probability for an initial law on a regular graph.
inline double neutral_value(const Graph &g, const InitialDistribution &init) {
    switch (init.kind) {
    case InitialDistribution::Kind::Point:
        return p1(g, init.point);
    case InitialDistribution::Kind::UniformN:
        return static_cast<double>(init.n) / static_cast<double>(g.size());
    case InitialDistribution::Kind::Bernoulli:
        return init.u;
    }
    return 0.0;
}

/// w-coefficient predicted from Gamma for u_n and mu_u starts; empty for points.
inline std::optional<double> predicted_coefficient(Rule rule, const Graph &g, const PayoffMatrix &payoff,
                                                   const InitialDistribution &init) {
    const int n_vertices = static_cast<int>(g.size());
    const double b = payoff.benefit(), c = payoff.cost();
    switch (init.kind) {
    case InitialDistribution::Kind::Point:
        return std::nullopt;
    case InitialDistribution::Kind::UniformN:
        if (init.n == 0 || init.n == n_vertices)
            return 0.0;
        if (n_vertices < 3 || g.degree() < 2)
            return std::nullopt;
        return first_order_coefficient(rule, g.degree(), n_vertices, init.n, b, c).coefficient;
    case InitialDistribution::Kind::Bernoulli:
        return gamma_closed_form(rule, g.degree(), n_vertices, b, c) * init.u * (1.0 - init.u);
    }
    return std::nullopt;
}

namespace detail {

inline nlohmann::ordered_json maybe(const std::optional<double> &v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline void print_human(std::ostream &out, const RunRecord &r) {
    out << r.command << '\n';
    auto show = [&out](const nlohmann::ordered_json &obj) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            out << "  " << std::left << std::setw(26) << it.key() << ' ';
            if (it->is_number_float())
                out << std::setprecision(12) << it->get<double>();
            else if (it->is_string())
                out << it->get<std::string>();
            else
                out << it->dump();
            out << '\n';
        }
    };
    show(r.inputs);
    out << "  --\n";
    show(r.outputs);
}

inline void emit(std::ostream &out, const RunRecord &r, bool json) {
    if (json)
        out << dump_record(r) << '\n';
    else
        print_human(out, r);
}

inline std::string csv_number(double v) {
    if (std::isnan(v))
        return "";
    std::ostringstream s;
    s << std::setprecision(12) << v;
    return s.str();
}

inline std::string csv_text(std::string s) {
    for (char &ch : s)
        if (ch == ',' || ch == '\n' || ch == '"')
            ch = ch == ',' ? ';' : ' ';
    return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// exact
// ---------------------------------------------------------------------------

struct ExactFlags : GameFlags {
    int max_vertices = StateSpace::kDefaultMaxVertices;
    bool json = false;
};

inline int cmd_exact(const ExactFlags &f, std::ostream &out) {
    const Graph g = parse_graph_spec(f.graph);
    const ResolvedGame game = resolve_game(f, g.degree());
    const InitialDistribution init = parse_init(f.init);
    const StateSpace space(g, game.rule, game.payoff, f.max_vertices);
    init.validate(space.vertices());

    const double fixation = fixation_exact(space, game.w, init);
    const double potential = zero_potential(space, init);
    const double derivative = w_derivative_at_zero(space, init);
    const double neutral = neutral_value(g, init);
    const std::optional<double> coefficient = predicted_coefficient(game.rule, g, game.payoff, init);

    RunRecord r;
    r.command = "exact";
    r.inputs = game_inputs(f, game, g);
    auto &o = r.outputs;
    o["fixation"] = fixation;
    o["neutral"] = neutral;
    o["zero_potential"] = potential;
    o["w_derivative"] = derivative;
    o["first_order"] = neutral + game.w * potential;
    o["predicted_coefficient"] = detail::maybe(coefficient);
    o["predicted_first_order"] =
        detail::maybe(coefficient ? std::optional<double>(neutral + game.w * *coefficient) : std::nullopt);
    o["delta_fixation_first_order"] = fixation - (neutral + game.w * potential);
    o["delta_derivative_potential"] = derivative - potential;
    o["delta_potential_predicted"] =
        detail::maybe(coefficient ? std::optional<double>(potential - *coefficient) : std::nullopt);
    const bool consistent = std::abs(derivative - potential) <= kDerivativeTolerance;
    o["consistent"] = consistent;
    detail::emit(out, r, f.json);
    return consistent ? kExitOk : kExitConsistency;
}

// ---------------------------------------------------------------------------
// bc-rule
// ---------------------------------------------------------------------------

struct BcFlags {
    std::string rule = "db";
    int k = 0;
    double b = 0.0;
    double c = 0.0;
    std::optional<int> n_vertices;
    bool json = false;
};

inline int cmd_bc(const BcFlags &f, std::ostream &out) {
    const Rule rule = parse_rule(f.rule);
    if (rule == Rule::Voter)
        throw DomainError("the b/c rule is defined for db and im only");
    RunRecord r;
    r.command = "bc-rule";
    r.inputs = {{"rule", std::string(rule_name(rule))}, {"k", f.k}, {"b", f.b}, {"c", f.c}};
    r.inputs["N"] = f.n_vertices ? nlohmann::ordered_json(*f.n_vertices) : nlohmann::ordered_json(nullptr);
    const double threshold = rule == Rule::DeathBirth ? f.k : f.k + 2.0;
    r.outputs["threshold"] = threshold;
    if (f.n_vertices) {
        const double bracket = bc_bracket(rule, f.k, *f.n_vertices, f.b, f.c);
        r.outputs["bracket"] = bracket;
        r.outputs["verdict"] = std::string(selection_name(bc_sign(rule, f.k, *f.n_vertices, f.b, f.c)));
    } else {
        try {
            const int n0 = critical_size(rule, f.k, f.b, f.c);
            const bool favors = bc_slope(rule, f.k, f.b, f.c) > 0;
            r.outputs["N0"] = n0;
            r.outputs["verdict"] = std::string(favors ? "favors" : "opposes") + " for N >= " + std::to_string(n0);
        } catch (const CriticalRatio &e) {
            r.outputs["N0"] = nullptr;
            r.outputs["verdict"] = std::string(e.what());
        }
    }
    detail::emit(out, r, f.json);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepFlags : GameFlags {
    std::string vary;
    std::uint64_t mc_replicas = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::uint64_t max_steps = kDefaultMaxSteps;
    int max_vertices = StateSpace::kDefaultMaxVertices;
};

inline constexpr std::string_view kSweepHeader =
    "vary,value,graph,N,k,rule,b,c,w,init,neutral,exact,exact_minus_neutral,mc_p,mc_stderr,bracket,"
    "coefficient,first_order,status";

struct SweepAxis {
    std::string kind; // bc, w or N
    std::vector<double> values;
};

inline SweepAxis parse_axis(std::string_view text) {
    const auto parts = fixlab::detail::split(text, ':');
    if (parts.size() != 4 || (parts[0] != "bc" && parts[0] != "w" && parts[0] != "N"))
        throw DomainError("--vary must look like bc:LO:HI:STEP, w:LO:HI:STEP or N:LO:HI:STEP");
    const double lo = fixlab::detail::to_real(parts[1], "sweep start");
    const double hi = fixlab::detail::to_real(parts[2], "sweep end");
    const double step = fixlab::detail::to_real(parts[3], "sweep step");
    if (!(step > 0))
        throw DomainError("sweep step must be positive");
    SweepAxis axis{parts[0], {}};
    for (long long i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + 1e-9 * step)
            break;
        axis.values.push_back(v);
    }
    return axis;
}

inline std::string substitute_size(std::string spec, long long n) {
    const std::string key = "{N}";
    for (auto pos = spec.find(key); pos != std::string::npos; pos = spec.find(key))
        spec.replace(pos, key.size(), std::to_string(n));
    return spec;
}

inline int cmd_sweep(const SweepFlags &f, std::ostream &out) {
    const SweepAxis axis = parse_axis(f.vary);
    out << kSweepHeader << '\n';
    for (double value : axis.values) {
        GameFlags row = f;
        if (axis.kind == "bc")
            row.b = value * f.c;
        else if (axis.kind == "w")
            row.w = value;
        else
            row.graph = substitute_size(f.graph, std::llround(value));

        const double nan = std::numeric_limits<double>::quiet_NaN();
        double n_vertices = nan, k = nan, neutral = nan, exact = nan, mc_p = nan, mc_se = nan, bracket = nan,
               coefficient = nan, first_order = nan;
        std::string status = "ok";
        double b = row.b, c = row.c, w = row.w;
        try {
            const Graph g = parse_graph_spec(row.graph);
            n_vertices = static_cast<double>(g.size());
            k = g.degree();
            const ResolvedGame game = resolve_game(row, g.degree());
            b = game.payoff.benefit();
            c = game.payoff.cost();
            w = game.w;
            const InitialDistribution init = parse_init(row.init);
            init.validate(static_cast<int>(g.size()));
            neutral = neutral_value(g, init);
            if (game.rule != Rule::Voter && g.size() >= 3 && g.degree() >= 2)
                bracket = bc_bracket(game.rule, g.degree(), static_cast<int>(g.size()), b, c);
            if (auto coef = predicted_coefficient(game.rule, g, game.payoff, init)) {
                coefficient = *coef;
                first_order = neutral + w * coefficient;
            }
            if (static_cast<int>(g.size()) <= f.max_vertices) {
                const StateSpace space(g, game.rule, game.payoff, f.max_vertices);
                exact = fixation_exact(space, w, init);
            } else {
                status = "exact skipped: N > " + std::to_string(f.max_vertices);
            }
            if (f.mc_replicas > 0) {
                const ChainSpec spec = make_spec(game.rule, game.payoff, w, g.degree());
                const Estimate e =
                    estimate_fixation(g, spec, SimPlan{f.mc_replicas, f.seed, f.max_steps, init}, f.threads);
                mc_p = e.p_hat;
                mc_se = e.std_error;
            }
        } catch (const std::exception &e) {
            status = std::string("error: ") + e.what();
        }
        using detail::csv_number;
        out << axis.kind << ',' << csv_number(value) << ',' << detail::csv_text(row.graph) << ','
            << csv_number(n_vertices) << ',' << csv_number(k) << ',' << row.rule << ',' << csv_number(b) << ','
            << csv_number(c) << ',' << csv_number(w) << ',' << row.init << ',' << csv_number(neutral) << ','
            << csv_number(exact) << ',' << csv_number(exact - neutral) << ',' << csv_number(mc_p) << ','
            << csv_number(mc_se) << ',' << csv_number(bracket) << ',' << csv_number(coefficient) << ','
            << csv_number(first_order) << ',' << detail::csv_text(status) << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// mc
// ---------------------------------------------------------------------------

struct McFlags : GameFlags {
    std::uint64_t replicas = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::uint64_t max_steps = kDefaultMaxSteps;
    bool progress = false;
    bool json = false;
};

inline int cmd_mc(const McFlags &f, std::ostream &out) {
    const Graph g = parse_graph_spec(f.graph);
    const ResolvedGame game = resolve_game(f, g.degree());
    const ChainSpec spec = make_spec(game.rule, game.payoff, game.w, g.degree());
    const InitialDistribution init = parse_init(f.init);
    init.validate(static_cast<int>(g.size()));
    const SimPlan plan{f.replicas, f.seed, f.max_steps, init};
    if (plan.replicas < 1)
        throw DomainError("need at least one replica");

    if (plan.max_steps < 1)
        throw DomainError("max_steps must be >= 1");

    // Batching only decides when progress lines appear; replica r always
    // draws from stream r, so the estimate is the same either way.
    const std::uint64_t batches = f.progress ? std::min<std::uint64_t>(10, plan.replicas) : 1;
    const std::uint64_t chunk = (plan.replicas + batches - 1) / batches;
    ReplicaCounts total;
    for (std::uint64_t first = 0; first < plan.replicas; first += chunk) {
        const std::uint64_t last = std::min(plan.replicas, first + chunk);
        total += run_replicas_parallel(g, spec, plan, first, last, f.threads);
        if (f.progress) {
            nlohmann::ordered_json line{{"type", "progress"},
                                        {"done", last},
                                        {"total", plan.replicas},
                                        {"n_absorbed_1", total.ones},
                                        {"n_absorbed_0", total.zeros},
                                        {"n_censored", total.censored}};
            out << line.dump() << '\n';
        }
    }
    const Estimate e = make_estimate(total);

    RunRecord r;
    r.command = "mc";
    r.inputs = game_inputs(f, game, g);
    r.inputs["replicas"] = f.replicas;
    r.inputs["seed"] = f.seed;
    r.inputs["max_steps"] = f.max_steps;
    r.outputs = {{"p_hat", e.p_hat},         {"stderr", e.std_error},          {"n_absorbed_1", e.n_absorbed_1},
                 {"n_absorbed_0", e.n_absorbed_0}, {"n_censored", e.n_censored}, {"neutral", neutral_value(g, init)}};
    if (f.progress) {
        nlohmann::ordered_json line = r;
        line["type"] = "result";
        out << line.dump() << '\n';
    } else {
        detail::emit(out, r, f.json);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

struct TableFlags {
    std::string graph;
    std::string kind = "hitting";
};

inline int cmd_tables(const TableFlags &f, std::ostream &out) {
    const Graph g = parse_graph_spec(f.graph);
    PairTable t;
    if (f.kind == "hitting")
        t = hitting_times(g);
    else if (f.kind == "meeting")
        t = meeting_times(g);
    else
        throw DomainError("--kind must be hitting or meeting");
    out << std::setprecision(17);
    for (std::size_t x = 0; x < t.size(); ++x) {
        for (std::size_t y = 0; y < t.size(); ++y)
            out << (y ? "," : "") << t(static_cast<Vertex>(x), static_cast<Vertex>(y));
        out << '\n';
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

namespace detail {
inline void add_game_flags(CLI::App *sub, GameFlags &f, bool graph_required = true) {
    auto *graph = sub->add_option("--graph", f.graph, "cycle:N | complete:N | torus:AxB | rr:N:k:seed | petersen | file:PATH");
    if (graph_required)
        graph->required();
    sub->add_option("--rule", f.rule, "voter | db | im")->capture_default_str();
    sub->add_option("--b", f.b, "benefit (canonical payoff)");
    sub->add_option("--c", f.c, "cost (canonical payoff)");
    sub->add_option("--payoff", f.payoff, "general matrix 'a,b;c,d' (equal gains from switching)");
    sub->add_option("--w", f.w, "intensity of selection")->capture_default_str();
    sub->add_option("--init", f.init, "un:N | point:BITS | bern:U")->capture_default_str();
}
} // namespace detail

inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"fixlab: fixation probabilities of evolutionary games on regular graphs"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    ExactFlags exact;
    auto *exact_cmd = app.add_subcommand("exact", "exact fixation, 0-potential and w-derivative (N <= 14)");
    detail::add_game_flags(exact_cmd, exact);
    exact_cmd->add_option("--max-n", exact.max_vertices, "largest N for the exact solver")->capture_default_str();
    exact_cmd->add_flag("--json", exact.json, "emit the JSON run record");

    BcFlags bc;
    auto *bc_cmd = app.add_subcommand("bc-rule", "sign of the first-order term and critical size N0");
    bc_cmd->add_option("--rule", bc.rule, "db | im")->capture_default_str();
    bc_cmd->add_option("--k", bc.k, "degree")->required();
    bc_cmd->add_option("--b", bc.b, "benefit")->required();
    bc_cmd->add_option("--c", bc.c, "cost")->required();
    bc_cmd->add_option("--N", bc.n_vertices, "number of vertices");
    bc_cmd->add_flag("--json", bc.json, "emit the JSON run record");

    SweepFlags sweep;
    bool csv_flag = false;
    auto *sweep_cmd = app.add_subcommand("sweep", "CSV sweep over b/c, w or N");
    detail::add_game_flags(sweep_cmd, sweep);
    sweep_cmd->add_option("--vary", sweep.vary, "bc:LO:HI:STEP | w:LO:HI:STEP | N:LO:HI:STEP")->required();
    sweep_cmd->add_option("--mc-replicas", sweep.mc_replicas, "Monte Carlo replicas per row (0 = off)");
    sweep_cmd->add_option("--seed", sweep.seed, "base seed for the replica streams")->capture_default_str();
    sweep_cmd->add_option("--threads", sweep.threads, "worker threads (results do not depend on it)")->capture_default_str();
    sweep_cmd->add_option("--max-steps", sweep.max_steps, "step cap per replica before it counts as censored")->capture_default_str();
    sweep_cmd->add_option("--max-n", sweep.max_vertices, "largest N for the exact solver")->capture_default_str();
    sweep_cmd->add_flag("--csv", csv_flag, "CSV output (always on)");

    McFlags mc;
    auto *mc_cmd = app.add_subcommand("mc", "Monte Carlo fixation estimate");
    detail::add_game_flags(mc_cmd, mc);
    mc_cmd->add_option("--replicas", mc.replicas, "number of independent replicas")->capture_default_str();
    mc_cmd->add_option("--seed", mc.seed, "base seed for the replica streams")->capture_default_str();
    mc_cmd->add_option("--threads", mc.threads, "worker threads (results do not depend on it)")->capture_default_str();
    mc_cmd->add_option("--max-steps", mc.max_steps, "step cap per replica before it counts as censored")->capture_default_str();
    mc_cmd->add_flag("--progress", mc.progress, "line-delimited JSON progress and result records");
    mc_cmd->add_flag("--json", mc.json, "emit the JSON run record");

    TableFlags tables;
    auto *tables_cmd = app.add_subcommand("tables", "hitting or meeting time matrix as CSV");
    tables_cmd->add_option("--graph", tables.graph, "cycle:N | complete:N | torus:AxB | rr:N:k:seed | petersen | file:PATH")->required();
    tables_cmd->add_option("--kind", tables.kind, "hitting | meeting")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*exact_cmd)
            return cmd_exact(exact, out);
        if (*bc_cmd)
            return cmd_bc(bc, out);
        if (*sweep_cmd)
            return cmd_sweep(sweep, out);
        if (*mc_cmd)
            return cmd_mc(mc, out);
        if (*tables_cmd)
            return cmd_tables(tables, out);
    } catch (const WMaxViolation &e) {
        err << "WMaxViolation: " << e.what() << '\n';
        return kExitDomain;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const EstimateUnavailable &e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const ConsistencyError &e) {
        err << "consistency failure: " << e.what() << '\n';
        return kExitConsistency;
    }
    return kExitUsage;
}

} // namespace fixlab::cli
