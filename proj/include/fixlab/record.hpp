#pragma once

// Command-line vocabulary shared by the tool and its tests: graph specs,
// payoff strings and the JSON run record.

#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fixlab/dynamics.hpp"
#include "fixlab/graph.hpp"

namespace fixlab {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kRecordSchemaVersion = 1;

namespace detail {
inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return parts;
}

inline long long to_integer(const std::string &s, std::string_view what) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::logic_error &) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw DomainError("bad integer '" + s + "' for " + std::string(what));
    return v;
}

inline double to_real(const std::string &s, std::string_view what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::logic_error &) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw DomainError("bad number '" + s + "' for " + std::string(what));
    return v;
}
} // namespace detail

/// cycle:N, complete:N, torus:AxB, rr:N:k:seed, petersen, file:PATH.
inline Graph parse_graph_spec(std::string_view spec) {
    using detail::to_integer;
    const auto parts = detail::split(spec, ':');
    const std::string &kind = parts[0];
    auto expect_fields = [&](std::size_t n) {
        if (parts.size() != n)
            throw DomainError("graph spec '" + std::string(spec) + "' has the wrong number of fields");
    };
    if (kind == "cycle") {
        expect_fields(2);
        return cycle_graph(static_cast<int>(to_integer(parts[1], "cycle size")));
    }
    if (kind == "complete") {
        expect_fields(2);
        return complete_graph(static_cast<int>(to_integer(parts[1], "complete graph size")));
    }
    if (kind == "torus") {
        expect_fields(2);
        const auto sides = detail::split(parts[1], 'x');
        if (sides.size() != 2)
            throw DomainError("torus spec must look like torus:AxB");
        return torus_graph(static_cast<int>(to_integer(sides[0], "torus rows")),
                           static_cast<int>(to_integer(sides[1], "torus cols")));
    }
    if (kind == "rr") {
        expect_fields(4);
        return random_regular_graph(static_cast<int>(to_integer(parts[1], "rr size")),
                                    static_cast<int>(to_integer(parts[2], "rr degree")),
                                    static_cast<std::uint64_t>(to_integer(parts[3], "rr seed")));
    }
    if (kind == "petersen") {
        expect_fields(1);
        return petersen_graph();
    }
    if (kind == "file") {
        const std::string path(spec.substr(5));
        std::ifstream in(path);
        if (!in)
            throw DomainError("cannot open edge list '" + path + "'");
        const auto edges = parse_edge_list(in);
        return from_edge_list(edges);
    }
    throw DomainError("unknown graph spec '" + std::string(spec) + "'");
}

/// "p11,p10;p01,p00".
inline PayoffMatrix parse_payoff(std::string_view text) {
    const auto rows = detail::split(text, ';');
    if (rows.size() != 2)
        throw DomainError("payoff must look like 'a,b;c,d'");
    const auto top = detail::split(rows[0], ',');
    const auto bottom = detail::split(rows[1], ',');
    if (top.size() != 2 || bottom.size() != 2)
        throw DomainError("payoff must look like 'a,b;c,d'");
    return {detail::to_real(top[0], "payoff"), detail::to_real(top[1], "payoff"), detail::to_real(bottom[0], "payoff"),
            detail::to_real(bottom[1], "payoff")};
}

/// Self-describing record of one command: everything that went in and came out.
struct RunRecord {
    int schema_version = kRecordSchemaVersion;
    std::string tool_version{kToolVersion};
    std::string command;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    nlohmann::ordered_json outputs = nlohmann::ordered_json::object();

    friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

inline void to_json(nlohmann::ordered_json &j, const RunRecord &r) {
    j = nlohmann::ordered_json{{"schema_version", r.schema_version},
                               {"tool_version", r.tool_version},
                               {"command", r.command},
                               {"inputs", r.inputs},
                               {"outputs", r.outputs}};
}

inline void from_json(const nlohmann::ordered_json &j, RunRecord &r) {
    j.at("schema_version").get_to(r.schema_version);
    if (r.schema_version != kRecordSchemaVersion)
        throw DomainError("unsupported run record schema " + std::to_string(r.schema_version));
    j.at("tool_version").get_to(r.tool_version);
    j.at("command").get_to(r.command);
    r.inputs = j.at("inputs");
    r.outputs = j.at("outputs");
}

inline std::string dump_record(const RunRecord &r) { return nlohmann::ordered_json(r).dump(2); }

inline RunRecord parse_record(std::string_view text) {
    return nlohmann::ordered_json::parse(text).get<RunRecord>();
}

} // namespace fixlab
