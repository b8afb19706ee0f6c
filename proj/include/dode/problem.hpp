#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dode/calculus.hpp"
#include "dode/expr.hpp"

namespace dode {

/// One monitor block of a problem file.
struct ProblemMonitor {
    enum class Kind { Integral, Difference, Relation };
    Kind kind = Kind::Integral;
    std::string name;
    Expr expr;                   // integral I, difference J, or relation residual
    bool from_pair = false;      // difference/relation given as lhs/rhs sides
    Expr lhs, rhs;
    double tolerance = 1e-6;
    std::map<std::string, double> constants;  // evaluated bindings
};

/// Parsed and resolved problem file: a sectioned key-value text format with
/// one [problem] section, named [generator NAME] blocks (either xi/eta
/// expressions or combine = G1 + G2 over earlier blocks), an optional
/// [history] and [simulate] section, and [monitor KIND NAME] blocks.
struct ProblemFile {
    std::string source_name;
    std::uint64_t content_hash = 0;

    double tau = 1.0;
    std::optional<Expr> lagrangian;
    std::optional<Expr> equation;
    std::set<std::string> constants;  // declared names (always includes tau)

    std::vector<Generator> generators;

    std::optional<Expr> history_phi;
    double history_t0 = 0.0;

    bool has_simulate = false;
    double t_end = 10.0;
    int steps_per_delay = 100;
    std::uint64_t seed = 7;

    std::vector<ProblemMonitor> monitors;

    const Generator& generator(const std::string& name) const;
};

std::uint64_t fnv1a64(std::string_view data);

ProblemFile parse_problem(std::string_view text, std::string source_name);
ProblemFile load_problem(const std::string& path);

}  // namespace dode
