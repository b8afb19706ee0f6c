#include "dode/problem.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dode {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

const Generator& ProblemFile::generator(const std::string& name) const {
    for (const Generator& g : generators)
        if (g.name == name) return g;
    std::ostringstream os;
    os << "unknown generator '" << name << "'; defined:";
    for (const Generator& g : generators) os << ' ' << g.name;
    throw ValidationError(os.str());
}

namespace {

struct Line {
    int number;
    std::string text;
};

struct Section {
    std::string header;  // e.g. "problem", "generator X1", "monitor integral I"
    int line;
    std::vector<std::pair<Line, Line>> entries;  // key line, value (same line)
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

[[noreturn]] void fail(const std::string& src, int line, const std::string& msg) {
    throw ValidationError(src + ":" + std::to_string(line) + ": " + msg);
}

struct Loader {
    std::string src;
    ProblemFile out;

    Expr parse_expr(const std::string& text, int line) const {
        ParseOptions opt;
        opt.constants = out.constants;
        try {
            return parse(text, opt);
        } catch (const Error& e) {
            fail(src, line, std::string("in '") + text + "': " + e.what());
        }
    }

    // Numbers may be plain C literals (1e-6) or closed expressions (2*cos(tau)).
    double parse_number(const std::string& text, int line,
                        const std::map<std::string, double>& bound = {}) const {
        {
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (end && *end == '\0' && end != text.c_str()) return v;
        }
        try {
            ParseOptions opt;
            opt.constants = out.constants;
            Expr e = parse(text, opt);
            EvalPoint pt;
            pt.consts = bound;
            pt.consts.emplace("tau", out.tau);
            return eval_numeric(e, pt);
        } catch (const Error& e) {
            fail(src, line, std::string("in '") + text + "': " + e.what());
        }
    }
};

}  // namespace

ProblemFile parse_problem(std::string_view text, std::string source_name) {
    // First pass: split into sections of key/value lines.
    std::vector<Section> sections;
    {
        std::istringstream is{std::string(text)};
        std::string raw;
        int lineno = 0;
        Section* cur = nullptr;
        while (std::getline(is, raw)) {
            ++lineno;
            std::size_t hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            const std::string line = trim(raw);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ValidationError(source_name + ":" + std::to_string(lineno) +
                                          ": unterminated section header");
                sections.push_back(Section{trim(line.substr(1, line.size() - 2)), lineno, {}});
                cur = &sections.back();
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string::npos || cur == nullptr)
                throw ValidationError(source_name + ":" + std::to_string(lineno) +
                                      ": expected 'key = value' inside a section");
            cur->entries.push_back({Line{lineno, trim(line.substr(0, eq))},
                                    Line{lineno, trim(line.substr(eq + 1))}});
        }
    }

    Loader ld;
    ld.src = source_name;
    ld.out.source_name = source_name;
    ld.out.content_hash = fnv1a64(text);
    ld.out.constants.insert("tau");

    // The [problem] section first: it declares constants used everywhere else.
    int problem_sections = 0;
    for (const Section& s : sections) {
        if (s.header != "problem") continue;
        ++problem_sections;
        for (const auto& [key, value] : s.entries) {
            if (key.text == "constants") {
                for (const std::string& name : split_ws(value.text)) ld.out.constants.insert(name);
            }
        }
        for (const auto& [key, value] : s.entries) {
            if (key.text == "tau") {
                ld.out.tau = ld.parse_number(value.text, value.number);
                if (!(ld.out.tau > 0)) fail(ld.src, value.number, "tau must be positive");
            } else if (key.text == "lagrangian") {
                ld.out.lagrangian = ld.parse_expr(value.text, value.number);
            } else if (key.text == "equation") {
                ld.out.equation = ld.parse_expr(value.text, value.number);
            } else if (key.text != "constants") {
                fail(ld.src, key.number, "unknown key '" + key.text + "' in [problem]");
            }
        }
    }
    if (problem_sections != 1)
        throw ValidationError(source_name + ": expected exactly one [problem] section, found " +
                              std::to_string(problem_sections));
    if (!ld.out.lagrangian && !ld.out.equation)
        throw ValidationError(source_name + ": [problem] needs a lagrangian or an equation");

    for (const Section& s : sections) {
        const std::vector<std::string> head = split_ws(s.header);
        if (head.empty()) fail(ld.src, s.line, "empty section header");
        const std::string& kind = head[0];

        if (kind == "problem") continue;

        if (kind == "generator") {
            if (head.size() != 2) fail(ld.src, s.line, "[generator NAME] expected");
            const std::string name = head[1];
            for (const Generator& g : ld.out.generators)
                if (g.name == name) fail(ld.src, s.line, "duplicate generator '" + name + "'");
            Expr xi(0), eta(0);
            std::string combine;
            for (const auto& [key, value] : s.entries) {
                if (key.text == "xi") xi = ld.parse_expr(value.text, value.number);
                else if (key.text == "eta") eta = ld.parse_expr(value.text, value.number);
                else if (key.text == "combine") combine = value.text;
                else fail(ld.src, key.number, "unknown key '" + key.text + "' in [generator]");
            }
            if (!combine.empty()) {
                Expr cx(0), ce(0);
                std::istringstream cs(combine);
                std::string part;
                while (std::getline(cs, part, '+')) {
                    const std::string ref = trim(part);
                    if (ref.empty()) fail(ld.src, s.line, "empty term in combine");
                    bool found = false;
                    for (const Generator& g : ld.out.generators) {
                        if (g.name == ref) {
                            cx = cx + g.xi;
                            ce = ce + g.eta;
                            found = true;
                            break;
                        }
                    }
                    if (!found)
                        fail(ld.src, s.line,
                             "combine references '" + ref + "' before it is defined");
                }
                xi = cx;
                eta = ce;
            }
            try {
                ld.out.generators.push_back(make_generator(name, xi, eta));
            } catch (const Error& e) {
                fail(ld.src, s.line, e.what());
            }
            continue;
        }

        if (kind == "history") {
            for (const auto& [key, value] : s.entries) {
                if (key.text == "phi") ld.out.history_phi = ld.parse_expr(value.text, value.number);
                else if (key.text == "t0") ld.out.history_t0 = ld.parse_number(value.text, value.number);
                else fail(ld.src, key.number, "unknown key '" + key.text + "' in [history]");
            }
            continue;
        }

        if (kind == "simulate") {
            ld.out.has_simulate = true;
            for (const auto& [key, value] : s.entries) {
                if (key.text == "t_end") ld.out.t_end = ld.parse_number(value.text, value.number);
                else if (key.text == "steps_per_delay")
                    ld.out.steps_per_delay =
                        static_cast<int>(std::llround(ld.parse_number(value.text, value.number)));
                else if (key.text == "seed")
                    ld.out.seed = static_cast<std::uint64_t>(
                        std::llround(ld.parse_number(value.text, value.number)));
                else fail(ld.src, key.number, "unknown key '" + key.text + "' in [simulate]");
            }
            continue;
        }

        if (kind == "monitor") {
            if (head.size() != 3) fail(ld.src, s.line, "[monitor KIND NAME] expected");
            ProblemMonitor mon;
            mon.name = head[2];
            if (head[1] == "integral") mon.kind = ProblemMonitor::Kind::Integral;
            else if (head[1] == "difference") mon.kind = ProblemMonitor::Kind::Difference;
            else if (head[1] == "relation") mon.kind = ProblemMonitor::Kind::Relation;
            else fail(ld.src, s.line, "monitor kind must be integral, difference or relation");

            bool has_expr = false, has_lhs = false, has_rhs = false;
            for (const auto& [key, value] : s.entries) {
                if (key.text == "expr") {
                    mon.expr = ld.parse_expr(value.text, value.number);
                    has_expr = true;
                } else if (key.text == "lhs") {
                    mon.lhs = ld.parse_expr(value.text, value.number);
                    has_lhs = true;
                } else if (key.text == "rhs") {
                    mon.rhs = ld.parse_expr(value.text, value.number);
                    has_rhs = true;
                } else if (key.text == "tolerance") {
                    mon.tolerance = ld.parse_number(value.text, value.number);
                } else if (ld.out.constants.count(key.text)) {
                    mon.constants[key.text] =
                        ld.parse_number(value.text, value.number, mon.constants);
                } else {
                    fail(ld.src, key.number,
                         "unknown key '" + key.text + "' in [monitor] (declare constants in [problem])");
                }
            }
            if (has_lhs != has_rhs) fail(ld.src, s.line, "lhs and rhs must be given together");
            if (has_lhs) {
                mon.from_pair = true;
                mon.expr = mon.rhs - mon.lhs;
            } else if (!has_expr) {
                fail(ld.src, s.line, "monitor needs expr (or lhs/rhs)");
            }
            ld.out.monitors.push_back(std::move(mon));
            continue;
        }

        fail(ld.src, s.line, "unknown section [" + s.header + "]");
    }

    if (ld.out.has_simulate && !ld.out.history_phi)
        throw ValidationError(source_name + ": [simulate] requires a [history] section");

    return ld.out;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str(), path);
}

}  // namespace dode
