// calibsim: no-regret sequential decision simulator.
//
// Subcommands:
//   complex <game> --out file.json
//       Best-response complex of the game, refined to a Laguerre diagram.
//   simulate --game <name|file> --strategy fm|pm-outcome|pm-action|naive
//            --adversary iid:p|seq:file|greedy --horizon N --seed S
//            [--replicates R] [--delta D] [--gamma-exponent E] --out prefix
//       Seeded repeated-game runs; writes per-replicate trajectory/curve CSVs
//       and a median curve table when R > 1.
//   rates --in curve.csv --from N1 --to N2
//       Log-log slope of each regret column over the window.
//   bounds --game <...> --delta D --horizon N
//       Concentration and regret-bound constants for every applicable mode.
//
// Exit codes: 0 success, 2 validation error, 1 unexpected failure.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "calib/br_complex.hpp"
#include "calib/harness.hpp"

using namespace calib;
using nlohmann::json;

namespace {

struct Args {
    std::vector<std::string> positional;
    std::vector<std::pair<std::string, std::string>> options;

    std::string get(const std::string& key, const std::string& fallback = "") const {
        for (const auto& [k, v] : options)
            if (k == key) return v;
        if (fallback.empty()) throw ValidationError("missing required option --" + key);
        return fallback;
    }
};

Args parse_args(int argc, char** argv, int from) {
    Args a;
    for (int i = from; i < argc; ++i) {
        std::string s = argv[i];
        if (s.rfind("--", 0) == 0) {
            if (i + 1 >= argc) throw ValidationError("option " + s + " needs a value");
            a.options.emplace_back(s.substr(2), argv[++i]);
        } else {
            a.positional.push_back(s);
        }
    }
    return a;
}

long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("bad integer for " + what + ": '" + s + "'");
    }
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("bad number for " + what + ": '" + s + "'");
    }
}

FiniteGame load_game(const std::string& spec) {
    try {
        return builtin(spec);
    } catch (const UnknownGame&) {
    }
    std::ifstream in(spec);
    if (!in) throw ValidationError("game '" + spec + "' is neither builtin nor a readable file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("game file '" + spec + "': " + e.what());
    }
    return game_from_json(j);
}

Adversary parse_adversary(const std::string& spec, const FiniteGame& g) {
    if (spec == "greedy") return Adversary::greedy();
    if (spec.rfind("iid:", 0) == 0) {
        const std::string body = spec.substr(4);
        Vec y;
        std::size_t pos = 0;
        while (pos <= body.size()) {
            const std::size_t comma = body.find(',', pos);
            const std::string tok =
                body.substr(pos, comma == std::string::npos ? comma : comma - pos);
            y.push_back(parse_double(tok, "iid probability"));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (int(y.size()) == 1 && g.J == 2) y = {1.0 - y[0], y[0]};  // prob of the second action
        if (int(y.size()) != g.J || !is_probability_vector(y, 1e-9))
            throw ValidationError("iid adversary needs a probability vector over " +
                                  std::to_string(g.J) + " outcomes");
        return Adversary::iid(y);
    }
    if (spec.rfind("seq:", 0) == 0) {
        std::ifstream in(spec.substr(4));
        if (!in) throw ValidationError("cannot open sequence file '" + spec.substr(4) + "'");
        std::vector<int> seq;
        long v;
        while (in >> v) seq.push_back(int(v));
        if (seq.empty()) throw ValidationError("empty sequence file");
        return Adversary::sequence(seq);
    }
    throw ValidationError("adversary must be iid:<p>, seq:<file> or greedy");
}

json rate_to_json(const Curve& c, long from, long to) {
    json out;
    try {
        auto f = rate_fit(c, from, to);
        out = {{"slope", f.slope},
               {"intercept", f.intercept},
               {"points_used", f.points_used},
               {"points_filtered", f.points_filtered}};
    } catch (const ValidationError& e) {
        out = {{"error", e.what()}};
    }
    return out;
}

json bound_to_json(const ConcentrationBound& b) {
    return {{"L", b.L},           {"M_n", b.M_n},       {"v_n", b.v_n},
            {"K_n", b.K_n},       {"Theta_n", b.Theta_n}, {"Omega0", b.Omega0},
            {"Omega1", b.Omega1}, {"Omega2", b.Omega2},   {"Omega3", b.Omega3},
            {"Omega4", b.Omega4}, {"Omega5", b.Omega5},   {"M_P", b.M_P},
            {"M_W", b.M_W},       {"M_rho", b.M_rho},     {"bc_norm", b.bc_norm},
            {"gamma_n", b.gamma_n}};
}

int cmd_complex(int argc, char** argv) {
    Args a = parse_args(argc, argv, 2);
    if (a.positional.size() != 1) throw ValidationError("usage: complex <game> --out file.json");
    const FiniteGame g = load_game(a.positional[0]);
    const std::string out_path = a.get("out");
    auto cx = g.fully_revealing() ? full_monitoring_complex(g) : partial_monitoring_complex(g);
    auto rd = refine_to_laguerre(cx);
    std::ofstream out(out_path);
    if (!out) throw ValidationError("cannot open '" + out_path + "' for writing");
    out << refined_to_json(rd).dump(2) << '\n';
    std::cout << "wrote " << out_path << ": " << rd.size() << " cells, " << rd.hyperplanes.size()
              << " hyperplanes\n";
    return 0;
}

int cmd_simulate(int argc, char** argv) {
    Args a = parse_args(argc, argv, 2);
    const FiniteGame g = load_game(a.get("game"));
    StrategyConfig cfg;
    cfg.mode = mode_from_name(a.get("strategy"));
    cfg.delta = parse_double(a.get("delta", "0.2"), "--delta");
    cfg.gamma_exponent =
        parse_double(a.get("gamma-exponent", "-0.3333333333333333"), "--gamma-exponent");
    const Adversary adv = parse_adversary(a.get("adversary"), g);
    const long horizon = parse_long(a.get("horizon"), "--horizon");
    const long seed = parse_long(a.get("seed"), "--seed");
    const long replicates = parse_long(a.get("replicates", "1"), "--replicates");
    const std::string prefix = a.get("out");
    if (horizon < 0 || replicates < 1) throw ValidationError("horizon/replicates out of range");

    std::vector<CurveTable> tables;
    for (long r = 0; r < replicates; ++r) {
        auto rr = run(g, cfg, adv, horizon, std::uint64_t(seed + r));
        const std::string base = prefix + ".r" + std::to_string(r);
        write_trajectory_csv(base + ".trajectory.csv", rr.trajectory);
        CurveTable t = curve_table(rr, g);
        write_curves_csv(base + ".curves.csv", t);
        json cfgj = rr.trajectory.config;
        cfgj["adversary"] = a.get("adversary");
        std::ofstream cf(base + ".config.json");
        cf << cfgj.dump(2) << '\n';
        tables.push_back(std::move(t));
        std::cout << base << ".trajectory.csv (" << horizon << " stages)\n";
    }
    if (replicates > 1) {
        write_curves_csv(prefix + ".median.curves.csv", median_table(tables));
        std::cout << prefix << ".median.curves.csv\n";
    }
    return 0;
}

int cmd_rates(int argc, char** argv) {
    Args a = parse_args(argc, argv, 2);
    const CurveTable t = read_curves_csv(a.get("in"));
    const long from = parse_long(a.get("from"), "--from");
    const long to = parse_long(a.get("to"), "--to");
    if (from > to) throw ValidationError("--from exceeds --to");
    json out;
    Curve c;
    c.n = t.n;
    c.value = t.internal_fm;
    out["internal_fm"] = rate_to_json(c, from, to);
    c.value = t.internal_pm;
    out["internal_pm"] = rate_to_json(c, from, to);
    c.value = t.external;
    out["external"] = rate_to_json(c, from, to);
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_bounds(int argc, char** argv) {
    Args a = parse_args(argc, argv, 2);
    const FiniteGame g = load_game(a.get("game"));
    const double delta = parse_double(a.get("delta"), "--delta");
    const double horizon = parse_double(a.get("horizon"), "--horizon");
    if (delta <= 0 || delta >= 1) throw ValidationError("--delta must lie in (0,1)");
    if (horizon < 1) throw ValidationError("--horizon must be at least 1");
    json out;
    {
        auto rd = refine_to_laguerre(full_monitoring_complex(g));
        out["full_monitoring"] = {
            {"unweighted",
             bound_to_json(theoretical_bounds(g, rd, delta, horizon, BoundMode::CalibUnweighted))},
            {"weighted",
             bound_to_json(theoretical_bounds(g, rd, delta, horizon, BoundMode::CalibWeighted))}};
    }
    try {
        auto rd = refine_to_laguerre(partial_monitoring_complex(g));
        if (g.outcome_dependent_only())
            out["pm_outcome"] =
                bound_to_json(theoretical_bounds(g, rd, delta, horizon, BoundMode::PmOutcome));
        out["pm_action"] =
            bound_to_json(theoretical_bounds(g, rd, delta, horizon, BoundMode::PmAction));
    } catch (const UnsupportedDimension& e) {
        out["pm_action"] = {{"error", e.what()}};
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string usage =
        "usage: calibsim complex|simulate|rates|bounds [options]\n"
        "  complex  <game> --out file.json\n"
        "  simulate --game <name|file> --strategy fm|pm-outcome|pm-action|naive\n"
        "           --adversary iid:p|seq:file|greedy --horizon N --seed S\n"
        "           [--replicates R] [--delta D] [--gamma-exponent E] --out prefix\n"
        "  rates    --in curves.csv --from N1 --to N2\n"
        "  bounds   --game <name|file> --delta D --horizon N\n";
    try {
        if (argc < 2) throw ValidationError("no subcommand given");
        const std::string cmd = argv[1];
        if (cmd == "complex") return cmd_complex(argc, argv);
        if (cmd == "simulate") return cmd_simulate(argc, argv);
        if (cmd == "rates") return cmd_rates(argc, argv);
        if (cmd == "bounds") return cmd_bounds(argc, argv);
        if (cmd == "--help" || cmd == "-h" || cmd == "help") {
            std::cout << usage;
            return 0;
        }
        throw ValidationError("unknown subcommand '" + cmd + "'");
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n" << usage;
        return 2;
    } catch (const UnknownGame& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
