#pragma once

// Command-line front end. Needs the vendored CLI11.hpp and json.hpp on the include path.

#include "tatune/tatune.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tatune::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAnalysis = 2;

/// 64-bit FNV-1a of the raw model bytes, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

struct Options {
    std::string command;
    std::string model_path;
    std::vector<std::string> targets;
    std::vector<std::string> tunable;
    std::vector<std::string> msr_ids;
    std::vector<std::string> mg_ids;
    std::string json_path;
    std::optional<std::size_t> limit;
    std::size_t budget = 100000;
    bool global = false;
    bool uniform = false;
    int clocks = 3;
    int paths = 1;
    int length = 12;
    std::optional<std::int64_t> total_bound;
    std::string output;
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SemanticError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline Json constraint_list(const ConstraintTable& table, const ConstraintSet& set) {
    Json arr = Json::array();
    for (auto id : to_ids(set)) arr.push_back(Json{{"id", table.name(id)}, {"atom", table.pretty(id)}});
    return arr;
}

inline Json witness_json(const TimedAutomaton& ta, const WitnessPath& w) {
    Json locs = Json::array(), edges = Json::array();
    for (auto l : w.locations) locs.push_back(ta.locations[l].name);
    for (auto e : w.edges) edges.push_back(ta.edges[e].name);
    return Json{{"locations", locs}, {"edges", edges}, {"text", format_path(ta, w)}};
}

inline Json valuation_json(const ConstraintTable& table, const RelaxationValuation& val, const ConstraintSet& only) {
    Json arr = Json::array();
    for (const auto& [id, amount] : val) {
        if (!only.test(id.value)) continue;
        arr.push_back(Json{{"id", table.name(id)}, {"atom", table.pretty(id)}, {"relaxation", amount.value}});
    }
    return arr;
}

inline Json chain_json(const std::vector<std::size_t>& chain) {
    Json arr = Json::array();
    for (auto c : chain) arr.push_back(c);
    return arr;
}

/// A sufficient reduction with its witness; the ids come from the user.
inline std::pair<Reduction, WitnessPath> given_msr(const TimedAutomaton& ta, const ConstraintTable& table,
                                                    const std::vector<std::string>& ids,
                                                    const VerifierLimits& limits) {
    const Reduction red = resolve_universe(table, ids);
    const auto r = check_reachability(apply_reduction(ta, table, red), limits);
    if (r.verdict == Verdict::Inconclusive) throw AnalysisError(ErrorKind::Inconclusive, "verifier inconclusive");
    if (r.verdict == Verdict::LimitExceeded) throw AnalysisError(ErrorKind::LimitExceeded, "verifier state limit exceeded");
    if (r.verdict != Verdict::Reachable)
        throw AnalysisError(ErrorKind::InsufficientInput, "the given reduction does not reach the targets");
    return {red, r.witness};
}

class Runner {
public:
    Runner(const Options& opt, Json& report) : opt_(opt), report_(report) {}

    const std::string& model_text() const { return model_text_; }

    void run() {
        if (opt_.command == "gen") return gen();
        load();
        const auto start = std::chrono::steady_clock::now();
        if (opt_.command == "check") check();
        else if (opt_.command == "msr") msr();
        else if (opt_.command == "mg") mg();
        else if (opt_.command == "enumerate") enumerate();
        else if (opt_.command == "relax") relax();
        else if (opt_.command == "mg-relax") mg_relax(opt_.uniform);
        else if (opt_.command == "robustness") mg_relax(true);
        stats_["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report_["stats"] = stats_;
    }

private:
    const Options& opt_;
    Json& report_;
    TimedAutomaton ta_;
    ConstraintTable table_;
    ConstraintSet universe_;
    VerifierLimits limits_;
    Json stats_ = Json{{"verifier_calls", 0}, {"sat_calls", 0}};
    std::string model_text_; // generated model when no output file is given

    void load() {
        const std::string text = read_file(opt_.model_path);
        auto file = parse_model_file(text);
        ta_ = std::move(file.automaton);
        if (!opt_.targets.empty()) {
            std::vector<LocationId> targets;
            for (const auto& name : opt_.targets) {
                auto l = ta_.find_location(name);
                if (!l) throw SemanticError("unknown target location '" + name + "'");
                targets.push_back(*l);
            }
            std::sort(targets.begin(), targets.end());
            targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
            ta_.targets = std::move(targets);
        }
        if (ta_.targets.empty()) throw SemanticError("no target locations given");
        table_ = ConstraintTable::build(ta_);
        std::optional<std::vector<std::string>> ids = file.tunable;
        if (!opt_.tunable.empty()) ids = opt_.tunable;
        universe_ = resolve_universe(table_, ids);
        table_.set_universe(universe_);
        limits_.max_states = opt_.limit;
        report_["model"] = Json{{"path", opt_.model_path}, {"fnv1a64", fnv1a_hex(text)}};
        Json targets = Json::array();
        for (auto t : ta_.targets) targets.push_back(ta_.locations[t].name);
        report_["targets"] = targets;
        report_["universe_size"] = universe_.count();
    }

    void add_stats(const EngineStats& s) {
        stats_["verifier_calls"] = stats_["verifier_calls"].get<std::size_t>() + s.verifier_calls;
        stats_["sat_calls"] = stats_["sat_calls"].get<std::size_t>() + s.sat_calls;
    }

    void add_verifier_calls(std::size_t n) {
        stats_["verifier_calls"] = stats_["verifier_calls"].get<std::size_t>() + n;
    }

    void check() {
        report_["kind"] = "check";
        const auto r = check_reachability(ta_, limits_);
        add_verifier_calls(1);
        if (r.verdict == Verdict::Inconclusive)
            throw AnalysisError(ErrorKind::Inconclusive, "state budget exhausted on a model with diagonal constraints");
        if (r.verdict == Verdict::LimitExceeded)
            throw AnalysisError(ErrorKind::LimitExceeded, "verifier state limit exceeded");
        Json res{{"verdict", to_string(r.verdict)}, {"states", r.states}};
        res["witness"] = r.verdict == Verdict::Reachable ? witness_json(ta_, r.witness) : Json(nullptr);
        report_["result"] = res;
    }

    MsmpResult compute_msr(Engine& engine) {
        auto r = engine.minimum_msr();
        add_stats(r.stats);
        return r;
    }

    MsmpResult compute_mg(Engine& engine) {
        auto r = engine.minimum_mg();
        add_stats(r.stats);
        return r;
    }

    void msr() {
        report_["kind"] = "msr";
        Engine engine(ta_, universe_, limits_);
        const auto r = compute_msr(engine);
        report_["result"] = Json{{"size", r.result.count()},
                                 {"constraints", constraint_list(table_, r.result)},
                                 {"chain", chain_json(r.stats.chain)},
                                 {"witness", witness_json(ta_, *r.witness)}};
    }

    void mg() {
        report_["kind"] = "mg";
        Engine engine(ta_, universe_, limits_);
        const auto r = compute_mg(engine);
        report_["result"] = Json{{"size", r.result.count()},
                                 {"constraints", constraint_list(table_, r.result)},
                                 {"mir_chain", chain_json(r.stats.chain)}};
    }

    static Json family(const ConstraintTable& table, std::vector<Reduction> sets) {
        std::sort(sets.begin(), sets.end(), [](const Reduction& a, const Reduction& b) {
            if (a.count() != b.count()) return a.count() < b.count();
            const auto ia = to_ids(a), ib = to_ids(b);
            return ia < ib;
        });
        std::size_t min_size = sets.empty() ? 0 : sets.front().count();
        std::size_t min_count = 0;
        Json list = Json::array();
        for (const auto& s : sets) {
            if (s.count() == min_size) ++min_count;
            list.push_back(constraint_list(table, s));
        }
        return Json{{"count", sets.size()}, {"minimum_size", min_size}, {"minimum_count", min_count}, {"sets", list}};
    }

    void enumerate() {
        report_["kind"] = "enumerate";
        Engine engine(ta_, universe_, limits_);
        auto e = engine.enumerate_all(opt_.budget);
        add_stats(e.stats);
        std::vector<Reduction> mgs;
        for (const auto& m : e.mirs) mgs.push_back(complement_guarantee(m, table_));
        report_["result"] = Json{{"msrs", family(table_, e.msrs)}, {"mgs", family(table_, std::move(mgs))}};
    }

    void relax() {
        Reduction msr_set;
        WitnessPath witness;
        if (!opt_.msr_ids.empty()) {
            std::tie(msr_set, witness) = given_msr(ta_, table_, opt_.msr_ids, limits_);
            add_verifier_calls(1);
        } else {
            Engine engine(ta_, universe_, limits_);
            auto r = compute_msr(engine);
            msr_set = r.result;
            witness = *r.witness;
        }
        Json res{{"msr_size", msr_set.count()}, {"msr", constraint_list(table_, msr_set)}};
        if (opt_.global) {
            report_["kind"] = "relax-global";
            const auto out = min_total_relaxation_global(ta_, msr_set, limits_, opt_.budget);
            add_verifier_calls(out.verifier_calls);
            res["cost"] = out.cost;
            res["valuation"] = valuation_json(table_, out.valuation, msr_set);
            res["oracle_calls"] = out.oracle_calls;
        } else {
            report_["kind"] = "relax-milp";
            const auto out = min_total_relaxation_milp(ta_, msr_set, witness, limits_);
            add_verifier_calls(out.verifier_calls);
            res["cost"] = out.cost;
            res["valuation"] = valuation_json(table_, out.valuation, msr_set);
            Json delays = Json::array();
            for (const auto& d : out.delays) delays.push_back(d.str());
            res["delays"] = delays;
            res["witness"] = witness_json(ta_, witness);
            res["cuts"] = out.oracle_calls - 1;
        }
        report_["result"] = res;
    }

    void mg_relax(bool uniform) {
        Reduction mg_set;
        if (!opt_.mg_ids.empty()) {
            mg_set = resolve_universe(table_, opt_.mg_ids);
            if (!mg_set.is_subset_of(universe_))
                throw SemanticError("the given guarantee is not inside the tunable universe");
        } else {
            Engine engine(ta_, universe_, limits_);
            mg_set = compute_mg(engine).result;
        }
        Json res{{"mg_size", mg_set.count()}, {"mg", constraint_list(table_, mg_set)}};
        if (uniform) {
            report_["kind"] = "robustness";
            const auto out = robustness_degree(ta_, mg_set, universe_, limits_);
            add_verifier_calls(out.verifier_calls);
            res["delta"] = out.delta;
            res["next_reaches"] = out.next_reaches;
        } else {
            report_["kind"] = "mg-max";
            const auto out = max_total_relaxation(ta_, mg_set, universe_, limits_, opt_.budget);
            add_verifier_calls(out.verifier_calls);
            res["cost"] = out.cost;
            res["valuation"] = valuation_json(table_, out.valuation, mg_set);
            res["oracle_calls"] = out.oracle_calls;
        }
        report_["result"] = res;
    }

    void gen() {
        report_["kind"] = "gen";
        const auto ta = generate_scheduler(opt_.clocks, opt_.paths, opt_.length, opt_.total_bound);
        const std::string text = serialize_model(ta);
        if (!opt_.output.empty()) {
            std::ofstream out(opt_.output, std::ios::binary);
            if (!out) throw SemanticError("cannot write '" + opt_.output + "'");
            out << text;
        }
        report_["model"] = Json{{"path", opt_.output.empty() ? Json(nullptr) : Json(opt_.output)},
                                {"fnv1a64", fnv1a_hex(text)}};
        report_["result"] = Json{{"clocks", opt_.clocks},
                                 {"paths", opt_.paths},
                                 {"length", opt_.length},
                                 {"total_bound", opt_.total_bound.value_or(default_total_bound(opt_.paths, opt_.length))},
                                 {"locations", ta.locations.size()},
                                 {"edges", ta.edges.size()},
                                 {"constraints", ConstraintTable::build(ta).size()}};
        if (opt_.output.empty()) model_text_ = text;
    }
};

inline std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

} // namespace detail

/// Runs one invocation. The report goes to `out` (or the --json file), errors to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Timed-automaton constraint tuning: minimal sufficient reductions, guarantees and relaxations",
                 "tatune"};
    app.require_subcommand(1, 1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--model", opt.model_path, "Model file")->required();
        sub->add_option("--target", opt.targets, "Target locations (overrides the model)")->delimiter(',');
        sub->add_option("--tunable", opt.tunable, "Tunable constraint ids owner#index (overrides the model)")
            ->delimiter(',');
        sub->add_option("--json", opt.json_path, "Write the JSON report to this file");
        sub->add_option("--limit", opt.limit, "Verifier state limit");
        sub->add_option("--budget", opt.budget, "Oracle or seed budget for searches");
    };

    auto* check = app.add_subcommand("check", "Reachability of the target locations");
    common(check);
    auto* msr = app.add_subcommand("msr", "Minimum minimal sufficient reduction");
    common(msr);
    auto* mg = app.add_subcommand("mg", "Minimum minimal guarantee");
    common(mg);
    auto* enumerate = app.add_subcommand("enumerate", "All minimal sufficient reductions and guarantees");
    common(enumerate);
    auto* relax = app.add_subcommand("relax", "Least total relaxation of a minimum MSR");
    common(relax);
    relax->add_flag("--global", opt.global, "Search over all paths with the verifier as oracle");
    relax->add_option("--msr", opt.msr_ids, "Use this reduction instead of computing one")->delimiter(',');
    auto* mg_relax = app.add_subcommand("mg-relax", "Largest total relaxation keeping a minimum MG safe");
    common(mg_relax);
    mg_relax->add_flag("--uniform", opt.uniform, "Relax every guarantee atom by the same amount");
    mg_relax->add_option("--mg", opt.mg_ids, "Use this guarantee instead of computing one")->delimiter(',');
    auto* robustness = app.add_subcommand("robustness", "Largest uniform relaxation keeping a minimum MG safe");
    common(robustness);
    robustness->add_option("--mg", opt.mg_ids, "Use this guarantee instead of computing one")->delimiter(',');
    auto* gen = app.add_subcommand("gen", "Generate a scheduler benchmark model");
    gen->add_option("--clocks", opt.clocks, "Clock count (3, 5 or 7)")->required();
    gen->add_option("--paths", opt.paths, "Path count (1 or 2)")->required();
    gen->add_option("--len", opt.length, "Transitions per path")->required();
    gen->add_option("--total-bound", opt.total_bound, "Bound on the global clock at the target");
    gen->add_option("-o,--output", opt.output, "Model output file (stdout when absent)");
    gen->add_option("--json", opt.json_path, "Write the JSON report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: usage: " << detail::one_line(e.what()) << "\n";
        return kExitUsage;
    }
    opt.command = app.get_subcommands().front()->get_name();

    Json report;
    Json command = Json::array();
    for (int i = 1; i < argc; ++i) command.push_back(argv[i]);
    report["command"] = command;
    detail::Runner runner(opt, report);
    try {
        runner.run();
    } catch (const ParseError& e) {
        err << "error: ParseError: " << detail::one_line(e.what()) << "\n";
        return kExitUsage;
    } catch (const SemanticError& e) {
        err << "error: SemanticError: " << detail::one_line(e.what()) << "\n";
        return kExitUsage;
    } catch (const AnalysisError& e) {
        err << "error: " << detail::one_line(e.what()) << "\n";
        return e.kind() == ErrorKind::InvalidParams ? kExitUsage : kExitAnalysis;
    }

    const std::string text = report.dump(2) + "\n";
    if (!opt.json_path.empty()) {
        std::ofstream f(opt.json_path, std::ios::binary);
        if (!f) {
            err << "error: SemanticError: cannot write '" << opt.json_path << "'\n";
            return kExitUsage;
        }
        f << text;
        if (opt.command == "gen" && opt.output.empty()) out << runner.model_text();
    } else if (opt.command == "gen" && opt.output.empty()) {
        out << runner.model_text();
    } else {
        out << text;
    }
    return kExitOk;
}

} // namespace tatune::cli
