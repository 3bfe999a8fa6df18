#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>

using namespace tatune;
using namespace tatune::testing;

namespace {

struct Restricted {
    TimedAutomaton ta;
    ConstraintTable table;
    ConstraintSet universe;

    Restricted() {
        auto mf = parse_model_file(read_model("fig1_restricted.ta"));
        ta = mf.automaton;
        table = ConstraintTable::build(ta);
        universe = resolve_universe(table, mf.tunable);
        table.set_universe(universe);
    }

    /// c1..c4 in the order of the tunable directive.
    Reduction c(std::initializer_list<int> members) const {
        static const char* names[] = {"e1#0", "e5#1", "l1#1", "l3#1"};
        Reduction r = table.empty_set();
        for (int m : members) r.set(table.resolve(names[m - 1]).value);
        return r;
    }
};

void require_same_family(std::vector<Reduction> a, std::vector<Reduction> b) {
    auto key = [](const Reduction& r) {
        std::vector<std::uint32_t> k;
        for (auto id : to_ids(r)) k.push_back(id.value);
        return k;
    };
    auto order = [&](const Reduction& x, const Reduction& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), order);
    std::sort(b.begin(), b.end(), order);
    REQUIRE(a == b);
}

} // namespace

TEST_CASE("reduction core") {
    const auto ta = fig1();
    Engine engine(ta, ConstraintTable::build(ta).universe());
    const auto& table = engine.table();
    const auto w = check_reachability(apply_reduction(ta, table, table.universe())).witness;
    const auto core = engine.reduction_core(table.universe(), w);
    CHECK(core.count() == 11);
    for (auto id : to_ids(core)) {
        const auto owner = table.owner_name(id);
        CHECK((owner == "l0" || owner == "l1" || owner == "l3" || owner == "e1" || owner == "e4" || owner == "e5"));
    }
    CHECK(engine.reduction_core(core, w) == core);
    CHECK(engine.is_sufficient(core).has_value());

    Reduction off_path = ids(table, {"e7#0", "l6#0"});
    CHECK(engine.reduction_core(off_path, w).none());
}

TEST_CASE("critical and conflicting constraints") {
    const auto ta = fig1();
    Engine engine(ta, ConstraintTable::build(ta).universe());
    const auto& table = engine.table();
    const auto msr = ids(table, {"e5#2", "l3#1"});
    CHECK(engine.is_critical(msr, table.resolve("e5#2")));
    CHECK(engine.is_critical(msr, table.resolve("l3#1")));
    // with everything removed, dropping one far-away constraint keeps sufficiency
    CHECK_FALSE(engine.is_critical(table.universe(), table.resolve("e7#0")));

    Restricted r;
    Engine small(r.ta, r.universe);
    CHECK(small.is_conflicting(r.c({4}), r.table.resolve("l1#1")));
    CHECK_FALSE(small.is_conflicting(r.c({}), r.table.resolve("e1#0")));
    CHECK(small.is_critical(r.c({3, 4}), r.table.resolve("l1#1")));
}

TEST_CASE("shrink and enlarge on the restricted universe") {
    Restricted r;
    {
        Engine e(r.ta, r.universe);
        const auto msr = e.shrink(r.universe).msr;
        CHECK((msr == r.c({3, 4}) || msr == r.c({1, 2, 3})));
    }
    {
        Engine e(r.ta, r.universe);
        CHECK(e.shrink(r.c({3, 4})).msr == r.c({3, 4}));
        CHECK_THROWS_AS(e.shrink(r.c({1})), AnalysisError);
    }
    {
        Engine e(r.ta, r.universe);
        const auto mir = e.enlarge(r.c({}));
        CHECK((mir == r.c({1, 2, 4}) || mir == r.c({2, 3}) || mir == r.c({1, 3})));
        CHECK(e.enlarge(r.c({2, 3})) == r.c({2, 3}));
        try {
            e.enlarge(r.c({3, 4}));
            FAIL("expected SufficientInput");
        } catch (const AnalysisError& err) {
            CHECK(err.kind() == ErrorKind::SufficientInput);
        }
    }
}

TEST_CASE("seed searches on the restricted universe") {
    Restricted r;
    {
        Engine e(r.ta, r.universe);
        const auto seed = e.find_sseed(r.c({1, 2, 3}));
        REQUIRE(seed);
        CHECK(seed->reduction == r.c({3, 4}));
    }
    {
        Engine e(r.ta, r.universe);
        CHECK_FALSE(e.find_sseed(r.c({3, 4})));
    }
    {
        Engine e(r.ta, r.universe);
        const auto seed = e.find_iseed(r.c({2, 3}));
        REQUIRE(seed);
        CHECK(*seed == r.c({1, 2, 4}));
    }
    {
        Engine e(r.ta, r.universe);
        CHECK_FALSE(e.find_iseed(r.c({1, 2, 4})));
        CHECK_FALSE(e.find_iseed(r.universe));
    }
    {
        // size-1 MSR: the only smaller candidate is the empty set, which is insufficient
        const auto ta = fig1();
        Engine e(ta, ConstraintTable::build(ta).universe());
        CHECK_FALSE(e.find_sseed(ids(e.table(), {"e5#2"})));
    }
}

TEST_CASE("minimum MSR and MG on the restricted universe") {
    Restricted r;
    Engine e(r.ta, r.universe);
    CHECK(e.minimum_msr().result == r.c({3, 4}));
    Engine g(r.ta, r.universe);
    CHECK(g.minimum_mg().result == r.c({3}));
}

TEST_CASE("minimum MSR on fig1") {
    const auto ta = fig1();
    Engine engine(ta, ConstraintTable::build(ta).universe());
    const auto res = engine.minimum_msr();
    CHECK(res.result.count() == 2);
    REQUIRE(res.witness);
    CHECK(path_realizable(apply_reduction(ta, engine.table(), res.result), *res.witness));
    for (auto id : to_ids(res.result)) CHECK(engine.is_critical(res.result, id));
    for (std::size_t i = 1; i < res.stats.chain.size(); ++i) CHECK(res.stats.chain[i] < res.stats.chain[i - 1]);
    // nothing smaller is left once the scheme stops
    CHECK_FALSE(engine.store().sseed_candidate(res.result.count() - 1));
    CHECK(res.stats.verifier_calls > 0);
}

TEST_CASE("precondition errors") {
    const auto ta = fig1();
    auto reach = ta;
    reach.targets = {*ta.find_location("l1")};
    Engine a(reach, ConstraintTable::build(reach).universe());
    try {
        a.minimum_msr();
        FAIL("expected AlreadyReachable");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == ErrorKind::AlreadyReachable);
    }
    Engine b(reach, ConstraintTable::build(reach).universe());
    CHECK_THROWS_AS(b.minimum_mg(), AnalysisError);

    // target with no incoming edge
    auto cut = parse_model("clocks x\nlocation a { initial; invariant x <= 3; }\nlocation b { }\n"
                           "edge e { from a; to a; guard x >= 5; }\ntarget b\n");
    Engine c(cut, ConstraintTable::build(cut).universe());
    try {
        c.minimum_msr();
        FAIL("expected NoStructuralPath");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == ErrorKind::NoStructuralPath);
    }
}

TEST_CASE("enumeration on fig1 with certificates") {
    const auto ta = fig1();
    Engine engine(ta, ConstraintTable::build(ta).universe());
    const auto all = engine.enumerate_all();
    const auto& table = engine.table();
    REQUIRE(all.msrs.size() == 24);
    REQUIRE(all.mirs.size() == 40);
    const auto min_msr = std::min_element(all.msrs.begin(), all.msrs.end(), [](auto& a, auto& b) {
                             return a.count() < b.count();
                         })->count();
    CHECK(min_msr == 2);
    CHECK(std::count_if(all.msrs.begin(), all.msrs.end(), [&](auto& m) { return m.count() == min_msr; }) == 4);

    Engine check(ta, table.universe());
    for (const auto& m : all.msrs) {
        REQUIRE(check.is_sufficient(m));
        for (auto id : to_ids(m)) CHECK(check.is_critical(m, id));
    }
    std::size_t min_mg = SIZE_MAX;
    for (const auto& m : all.mirs) {
        REQUIRE_FALSE(check.is_sufficient(m));
        for (auto id : to_ids(table.universe() - m)) CHECK(check.is_conflicting(m, id));
        const auto mg = complement_guarantee(m, table);
        min_mg = std::min(min_mg, mg.count());
    }
    CHECK(std::count_if(all.mirs.begin(), all.mirs.end(),
                        [&](auto& m) { return complement_guarantee(m, table).count() == min_mg; }) == 21);
    Engine g(ta, table.universe());
    CHECK(g.minimum_mg().result.count() == min_mg);
}

TEST_CASE("enumeration on the restricted universe and on an empty universe") {
    Restricted r;
    Engine e(r.ta, r.universe);
    const auto all = e.enumerate_all();
    require_same_family(all.msrs, {r.c({3, 4}), r.c({1, 2, 3})});
    require_same_family(all.mirs, {r.c({1, 2, 4}), r.c({2, 3}), r.c({1, 3})});

    const auto ta = fig1();
    const auto table = ConstraintTable::build(ta);
    Engine none(ta, table.empty_set());
    const auto empty = none.enumerate_all();
    CHECK(empty.msrs.empty());
    REQUIRE(empty.mirs.size() == 1);
    CHECK(empty.mirs[0].none());

    Engine tight(ta, table.universe());
    CHECK_THROWS_AS(tight.enumerate_all(3), AnalysisError);
}

TEST_CASE("engine results match brute force on random automata") {
    std::mt19937 rng(101);
    int instances = 0;
    for (int round = 0; round < 40; ++round) {
        const auto ta = random_instance(rng);
        const auto table = ConstraintTable::build(ta);
        const BruteForce bf(ta, table);
        Engine a(ta, table.universe());
        CHECK(a.minimum_msr().result.count() == bf.min_sufficient_size());
        Engine b(ta, table.universe());
        CHECK(b.minimum_mg().result.count() == table.size() - bf.max_insufficient_size());
        Engine c(ta, table.universe());
        const auto all = c.enumerate_all();
        require_same_family(all.msrs, bf.msrs());
        require_same_family(all.mirs, bf.mirs());
        ++instances;
    }
    CHECK(instances == 40);
}

TEST_CASE("sufficiency is monotone under inclusion") {
    std::mt19937 rng(202);
    int pairs = 0;
    while (pairs < 200) {
        const auto ta = random_ta(rng);
        const auto table = ConstraintTable::build(ta);
        if (table.size() == 0) continue;
        for (int k = 0; k < 10; ++k, ++pairs) {
            Reduction small = table.empty_set(), big = table.empty_set();
            for (std::size_t i = 0; i < table.size(); ++i) {
                const auto roll = rng() % 3;
                if (roll == 0) small.set(i);
                if (roll != 2) big.set(i);
            }
            REQUIRE(small.is_subset_of(big));
            if (sufficient(ta, table, small)) CHECK(sufficient(ta, table, big));
        }
    }
}

TEST_CASE("stats and chain bookkeeping for guarantees") {
    const auto ta = fig1();
    Engine engine(ta, ConstraintTable::build(ta).universe());
    const auto res = engine.maximum_mir();
    for (std::size_t i = 1; i < res.stats.chain.size(); ++i) CHECK(res.stats.chain[i] > res.stats.chain[i - 1]);
    CHECK(res.stats.chain.back() == res.result.count());
    CHECK(res.stats.sat_calls > 0);
}
