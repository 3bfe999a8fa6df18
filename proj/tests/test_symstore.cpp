#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace tatune;

namespace {

bool satisfies(const std::vector<bool>& model, const std::vector<sat::Clause>& clauses) {
    for (const auto& c : clauses) {
        bool ok = false;
        for (auto l : c) ok = ok || model[sat::var_of(l)] != sat::is_neg(l);
        if (!ok) return false;
    }
    return true;
}

Reduction set4(std::initializer_list<int> members) {
    Reduction r(4);
    for (int m : members) r.set(static_cast<std::size_t>(m - 1)); // c1..c4 are bits 0..3
    return r;
}

ConstraintSet full4() {
    ConstraintSet u(4);
    u.set();
    return u;
}

} // namespace

TEST_CASE("sat solver agrees with brute force") {
    std::mt19937 rng(5);
    int sat_count = 0, unsat_count = 0;
    for (int round = 0; round < 500; ++round) {
        const std::uint32_t vars = 1 + rng() % 10;
        const std::size_t n_clauses = rng() % 40;
        std::vector<sat::Clause> clauses;
        for (std::size_t k = 0; k < n_clauses; ++k) {
            sat::Clause c;
            const int width = 1 + static_cast<int>(rng() % 3);
            for (int j = 0; j < width; ++j) {
                const auto v = static_cast<std::uint32_t>(rng() % vars);
                c.push_back(rng() % 2 ? sat::pos(v) : sat::neg(v));
            }
            clauses.push_back(c);
        }
        bool brute = false;
        for (std::uint32_t mask = 0; mask < (1u << vars) && !brute; ++mask) {
            std::vector<bool> m(vars);
            for (std::uint32_t v = 0; v < vars; ++v) m[v] = mask >> v & 1;
            brute = satisfies(m, clauses);
        }
        sat::Solver s(vars);
        for (const auto& c : clauses) s.add_clause(c);
        const auto model = s.solve();
        REQUIRE(model.has_value() == brute);
        if (model) CHECK(satisfies(*model, clauses));
        (brute ? sat_count : unsat_count)++;
    }
    CHECK(sat_count > 50);
    CHECK(unsat_count > 50);
}

TEST_CASE("sat solver edge cases") {
    sat::Solver empty_clause(2);
    empty_clause.add_clause({});
    CHECK_FALSE(empty_clause.solve());

    sat::Solver none(3);
    const auto m = none.solve();
    REQUIRE(m);
    CHECK(*m == std::vector<bool>{false, false, false}); // negative phase first

    sat::Solver units(2);
    units.add_clause({sat::pos(0)});
    units.add_clause({sat::neg(0)});
    CHECK_FALSE(units.solve());

    std::ostringstream os;
    sat::write_dimacs(os, 2, {{sat::pos(0), sat::neg(1)}});
    CHECK(os.str() == "p cnf 2 1\n1 -2 0\n");
}

TEST_CASE("cardinality queries enumerate exactly the size-k sets") {
    for (std::size_t n = 1; n <= 7; ++n) {
        ConstraintSet u(n + 2);
        for (std::size_t i = 1; i <= n; ++i) u.set(i); // universe skips bit 0 and the last bit
        for (std::size_t k = 0; k <= n; ++k) {
            CnfStore st(u);
            std::set<std::vector<std::uint32_t>> seen;
            while (auto r = st.sseed_candidate(k)) {
                REQUIRE(r->count() == k);
                REQUIRE(r->is_subset_of(u));
                std::vector<std::uint32_t> key;
                for (auto id : to_ids(*r)) key.push_back(id.value);
                REQUIRE(seen.insert(key).second);
                // block exactly this set and its subsets
                st.mark_insufficient(*r);
            }
            std::size_t binom = 1;
            for (std::size_t i = 0; i < k; ++i) binom = binom * (n - i) / (i + 1);
            CHECK(seen.size() == binom);
        }
    }
}

TEST_CASE("store membership follows the marks") {
    CnfStore st(full4());
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
        Reduction r(4);
        for (int i = 0; i < 4; ++i)
            if (mask >> i & 1) r.set(i);
        CHECK_FALSE(st.known_insufficient(r));
        CHECK_FALSE(st.known_sufficient(r));
    }
    st.mark_insufficient(set4({1, 2}));
    CHECK(st.known_insufficient(set4({1})));
    CHECK(st.known_insufficient(set4({})));
    CHECK_FALSE(st.known_insufficient(set4({1, 2, 3})));

    st.mark_sufficient(set4({3, 4}));
    CHECK(st.known_sufficient(set4({1, 3, 4})));
    CHECK_FALSE(st.known_sufficient(set4({3})));

    CnfStore all(full4());
    all.mark_sufficient(set4({}));
    CHECK(all.known_sufficient(set4({})));
    CHECK(all.known_sufficient(set4({2})));
}

TEST_CASE("seed candidates respect blocking") {
    SECTION("fresh store") {
        CnfStore st(full4());
        CHECK(st.sseed_candidate(0) == set4({}));
        CHECK(st.iseed_candidate(4) == full4());
    }
    SECTION("marking the empty set blocks only the empty set") {
        CnfStore st(full4());
        st.mark_insufficient(set4({}));
        CHECK_FALSE(st.sseed_candidate(0));
        CHECK(st.sseed_candidate(1));
    }
    SECTION("marking the full set insufficient blocks every size") {
        CnfStore st(full4());
        st.mark_insufficient(full4());
        for (std::size_t k = 0; k <= 4; ++k) CHECK_FALSE(st.sseed_candidate(k));
    }
    SECTION("marking the full set sufficient blocks only the full set") {
        CnfStore st(full4());
        st.mark_sufficient(full4());
        CHECK_FALSE(st.iseed_candidate(4));
        CHECK(st.iseed_candidate(3));
    }
    SECTION("restricted example: after the three MIRs no singleton is left") {
        CnfStore st(full4());
        for (auto m : {set4({1, 2, 4}), set4({2, 3}), set4({1, 3})}) st.mark_insufficient(m);
        CHECK_FALSE(st.sseed_candidate(1));
        const auto two = st.sseed_candidate(2);
        REQUIRE(two);
        CHECK(*two == set4({3, 4}));
    }
    SECTION("insufficient MIR blocks all of its subsets") {
        CnfStore st(full4());
        st.mark_insufficient(set4({1, 3, 4}));
        for (std::size_t k = 0; k <= 4; ++k)
            while (auto r = st.sseed_candidate(k)) {
                CHECK_FALSE(r->is_subset_of(set4({1, 3, 4})));
                st.mark_insufficient(*r);
            }
    }
    SECTION("size-3 candidates after an MSR is marked") {
        CnfStore st(full4());
        st.mark_sufficient(set4({3, 4}));
        std::vector<Reduction> got;
        while (auto r = st.iseed_candidate(3)) {
            got.push_back(*r);
            st.mark_sufficient(*r);
        }
        // of the four size-3 sets, the two containing {c3,c4} are excluded
        REQUIRE(got.size() == 2);
        for (const auto& r : got) CHECK_FALSE(set4({3, 4}).is_subset_of(r));
    }
    SECTION("unexplored points are outside both families") {
        CnfStore st(full4());
        st.mark_insufficient(set4({1, 2}));
        st.mark_sufficient(set4({3}));
        std::size_t count = 0;
        while (auto r = st.unexplored()) {
            CHECK_FALSE(st.known_insufficient(*r));
            CHECK_FALSE(st.known_sufficient(*r));
            st.mark_insufficient(*r);
            ++count;
        }
        // 16 sets minus 4 subsets of {c1,c2} minus 8 supersets of {c3}
        CHECK(count == 4);
    }
    SECTION("dimacs dump") {
        CnfStore st(full4());
        st.mark_insufficient(set4({1, 2}));
        st.mark_sufficient(set4({3, 4}));
        std::ostringstream os;
        st.write_dimacs(os);
        CHECK(os.str() == "p cnf 4 2\n3 4 0\n-3 -4 0\n");
    }
}
