#include <doctest.h>

#include <map>

#include "fastod/oracle.hpp"
#include "fastod/partitions.hpp"
#include "support/random_relation.hpp"

using namespace fastod;
using fastod::testing::int_relation;
using fastod::testing::taxes;

namespace {

/// 1-based tuple ids -> 0-based rows.
ClassList t(std::initializer_list<std::initializer_list<RowId>> classes) {
    ClassList out;
    for (auto c : classes) {
        out.emplace_back();
        for (RowId r : c) out.back().push_back(r - 1);
    }
    return out;
}

/// Groups rows by their tuple of ranks, drops singletons, orders by smallest member.
ClassList group_directly(const Relation& rel, AttributeSet x) {
    std::map<std::vector<Rank>, std::vector<RowId>> groups;
    for (RowId r = 0; r < rel.row_count(); ++r) {
        std::vector<Rank> key;
        x.for_each([&](AttrId a) { key.push_back(rel.ranks(a)[r]); });
        groups[key].push_back(r);
    }
    ClassList out;
    for (auto& [k, rows] : groups)
        if (rows.size() >= 2) out.push_back(rows);
    std::sort(out.begin(), out.end());
    return out;
}

// Table 3: τ_A rank classes {t3,t5,t8} < {t1,t6} < {t4} < {t7} < {t2}; Π_X = {t1},{t2},{t3,t4,t5},{t6,t7},{t8}.
Relation table3() {
    return int_relation({{2, 1}, {5, 2}, {1, 3}, {3, 3}, {1, 3}, {2, 4}, {4, 4}, {1, 5}});
}

}  // namespace

TEST_CASE("single-attribute partitions on the taxes table") {
    Relation rel = taxes();
    CHECK(full_partition(rel, AttributeSet::single(rel.attribute("year"))).classes == t({{1, 2, 3}, {4, 5, 6}}));
    CHECK(partition_single(rel, rel.attribute("year")).classes() == t({{1, 2, 3}, {4, 5, 6}}));
    CHECK(partition_single(rel, rel.attribute("salary")).classes() == t({{2, 6}}));

    Relation distinct = int_relation({{1}, {2}, {3}});
    CHECK(partition_single(distinct, 0).is_key());
    CHECK_THROWS_AS(partition_single(rel, 42), SchemaError);
}

TEST_CASE("empty-context partition") {
    CHECK(empty_context_partition(taxes()).classes() == t({{1, 2, 3, 4, 5, 6}}));
    CHECK(empty_context_partition(int_relation({{1}})).is_key());
    CHECK(empty_context_partition(int_relation({}, 1)).is_key());
}

TEST_CASE("partition product") {
    Relation rel = taxes();
    const AttrId year = rel.attribute("year"), position = rel.attribute("position");
    auto py = partition_single(rel, year);
    auto pp = partition_single(rel, position);
    auto prod = product(py, pp);
    CHECK(prod.classes() == group_directly(rel, AttributeSet::of({year, position})));
    CHECK(prod.is_key());
    CHECK(product(py, py) == py);
    CHECK(product(py, empty_context_partition(rel)) == py);
    CHECK(product(empty_context_partition(rel), py) == py);
}

TEST_CASE("sorted partitions") {
    Relation rel = taxes();
    CHECK(sorted_partition(rel, rel.attribute("bin")).classes() == t({{1, 4}, {2, 5}, {3, 6}}));
    CHECK(sorted_partition(table3(), 0).classes() == t({{3, 5, 8}, {1, 6}, {4}, {7}, {2}}));
    CHECK(sorted_partition(int_relation({{4}, {4}, {4}, {4}}), 0).classes() == t({{1, 2, 3, 4}}));
}

TEST_CASE("Table 3 bucket split of context classes under tau_A") {
    Relation rel = table3();
    auto tau = sorted_partition(rel, 0);
    auto ctx = partition_single(rel, 1);
    REQUIRE(ctx.classes() == t({{3, 4, 5}, {6, 7}}));
    CHECK(bucket_by_order(ctx[0], tau) == t({{3, 5}, {4}}));
    CHECK(bucket_by_order(ctx[1], tau) == t({{6}, {7}}));
    Relation flat = int_relation({{2, 1, 0}, {5, 2, 0}, {1, 3, 0}, {3, 3, 0}, {1, 3, 0}, {2, 4, 0}, {4, 4, 0}, {1, 5, 0}});
    for (auto strategy : {SwapStrategy::sort, SwapStrategy::scan})
        CHECK(check_order_compatible(partition_single(flat, 1), sorted_partition(flat, 0), flat.ranks(2), strategy));
}

TEST_CASE("constant and order-compatibility checks on the taxes table") {
    Relation rel = taxes();
    auto id = [&](const char* n) { return rel.attribute(n); };
    auto pos = partition_single(rel, id("position"));
    CHECK(check_constant(pos, rel.ranks(id("bin"))));
    CHECK_FALSE(check_constant(pos, rel.ranks(id("salary"))));
    CHECK(check_constant(StrippedPartition{}, rel.ranks(id("salary"))));

    auto year = partition_single(rel, id("year"));
    for (auto strategy : {SwapStrategy::automatic, SwapStrategy::sort, SwapStrategy::scan}) {
        CHECK(check_order_compatible(year, sorted_partition(rel, id("bin")), rel.ranks(id("salary")), strategy));
        CHECK_FALSE(check_order_compatible(year, sorted_partition(rel, id("bin")), rel.ranks(id("subgroup")), strategy));
    }
}

TEST_CASE("partition properties on random relations") {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 300; ++iter) {
        Relation rel = fastod::testing::random_relation(rng);
        const std::size_t w = rel.attribute_count();
        const AttributeSet x = fastod::testing::random_set(rng, w);
        const AttributeSet y = fastod::testing::random_set(rng, w);
        const AttributeSet z = fastod::testing::random_set(rng, w);
        auto px = stripped_partition(rel, x);
        auto py = stripped_partition(rel, y);
        auto pz = stripped_partition(rel, z);

        REQUIRE(px.classes() == group_directly(rel, x));
        CHECK(product(px, py) == product(py, px));
        CHECK(product(product(px, py), pz) == product(px, product(py, pz)));
        CHECK(product(px, py).classes() == group_directly(rel, x | y));

        for (AttrId a = 0; a < w; ++a) {
            const bool got = check_constant(px, rel.ranks(a));
            CHECK(got == oracle::brute_validate_canonical(rel, CanonicalOD::constant(x, a)));
            auto tau_a = sorted_partition(rel, a);
            CHECK(check_order_compatible(px, tau_a, rel.ranks(a)));
            for (AttrId b = 0; b < w; ++b) {
                const bool sorted = check_order_compatible(px, tau_a, rel.ranks(b), SwapStrategy::sort);
                const bool scanned = check_order_compatible(px, tau_a, rel.ranks(b), SwapStrategy::scan);
                const bool mirrored = check_order_compatible(px, sorted_partition(rel, b), rel.ranks(a));
                CHECK(sorted == scanned);
                CHECK(sorted == mirrored);
                CHECK(sorted == oracle::brute_validate_canonical(rel, CanonicalOD::order_compatible(x, a, b)));
            }
        }
    }
}
