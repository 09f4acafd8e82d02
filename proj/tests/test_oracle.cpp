#include <doctest.h>

#include "fastod/oracle.hpp"
#include "support/random_relation.hpp"

using namespace fastod;
using fastod::testing::int_relation;
using fastod::testing::taxes;

namespace {
using OD = CanonicalOD;
}

TEST_CASE("oracle validation on the taxes table") {
    Relation rel = taxes();
    auto id = [&](const char* n) { return rel.attribute(n); };
    CHECK(oracle::brute_validate_canonical(rel, OD::order_compatible(AttributeSet::single(id("year")), id("bin"), id("salary"))));
    CHECK_FALSE(oracle::brute_validate_canonical(rel, OD::constant(AttributeSet::single(id("position")), id("salary"))));
    CHECK(oracle::brute_validate_list(rel, {{id("salary")}, {id("tax")}}));
    CHECK_FALSE(oracle::brute_validate_list(rel, {{id("salary")}, {id("subgroup")}}));
    CHECK(oracle::brute_validate_list(rel, {{id("year"), id("salary")}, {id("year"), id("bin")}}));

    Relation one = int_relation({{3, 1}});
    CHECK(oracle::brute_validate_canonical(one, OD::constant({}, 0)));
    CHECK(oracle::brute_validate_canonical(one, OD::order_compatible({}, 0, 1)));
}

TEST_CASE("empty left side orders only constants") {
    Relation rel = int_relation({{1, 5}, {2, 5}});
    CHECK(oracle::brute_validate_list(rel, {{}, {1}}));
    CHECK_FALSE(oracle::brute_validate_list(rel, {{}, {0}}));
    CHECK(oracle::brute_validate_list(rel, {{}, {}}));
}

TEST_CASE("raw comparison") {
    CHECK(oracle::compare_raw(std::int64_t{2}, std::int64_t{10}, NullPolicy::nulls_first) < 0);
    CHECK(oracle::compare_raw(std::string("10"), std::string("2"), NullPolicy::nulls_first) < 0);
    CHECK(oracle::compare_raw(Value{}, std::int64_t{0}, NullPolicy::nulls_first) < 0);
    CHECK(oracle::compare_raw(Value{}, std::int64_t{0}, NullPolicy::nulls_last) > 0);
    CHECK(oracle::compare_raw(Value{}, Value{}, NullPolicy::nulls_last) == 0);
    CHECK(oracle::compare_raw(Date{3}, Date{-1}, NullPolicy::nulls_first) > 0);
}

TEST_CASE("brute_discover small cases") {
    // two rows moving together: both columns are keys, so each determines the other
    Relation diag = int_relation({{1, 1}, {2, 2}});
    ODSet m = oracle::brute_discover(diag);
    CHECK(m.contains(OD::order_compatible({}, 0, 1)));
    CHECK(m.contains(OD::constant(AttributeSet::single(0), 1)));
    CHECK(m.contains(OD::constant(AttributeSet::single(1), 0)));
    CHECK(m.size() == 3);

    Relation constant = int_relation({{4, 1}, {4, 2}, {4, 3}});
    ODSet mc = oracle::brute_discover(constant);
    CHECK(mc.contains(OD::constant({}, 0)));
    for (const auto& od : mc)
        if (od.is_constant() && od.a() == 0) CHECK(od.context().empty());
}

TEST_CASE("budget is enforced") {
    Relation rel = taxes();
    CHECK_THROWS_AS(oracle::brute_discover(rel, {.check_budget = 10}), oracle::BudgetExceeded);
}

TEST_CASE("oracle agrees with the partition-based validators") {
    std::mt19937_64 rng(404);
    for (int iter = 0; iter < 300; ++iter) {
        Relation rel = fastod::testing::random_relation(rng);
        const std::size_t w = rel.attribute_count();
        const AttributeSet x = fastod::testing::random_set(rng, w);
        const auto a = static_cast<AttrId>(fastod::testing::pick(rng, 0, w - 1));
        const auto b = static_cast<AttrId>(fastod::testing::pick(rng, 0, w - 1));
        CHECK(oracle::brute_validate_canonical(rel, OD::constant(x, a)) == validate_canonical(rel, OD::constant(x, a)));
        CHECK(oracle::brute_validate_canonical(rel, OD::order_compatible(x, a, b)) ==
              validate_canonical(rel, OD::order_compatible(x, a, b)));
        ListOD list{fastod::testing::random_spec(rng, w, 3), fastod::testing::random_spec(rng, w, 3)};
        CHECK(oracle::brute_validate_list(rel, list) == satisfies_list_od(rel, list));
    }
}
