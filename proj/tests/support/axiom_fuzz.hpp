#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fastod/od.hpp"
#include "fastod/oracle.hpp"
#include "support/random_relation.hpp"

namespace fastod::testing {

/// Data-level soundness: premises that hold on a relation force the conclusion.
struct RuleInstance {
    std::vector<CanonicalOD> premises;
    std::vector<CanonicalOD> conclusions;
    /// Checks that cannot be phrased as canonical ODs (argument order matters).
    std::function<bool(const Relation&)> extra_premise;
    std::function<bool(const Relation&)> extra_conclusion;
};

struct FuzzOutcome {
    std::string rule;
    std::size_t satisfied = 0;
    std::size_t violations = 0;
    std::size_t attempts = 0;
};

/// X: A~B with the pair order kept: no s, t in one X-class with A(s) < A(t), B(s) > B(t).
inline bool ordered_oc_holds(const Relation& rel, AttributeSet x, AttrId a, AttrId b) {
    const NullPolicy p = rel.schema().null_policy;
    for (std::size_t s = 0; s < rel.row_count(); ++s)
        for (std::size_t t = 0; t < rel.row_count(); ++t) {
            bool same = true;
            x.for_each([&](AttrId c) { same = same && oracle::compare_raw(rel.values(c)[s], rel.values(c)[t], p) == 0; });
            if (!same) continue;
            if (oracle::compare_raw(rel.values(a)[s], rel.values(a)[t], p) < 0 &&
                oracle::compare_raw(rel.values(b)[s], rel.values(b)[t], p) > 0)
                return false;
        }
    return true;
}

/// Distinct attributes drawn without replacement.
inline std::vector<AttrId> draw_distinct(std::mt19937_64& rng, std::size_t width, std::size_t k) {
    std::vector<AttrId> all(width);
    for (std::size_t i = 0; i < width; ++i) all[i] = static_cast<AttrId>(i);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(k);
    return all;
}

inline AttributeSet random_subset_of(std::mt19937_64& rng, AttributeSet pool) {
    AttributeSet out;
    pool.for_each([&](AttrId a) {
        if (pick(rng, 0, 1)) out = out.with(a);
    });
    return out;
}

/// Builds one random instance of the rule over `width` attributes, or nothing
/// when the width is too small.
using InstanceMaker = std::function<std::optional<RuleInstance>(std::mt19937_64&, std::size_t width)>;

struct RuleCase {
    std::string name;
    InstanceMaker make;
};

inline std::vector<RuleCase> axiom_rules() {
    using OD = CanonicalOD;
    std::vector<RuleCase> rules;

    rules.push_back({"Reflexivity", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 1);
                         AttributeSet x = random_subset_of(rng, AttributeSet::first_n(w)).with(v[0]);
                         return RuleInstance{{}, {OD::constant(x, v[0])}, {}, {}};
                     }});
    rules.push_back({"Identity", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 1);
                         AttributeSet x = random_subset_of(rng, AttributeSet::first_n(w));
                         return RuleInstance{{}, {}, {}, [x, a = v[0]](const Relation& r) { return ordered_oc_holds(r, x, a, a); }};
                     }});
    rules.push_back({"Commutativity", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 2);
                         AttributeSet x = random_subset_of(rng, AttributeSet::first_n(w) - AttributeSet::of(v));
                         const AttrId a = v[0], b = v[1];
                         return RuleInstance{{}, {},
                                             [=](const Relation& r) { return ordered_oc_holds(r, x, a, b); },
                                             [=](const Relation& r) { return ordered_oc_holds(r, x, b, a); }};
                     }});
    rules.push_back({"Strengthen", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 2);
                         AttributeSet x = random_subset_of(rng, AttributeSet::first_n(w) - AttributeSet::of(v));
                         const AttrId a = v[0], b = v[1];
                         return RuleInstance{{OD::constant(x, a), OD::constant(x.with(a), b)}, {OD::constant(x, b)}, {}, {}};
                     }});
    rules.push_back({"Propagate", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 2);
                         AttributeSet x = random_subset_of(rng, AttributeSet::first_n(w) - AttributeSet::of(v));
                         const AttrId a = v[0], b = v[1];
                         return RuleInstance{{OD::constant(x, a)}, {}, {},
                                             [=](const Relation& r) { return ordered_oc_holds(r, x, a, b) && ordered_oc_holds(r, x, b, a); }};
                     }});
    rules.push_back({"Augmentation-I", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 1);
                         const AttributeSet rest = AttributeSet::first_n(w).without(v[0]);
                         AttributeSet x = random_subset_of(rng, rest);
                         AttributeSet z = random_subset_of(rng, rest);
                         return RuleInstance{{OD::constant(x, v[0])}, {OD::constant(z | x, v[0])}, {}, {}};
                     }});
    rules.push_back({"Augmentation-II", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 2);
                         const AttributeSet rest = AttributeSet::first_n(w) - AttributeSet::of(v);
                         AttributeSet x = random_subset_of(rng, rest);
                         AttributeSet z = random_subset_of(rng, rest);
                         return RuleInstance{{OD::order_compatible(x, v[0], v[1])}, {OD::order_compatible(z | x, v[0], v[1])}, {}, {}};
                     }});
    rules.push_back({"Chain", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         if (w < 3) return std::nullopt;
                         const std::size_t n = pick(rng, 1, std::min<std::size_t>(3, w - 2));
                         auto v = draw_distinct(rng, w, n + 2);
                         const AttrId a = v[0], c = v[n + 1];
                         AttributeSet x = random_subset_of(rng, AttributeSet::first_n(w) - AttributeSet::of(v));
                         RuleInstance inst;
                         for (std::size_t i = 0; i + 1 < v.size(); ++i) inst.premises.push_back(OD::order_compatible(x, v[i], v[i + 1]));
                         for (std::size_t i = 1; i <= n; ++i) inst.premises.push_back(OD::order_compatible(x.with(v[i]), a, c));
                         inst.conclusions.push_back(OD::order_compatible(x, a, c));
                         return inst;
                     }});
    rules.push_back({"Transitivity (derived)", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         const AttributeSet all = AttributeSet::first_n(w);
                         AttributeSet x = random_subset_of(rng, all), y = random_subset_of(rng, all), z = random_subset_of(rng, all);
                         if (z.empty()) z = AttributeSet::single(draw_distinct(rng, w, 1)[0]);
                         RuleInstance inst;
                         y.for_each([&](AttrId b) { inst.premises.push_back(OD::constant(x, b)); });
                         z.for_each([&](AttrId c) {
                             inst.premises.push_back(OD::constant(y, c));
                             inst.conclusions.push_back(OD::constant(x, c));
                         });
                         return inst;
                     }});
    rules.push_back({"Weak Transitivity (derived)", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto list = [&] {
                             auto l = draw_distinct(rng, w, pick(rng, 1, std::min<std::size_t>(3, w)));
                             return OrderSpec(l.begin(), l.end());
                         };
                         const OrderSpec x = list(), y = list(), z = list();
                         // premises: X ~ Y and Y ~ Z as canonical sets, plus Y: []↦Z_k
                         RuleInstance inst;
                         auto compat = [](const OrderSpec& p, const OrderSpec& q, std::vector<OD>& out) {
                             AttributeSet pre_p;
                             for (AttrId pi : p) {
                                 AttributeSet ctx = pre_p;
                                 for (AttrId qj : q) {
                                     out.push_back(OD::order_compatible(ctx, pi, qj));
                                     ctx = ctx.with(qj);
                                 }
                                 pre_p = pre_p.with(pi);
                             }
                         };
                         compat(x, y, inst.premises);
                         compat(y, z, inst.premises);
                         for (AttrId zk : z) inst.premises.push_back(OD::constant(AttributeSet::of(y), zk));
                         compat(x, z, inst.conclusions);
                         return inst;
                     }});
    rules.push_back({"Normalization (derived)", [](std::mt19937_64& rng, std::size_t w) -> std::optional<RuleInstance> {
                         auto v = draw_distinct(rng, w, 2);
                         AttributeSet x = random_subset_of(rng, AttributeSet::first_n(w)).with(v[0]);
                         const AttrId a = v[0], b = v[1];
                         return RuleInstance{{}, {}, {},
                                             [=](const Relation& r) { return ordered_oc_holds(r, x, a, b) && ordered_oc_holds(r, x, b, a); }};
                     }});
    return rules;
}

/// Draws instances until `target` of them have all premises true on the data.
inline FuzzOutcome fuzz_rule(const RuleCase& rule, std::size_t target, std::uint64_t seed, std::size_t max_attempts = 200000) {
    FuzzOutcome out{rule.name};
    std::mt19937_64 rng(seed);
    while (out.satisfied < target && out.attempts < max_attempts) {
        ++out.attempts;
        RandomRelationSpec spec{.min_attrs = 2, .max_attrs = 6, .min_rows = 2, .max_rows = 12, .max_domain = 3, .null_rate = 0.05};
        Relation rel = random_relation(rng, spec);
        auto inst = rule.make(rng, rel.attribute_count());
        if (!inst) continue;
        bool premises = true;
        for (const auto& p : inst->premises) premises = premises && oracle::brute_validate_canonical(rel, p);
        if (premises && inst->extra_premise) premises = inst->extra_premise(rel);
        if (!premises) continue;
        ++out.satisfied;
        bool conclusion = true;
        for (const auto& c : inst->conclusions) conclusion = conclusion && oracle::brute_validate_canonical(rel, c);
        if (conclusion && inst->extra_conclusion) conclusion = inst->extra_conclusion(rel);
        if (!conclusion) ++out.violations;
    }
    return out;
}

}  // namespace fastod::testing
