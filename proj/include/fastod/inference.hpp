#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fastod/od.hpp"

namespace fastod {

/// A set of non-trivial canonical ODs over a fixed universe.
class ODSet {
public:
    ODSet() = default;
    explicit ODSet(AttributeSet universe) : universe_(universe) {}

    AttributeSet universe() const { return universe_; }
    void set_universe(AttributeSet u) { universe_ = u; }

    /// Returns false for trivial or already present ODs.
    bool insert(const CanonicalOD& od);
    bool contains(const CanonicalOD& od) const { return members_.count(od) != 0; }
    /// Membership where trivial forms count as present.
    bool holds(const CanonicalOD& od) const { return od.is_trivial() || contains(od); }
    bool has_constant(AttributeSet ctx, AttrId a) const { return holds(CanonicalOD::constant(ctx, a)); }
    bool has_oc(AttributeSet ctx, AttrId a, AttrId b) const { return holds(CanonicalOD::order_compatible(ctx, a, b)); }

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }
    std::vector<CanonicalOD> to_vector() const { return {members_.begin(), members_.end()}; }

    bool is_subset_of(const ODSet& o) const;
    bool operator==(const ODSet& o) const { return members_ == o.members_; }

private:
    AttributeSet universe_;
    std::set<CanonicalOD> members_;
};

struct DerivationLimit {
    std::size_t max_context_size = kMaxAttributes;
    std::size_t max_chain_length = 3;
};

enum class Rule {
    premise,
    strengthen,
    propagate,
    augmentation_constant,
    augmentation_compatible,
    chain,
};

std::string_view to_string(Rule r);

/// How one OD was first derived.
struct Justification {
    Rule rule = Rule::premise;
    std::vector<CanonicalOD> premises;
};

/// One round of every rule over s. Reflexivity, Identity and Commutativity
/// are structural: their conclusions are trivial or canonical already.
ODSet apply_axioms_once(const ODSet& s, const DerivationLimit& lim);

/// Least fixpoint of apply_axioms_once.
ODSet closure(const ODSet& s, const DerivationLimit& lim);

enum class Answer { yes, no, not_within_limits };

struct DerivationResult {
    Answer answer = Answer::no;
    /// Premise-first derivation of the target when answer is yes.
    std::vector<std::pair<CanonicalOD, Justification>> trace;
};

/// target ∈ closure(s); trivial targets are true.
bool derives(const ODSet& s, const CanonicalOD& target, const DerivationLimit& lim);

/// Like derives, with a trace. A negative answer is `no` only when the limits
/// cannot have cut off a derivation.
DerivationResult derive(const ODSet& s, const CanonicalOD& target, const DerivationLimit& lim);

using Validator = std::function<bool(const CanonicalOD&)>;

/// No proper subset context yields the constant, and no B in the context is
/// itself determined by the rest. Assumes the OD holds.
bool is_minimal_constant(const Validator& valid, AttributeSet context, AttrId a);
bool is_minimal_constant(const Relation& rel, AttributeSet context, AttrId a);

/// No proper subset context yields a~b, neither context: []↦a nor
/// context: []↦b holds, and no C in the context is determined by the rest.
bool is_minimal_oc(const Validator& valid, AttributeSet context, AttrId a, AttrId b);
bool is_minimal_oc(const Relation& rel, AttributeSet context, AttrId a, AttrId b);

}  // namespace fastod
