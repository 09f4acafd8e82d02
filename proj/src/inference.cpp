#include "fastod/inference.hpp"

#include <algorithm>
#include <deque>

namespace fastod {

bool ODSet::insert(const CanonicalOD& od) {
    if (od.is_trivial()) return false;
    return members_.insert(od).second;
}

bool ODSet::is_subset_of(const ODSet& o) const {
    return std::includes(o.members_.begin(), o.members_.end(), members_.begin(), members_.end());
}

std::string_view to_string(Rule r) {
    switch (r) {
        case Rule::premise: return "premise";
        case Rule::strengthen: return "Strengthen";
        case Rule::propagate: return "Propagate";
        case Rule::augmentation_constant: return "Augmentation-I";
        case Rule::augmentation_compatible: return "Augmentation-II";
        case Rule::chain: return "Chain";
    }
    return "?";
}

namespace {

using JustMap = std::map<CanonicalOD, Justification>;

class Round {
public:
    Round(const ODSet& s, const DerivationLimit& lim, JustMap* just) : s_(s), lim_(lim), just_(just), out_(s) {}

    ODSet run() {
        const AttributeSet u = s_.universe() | all_mentioned();
        for (const CanonicalOD& od : s_) {
            if (od.is_constant()) {
                strengthen(od);
                propagate(od, u);
                augment(od, u, Rule::augmentation_constant);
            } else {
                augment(od, u, Rule::augmentation_compatible);
            }
        }
        chain(u);
        return std::move(out_);
    }

private:
    AttributeSet all_mentioned() const {
        AttributeSet m;
        for (const auto& od : s_) m = m | od.attributes();
        return m;
    }

    void emit(const CanonicalOD& c, Rule rule, std::vector<CanonicalOD> premises) {
        if (c.context().size() > lim_.max_context_size) return;
        if (s_.holds(c)) return;
        if (out_.insert(c) && just_ && !just_->count(c)) {
            std::erase_if(premises, [](const CanonicalOD& p) { return p.is_trivial(); });
            just_->emplace(c, Justification{rule, std::move(premises)});
        }
    }

    // X: []↦A and XA: []↦B give X: []↦B. `od` plays XA: []↦B.
    void strengthen(const CanonicalOD& od) {
        od.context().for_each([&](AttrId a) {
            AttributeSet x = od.context().without(a);
            auto first = CanonicalOD::constant(x, a);
            if (s_.holds(first)) emit(CanonicalOD::constant(x, od.a()), Rule::strengthen, {first, od});
        });
    }

    void propagate(const CanonicalOD& od, AttributeSet u) {
        (u - od.context()).for_each([&](AttrId b) {
            if (b != od.a()) emit(CanonicalOD::order_compatible(od.context(), od.a(), b), Rule::propagate, {od});
        });
    }

    void augment(const CanonicalOD& od, AttributeSet u, Rule rule) {
        const AttributeSet free = u - od.attributes();
        for_each_subset(free, [&](AttributeSet z) {
            if (z.empty() || od.context().size() + z.size() > lim_.max_context_size) return;
            AttributeSet ctx = od.context() | z;
            emit(od.is_constant() ? CanonicalOD::constant(ctx, od.a()) : CanonicalOD::order_compatible(ctx, od.a(), od.b()),
                 rule, {od});
        });
    }

    // X: A~B1, X: Bi~Bi+1, X: Bn~C and XBi: A~C for all i give X: A~C.
    // Breadth-first search over usable Bi finds a shortest chain.
    void chain(AttributeSet u) {
        if (lim_.max_chain_length == 0) return;
        std::set<AttributeSet> contexts;
        for (const auto& od : s_)
            if (!od.is_constant()) contexts.insert(od.context());
        for (AttributeSet x : contexts) {
            if (x.size() > lim_.max_context_size) continue;
            const auto rest = (u - x).members();
            for (std::size_t i = 0; i < rest.size(); ++i)
                for (std::size_t j = i + 1; j < rest.size(); ++j) chain_pair(x, rest[i], rest[j], u);
        }
    }

    void chain_pair(AttributeSet x, AttrId a, AttrId c, AttributeSet u) {
        if (s_.has_oc(x, a, c)) return;
        std::vector<AttrId> usable;
        (u - x - AttributeSet::of({a, c})).for_each([&](AttrId b) {
            if (s_.has_oc(x.with(b), a, c)) usable.push_back(b);
        });
        if (usable.empty()) return;

        std::map<AttrId, AttrId> parent;
        std::map<AttrId, std::size_t> depth;
        std::deque<AttrId> queue;
        for (AttrId b : usable)
            if (s_.has_oc(x, a, b)) {
                parent[b] = b;
                depth[b] = 1;
                queue.push_back(b);
            }
        while (!queue.empty()) {
            AttrId v = queue.front();
            queue.pop_front();
            if (s_.has_oc(x, v, c)) {
                std::vector<AttrId> path;
                for (AttrId w = v;; w = parent[w]) {
                    path.push_back(w);
                    if (parent[w] == w) break;
                }
                std::reverse(path.begin(), path.end());
                std::vector<CanonicalOD> premises{CanonicalOD::order_compatible(x, a, path.front())};
                for (std::size_t k = 0; k + 1 < path.size(); ++k)
                    premises.push_back(CanonicalOD::order_compatible(x, path[k], path[k + 1]));
                premises.push_back(CanonicalOD::order_compatible(x, path.back(), c));
                for (AttrId b : path) premises.push_back(CanonicalOD::order_compatible(x.with(b), a, c));
                emit(CanonicalOD::order_compatible(x, a, c), Rule::chain, std::move(premises));
                return;
            }
            if (depth[v] >= lim_.max_chain_length) continue;
            for (AttrId w : usable)
                if (!depth.count(w) && s_.has_oc(x, v, w)) {
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
        }
    }

    const ODSet& s_;
    const DerivationLimit& lim_;
    JustMap* just_;
    ODSet out_;
};

ODSet fixpoint(const ODSet& s, const DerivationLimit& lim, JustMap* just, const CanonicalOD* target) {
    ODSet cur = s;
    while (true) {
        if (target && cur.holds(*target)) return cur;
        ODSet next = Round(cur, lim, just).run();
        if (next.size() == cur.size()) return cur;
        cur = std::move(next);
    }
}

void collect_trace(const CanonicalOD& od, const JustMap& just, std::set<CanonicalOD>& seen,
                   std::vector<std::pair<CanonicalOD, Justification>>& out) {
    if (!seen.insert(od).second) return;
    auto it = just.find(od);
    Justification j = it == just.end() ? Justification{} : it->second;
    for (const auto& p : j.premises) collect_trace(p, just, seen, out);
    out.emplace_back(od, std::move(j));
}

}  // namespace

ODSet apply_axioms_once(const ODSet& s, const DerivationLimit& lim) { return Round(s, lim, nullptr).run(); }

ODSet closure(const ODSet& s, const DerivationLimit& lim) { return fixpoint(s, lim, nullptr, nullptr); }

bool derives(const ODSet& s, const CanonicalOD& target, const DerivationLimit& lim) {
    if (target.is_trivial()) return true;
    return fixpoint(s, lim, nullptr, &target).holds(target);
}

DerivationResult derive(const ODSet& s, const CanonicalOD& target, const DerivationLimit& lim) {
    DerivationResult res;
    if (target.is_trivial()) {
        res.answer = Answer::yes;
        return res;
    }
    JustMap just;
    ODSet c = fixpoint(s, lim, &just, &target);
    if (c.holds(target)) {
        res.answer = Answer::yes;
        std::set<CanonicalOD> seen;
        collect_trace(target, just, seen, res.trace);
        return res;
    }
    const std::size_t u = (s.universe() | target.attributes()).size();
    res.answer = lim.max_context_size >= u && lim.max_chain_length >= u ? Answer::no : Answer::not_within_limits;
    return res;
}

bool is_minimal_constant(const Validator& valid, AttributeSet context, AttrId a) {
    if (context.contains(a)) return false;
    bool minimal = true;
    for_each_subset(context, [&](AttributeSet y) {
        if (minimal && y != context && valid(CanonicalOD::constant(y, a))) minimal = false;
    });
    if (!minimal) return false;
    for (AttrId b : context.members())
        if (valid(CanonicalOD::constant(context.without(b), b))) return false;
    return true;
}

bool is_minimal_constant(const Relation& rel, AttributeSet context, AttrId a) {
    return is_minimal_constant([&](const CanonicalOD& od) { return validate_canonical(rel, od); }, context, a);
}

bool is_minimal_oc(const Validator& valid, AttributeSet context, AttrId a, AttrId b) {
    if (a == b || context.contains(a) || context.contains(b)) return false;
    bool minimal = true;
    for_each_subset(context, [&](AttributeSet y) {
        if (minimal && y != context && valid(CanonicalOD::order_compatible(y, a, b))) minimal = false;
    });
    if (!minimal) return false;
    if (valid(CanonicalOD::constant(context, a)) || valid(CanonicalOD::constant(context, b))) return false;
    for (AttrId c : context.members())
        if (valid(CanonicalOD::constant(context.without(c), c))) return false;
    return true;
}

bool is_minimal_oc(const Relation& rel, AttributeSet context, AttrId a, AttrId b) {
    return is_minimal_oc([&](const CanonicalOD& od) { return validate_canonical(rel, od); }, context, a, b);
}

}  // namespace fastod
