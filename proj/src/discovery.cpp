#include "fastod/discovery.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace fastod {

std::size_t DiscoveryResult::nodes_generated() const {
    std::size_t total = 0;
    for (const auto& s : stats) total += s.nodes_generated;
    return total;
}

DiscoveryContext::DiscoveryContext(const Relation& r, bool prune_enabled, std::size_t thread_count)
    : rel(&r), universe(r.all_attributes()), prune(prune_enabled), threads(std::max<std::size_t>(1, thread_count)) {
    tau.reserve(r.attribute_count());
    for (AttrId a = 0; a < r.attribute_count(); ++a) tau.push_back(sorted_partition(r, a));
}

namespace {

/// Runs f(i) for i in [0, n) on up to `threads` workers.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& f) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) f(i);
        });
}

const LatticeNode& node_at(const Level& level, AttributeSet x) {
    auto it = level.nodes.find(x);
    if (it == level.nodes.end()) throw Error("lattice invariant broken: missing node");
    return it->second;
}

bool has_pair(const LatticeNode& node, AttrPair p) { return std::binary_search(node.cand_oc.begin(), node.cand_oc.end(), p); }

struct NodeOutcome {
    std::vector<CanonicalOD> found;
    std::size_t constant_checks = 0;
    std::size_t swap_checks = 0;
};

NodeOutcome process_node(LatticeNode& node, const Level& parent, const Level* grandparent, std::size_t l,
                         const DiscoveryContext& ctx) {
    NodeOutcome out;
    const AttributeSet x = node.attrs;
    const Relation& rel = *ctx.rel;

    // C⁺c(X) = ∩ C⁺c(X∖A)
    AttributeSet cc = ctx.universe;
    x.for_each([&](AttrId a) { cc = cc & node_at(parent, x.without(a)).cand_const; });

    // C⁺s(X)
    std::vector<AttrPair> cs;
    const auto members = x.members();
    if (l == 2) {
        cs.emplace_back(members[0], members[1]);
    } else if (l > 2) {
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                AttrPair p{members[i], members[j]};
                bool keep = true;
                for (AttrId d : members) {
                    if (d == p.first || d == p.second) continue;
                    if (!has_pair(node_at(parent, x.without(d)), p)) {
                        keep = false;
                        break;
                    }
                }
                if (keep) cs.push_back(p);
            }
    }

    // Constants X∖A: []↦A
    (x & cc).for_each([&](AttrId a) {
        const LatticeNode& sub = node_at(parent, x.without(a));
        bool valid;
        if (ctx.prune && sub.stripped.is_key()) {
            valid = true;
        } else {
            ++out.constant_checks;
            valid = check_constant(sub.stripped, rel.ranks(a));
        }
        if (valid) {
            out.found.push_back(CanonicalOD::constant(x.without(a), a));
            cc = cc.without(a) & x;
        }
    });

    // Order compatibility X∖{A,B}: A~B
    std::vector<AttrPair> kept;
    kept.reserve(cs.size());
    for (AttrPair p : cs) {
        const auto [a, b] = p;
        if (!node_at(parent, x.without(b)).cand_const.contains(a) || !node_at(parent, x.without(a)).cand_const.contains(b))
            continue;
        const AttributeSet context = x.without(a).without(b);
        const StrippedPartition& cp = node_at(*grandparent, context).stripped;
        if (ctx.prune && cp.is_key()) continue;
        ++out.swap_checks;
        if (check_order_compatible(cp, ctx.tau[a], rel.ranks(b))) {
            out.found.push_back(CanonicalOD::order_compatible(context, a, b));
            continue;
        }
        kept.push_back(p);
    }

    node.cand_const = cc;
    node.cand_oc = std::move(kept);
    return out;
}

}  // namespace

Level initial_level(const DiscoveryContext& ctx) {
    Level level;
    level.index = 0;
    LatticeNode root;
    root.stripped = empty_context_partition(*ctx.rel);
    root.cand_const = ctx.universe;
    level.nodes.emplace(AttributeSet{}, std::move(root));
    return level;
}

Level first_level(const DiscoveryContext& ctx) {
    Level level;
    level.index = 1;
    ctx.universe.for_each([&](AttrId a) {
        LatticeNode n;
        n.attrs = AttributeSet::single(a);
        n.stripped = partition_single(*ctx.rel, a);
        level.nodes.emplace(n.attrs, std::move(n));
    });
    return level;
}

Level calculate_next_level(const Level& level, const DiscoveryContext& ctx) {
    struct Pending {
        AttributeSet x;
        const LatticeNode* p;
        const LatticeNode* q;
    };
    std::vector<Pending> pending;

    // Prefix blocks: nodes sharing all but their largest attribute.
    std::map<AttributeSet, std::vector<const LatticeNode*>> blocks;
    for (const auto& [x, node] : level.nodes) {
        AttrId last = x.members().back();
        blocks[x.without(last)].push_back(&node);
    }
    for (const auto& [prefix, block] : blocks) {
        for (std::size_t i = 0; i < block.size(); ++i)
            for (std::size_t j = i + 1; j < block.size(); ++j) {
                const AttributeSet x = block[i]->attrs | block[j]->attrs;
                bool all_present = true;
                x.for_each([&](AttrId d) {
                    if (all_present && !level.nodes.count(x.without(d))) all_present = false;
                });
                if (all_present) pending.push_back({x, block[i], block[j]});
            }
    }

    std::vector<LatticeNode> built(pending.size());
    parallel_for(pending.size(), ctx.threads, [&](std::size_t i) {
        built[i].attrs = pending[i].x;
        built[i].stripped = product(pending[i].p->stripped, pending[i].q->stripped);
    });

    Level next;
    next.index = level.index + 1;
    for (auto& n : built) {
        AttributeSet key = n.attrs;
        next.nodes.emplace(key, std::move(n));
    }
    return next;
}

std::vector<CanonicalOD> compute_ods(Level& level, const Level& parent, const Level* grandparent,
                                     const DiscoveryContext& ctx, LevelStats& stats) {
    std::vector<LatticeNode*> nodes;
    nodes.reserve(level.nodes.size());
    for (auto& [x, node] : level.nodes) nodes.push_back(&node);

    std::vector<NodeOutcome> outcomes(nodes.size());
    parallel_for(nodes.size(), ctx.threads,
                 [&](std::size_t i) { outcomes[i] = process_node(*nodes[i], parent, grandparent, level.index, ctx); });

    std::vector<CanonicalOD> found;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        stats.constant_checks += outcomes[i].constant_checks;
        stats.swap_checks += outcomes[i].swap_checks;
        if (nodes[i]->stripped.is_key()) ++stats.keys_found;
        found.insert(found.end(), outcomes[i].found.begin(), outcomes[i].found.end());
    }
    stats.ods_found += found.size();
    return found;
}

std::size_t prune_levels(Level& level) {
    if (level.index < 2) return 0;
    return std::erase_if(level.nodes, [](const auto& kv) { return kv.second.cand_const.empty() && kv.second.cand_oc.empty(); });
}

DiscoveryResult fastod(const Relation& rel, const DiscoveryOptions& opts) {
    DiscoveryContext ctx(rel, opts.prune, opts.threads);
    DiscoveryResult result;
    result.minimal_ods = ODSet(ctx.universe);
    const std::size_t max_level = std::min(opts.max_level.value_or(rel.attribute_count()), rel.attribute_count());

    Level grandparent;
    Level parent = initial_level(ctx);
    Level current = first_level(ctx);
    bool have_grandparent = false;

    while (!current.nodes.empty()) {
        if (current.index > max_level) {
            result.complete = false;
            break;
        }
        LevelStats stats;
        stats.level = current.index;
        stats.nodes_generated = current.nodes.size();
        for (const auto& od : compute_ods(current, parent, have_grandparent ? &grandparent : nullptr, ctx, stats))
            result.minimal_ods.insert(od);
        if (ctx.prune) stats.nodes_pruned = prune_levels(current);
        result.stats.push_back(stats);
        result.levels_processed = current.index;

        Level next = calculate_next_level(current, ctx);
        grandparent = std::move(parent);
        have_grandparent = true;
        parent = std::move(current);
        current = std::move(next);
    }
    return result;
}

DiscoveryResult fastod_unpruned(const Relation& rel, std::optional<std::size_t> max_level) {
    DiscoveryOptions opts;
    opts.max_level = max_level;
    opts.prune = false;
    return fastod(rel, opts);
}

}  // namespace fastod
