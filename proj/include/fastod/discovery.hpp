#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fastod/inference.hpp"
#include "fastod/partitions.hpp"
#include "fastod/relation.hpp"

namespace fastod {

using AttrPair = std::pair<AttrId, AttrId>;  // first < second

struct LatticeNode {
    AttributeSet attrs;
    StrippedPartition stripped;
    /// C⁺c(X); ranges over the whole schema, not only X.
    AttributeSet cand_const;
    /// C⁺s(X), sorted.
    std::vector<AttrPair> cand_oc;
};

struct Level {
    std::size_t index = 0;
    std::map<AttributeSet, LatticeNode> nodes;
};

struct LevelStats {
    std::size_t level = 0;
    std::size_t nodes_generated = 0;
    std::size_t nodes_pruned = 0;
    std::size_t constant_checks = 0;
    std::size_t swap_checks = 0;
    std::size_t keys_found = 0;
    std::size_t ods_found = 0;
};

struct DiscoveryOptions {
    /// Largest node size to visit; defaults to |R|.
    std::optional<std::size_t> max_level;
    /// Node pruning and key shortcuts.
    bool prune = true;
    std::size_t threads = 1;
};

struct DiscoveryResult {
    ODSet minimal_ods;
    std::vector<LevelStats> stats;
    std::size_t levels_processed = 0;
    /// False when max_level stopped the traversal before the lattice ran out.
    bool complete = true;

    std::size_t nodes_generated() const;
};

/// Shared read-only inputs for one discovery run.
struct DiscoveryContext {
    const Relation* rel = nullptr;
    std::vector<SortedPartition> tau;
    AttributeSet universe;
    bool prune = true;
    std::size_t threads = 1;

    DiscoveryContext(const Relation& r, bool prune_enabled, std::size_t thread_count);
};

/// Level 0 (the empty set, C⁺c = R) and level 1 (singletons, C⁺s empty).
Level initial_level(const DiscoveryContext& ctx);
Level first_level(const DiscoveryContext& ctx);

/// Combines prefix blocks; keeps X only if every l-subset is in `level`.
Level calculate_next_level(const Level& level, const DiscoveryContext& ctx);

/// Fills candidate sets for every node of `level` and validates candidates.
/// `parent` is L_{l-1}, `grandparent` is L_{l-2} (contexts of OC checks).
std::vector<CanonicalOD> compute_ods(Level& level, const Level& parent, const Level* grandparent,
                                     const DiscoveryContext& ctx, LevelStats& stats);

/// Drops nodes whose candidate sets are both empty (levels >= 2). Returns the count.
std::size_t prune_levels(Level& level);

DiscoveryResult fastod(const Relation& rel, const DiscoveryOptions& opts = {});
DiscoveryResult fastod_unpruned(const Relation& rel, std::optional<std::size_t> max_level = std::nullopt);

}  // namespace fastod
