#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fastod/attribute_set.hpp"
#include "fastod/relation.hpp"

namespace fastod {

/// 0-based row index. Reports convert to 1-based tuple ids.
using RowId = std::uint32_t;

using ClassList = std::vector<std::vector<RowId>>;

/// Π_X: every equivalence class, singletons included, ordered by smallest member.
struct Partition {
    ClassList classes;
    std::size_t row_count = 0;
};

Partition full_partition(const Relation& rel, AttributeSet x);

/// Π*_X: equivalence classes of size >= 2, each ascending. Stored flat: class i
/// is rows[offsets[i] .. offsets[i+1]). Class order is unspecified; classes()
/// and == see the classes ordered by smallest member.
class StrippedPartition {
public:
    StrippedPartition() : offsets_{0} {}

    static StrippedPartition from_classes(const ClassList& classes, std::size_t row_count);

    std::size_t row_count() const { return row_count_; }
    std::size_t class_count() const { return offsets_.size() - 1; }
    /// Rows that appear in a retained class.
    std::size_t stripped_row_count() const { return rows_.size(); }
    /// Empty class collection: the generating set is a superkey.
    bool is_key() const { return rows_.empty(); }

    std::span<const RowId> operator[](std::size_t i) const {
        return {rows_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    /// Ordered by smallest member.
    ClassList classes() const;

    bool operator==(const StrippedPartition& o) const { return row_count_ == o.row_count_ && classes() == o.classes(); }

private:
    friend class StrippedPartitionBuilder;
    std::vector<RowId> rows_;
    std::vector<std::uint32_t> offsets_;
    std::size_t row_count_ = 0;
};

/// Π*_{a} for a single attribute.
StrippedPartition partition_single(const Relation& rel, AttrId a);
/// Π*_∅: one class with every row, or nothing when row_count <= 1.
StrippedPartition empty_context_partition(const Relation& rel);
/// Π*_X for an arbitrary set, as a fold of products.
StrippedPartition stripped_partition(const Relation& rel, AttributeSet x);
/// Π*_p · Π*_q. Linear in the stripped row counts.
StrippedPartition product(const StrippedPartition& p, const StrippedPartition& q);

/// τ_A: all classes of A in ascending rank order.
class SortedPartition {
public:
    std::size_t class_count() const { return offsets_.size() - 1; }
    std::span<const RowId> operator[](std::size_t i) const {
        return {rows_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    /// Position of row r's class in the ascending order.
    std::uint32_t position(RowId r) const { return position_[r]; }
    std::span<const RowId> rows_in_order() const { return rows_; }
    ClassList classes() const;

private:
    friend SortedPartition sorted_partition(const Relation& rel, AttrId a);
    std::vector<RowId> rows_;
    std::vector<std::uint32_t> offsets_{0};
    std::vector<std::uint32_t> position_;
};

SortedPartition sorted_partition(const Relation& rel, AttrId a);

/// Splits one context class into buckets of equal A, ascending by A.
ClassList bucket_by_order(std::span<const RowId> context_class, const SortedPartition& tau_a);

/// X: []↦A holds iff every class of Π*_X is single-valued on A.
bool check_constant(const StrippedPartition& context, std::span<const Rank> a_column);

enum class SwapStrategy {
    automatic,
    /// Sort each context class by (A, B).
    sort,
    /// One pass over τ_A with per-class running maxima.
    scan,
};

/// X: A~B holds iff no class of Π*_X has s, t with A(s) < A(t) and B(s) > B(t).
bool check_order_compatible(const StrippedPartition& context, const SortedPartition& tau_a,
                            std::span<const Rank> b_column, SwapStrategy strategy = SwapStrategy::automatic);

}  // namespace fastod
