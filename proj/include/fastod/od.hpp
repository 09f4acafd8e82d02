#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fastod/attribute_set.hpp"
#include "fastod/partitions.hpp"
#include "fastod/relation.hpp"

namespace fastod {

/// Lexicographic order specification; may be empty.
using OrderSpec = std::vector<AttrId>;

/// X ↦ Y over order specifications.
struct ListOD {
    OrderSpec lhs;
    OrderSpec rhs;
    bool operator==(const ListOD&) const = default;
};

/// Set-based canonical OD: `X: []↦A` (constant) or `X: A~B` (order compatible).
///
/// Order-compatible forms are stored with a < b. Trivial forms (A in X, or
/// A = B) can be built so they can be parsed and rejected, but ODSet never
/// stores them.
class CanonicalOD {
public:
    enum class Kind : std::uint8_t { constant = 0, order_compatible = 1 };

    CanonicalOD() = default;
    static CanonicalOD constant(AttributeSet context, AttrId a) { return CanonicalOD(Kind::constant, context, a, a); }
    static CanonicalOD order_compatible(AttributeSet context, AttrId a, AttrId b) {
        if (b < a) std::swap(a, b);
        return CanonicalOD(Kind::order_compatible, context, a, b);
    }

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::constant; }
    AttributeSet context() const { return context_; }
    AttrId a() const { return a_; }
    /// Equal to a() for constants.
    AttrId b() const { return b_; }

    bool is_trivial() const {
        if (is_constant()) return context_.contains(a_);
        return a_ == b_ || context_.contains(a_) || context_.contains(b_);
    }
    /// Size of the lattice node that discovers this OD: |X|+1 or |X|+2.
    std::size_t level() const { return context_.size() + (is_constant() ? 1 : 2); }
    /// Every attribute mentioned.
    AttributeSet attributes() const { return context_.with(a_).with(b_); }

    bool operator==(const CanonicalOD&) const = default;
    /// Output order: level, context, constants before OCs, then a, b.
    std::strong_ordering operator<=>(const CanonicalOD& o) const {
        if (auto c = level() <=> o.level(); c != 0) return c;
        if (auto c = context_ <=> o.context_; c != 0) return c;
        if (auto c = kind_ <=> o.kind_; c != 0) return c;
        if (auto c = a_ <=> o.a_; c != 0) return c;
        return b_ <=> o.b_;
    }

private:
    CanonicalOD(Kind k, AttributeSet ctx, AttrId a, AttrId b) : kind_(k), context_(ctx), a_(a), b_(b) {}

    Kind kind_ = Kind::constant;
    AttributeSet context_;
    AttrId a_ = 0;
    AttrId b_ = 0;
};

/// A pair of 1-based tuple ids, first < second.
using TuplePair = std::pair<std::size_t, std::size_t>;

enum class ViolationKind { split, swap };

/// Witness pairs for a failed check. For splits, `lhs` is X and `rhs` is Y;
/// for swaps, `lhs` is the context and `rhs` is {a, b}.
struct ViolationReport {
    ViolationKind kind = ViolationKind::split;
    AttributeSet lhs;
    AttributeSet rhs;
    AttrId a = 0;
    AttrId b = 0;
    std::vector<TuplePair> pairs;

    bool empty() const { return pairs.empty(); }
};

/// s ⪯ t under spec (0-based rows).
bool lex_leq(const Relation& rel, RowId s, RowId t, const OrderSpec& spec);
/// s ≺ t: s ⪯ t and not t ⪯ s.
bool lex_less(const Relation& rel, RowId s, RowId t, const OrderSpec& spec);

/// Reference semantics by pairwise enumeration; quadratic in rows.
bool satisfies_list_od(const Relation& rel, const ListOD& od);
bool order_equivalent(const Relation& rel, const OrderSpec& x, const OrderSpec& y);
/// X ~ Y iff XY ↔ YX.
bool order_compatible(const Relation& rel, const OrderSpec& x, const OrderSpec& y);

/// Pairs equal on x and different on y.
ViolationReport find_splits(const Relation& rel, AttributeSet x, AttributeSet y);
/// Pairs inside one context class with a strictly increasing and b strictly decreasing.
ViolationReport find_swaps(const Relation& rel, AttributeSet context, AttrId a, AttrId b);

/// Partition-based validity; trivial forms are true.
bool validate_canonical(const Relation& rel, const CanonicalOD& od);

/// Keeps the first occurrence of each attribute.
OrderSpec normalize_spec(const OrderSpec& spec);

/// The equivalent set of canonical ODs, trivial members removed, sorted.
std::vector<CanonicalOD> map_list_to_canonical(const ListOD& od);

/// Text syntax:
///   list OD      [A,B] -> [C,D]
///   constant     {A,B}: [] |-> C
///   compatible   {A}: B ~ C
using ParsedOD = std::variant<ListOD, CanonicalOD>;
using NameResolver = std::function<AttrId(std::string_view)>;

/// Throws ParseError on bad syntax; the resolver throws on unknown names.
ParsedOD parse_od(std::string_view text, const NameResolver& resolve);
ParsedOD parse_od(std::string_view text, const Schema& schema);

std::string format_od(const CanonicalOD& od, const std::vector<std::string>& names);
std::string format_od(const ListOD& od, const std::vector<std::string>& names);
std::string format_set(AttributeSet s, const std::vector<std::string>& names);
std::vector<std::string> attribute_names(const Schema& schema);

/// Interns names in first-seen order; used when no schema is available.
class NameTable {
public:
    AttrId intern(std::string_view name);
    const std::vector<std::string>& names() const { return names_; }
    NameResolver resolver() {
        return [this](std::string_view n) { return intern(n); };
    }

private:
    std::vector<std::string> names_;
};

}  // namespace fastod
