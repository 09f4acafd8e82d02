#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <vector>

namespace fastod {

/// Column index into a relation's schema (0-based).
using AttrId = std::uint32_t;

/// Hard cap on schema width; attribute sets are single 64-bit masks.
inline constexpr std::size_t kMaxAttributes = 64;

/// An unordered set of attributes stored as a bitmask.
///
/// Ordering is canonical: smaller sets first, then lexicographic over the
/// ascending member lists ({0,1} < {0,2} < {1,2}).
class AttributeSet {
public:
    constexpr AttributeSet() = default;
    constexpr explicit AttributeSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr AttributeSet single(AttrId a) { return AttributeSet{std::uint64_t{1} << a}; }
    static AttributeSet of(std::initializer_list<AttrId> attrs) {
        AttributeSet s;
        for (AttrId a : attrs) s = s.with(a);
        return s;
    }
    static AttributeSet of(const std::vector<AttrId>& attrs) {
        AttributeSet s;
        for (AttrId a : attrs) s = s.with(a);
        return s;
    }
    /// {0, 1, ..., n-1}
    static constexpr AttributeSet first_n(std::size_t n) {
        return AttributeSet{n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1};
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool contains(AttrId a) const { return (bits_ >> a) & 1U; }

    constexpr AttributeSet with(AttrId a) const { return AttributeSet{bits_ | (std::uint64_t{1} << a)}; }
    constexpr AttributeSet without(AttrId a) const { return AttributeSet{bits_ & ~(std::uint64_t{1} << a)}; }

    constexpr bool is_subset_of(AttributeSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool is_proper_subset_of(AttributeSet o) const { return is_subset_of(o) && bits_ != o.bits_; }

    constexpr AttributeSet operator|(AttributeSet o) const { return AttributeSet{bits_ | o.bits_}; }
    constexpr AttributeSet operator&(AttributeSet o) const { return AttributeSet{bits_ & o.bits_}; }
    constexpr AttributeSet operator-(AttributeSet o) const { return AttributeSet{bits_ & ~o.bits_}; }

    /// Lowest member; undefined on the empty set.
    constexpr AttrId first() const { return static_cast<AttrId>(std::countr_zero(bits_)); }

    std::vector<AttrId> members() const {
        std::vector<AttrId> out;
        out.reserve(size());
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<AttrId>(std::countr_zero(b)));
        return out;
    }

    /// Calls f(AttrId) for each member in ascending order.
    template <typename F>
    void for_each(F&& f) const {
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) f(static_cast<AttrId>(std::countr_zero(b)));
    }

    constexpr bool operator==(const AttributeSet&) const = default;

    constexpr std::strong_ordering operator<=>(const AttributeSet& o) const {
        if (auto c = size() <=> o.size(); c != 0) return c;
        std::uint64_t diff = bits_ ^ o.bits_;
        if (diff == 0) return std::strong_ordering::equal;
        std::uint64_t lowest = diff & (~diff + 1);
        return (bits_ & lowest) ? std::strong_ordering::less : std::strong_ordering::greater;
    }

private:
    std::uint64_t bits_ = 0;
};

/// Calls f(subset) for every subset of s, including the empty set and s itself.
template <typename F>
void for_each_subset(AttributeSet s, F&& f) {
    std::uint64_t full = s.bits();
    std::uint64_t sub = full;
    while (true) {
        f(AttributeSet{sub});
        if (sub == 0) break;
        sub = (sub - 1) & full;
    }
}

}  // namespace fastod
