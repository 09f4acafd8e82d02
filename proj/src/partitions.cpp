#include "fastod/partitions.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace fastod {

class StrippedPartitionBuilder {
public:
    explicit StrippedPartitionBuilder(std::size_t row_count) { p_.row_count_ = row_count; }

    template <typename It>
    void add_class(It first, It last) {
        if (std::distance(first, last) < 2) return;
        p_.rows_.insert(p_.rows_.end(), first, last);
        p_.offsets_.push_back(static_cast<std::uint32_t>(p_.rows_.size()));
    }

    /// Fixed-capacity mode: reserve_slots, then append_class, then finish.
    void reserve_slots(std::size_t rows) { p_.rows_.resize(rows); }
    /// Claims `size` slots as one class and returns the index of its first slot.
    std::size_t append_class(std::size_t size) {
        const std::size_t start = p_.offsets_.back();
        p_.offsets_.push_back(static_cast<std::uint32_t>(start + size));
        return start;
    }
    RowId* rows() { return p_.rows_.data(); }

    StrippedPartition finish() {
        p_.rows_.resize(p_.offsets_.back());
        return std::move(p_);
    }

    /// Reorders classes by smallest member.
    StrippedPartition finish_sorted() {
        const std::size_t k = p_.class_count();
        std::vector<std::uint32_t> order(k);
        std::iota(order.begin(), order.end(), 0U);
        bool already = true;
        for (std::size_t i = 1; i < k && already; ++i) already = p_[i - 1][0] < p_[i][0];
        if (already) return std::move(p_);
        std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) { return p_[x][0] < p_[y][0]; });
        StrippedPartition out;
        out.row_count_ = p_.row_count_;
        out.rows_.reserve(p_.rows_.size());
        out.offsets_.reserve(k + 1);
        for (std::uint32_t c : order) {
            auto cls = p_[c];
            out.rows_.insert(out.rows_.end(), cls.begin(), cls.end());
            out.offsets_.push_back(static_cast<std::uint32_t>(out.rows_.size()));
        }
        return out;
    }

private:
    StrippedPartition p_;
};

StrippedPartition StrippedPartition::from_classes(const ClassList& classes, std::size_t row_count) {
    StrippedPartitionBuilder b(row_count);
    for (auto cls : classes) {
        std::sort(cls.begin(), cls.end());
        b.add_class(cls.begin(), cls.end());
    }
    return b.finish_sorted();
}

ClassList StrippedPartition::classes() const {
    ClassList out;
    out.reserve(class_count());
    for (std::size_t i = 0; i < class_count(); ++i) {
        auto c = (*this)[i];
        out.emplace_back(c.begin(), c.end());
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

ClassList SortedPartition::classes() const {
    ClassList out;
    out.reserve(class_count());
    for (std::size_t i = 0; i < class_count(); ++i) {
        auto c = (*this)[i];
        out.emplace_back(c.begin(), c.end());
    }
    return out;
}

namespace {

void check_attribute(const Relation& rel, AttrId a) {
    if (a >= rel.attribute_count()) throw SchemaError("unknown attribute index " + std::to_string(a));
}

/// Rows grouped by rank, in ascending rank order; each group ascending.
void counting_sort(std::span<const Rank> ranks, std::vector<RowId>& rows, std::vector<std::uint32_t>& offsets) {
    Rank max_rank = 0;
    for (Rank r : ranks) max_rank = std::max(max_rank, r);
    std::vector<std::uint32_t> count(static_cast<std::size_t>(max_rank) + 2, 0);
    for (Rank r : ranks) ++count[r + 1];
    for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
    rows.assign(ranks.size(), 0);
    std::vector<std::uint32_t> cursor(count.begin(), count.end() - 1);
    for (RowId i = 0; i < ranks.size(); ++i) rows[cursor[ranks[i]]++] = i;
    offsets.assign(1, 0);
    for (std::size_t v = 0; v + 1 < count.size(); ++v)
        if (count[v + 1] > count[v]) offsets.push_back(count[v + 1]);
}

}  // namespace

Partition full_partition(const Relation& rel, AttributeSet x) {
    Partition p;
    p.row_count = rel.row_count();
    if (rel.row_count() == 0) return p;
    std::vector<RowId> rows(rel.row_count());
    std::iota(rows.begin(), rows.end(), 0U);
    auto attrs = x.members();
    for (AttrId a : attrs) check_attribute(rel, a);
    std::stable_sort(rows.begin(), rows.end(), [&](RowId s, RowId t) {
        for (AttrId a : attrs) {
            auto col = rel.ranks(a);
            if (col[s] != col[t]) return col[s] < col[t];
        }
        return false;
    });
    auto same = [&](RowId s, RowId t) {
        for (AttrId a : attrs)
            if (rel.ranks(a)[s] != rel.ranks(a)[t]) return false;
        return true;
    };
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i + 1;
        while (j < rows.size() && same(rows[i], rows[j])) ++j;
        p.classes.emplace_back(rows.begin() + i, rows.begin() + j);
        i = j;
    }
    std::sort(p.classes.begin(), p.classes.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return p;
}

StrippedPartition partition_single(const Relation& rel, AttrId a) {
    check_attribute(rel, a);
    std::vector<RowId> rows;
    std::vector<std::uint32_t> offsets;
    counting_sort(rel.ranks(a), rows, offsets);
    StrippedPartitionBuilder b(rel.row_count());
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i) b.add_class(rows.begin() + offsets[i], rows.begin() + offsets[i + 1]);
    return b.finish_sorted();
}

StrippedPartition empty_context_partition(const Relation& rel) {
    StrippedPartitionBuilder b(rel.row_count());
    std::vector<RowId> rows(rel.row_count());
    std::iota(rows.begin(), rows.end(), 0U);
    b.add_class(rows.begin(), rows.end());
    return b.finish_sorted();
}

StrippedPartition stripped_partition(const Relation& rel, AttributeSet x) {
    StrippedPartition p = empty_context_partition(rel);
    x.for_each([&](AttrId a) { p = product(p, partition_single(rel, a)); });
    return p;
}

StrippedPartition product(const StrippedPartition& lhs, const StrippedPartition& rhs) {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = lhs.row_count();
    StrippedPartitionBuilder out(n);
    if (lhs.is_key() || rhs.is_key()) return out.finish();
    // label the smaller side, walk the larger
    const bool swap = lhs.stripped_row_count() > rhs.stripped_row_count();
    const StrippedPartition& p = swap ? rhs : lhs;
    const StrippedPartition& q = swap ? lhs : rhs;
    out.reserve_slots(p.stripped_row_count());
    thread_local std::vector<std::uint32_t> label;
    thread_local std::vector<std::uint32_t> count;
    thread_local std::vector<std::size_t> cursor;
    thread_local std::vector<std::uint32_t> touched;
    thread_local std::vector<std::uint32_t> labels_here;
    if (label.size() < n) label.assign(n, kNone);
    if (count.size() < p.class_count()) {
        count.assign(p.class_count(), 0);
        cursor.resize(p.class_count());
    }

    for (std::size_t i = 0; i < p.class_count(); ++i)
        for (RowId r : p[i]) label[r] = static_cast<std::uint32_t>(i);

    for (std::size_t j = 0; j < q.class_count(); ++j) {
        auto cls = q[j];
        touched.clear();
        labels_here.resize(cls.size());
        for (std::size_t k = 0; k < cls.size(); ++k) {
            const std::uint32_t l = labels_here[k] = label[cls[k]];
            if (l == kNone) continue;
            if (count[l]++ == 0) touched.push_back(l);
        }
        constexpr std::size_t kSingleton = std::numeric_limits<std::size_t>::max();
        for (std::uint32_t l : touched) cursor[l] = count[l] >= 2 ? out.append_class(count[l]) : kSingleton;
        RowId* rows = out.rows();
        for (std::size_t k = 0; k < cls.size(); ++k) {
            const std::uint32_t l = labels_here[k];
            if (l != kNone && cursor[l] != kSingleton) rows[cursor[l]++] = cls[k];
        }
        for (std::uint32_t l : touched) count[l] = 0;
    }
    for (std::size_t i = 0; i < p.class_count(); ++i)
        for (RowId r : p[i]) label[r] = kNone;
    return out.finish();
}

SortedPartition sorted_partition(const Relation& rel, AttrId a) {
    check_attribute(rel, a);
    SortedPartition s;
    counting_sort(rel.ranks(a), s.rows_, s.offsets_);
    s.position_.assign(rel.row_count(), 0);
    for (std::size_t i = 0; i + 1 < s.offsets_.size(); ++i)
        for (std::size_t k = s.offsets_[i]; k < s.offsets_[i + 1]; ++k) s.position_[s.rows_[k]] = static_cast<std::uint32_t>(i);
    return s;
}

ClassList bucket_by_order(std::span<const RowId> context_class, const SortedPartition& tau_a) {
    std::vector<RowId> rows(context_class.begin(), context_class.end());
    std::stable_sort(rows.begin(), rows.end(), [&](RowId s, RowId t) { return tau_a.position(s) < tau_a.position(t); });
    ClassList out;
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i + 1;
        while (j < rows.size() && tau_a.position(rows[j]) == tau_a.position(rows[i])) ++j;
        out.emplace_back(rows.begin() + i, rows.begin() + j);
        std::sort(out.back().begin(), out.back().end());
        i = j;
    }
    return out;
}

bool check_constant(const StrippedPartition& context, std::span<const Rank> a_column) {
    for (std::size_t i = 0; i < context.class_count(); ++i) {
        auto cls = context[i];
        const Rank first = a_column[cls[0]];
        for (std::size_t k = 1; k < cls.size(); ++k)
            if (a_column[cls[k]] != first) return false;
    }
    return true;
}

namespace {

bool order_compatible_by_sort(const StrippedPartition& context, const SortedPartition& tau_a, std::span<const Rank> b) {
    thread_local std::vector<std::pair<std::uint32_t, Rank>> pairs;
    for (std::size_t i = 0; i < context.class_count(); ++i) {
        auto cls = context[i];
        pairs.clear();
        for (RowId r : cls) pairs.emplace_back(tau_a.position(r), b[r]);
        std::sort(pairs.begin(), pairs.end());
        // prev_max: largest B among strictly smaller A; cur_max: within the current A group.
        bool have_prev = false;
        Rank prev_max = 0, cur_max = pairs[0].second;
        for (std::size_t k = 1; k < pairs.size(); ++k) {
            if (pairs[k].first != pairs[k - 1].first) {
                prev_max = have_prev ? std::max(prev_max, cur_max) : cur_max;
                have_prev = true;
                cur_max = pairs[k].second;
            } else {
                cur_max = std::max(cur_max, pairs[k].second);
            }
            if (have_prev && pairs[k].second < prev_max) return false;
        }
    }
    return true;
}

/// One context class holding every row: walk tau_a and track B maxima directly.
bool whole_relation_compatible(const SortedPartition& tau_a, std::span<const Rank> b) {
    bool have_prev = false;
    Rank prev_max = 0;
    for (std::size_t ac = 0; ac < tau_a.class_count(); ++ac) {
        Rank cur_max = 0;
        for (RowId r : tau_a[ac]) {
            const Rank v = b[r];
            if (have_prev && v < prev_max) return false;
            cur_max = std::max(cur_max, v);
        }
        prev_max = have_prev ? std::max(prev_max, cur_max) : cur_max;
        have_prev = true;
    }
    return true;
}

bool order_compatible_by_scan(const StrippedPartition& context, const SortedPartition& tau_a, std::span<const Rank> b) {
    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    struct State {
        std::uint32_t a_class = kNone;
        bool have_prev = false;
        Rank prev_max = 0;
        Rank cur_max = 0;
    };
    // context class and B rank side by side, so the walk below touches one slot per row
    struct Slot {
        std::uint32_t label;
        Rank b;
    };
    const std::size_t n = context.row_count();
    if (context.class_count() == 1 && context.stripped_row_count() == n) return whole_relation_compatible(tau_a, b);
    thread_local std::vector<Slot> slots;
    slots.resize(n);
    for (std::size_t r = 0; r < n; ++r) slots[r] = {kNone, b[r]};
    for (std::size_t i = 0; i < context.class_count(); ++i)
        for (RowId r : context[i]) slots[r].label = static_cast<std::uint32_t>(i);
    std::vector<State> state(context.class_count());

    const std::size_t groups = tau_a.class_count();
    for (std::uint32_t ac = 0; ac < groups; ++ac) {
        auto group = tau_a[ac];
        for (RowId r : group) {
            const Slot slot = slots[r];
            if (slot.label == kNone) continue;
            State& s = state[slot.label];
            if (s.a_class == kNone) {
                s.a_class = ac;
                s.cur_max = slot.b;
                continue;
            }
            if (ac != s.a_class) {
                s.prev_max = s.have_prev ? std::max(s.prev_max, s.cur_max) : s.cur_max;
                s.have_prev = true;
                s.a_class = ac;
                s.cur_max = slot.b;
            } else {
                s.cur_max = std::max(s.cur_max, slot.b);
            }
            if (s.have_prev && slot.b < s.prev_max) return false;
        }
    }
    return true;
}

}  // namespace

bool check_order_compatible(const StrippedPartition& context, const SortedPartition& tau_a, std::span<const Rank> b_column,
                            SwapStrategy strategy) {
    if (context.is_key()) return true;
    if (strategy == SwapStrategy::automatic)
        strategy = context.stripped_row_count() >= 32 * context.class_count() ? SwapStrategy::scan : SwapStrategy::sort;
    return strategy == SwapStrategy::scan ? order_compatible_by_scan(context, tau_a, b_column)
                                          : order_compatible_by_sort(context, tau_a, b_column);
}

}  // namespace fastod
