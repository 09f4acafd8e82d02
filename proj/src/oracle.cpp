#include "fastod/oracle.hpp"

#include <map>
#include <tuple>

namespace fastod::oracle {

int compare_raw(const Value& x, const Value& y, NullPolicy policy) {
    const bool xn = is_null(x), yn = is_null(y);
    if (xn || yn) {
        if (xn && yn) return 0;
        const int null_side = policy == NullPolicy::nulls_last ? 1 : -1;
        return xn ? null_side : -null_side;
    }
    if (x.index() != y.index()) throw Error("oracle: mixed value types in one column");
    auto sign = [](auto a, auto b) { return a < b ? -1 : (b < a ? 1 : 0); };
    if (auto p = std::get_if<std::int64_t>(&x)) return sign(*p, std::get<std::int64_t>(y));
    if (auto p = std::get_if<double>(&x)) return sign(*p, std::get<double>(y));
    if (auto p = std::get_if<Date>(&x)) return sign(p->days, std::get<Date>(y).days);
    const std::string& a = std::get<std::string>(x);
    const std::string& b = std::get<std::string>(y);
    // Byte order of UTF-8 matches code-point order.
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto ca = static_cast<unsigned char>(a[i]), cb = static_cast<unsigned char>(b[i]);
        if (ca != cb) return ca < cb ? -1 : 1;
    }
    return sign(a.size(), b.size());
}

namespace {

int cmp(const Relation& rel, AttrId a, std::size_t s, std::size_t t) {
    return compare_raw(rel.values(a)[s], rel.values(a)[t], rel.schema().null_policy);
}

bool agree_on(const Relation& rel, AttributeSet x, std::size_t s, std::size_t t) {
    for (AttrId a = 0; a < rel.attribute_count(); ++a)
        if (x.contains(a) && cmp(rel, a, s, t) != 0) return false;
    return true;
}

/// s ⪯ t per the recursive definition.
bool leq(const Relation& rel, const OrderSpec& spec, std::size_t k, std::size_t s, std::size_t t) {
    if (k == spec.size()) return true;
    const int c = cmp(rel, spec[k], s, t);
    if (c < 0) return true;
    if (c > 0) return false;
    return leq(rel, spec, k + 1, s, t);
}

}  // namespace

bool brute_validate_canonical(const Relation& rel, const CanonicalOD& od) {
    const std::size_t n = rel.row_count();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = s + 1; t < n; ++t) {
            if (!agree_on(rel, od.context(), s, t)) continue;
            if (od.is_constant()) {
                if (od.context().contains(od.a())) continue;
                if (cmp(rel, od.a(), s, t) != 0) return false;  // split
            } else {
                const int ca = cmp(rel, od.a(), s, t);
                const int cb = cmp(rel, od.b(), s, t);
                if ((ca < 0 && cb > 0) || (ca > 0 && cb < 0)) return false;  // swap
            }
        }
    return true;
}

bool brute_validate_list(const Relation& rel, const ListOD& od) {
    const std::size_t n = rel.row_count();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t)
            if (leq(rel, od.lhs, 0, s, t) && !leq(rel, od.rhs, 0, s, t)) return false;
    return true;
}

ODSet brute_discover(const Relation& rel, const OracleConfig& cfg) {
    const std::size_t width = rel.attribute_count();
    const std::size_t max_level = std::min(cfg.max_level.value_or(width), width);
    const AttributeSet all = rel.all_attributes();

    std::map<std::tuple<std::uint64_t, int, AttrId, AttrId>, bool> memo;
    std::size_t checks = 0;
    auto valid = [&](const CanonicalOD& od) {
        auto key = std::make_tuple(od.context().bits(), od.is_constant() ? 0 : 1, od.a(), od.b());
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        if (++checks > cfg.check_budget)
            throw BudgetExceeded("oracle check budget of " + std::to_string(cfg.check_budget) + " exceeded");
        bool v = od.is_trivial() || brute_validate_canonical(rel, od);
        memo.emplace(key, v);
        return v;
    };

    ODSet out(all);
    for_each_subset(all, [&](AttributeSet x) {
        const AttributeSet rest = all - x;
        if (x.size() + 1 <= max_level) {
            rest.for_each([&](AttrId a) {
                if (valid(CanonicalOD::constant(x, a)) && is_minimal_constant(valid, x, a))
                    out.insert(CanonicalOD::constant(x, a));
            });
        }
        if (x.size() + 2 <= max_level) {
            const auto r = rest.members();
            for (std::size_t i = 0; i < r.size(); ++i)
                for (std::size_t j = i + 1; j < r.size(); ++j) {
                    auto od = CanonicalOD::order_compatible(x, r[i], r[j]);
                    if (valid(od) && is_minimal_oc(valid, x, r[i], r[j])) out.insert(od);
                }
        }
    });
    return out;
}

}  // namespace fastod::oracle
