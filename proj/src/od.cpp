#include "fastod/od.hpp"

#include <algorithm>

namespace fastod {

namespace {

void check_spec(const Relation& rel, const OrderSpec& spec) {
    for (AttrId a : spec)
        if (a >= rel.attribute_count()) throw SchemaError("unknown attribute index " + std::to_string(a));
}

TuplePair make_pair_1based(RowId s, RowId t) {
    if (t < s) std::swap(s, t);
    return {static_cast<std::size_t>(s) + 1, static_cast<std::size_t>(t) + 1};
}

OrderSpec concat(const OrderSpec& x, const OrderSpec& y) {
    OrderSpec out = x;
    out.insert(out.end(), y.begin(), y.end());
    return out;
}

}  // namespace

bool lex_leq(const Relation& rel, RowId s, RowId t, const OrderSpec& spec) {
    for (AttrId a : spec) {
        auto col = rel.ranks(a);
        if (col[s] < col[t]) return true;
        if (col[s] > col[t]) return false;
    }
    return true;
}

bool lex_less(const Relation& rel, RowId s, RowId t, const OrderSpec& spec) {
    return lex_leq(rel, s, t, spec) && !lex_leq(rel, t, s, spec);
}

bool satisfies_list_od(const Relation& rel, const ListOD& od) {
    check_spec(rel, od.lhs);
    check_spec(rel, od.rhs);
    const auto n = static_cast<RowId>(rel.row_count());
    for (RowId s = 0; s < n; ++s)
        for (RowId t = 0; t < n; ++t)
            if (lex_leq(rel, s, t, od.lhs) && !lex_leq(rel, s, t, od.rhs)) return false;
    return true;
}

bool order_equivalent(const Relation& rel, const OrderSpec& x, const OrderSpec& y) {
    return satisfies_list_od(rel, {x, y}) && satisfies_list_od(rel, {y, x});
}

bool order_compatible(const Relation& rel, const OrderSpec& x, const OrderSpec& y) {
    return order_equivalent(rel, concat(x, y), concat(y, x));
}

ViolationReport find_splits(const Relation& rel, AttributeSet x, AttributeSet y) {
    ViolationReport rep;
    rep.kind = ViolationKind::split;
    rep.lhs = x;
    rep.rhs = y;
    auto ys = y.members();
    for (AttrId a : ys)
        if (a >= rel.attribute_count()) throw SchemaError("unknown attribute index " + std::to_string(a));
    for (const auto& cls : full_partition(rel, x).classes) {
        for (std::size_t i = 0; i < cls.size(); ++i)
            for (std::size_t j = i + 1; j < cls.size(); ++j) {
                bool differ = std::any_of(ys.begin(), ys.end(), [&](AttrId a) { return rel.ranks(a)[cls[i]] != rel.ranks(a)[cls[j]]; });
                if (differ) rep.pairs.push_back(make_pair_1based(cls[i], cls[j]));
            }
    }
    std::sort(rep.pairs.begin(), rep.pairs.end());
    return rep;
}

ViolationReport find_swaps(const Relation& rel, AttributeSet context, AttrId a, AttrId b) {
    ViolationReport rep;
    rep.kind = ViolationKind::swap;
    rep.lhs = context;
    rep.rhs = AttributeSet::of({a, b});
    rep.a = a;
    rep.b = b;
    if (a >= rel.attribute_count() || b >= rel.attribute_count()) throw SchemaError("unknown attribute index");
    auto ca = rel.ranks(a);
    auto cb = rel.ranks(b);
    for (const auto& cls : full_partition(rel, context).classes) {
        for (std::size_t i = 0; i < cls.size(); ++i)
            for (std::size_t j = i + 1; j < cls.size(); ++j) {
                RowId s = cls[i], t = cls[j];
                bool swap = (ca[s] < ca[t] && cb[s] > cb[t]) || (ca[t] < ca[s] && cb[t] > cb[s]);
                if (swap) rep.pairs.push_back(make_pair_1based(s, t));
            }
    }
    std::sort(rep.pairs.begin(), rep.pairs.end());
    return rep;
}

bool validate_canonical(const Relation& rel, const CanonicalOD& od) {
    if (od.attributes().members().back() >= rel.attribute_count()) throw SchemaError("attribute out of range");
    if (od.is_trivial()) return true;
    StrippedPartition ctx = stripped_partition(rel, od.context());
    if (od.is_constant()) return check_constant(ctx, rel.ranks(od.a()));
    return check_order_compatible(ctx, sorted_partition(rel, od.a()), rel.ranks(od.b()));
}

OrderSpec normalize_spec(const OrderSpec& spec) {
    OrderSpec out;
    AttributeSet seen;
    for (AttrId a : spec) {
        if (seen.contains(a)) continue;
        seen = seen.with(a);
        out.push_back(a);
    }
    return out;
}

std::vector<CanonicalOD> map_list_to_canonical(const ListOD& od) {
    const OrderSpec x = normalize_spec(od.lhs);
    const OrderSpec y = normalize_spec(od.rhs);
    const AttributeSet xs = AttributeSet::of(x);
    std::vector<CanonicalOD> out;
    for (AttrId yj : y) {
        auto c = CanonicalOD::constant(xs, yj);
        if (!c.is_trivial()) out.push_back(c);
    }
    AttributeSet x_prefix;
    for (AttrId xi : x) {
        AttributeSet ctx = x_prefix;
        for (AttrId yj : y) {
            auto c = CanonicalOD::order_compatible(ctx, xi, yj);
            if (!c.is_trivial()) out.push_back(c);
            ctx = ctx.with(yj);
        }
        x_prefix = x_prefix.with(xi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---- text syntax ----

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    void skip_ws() {
        while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) ++i_;
    }
    bool done() {
        skip_ws();
        return i_ >= s_.size();
    }
    bool accept(std::string_view tok) {
        skip_ws();
        if (s_.substr(i_, tok.size()) == tok) {
            i_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }
    bool peek(char c) {
        skip_ws();
        return i_ < s_.size() && s_[i_] == c;
    }
    /// Attribute name: everything up to a delimiter, trimmed.
    std::string_view name() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && !is_delim(s_[i_])) {
            if (s_.substr(i_, 2) == "->" || s_.substr(i_, 3) == "|->") break;
            ++i_;
        }
        std::string_view n = s_.substr(start, i_ - start);
        while (!n.empty() && (n.back() == ' ' || n.back() == '\t')) n.remove_suffix(1);
        if (n.empty()) fail("expected attribute name");
        return n;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("malformed OD at offset " + std::to_string(i_) + ": " + why);
    }

private:
    static bool is_delim(char c) { return c == '[' || c == ']' || c == '{' || c == '}' || c == ',' || c == ':' || c == '~'; }

    std::string_view s_;
    std::size_t i_ = 0;
};

std::vector<AttrId> parse_names(Cursor& cur, char close, const NameResolver& resolve) {
    std::vector<AttrId> out;
    if (cur.accept(std::string_view(&close, 1))) return out;
    while (true) {
        out.push_back(resolve(cur.name()));
        if (cur.accept(",")) continue;
        if (cur.accept(std::string_view(&close, 1))) return out;
        cur.fail(std::string("expected ',' or '") + close + "'");
    }
}

bool accept_arrow(Cursor& cur) { return cur.accept("|->") || cur.accept("->") || cur.accept("\xE2\x86\xA6"); }

}  // namespace

ParsedOD parse_od(std::string_view text, const NameResolver& resolve) {
    Cursor cur(text);
    if (cur.accept("[")) {
        ListOD od;
        od.lhs = parse_names(cur, ']', resolve);
        if (!accept_arrow(cur)) cur.fail("expected '->'");
        cur.expect("[");
        od.rhs = parse_names(cur, ']', resolve);
        if (!cur.done()) cur.fail("trailing input");
        return od;
    }
    if (cur.accept("{")) {
        AttributeSet ctx;
        for (AttrId a : parse_names(cur, '}', resolve)) {
            if (ctx.contains(a)) cur.fail("duplicate attribute in context");
            ctx = ctx.with(a);
        }
        cur.expect(":");
        if (cur.accept("[")) {
            cur.expect("]");
            if (!accept_arrow(cur)) cur.fail("expected '|->'");
            AttrId a = resolve(cur.name());
            if (!cur.done()) cur.fail("trailing input");
            return CanonicalOD::constant(ctx, a);
        }
        AttrId a = resolve(cur.name());
        cur.expect("~");
        AttrId b = resolve(cur.name());
        if (!cur.done()) cur.fail("trailing input");
        return CanonicalOD::order_compatible(ctx, a, b);
    }
    cur.fail("expected '[' or '{'");
}

ParsedOD parse_od(std::string_view text, const Schema& schema) {
    return parse_od(text, [&](std::string_view n) { return schema.index_of(n); });
}

AttrId NameTable::intern(std::string_view name) {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<AttrId>(i);
    if (names_.size() >= kMaxAttributes) throw ParseError("too many distinct attribute names");
    names_.emplace_back(name);
    return static_cast<AttrId>(names_.size() - 1);
}

std::vector<std::string> attribute_names(const Schema& schema) {
    std::vector<std::string> out;
    for (const auto& a : schema.attributes) out.push_back(a.name);
    return out;
}

namespace {

const std::string& name_of(AttrId a, const std::vector<std::string>& names) {
    if (a >= names.size()) throw SchemaError("no name for attribute index " + std::to_string(a));
    return names[a];
}

std::string join(const std::vector<AttrId>& attrs, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i) out += ",";
        out += name_of(attrs[i], names);
    }
    return out;
}

}  // namespace

std::string format_set(AttributeSet s, const std::vector<std::string>& names) { return "{" + join(s.members(), names) + "}"; }

std::string format_od(const CanonicalOD& od, const std::vector<std::string>& names) {
    std::string out = format_set(od.context(), names) + ": ";
    if (od.is_constant()) return out + "[] |-> " + name_of(od.a(), names);
    return out + name_of(od.a(), names) + " ~ " + name_of(od.b(), names);
}

std::string format_od(const ListOD& od, const std::vector<std::string>& names) {
    return "[" + join(od.lhs, names) + "] -> [" + join(od.rhs, names) + "]";
}

}  // namespace fastod
