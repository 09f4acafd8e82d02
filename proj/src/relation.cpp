#include "fastod/relation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace fastod {

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& reason)
    : Error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + reason),
      row_(row),
      column_(column) {}

std::string_view to_string(ColumnType t) {
    switch (t) {
        case ColumnType::integer: return "integer";
        case ColumnType::floating: return "float";
        case ColumnType::text: return "text";
        case ColumnType::date: return "date";
    }
    return "?";
}

std::string_view to_string(NullPolicy p) {
    switch (p) {
        case NullPolicy::nulls_first: return "nulls_first";
        case NullPolicy::nulls_last: return "nulls_last";
        case NullPolicy::reject: return "reject";
    }
    return "?";
}

ColumnType parse_column_type(std::string_view s) {
    if (s == "integer" || s == "int") return ColumnType::integer;
    if (s == "float" || s == "double") return ColumnType::floating;
    if (s == "text" || s == "string") return ColumnType::text;
    if (s == "date") return ColumnType::date;
    throw SchemaError("unknown column type '" + std::string(s) + "'");
}

NullPolicy parse_null_policy(std::string_view s) {
    if (s == "nulls_first" || s == "first") return NullPolicy::nulls_first;
    if (s == "nulls_last" || s == "last") return NullPolicy::nulls_last;
    if (s == "reject") return NullPolicy::reject;
    throw SchemaError("unknown null policy '" + std::string(s) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Date parse_date(std::string_view s) {
    s = trim(s);
    auto bad = [&] { return ParseError("invalid date '" + std::string(s) + "' (expected YYYY-MM-DD)"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
    int y = 0;
    unsigned m = 0, d = 0;
    auto parse_part = [&](std::string_view part, auto& out) {
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc{} || p != part.data() + part.size()) throw bad();
    };
    parse_part(s.substr(0, 4), y);
    parse_part(s.substr(5, 2), m);
    parse_part(s.substr(8, 2), d);
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw bad();
    return Date{static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{d.days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Value parse_value(std::string_view field, ColumnType type) {
    switch (type) {
        case ColumnType::text: return std::string(field);
        case ColumnType::integer: {
            auto s = trim(field);
            if (!s.empty() && s.front() == '+') s.remove_prefix(1);
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
                throw ParseError("invalid integer '" + std::string(field) + "'");
            return v;
        }
        case ColumnType::floating: {
            auto s = trim(field);
            if (!s.empty() && s.front() == '+') s.remove_prefix(1);
            double v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
                throw ParseError("invalid float '" + std::string(field) + "'");
            if (std::isnan(v)) throw ParseError("NaN is not orderable");
            return v;
        }
        case ColumnType::date: return parse_date(field);
    }
    throw ParseError("unsupported type");
}

void Schema::check() const {
    if (attributes.size() > kMaxAttributes)
        throw SchemaError("at most " + std::to_string(kMaxAttributes) + " attributes are supported");
    std::unordered_set<std::string> seen;
    for (const auto& a : attributes) {
        if (a.name.empty()) throw SchemaError("attribute names must be non-empty");
        if (!seen.insert(a.name).second) throw SchemaError("duplicate attribute name '" + a.name + "'");
    }
}

AttrId Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i)
        if (attributes[i].name == name) return static_cast<AttrId>(i);
    throw SchemaError("unknown attribute '" + std::string(name) + "'");
}

std::uint64_t Schema::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    };
    for (const auto& a : attributes) {
        mix(a.name);
        mix(to_string(a.type));
    }
    mix(to_string(null_policy));
    return h;
}

Schema parse_schema_json(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
    }
    Schema schema;
    const nlohmann::json* attrs = &j;
    if (j.is_object()) {
        if (!j.contains("attributes")) throw SchemaError("schema object needs an 'attributes' array");
        attrs = &j.at("attributes");
        if (j.contains("null_policy")) schema.null_policy = parse_null_policy(j.at("null_policy").get<std::string>());
    }
    if (!attrs->is_array()) throw SchemaError("schema attributes must be an array");
    for (const auto& rec : *attrs) {
        if (!rec.is_object() || !rec.contains("name") || !rec.contains("type"))
            throw SchemaError("each schema attribute needs 'name' and 'type'");
        schema.attributes.push_back({rec.at("name").get<std::string>(),
                                     parse_column_type(rec.at("type").get<std::string>())});
    }
    schema.check();
    return schema;
}

Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open schema file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_schema_json(ss.str());
}

std::vector<Rank> encode_ranks(std::span<const Value> raw, ColumnType type, NullPolicy policy) {
    const std::size_t n = raw.size();
    std::vector<std::uint32_t> order;
    order.reserve(n);
    bool has_null = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Value& v = raw[i];
        if (is_null(v)) {
            if (policy == NullPolicy::reject) throw ParseError(i + 1, 0, "null value under reject policy");
            has_null = true;
            continue;
        }
        bool ok = false;
        switch (type) {
            case ColumnType::integer: ok = std::holds_alternative<std::int64_t>(v); break;
            case ColumnType::floating:
                ok = std::holds_alternative<double>(v);
                if (ok && std::isnan(std::get<double>(v))) throw ParseError(i + 1, 0, "NaN is not orderable");
                break;
            case ColumnType::text: ok = std::holds_alternative<std::string>(v); break;
            case ColumnType::date: ok = std::holds_alternative<Date>(v); break;
        }
        if (!ok) throw ParseError(i + 1, 0, "value type does not match declared type " + std::string(to_string(type)));
        order.push_back(static_cast<std::uint32_t>(i));
    }

    // Same-alternative values compare with the alternative's own ordering.
    auto less = [&](std::uint32_t a, std::uint32_t b) { return raw[a] < raw[b]; };
    auto equal = [&](std::uint32_t a, std::uint32_t b) { return raw[a] == raw[b]; };
    std::stable_sort(order.begin(), order.end(), less);

    std::vector<Rank> ranks(n, 0);
    Rank r = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k == 0 || !equal(order[k - 1], order[k])) ++r;
        ranks[order[k]] = r;
    }
    if (has_null) {
        Rank null_rank = policy == NullPolicy::nulls_first ? 0 : r + 1;
        for (std::size_t i = 0; i < n; ++i)
            if (is_null(raw[i])) ranks[i] = null_rank;
    }
    return ranks;
}

Relation Relation::from_columns(Schema schema, std::vector<std::vector<Value>> columns) {
    schema.check();
    if (columns.size() != schema.size())
        throw SchemaError("expected " + std::to_string(schema.size()) + " columns, got " + std::to_string(columns.size()));
    Relation rel;
    rel.row_count_ = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rel.row_count_) throw SchemaError("columns have different lengths");
    rel.ranks_.reserve(columns.size());
    for (std::size_t a = 0; a < columns.size(); ++a) {
        auto ranks = encode_ranks(columns[a], schema.attributes[a].type, schema.null_policy);
        std::size_t distinct = 0;
        Rank max_rank = 0;
        bool any_non_null = false;
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            if (!is_null(columns[a][i])) {
                any_non_null = true;
                max_rank = std::max(max_rank, ranks[i]);
            }
        }
        distinct = any_non_null ? max_rank : 0;
        rel.distinct_.push_back(distinct);
        rel.ranks_.push_back(std::move(ranks));
    }
    rel.values_ = std::move(columns);
    rel.schema_ = std::move(schema);
    return rel;
}

namespace {

struct CsvField {
    std::string text;
    bool quoted = false;
};

/// Splits RFC-4180 text into records. Calls on_row(row_index, fields).
template <typename OnRow>
void scan_csv(std::string_view text, char delim, OnRow&& on_row) {
    std::vector<CsvField> row;
    CsvField field;
    std::size_t record = 0;
    std::size_t i = 0;
    const std::size_t n = text.size();
    bool row_started = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field = CsvField{};
    };
    auto end_row = [&] {
        end_field();
        ++record;
        on_row(record, row);
        row.clear();
        row_started = false;
    };

    // UTF-8 byte order mark
    if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

    while (i < n) {
        char c = text[i];
        row_started = true;
        if (c == '"' && field.text.empty() && !field.quoted) {
            field.quoted = true;
            ++i;
            while (true) {
                if (i >= n) throw ParseError(record + 1, row.size() + 1, "unterminated quoted field");
                if (text[i] == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field.text.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                field.text.push_back(text[i++]);
            }
            if (i < n && text[i] != delim && text[i] != '\n' && text[i] != '\r')
                throw ParseError(record + 1, row.size() + 1, "unexpected character after closing quote");
            continue;
        }
        if (c == delim) {
            end_field();
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_row();
            if (c == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
            ++i;
        } else {
            field.text.push_back(c);
            ++i;
        }
    }
    if (row_started) end_row();
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Relation parse_csv(std::string_view text, const Schema& schema, const CsvOptions& opts) {
    schema.check();
    const std::size_t width = schema.size();
    std::vector<std::vector<Value>> columns(width);
    bool header_pending = opts.has_header;

    scan_csv(text, opts.delimiter, [&](std::size_t record, std::vector<CsvField>& fields) {
        if (fields.size() != width)
            throw ParseError(record, fields.size(),
                             "ragged row: expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        if (header_pending) {
            header_pending = false;
            std::unordered_set<std::string> seen;
            for (std::size_t c = 0; c < width; ++c) {
                std::string name(trim(fields[c].text));
                if (!seen.insert(name).second) throw ParseError(record, c + 1, "duplicate header name '" + name + "'");
                if (name != schema.attributes[c].name)
                    throw ParseError(record, c + 1,
                                     "header '" + name + "' does not match schema attribute '" + schema.attributes[c].name + "'");
            }
            return;
        }
        const std::size_t row_no = record - (opts.has_header ? 1 : 0);
        for (std::size_t c = 0; c < width; ++c) {
            const CsvField& f = fields[c];
            if (!f.quoted && trim(f.text).empty()) {
                if (schema.null_policy == NullPolicy::reject) throw ParseError(row_no, c + 1, "null value under reject policy");
                columns[c].emplace_back(std::monostate{});
                continue;
            }
            try {
                columns[c].push_back(parse_value(f.text, schema.attributes[c].type));
            } catch (const ParseError& e) {
                throw ParseError(row_no, c + 1, e.what());
            }
        }
    });
    return Relation::from_columns(schema, std::move(columns));
}

Relation load_csv(const std::filesystem::path& path, const Schema& schema, const CsvOptions& opts) {
    return parse_csv(read_file(path), schema, opts);
}

Schema infer_schema(std::string_view text, const CsvOptions& opts, NullPolicy policy) {
    Schema schema;
    schema.null_policy = policy;
    std::vector<std::array<bool, 3>> fits;  // integer, float, date
    bool header_pending = opts.has_header;
    std::size_t width = 0;

    scan_csv(text, opts.delimiter, [&](std::size_t record, std::vector<CsvField>& fields) {
        if (width == 0) {
            width = fields.size();
            fits.assign(width, {true, true, true});
            for (std::size_t c = 0; c < width; ++c)
                schema.attributes.push_back({opts.has_header ? std::string(trim(fields[c].text)) : "c" + std::to_string(c + 1),
                                             ColumnType::text});
        }
        if (fields.size() != width)
            throw ParseError(record, fields.size(), "ragged row: expected " + std::to_string(width) + " fields");
        if (header_pending) {
            header_pending = false;
            return;
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (!fields[c].quoted && trim(fields[c].text).empty()) continue;
            const ColumnType kinds[3] = {ColumnType::integer, ColumnType::floating, ColumnType::date};
            for (int k = 0; k < 3; ++k) {
                if (!fits[c][k] || fields[c].quoted) {
                    fits[c][k] = false;
                    continue;
                }
                try {
                    parse_value(fields[c].text, kinds[k]);
                } catch (const ParseError&) {
                    fits[c][k] = false;
                }
            }
        }
    });
    for (std::size_t c = 0; c < width; ++c) {
        if (fits[c][0]) schema.attributes[c].type = ColumnType::integer;
        else if (fits[c][1]) schema.attributes[c].type = ColumnType::floating;
        else if (fits[c][2]) schema.attributes[c].type = ColumnType::date;
    }
    schema.check();
    return schema;
}

}  // namespace fastod
