#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fastod/attribute_set.hpp"

namespace fastod {

/// Base for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data: bad CSV, bad field, bad OD text.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t column, const std::string& reason);
    explicit ParseError(const std::string& reason) : Error(reason) {}

    /// 1-based row and column of the offending field; 0 when not applicable.
    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_ = 0;
    std::size_t column_ = 0;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

enum class ColumnType { integer, floating, text, date };
enum class NullPolicy { nulls_first, nulls_last, reject };

std::string_view to_string(ColumnType t);
std::string_view to_string(NullPolicy p);
ColumnType parse_column_type(std::string_view s);
/// Accepts "nulls_first"/"first", "nulls_last"/"last", "reject".
NullPolicy parse_null_policy(std::string_view s);

/// Calendar date as days since 1970-01-01.
struct Date {
    std::int32_t days = 0;
    auto operator<=>(const Date&) const = default;
};

/// A parsed field. monostate is null.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, Date>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// Parses one field under a declared type. Throws ParseError (row/column 0).
Value parse_value(std::string_view field, ColumnType type);
/// ISO-8601 calendar date, YYYY-MM-DD.
Date parse_date(std::string_view s);
std::string format_date(Date d);

struct Attribute {
    std::string name;
    ColumnType type = ColumnType::text;
};

struct Schema {
    std::vector<Attribute> attributes;
    NullPolicy null_policy = NullPolicy::nulls_first;

    std::size_t size() const { return attributes.size(); }
    /// Throws SchemaError on empty/duplicate names or more than kMaxAttributes columns.
    void check() const;
    /// Throws SchemaError naming the attribute when not found.
    AttrId index_of(std::string_view name) const;
    /// Stable 64-bit FNV-1a over names, types and null policy.
    std::uint64_t fingerprint() const;
};

/// Schema file: {"attributes": [{"name": ..., "type": ...}], "null_policy": ...}
/// or a bare array of attribute records.
Schema parse_schema_json(std::string_view json_text);
Schema load_schema(const std::filesystem::path& path);

/// Order-preserving dense rank. Non-null values map to 1..d; null maps to 0
/// under nulls_first and d+1 under nulls_last.
using Rank = std::uint32_t;

/// Rank-encodes one column. Throws ParseError on a null under the reject
/// policy or a value whose type differs from `type`, and on NaN.
std::vector<Rank> encode_ranks(std::span<const Value> raw_values, ColumnType type, NullPolicy null_policy);

/// Immutable table: schema, raw parsed values, and per-column ranks.
class Relation {
public:
    Relation() = default;

    /// Builds from column-major values. Every column must have the same length.
    static Relation from_columns(Schema schema, std::vector<std::vector<Value>> columns);

    const Schema& schema() const { return schema_; }
    std::size_t row_count() const { return row_count_; }
    std::size_t attribute_count() const { return schema_.size(); }
    AttributeSet all_attributes() const { return AttributeSet::first_n(attribute_count()); }

    std::span<const Rank> ranks(AttrId a) const { return ranks_.at(a); }
    std::span<const Value> values(AttrId a) const { return values_.at(a); }
    /// Number of distinct non-null values in column a.
    std::size_t distinct_count(AttrId a) const { return distinct_.at(a); }

    AttrId attribute(std::string_view name) const { return schema_.index_of(name); }
    const std::string& name(AttrId a) const { return schema_.attributes.at(a).name; }

private:
    Schema schema_;
    std::size_t row_count_ = 0;
    std::vector<std::vector<Value>> values_;
    std::vector<std::vector<Rank>> ranks_;
    std::vector<std::size_t> distinct_;
};

struct CsvOptions {
    bool has_header = true;
    char delimiter = ',';
};

/// Reads an RFC-4180 CSV file. An empty unquoted field is null; a quoted
/// empty field is the empty string. Row order is preserved.
Relation load_csv(const std::filesystem::path& path, const Schema& schema, const CsvOptions& opts = {});
Relation parse_csv(std::string_view text, const Schema& schema, const CsvOptions& opts = {});

/// Guesses integer, float, date, or text per column by trial parse.
Schema infer_schema(std::string_view csv_text, const CsvOptions& opts = {}, NullPolicy policy = NullPolicy::nulls_first);

}  // namespace fastod
