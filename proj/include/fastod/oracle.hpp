#pragma once

#include <optional>

#include "fastod/inference.hpp"
#include "fastod/od.hpp"
#include "fastod/relation.hpp"

namespace fastod::oracle {

/// Brute-force references. Nothing here touches ranks or partitions: every
/// check compares raw parsed values pair by pair.

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

struct OracleConfig {
    /// Largest node size |X|+1 (constants) or |X|+2 (order compatible); defaults to |R|.
    std::optional<std::size_t> max_level;
    std::size_t check_budget = 1'000'000;
};

/// Three-way comparison of two raw values under a null policy.
int compare_raw(const Value& x, const Value& y, NullPolicy policy);

bool brute_validate_canonical(const Relation& rel, const CanonicalOD& od);
bool brute_validate_list(const Relation& rel, const ListOD& od);

/// Every valid minimal canonical OD up to the configured level.
/// Throws BudgetExceeded when more than check_budget validations are needed.
ODSet brute_discover(const Relation& rel, const OracleConfig& cfg = {});

}  // namespace fastod::oracle
