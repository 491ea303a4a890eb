#pragma once

#include "lobviz/timestamp.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace lobviz {

/// Fixed-point decimal scale used for prices before they are converted to ticks.
inline constexpr std::int64_t kNanosPerUnit = 1'000'000'000;

/// Parses a decimal such as "392.5" or "-0.03125" exactly into units of 1e-9.
/// Throws ParseError when the value is not a decimal or needs more than nine
/// fractional digits.
std::int64_t parse_decimal_nanos(std::string_view text);

/// Shortest exact decimal rendering of a 1e-9 fixed-point value ("392.5").
std::string format_decimal_nanos(std::int64_t nanos);

inline constexpr int kDefaultBookDepth = 10;

/// Static description of one contract. Prices everywhere else are integer ticks;
/// this is the only place that knows what a tick is worth.
struct ContractMeta {
    std::string symbol;
    std::string display_name;
    std::int64_t tick_size_nanos = kNanosPerUnit;
    int book_depth = kDefaultBookDepth;
    std::optional<Date> expiry;
    /// Dollars per (price unit x contract).
    double dollar_multiplier = 1.0;

    /// Throws Error if tick size, depth or multiplier are out of range.
    void validate() const;

    double tick_size() const { return static_cast<double>(tick_size_nanos) / kNanosPerUnit; }

    /// Price of `ticks` in contract price units, as the nearest double.
    double price_of(std::int64_t ticks) const {
        return static_cast<double>(ticks * tick_size_nanos) / kNanosPerUnit;
    }

    std::string format_price(std::int64_t ticks) const { return format_decimal_nanos(ticks * tick_size_nanos); }

    /// Meta for a symbol seen without any definition: tick of 1 price unit.
    static ContractMeta placeholder(std::string symbol);

    bool operator==(const ContractMeta&) const = default;
};

/// Symbol -> meta lookup, seeded from configuration and extended by definition
/// records found in the input.
class ContractRegistry {
public:
    void add(ContractMeta meta);
    const ContractMeta* find(std::string_view symbol) const;
    const std::map<std::string, ContractMeta, std::less<>>& all() const { return contracts_; }

    /// Loads `{"contracts": [{"symbol": ..., "tick_size": "0.25", ...}]}`.
    static ContractRegistry from_json_file(const std::string& path);
    static ContractRegistry from_json_text(std::string_view text);

private:
    std::map<std::string, ContractMeta, std::less<>> contracts_;
};

}  // namespace lobviz
