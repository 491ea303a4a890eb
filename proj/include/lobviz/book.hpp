#pragma once

#include "lobviz/contract.hpp"
#include "lobviz/diagnostics.hpp"
#include "lobviz/message.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace lobviz {

inline constexpr std::size_t kMaxDepth = 10;

struct PriceLevel {
    std::int64_t price = 0;  // ticks
    std::int64_t quantity = 0;

    bool operator==(const PriceLevel&) const = default;
};

/// One side of a market-by-price book: up to kMaxDepth levels, level 1 (index 0)
/// is the best price. Slots past size() are always zeroed.
class Ladder {
public:
    std::span<const PriceLevel> levels() const { return {levels_.data(), size_}; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const PriceLevel& operator[](std::size_t i) const { return levels_[i]; }
    PriceLevel& operator[](std::size_t i) { return levels_[i]; }

    /// Inserts at `index`, pushing deeper levels down; anything pushed past
    /// `depth` falls off.
    void insert(std::size_t index, PriceLevel level, std::size_t depth = kMaxDepth);
    /// Removes `index`, pulling deeper levels up.
    void erase(std::size_t index);
    void clear();

    std::int64_t total_quantity() const;

    bool operator==(const Ladder& other) const;

private:
    std::array<PriceLevel, kMaxDepth> levels_{};
    std::uint8_t size_ = 0;
};

/// The depth-limited bid/ask ladder after some prefix of the message stream.
///
/// A level with quantity 0 is a pending deletion: the feed changed its volume
/// to zero and the matching delete has not arrived yet. It keeps its slot so
/// the delete addresses the right level, but it is never drawn or counted.
struct BookState {
    Ladder bids;
    Ladder asks;
    std::uint64_t last_seq = 0;
    Timestamp last_time;
    bool initialized = false;
    /// Tolerant mode only: best bid >= best ask at this point.
    bool crossed = false;

    const Ladder& side(Side s) const { return s == Side::Bid ? bids : asks; }
    Ladder& side(Side s) { return s == Side::Bid ? bids : asks; }

    bool operator==(const BookState&) const = default;
};

struct TradeRecord {
    Timestamp sending_time;
    std::int64_t price = 0;  // ticks
    std::int64_t quantity = 0;
    std::uint64_t seq = 0;

    bool operator==(const TradeRecord&) const = default;
};

struct BookOptions {
    Mode mode = Mode::Strict;
    std::size_t depth = kMaxDepth;
    Diagnostics* diagnostics = nullptr;
};

/// Applies one message in place and returns the trade it reports, if any.
///
/// New at level L inserts and shifts L.. one deeper; Change at L replaces the
/// quantity (and price, when it differs); Delete at L removes the level and
/// pulls deeper levels up. Trades and statistics leave the ladder alone.
/// Strict mode throws ReconstructionError and leaves `state` untouched; tolerant
/// mode repairs (Change on an empty level becomes New, Delete of an empty level
/// is dropped, misordered prices are re-ranked, crossing sets `crossed`) and
/// reports through BookOptions::diagnostics.
std::optional<TradeRecord> apply_message(BookState& state, const MarketMessage& msg, const BookOptions& options = {});

/// Twice a price in ticks, so half-tick midpoints stay exact.
struct HalfTicks {
    std::int64_t value = 0;

    double ticks() const { return static_cast<double>(value) / 2.0; }
    friend constexpr auto operator<=>(HalfTicks, HalfTicks) = default;
};

std::optional<HalfTicks> midpoint(const BookState& state);

/// Best ask minus best bid in ticks; absent on a one-sided book.
std::optional<std::int64_t> spread(const BookState& state);

struct SideTotals {
    std::int64_t bid = 0;
    std::int64_t ask = 0;

    std::int64_t total() const { return bid + ask; }
    bool operator==(const SideTotals&) const = default;
};

SideTotals side_totals(const BookState& state);

/// Sum of price x quantity over all occupied levels, in ticks x contracts.
std::int64_t book_value_ticks(const BookState& state);

/// Sum of price x quantity x dollar multiplier over all occupied levels.
double book_value(const BookState& state, const ContractMeta& meta);

/// Describes the first violated ladder invariant, or nothing when the state is
/// well formed. Crossing is only a violation when `crossed` is not set.
std::optional<std::string> check_invariants(const BookState& state);

}  // namespace lobviz
