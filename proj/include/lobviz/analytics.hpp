#pragma once

#include "lobviz/book.hpp"
#include "lobviz/contract.hpp"
#include "lobviz/message_stream.hpp"
#include "lobviz/reconstruct.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace lobviz {

/// min / mean / median / max of a sample. Empty samples report zeros with
/// count 0.
struct Summary {
    std::uint64_t count = 0;
    double min = 0;
    double mean = 0;
    double median = 0;
    double max = 0;
};

/// Integer sample kept as value -> multiplicity, so exact medians cost memory
/// proportional to the number of distinct values only.
class IntegerSample {
public:
    void add(std::int64_t value, std::uint64_t times = 1);
    std::uint64_t count() const { return count_; }
    /// Summary of the sample with every value multiplied by `scale`.
    Summary summary(double scale = 1.0) const;
    const std::map<std::int64_t, std::uint64_t>& frequencies() const { return freq_; }

private:
    std::map<std::int64_t, std::uint64_t> freq_;
    std::uint64_t count_ = 0;
    long double sum_ = 0;
};

struct DailyCount {
    Date date;
    std::uint64_t messages = 0;
};

struct ContractStats {
    std::string symbol;
    std::optional<Timestamp> first_time;
    std::optional<Timestamp> last_time;
    std::uint64_t total_messages = 0;
    /// Messages on excluded dates; they take no part in any statistic.
    std::uint64_t excluded_messages = 0;
    /// Every date in [first, last] minus exclusions, zero-filled.
    std::vector<DailyCount> calendar_days;
    Summary per_calendar_day;
    /// Weekdays in [first, last] plus any weekend date with messages, minus
    /// exclusions.
    Summary per_trading_day;
    /// Every second in [first, last] on included dates, zero-filled.
    Summary per_second;
    /// Total resting quantity (both sides) after each message.
    Summary volume_per_message;
    /// Dollar value of the book after each message.
    Summary value_per_message;
};

/// One-pass accumulator behind contract_stats.
class StatsAccumulator {
public:
    StatsAccumulator(ContractMeta meta, std::span<const Date> exclusions);
    void add(const MarketMessage& msg, const BookState& after);
    ContractStats finish() const;

private:
    bool excluded(std::int64_t day) const { return excluded_.count(day) != 0; }
    std::uint64_t included_seconds_between(std::int64_t from_sec, std::int64_t to_sec) const;
    void close_second();

    ContractMeta meta_;
    std::set<std::int64_t> excluded_;
    std::map<std::int64_t, std::uint64_t> per_day_;
    IntegerSample per_second_;
    IntegerSample volume_;
    IntegerSample value_ticks_;
    std::optional<Timestamp> first_;
    std::optional<Timestamp> last_;
    std::uint64_t total_ = 0;
    std::uint64_t excluded_messages_ = 0;
    std::int64_t current_second_ = 0;
    std::uint64_t current_count_ = 0;
};

ContractStats contract_stats(StateStream& states, const ContractMeta& meta, std::span<const Date> exclusions = {});

struct RateBin {
    std::int64_t lower = 0;  // messages per second, inclusive
    std::uint64_t seconds = 0;
};

/// How many seconds saw [lower, lower + bin_width) messages. Seconds between the
/// first and last message with no traffic land in the first bin.
struct RateHistogram {
    std::int64_t bin_width = 20;
    std::vector<RateBin> bins;  // contiguous from 0
    std::uint64_t seconds = 0;
    std::uint64_t messages = 0;
};

class RateAccumulator {
public:
    explicit RateAccumulator(std::int64_t bin_width = 20);
    void add(Timestamp t);
    RateHistogram finish() const;

private:
    void bump(std::uint64_t count, std::uint64_t seconds);

    std::int64_t bin_width_;
    std::vector<std::uint64_t> bins_;
    std::optional<std::int64_t> second_;
    std::uint64_t count_ = 0;
    std::uint64_t seconds_ = 0;
    std::uint64_t messages_ = 0;
};

RateHistogram rate_histogram(MessageStream& messages, std::int64_t bin_width = 20);
RateHistogram rate_histogram(std::span<const Timestamp> times, std::int64_t bin_width = 20);

/// One wall-clock interval of a time-indexed series.
struct SnapshotColumn {
    std::size_t index = 0;
    Timestamp start;
    /// Book after the last message inside the interval, or the previous
    /// column's book when the interval is empty.
    const BookState* state = nullptr;
    /// Last message at or before the interval end, if any.
    const MarketMessage* last_message = nullptr;
    /// Messages that fell inside the interval.
    std::uint64_t messages = 0;
};

/// Incremental last-message-per-interval sampler over [t0, t1). Columns are
/// emitted in order as soon as they are final; messages before t0 only move the
/// carried state.
class SnapshotSampler {
public:
    using Sink = std::function<void(const SnapshotColumn&)>;

    SnapshotSampler(Timestamp t0, Timestamp t1, std::int64_t interval_ms, const BookState& start, Sink sink);
    void observe(const MarketMessage& msg, const BookState& after);
    /// Emits the remaining columns, forward-filled.
    void finish();

    std::size_t column_count() const { return columns_; }

private:
    void emit_through(std::size_t column);

    Timestamp t0_;
    Timestamp t1_;
    std::int64_t interval_;
    std::size_t columns_;
    std::size_t next_column_ = 0;
    BookState state_;
    std::optional<MarketMessage> last_;
    std::uint64_t pending_messages_ = 0;
    Sink sink_;
    bool finished_ = false;
};

/// Number of intervals of `interval_ms` needed to cover [t0, t1).
std::size_t snapshot_count(Timestamp t0, Timestamp t1, std::int64_t interval_ms);

std::vector<BookState> snapshot_sample(StateStream& states, std::int64_t interval_ms, Timestamp t0, Timestamp t1);

/// One column of a merged multi-market series: the message that caused it plus
/// each market's last known book. `states[m]` is null before market m's first
/// message (the unknown placeholder).
struct MergedColumn {
    std::size_t market = 0;
    MarketMessage message;
    std::vector<const BookState*> states;
};

/// k-way merge of per-market state streams by (sending_time, market id, seq),
/// holding one current state per market.
class MergeCursor {
public:
    explicit MergeCursor(std::vector<StateStream*> markets);
    /// Valid until the next call.
    const MergedColumn* next();
    std::size_t market_count() const { return markets_.size(); }

private:
    std::vector<StateStream*> markets_;
    std::vector<const StatePoint*> heads_;
    std::vector<BookState> current_;
    std::vector<bool> known_;
    MergedColumn column_;
};

struct MergedSeries {
    struct Column {
        std::size_t market = 0;
        MarketMessage message;
        std::vector<std::optional<BookState>> states;
    };
    std::vector<Column> columns;
};

MergedSeries merge_markets(std::vector<StateStream*> markets);

/// Counts of (time offset, price offset) pairs around every trade.
struct TriggerHistogram {
    std::int64_t half_window = 50;  // ms
    std::int64_t dt_bin = 1;        // ms
    std::int64_t dp_bin = 1;        // ticks
    std::uint64_t total_triggers = 0;
    std::uint64_t total_fills = 0;
    /// Bin index range along the time axis: [-dt_extent, dt_extent].
    std::int64_t dt_extent = 0;
    /// Rows keyed by price-offset bin; each row has 2 * dt_extent + 1 cells.
    std::map<std::int64_t, std::vector<std::uint64_t>> rows;

    std::uint64_t count(std::int64_t dt_index, std::int64_t dp_index) const;
};

/// Nearest-bin index with ties rounded away from zero; symmetric in `delta`.
constexpr std::int64_t centered_bin(std::int64_t delta, std::int64_t width) {
    const std::int64_t mag = delta < 0 ? -delta : delta;
    const std::int64_t k = (2 * mag + width) / (2 * width);
    return delta < 0 ? -k : k;
}

/// Sliding-window (two pointer) pass; `trades` must be ordered by time.
TriggerHistogram trigger_impact(std::span<const TradeRecord> trades, std::int64_t half_window = 50,
                                std::int64_t dt_bin = 1, std::int64_t dp_bin = 1);

/// Trades of one symbol in stream order.
std::vector<TradeRecord> collect_trades(MessageStream& messages);

struct LiquidityPoint {
    std::uint64_t seq = 0;
    Timestamp time;
    std::int64_t bid_total = 0;
    std::int64_t ask_total = 0;
    std::optional<std::int64_t> spread;
    std::optional<HalfTicks> midpoint;
    bool operator==(const LiquidityPoint&) const = default;
};

LiquidityPoint liquidity_of(const MarketMessage& msg, const BookState& state);
std::vector<LiquidityPoint> liquidity_series(StateStream& states);

}  // namespace lobviz
