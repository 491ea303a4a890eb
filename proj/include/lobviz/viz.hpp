#pragma once

#include "lobviz/analytics.hpp"
#include "lobviz/book.hpp"
#include "lobviz/contract.hpp"
#include "lobviz/reconstruct.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lobviz {

enum class AxisMode { Message, Time };

enum class Panel { CumulativeTrades, ElapsedTime, TradesPerSnapshot, MessagesPerSnapshot, SideTotals };

std::string_view to_string(AxisMode m);
std::string_view to_string(Panel p);
AxisMode parse_axis_mode(std::string_view s);
Panel parse_panel(std::string_view s);
std::vector<Panel> all_panels();

/// What to draw: a window of one contract, the x-axis mode, and the panels
/// under the heatmap.
struct WindowSpec {
    Timestamp start;
    Timestamp end;
    AxisMode axis = AxisMode::Message;
    std::int64_t snapshot_interval_ms = 5000;
    std::uint64_t skip = 1;
    std::vector<Panel> panels;

    /// Throws QueryError naming the bad field.
    void validate() const;
    bool has_panel(Panel p) const;
};

/// True when the message (or column) with 1-based `index` is plotted.
constexpr bool apply_skip(std::uint64_t index, std::uint64_t skip) { return skip <= 1 || index % skip == 0; }

/// Result of the first pass over a window.
struct PriceBounds {
    std::int64_t min_price = 0;  // ticks
    std::int64_t max_price = 0;
    std::uint64_t message_count = 0;
    std::uint64_t trade_count = 0;
    std::int64_t trade_volume = 0;
    /// Columns before skipping: messages in Message mode, intervals in Time mode.
    std::uint64_t columns = 0;
};

/// First pass: exact price extremes over every occupied level of every book
/// the window draws before skipping: each post-message book in Message mode,
/// each interval's closing (or carried) book in Time mode. Throws
/// EmptyWindowError when the window holds no message or no book level.
PriceBounds scan_bounds(StateStream& states, const WindowSpec& spec);

struct HeatCell {
    std::uint32_t column = 0;
    std::uint32_t bin = 0;  // price - min_price, in ticks
    std::int64_t volume = 0;
    bool operator==(const HeatCell&) const = default;
};

/// Sparse tick-resolution heatmap. Cells are sorted by (column, bin).
struct HeatmapGrid {
    std::size_t columns = 0;
    std::int64_t min_price = 0;
    std::int64_t max_price = 0;
    std::vector<HeatCell> cells;
    std::vector<std::optional<HalfTicks>> midpoint;

    std::size_t bins() const { return static_cast<std::size_t>(max_price - min_price + 1); }
    std::int64_t max_volume() const;
};

/// Write accounting for the heatmap fill.
struct FillCounters {
    std::uint64_t writes = 0;
    /// Writes that hit a cell already written in the same column.
    std::uint64_t rewrites = 0;
    std::uint64_t max_cells_per_column = 0;
};

struct PanelSeries {
    /// Per column: traded contracts from the window start through the column,
    /// counted before skipping.
    std::vector<std::int64_t> cumulative_trades;
    /// Per column: seconds from the window start to the column's last message.
    std::vector<double> elapsed_seconds;
    /// Per snapshot interval of the window.
    std::vector<std::int64_t> trades_per_snapshot;
    std::vector<std::int64_t> messages_per_snapshot;
    /// Per snapshot interval: number of plotted columns before its end, i.e.
    /// the x position of its right edge.
    std::vector<std::uint64_t> snapshot_end_column;
    std::vector<std::int64_t> bid_total;
    std::vector<std::int64_t> ask_total;
};

struct ViewBundle {
    ContractMeta contract;
    WindowSpec spec;
    PriceBounds bounds;
    std::uint64_t requested_skip = 1;
    std::uint64_t effective_skip = 1;
    HeatmapGrid grid;
    PanelSeries panels;
    /// Per column: 1-based message index in Message mode, interval start (ms)
    /// in Time mode.
    std::vector<std::int64_t> x_values;
    FillCounters fills;
};

/// Second pass. `bounds` must come from scan_bounds over the same window; a
/// level outside them throws Error.
ViewBundle build_view(StateStream& states, const ContractMeta& contract, const WindowSpec& spec,
                      const PriceBounds& bounds);

/// Single-pass variant that grows the price range while filling.
ViewBundle build_view_single_pass(StateStream& states, const ContractMeta& contract, const WindowSpec& spec);

/// Skip needed so that `columns` pre-skip columns fit in `max_columns`, never
/// below `requested`.
std::uint64_t effective_skip(std::uint64_t columns, std::uint64_t requested, std::uint64_t max_columns);

/// One market of a merged view.
struct MergeLayer {
    ContractMeta contract;
    std::int64_t min_price = 0;
    std::int64_t max_price = 0;
    HeatmapGrid grid;
    std::vector<std::int64_t> cumulative_trades;
    /// First plotted column with a known book, if any.
    std::optional<std::uint64_t> first_known_column;
};

struct MergeBundle {
    Timestamp start;
    Timestamp end;
    std::uint64_t requested_skip = 1;
    std::uint64_t effective_skip = 1;
    std::uint64_t message_count = 0;
    std::vector<MergeLayer> layers;
    /// Per column: market id and sending time of the column's message.
    std::vector<std::uint32_t> column_market;
    std::vector<std::int64_t> column_time;
    std::vector<double> elapsed_seconds;
    FillCounters fills;
};

/// Runs one full pass of merged columns through the visitor. The merge view
/// calls it twice (bounds, then fill), so it must replay from the start.
using MergeReplay = std::function<void(const std::function<void(const MergedColumn&)>&)>;

MergeBundle build_merge_view(const MergeReplay& replay, const std::vector<ContractMeta>& contracts, Timestamp start,
                             Timestamp end, std::uint64_t skip, std::uint64_t max_columns);

}  // namespace lobviz
