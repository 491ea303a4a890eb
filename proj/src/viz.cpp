#include "lobviz/viz.hpp"

#include "lobviz/error.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace lobviz {

namespace {

constexpr std::array<std::pair<Panel, std::string_view>, 5> kPanelNames{{
    {Panel::CumulativeTrades, "cumulative_trades"},
    {Panel::ElapsedTime, "elapsed_time"},
    {Panel::TradesPerSnapshot, "trades_per_snapshot"},
    {Panel::MessagesPerSnapshot, "messages_per_snapshot"},
    {Panel::SideTotals, "side_totals"},
}};

struct Extremes {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    bool any() const { return lo <= hi; }
    void take(const BookState& s) {
        for (const Ladder* ladder : {&s.bids, &s.asks}) {
            for (const auto& level : ladder->levels()) {
                if (level.quantity > 0) {
                    lo = std::min(lo, level.price);
                    hi = std::max(hi, level.price);
                }
            }
        }
    }
};

/// Occupied levels of one book merged by price; a locked or crossed book can
/// quote the same price on both sides, which becomes one cell.
struct ColumnLevels {
    std::array<PriceLevel, 2 * kMaxDepth> items{};
    std::size_t size = 0;

    explicit ColumnLevels(const BookState& s) {
        for (const Ladder* ladder : {&s.bids, &s.asks}) {
            for (const auto& level : ladder->levels()) {
                if (level.quantity <= 0) continue;
                auto* same = std::find_if(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(size),
                                          [&](const PriceLevel& p) { return p.price == level.price; });
                if (same != items.begin() + static_cast<std::ptrdiff_t>(size)) {
                    same->quantity += level.quantity;
                } else {
                    items[size++] = level;
                }
            }
        }
        std::sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(size),
                  [](const PriceLevel& a, const PriceLevel& b) { return a.price < b.price; });
    }
};

/// Heatmap writer with the fill-once accounting.
class GridFiller {
public:
    GridFiller(HeatmapGrid& grid, FillCounters& counters, bool fixed_range)
        : grid_(grid), counters_(counters), fixed_(fixed_range) {}

    void column(const BookState* state) {
        const auto col = static_cast<std::uint32_t>(grid_.columns++);
        if (!state) {
            grid_.midpoint.push_back(std::nullopt);
            return;
        }
        const ColumnLevels levels(*state);
        std::array<std::int64_t, 2 * kMaxDepth> written{};
        std::size_t count = 0;
        for (std::size_t i = 0; i < levels.size; ++i) {
            const auto& level = levels.items[i];
            if (fixed_ && (level.price < grid_.min_price || level.price > grid_.max_price)) {
                throw Error("price level " + std::to_string(level.price) + " lies outside the scanned bounds");
            }
            ++counters_.writes;
            if (std::find(written.begin(), written.begin() + static_cast<std::ptrdiff_t>(count), level.price) !=
                written.begin() + static_cast<std::ptrdiff_t>(count)) {
                ++counters_.rewrites;
            }
            written[count++] = level.price;
            if (fixed_) {
                grid_.cells.push_back(
                    HeatCell{col, static_cast<std::uint32_t>(level.price - grid_.min_price), level.quantity});
            } else {
                raw_.push_back(RawCell{col, level.price, level.quantity});
                extremes_.lo = std::min(extremes_.lo, level.price);
                extremes_.hi = std::max(extremes_.hi, level.price);
            }
        }
        counters_.max_cells_per_column = std::max<std::uint64_t>(counters_.max_cells_per_column, count);
        grid_.midpoint.push_back(midpoint(*state));
    }

    /// Single-pass mode: rebase the collected cells once the range is known.
    void finish_dynamic() {
        if (fixed_) return;
        if (!extremes_.any()) {
            throw EmptyWindowError("no book levels in window");
        }
        grid_.min_price = extremes_.lo;
        grid_.max_price = extremes_.hi;
        grid_.cells.reserve(raw_.size());
        for (const auto& c : raw_) {
            grid_.cells.push_back(HeatCell{c.column, static_cast<std::uint32_t>(c.price - extremes_.lo), c.volume});
        }
        raw_.clear();
    }

private:
    struct RawCell {
        std::uint32_t column;
        std::int64_t price;
        std::int64_t volume;
    };

    HeatmapGrid& grid_;
    FillCounters& counters_;
    bool fixed_;
    std::vector<RawCell> raw_;
    Extremes extremes_;
};

bool in_window(const WindowSpec& spec, Timestamp t) { return spec.start <= t && t < spec.end; }

/// Shared second pass for both build modes.
ViewBundle fill_view(StateStream& states, const ContractMeta& contract, const WindowSpec& spec,
                     const std::optional<PriceBounds>& bounds) {
    ViewBundle view;
    view.contract = contract;
    view.spec = spec;
    view.requested_skip = spec.skip;
    view.effective_skip = spec.skip;
    if (bounds) {
        view.bounds = *bounds;
        view.grid.min_price = bounds->min_price;
        view.grid.max_price = bounds->max_price;
    }
    GridFiller filler(view.grid, view.fills, bounds.has_value());

    const std::size_t buckets = snapshot_count(spec.start, spec.end, spec.snapshot_interval_ms);
    auto& panels = view.panels;
    panels.trades_per_snapshot.assign(buckets, 0);
    panels.messages_per_snapshot.assign(buckets, 0);
    std::vector<std::int64_t> column_time;

    std::int64_t cumulative = 0;
    std::uint64_t messages = 0, trades = 0;
    auto emit = [&](const BookState& state, std::int64_t x_value, std::int64_t time_ms,
                    std::optional<Timestamp> last_time) {
        filler.column(&state);
        view.x_values.push_back(x_value);
        column_time.push_back(time_ms);
        panels.cumulative_trades.push_back(cumulative);
        const std::int64_t elapsed_ms = last_time && *last_time >= spec.start ? last_time->ms - spec.start.ms : 0;
        panels.elapsed_seconds.push_back(static_cast<double>(elapsed_ms) / 1000.0);
        const SideTotals totals = side_totals(state);
        panels.bid_total.push_back(totals.bid);
        panels.ask_total.push_back(totals.ask);
    };
    auto count_message = [&](const StatePoint& p) {
        const auto bucket = static_cast<std::size_t>((p.message.sending_time.ms - spec.start.ms) /
                                                     spec.snapshot_interval_ms);
        ++messages;
        ++panels.messages_per_snapshot[bucket];
        if (p.trade) {
            ++trades;
            cumulative += p.trade->quantity;
            panels.trades_per_snapshot[bucket] += p.trade->quantity;
        }
    };

    if (spec.axis == AxisMode::Message) {
        std::uint64_t index = 0;
        while (const StatePoint* p = states.next()) {
            const Timestamp t = p->message.sending_time;
            if (t < spec.start) continue;
            if (t >= spec.end) break;
            count_message(*p);
            ++index;
            if (apply_skip(index, spec.skip)) {
                emit(p->state, static_cast<std::int64_t>(index), t.ms, t);
            }
        }
    } else {
        SnapshotSampler sampler(spec.start, spec.end, spec.snapshot_interval_ms, states.start_state(),
                                [&](const SnapshotColumn& c) {
                                    if (!apply_skip(c.index + 1, spec.skip)) return;
                                    std::optional<Timestamp> last;
                                    if (c.last_message) last = c.last_message->sending_time;
                                    emit(*c.state, c.start.ms, c.start.ms, last);
                                });
        while (const StatePoint* p = states.next()) {
            const Timestamp t = p->message.sending_time;
            if (t >= spec.end) break;
            // Emits every column that ends before this message, so the
            // cumulative count must only move afterwards.
            sampler.observe(p->message, p->state);
            if (in_window(spec, t)) count_message(*p);
        }
        sampler.finish();
    }
    if (messages == 0) {
        throw EmptyWindowError("no messages in window");
    }
    filler.finish_dynamic();

    panels.snapshot_end_column.resize(buckets);
    for (std::size_t k = 0; k < buckets; ++k) {
        const std::int64_t bucket_end =
            std::min(spec.start.ms + static_cast<std::int64_t>(k + 1) * spec.snapshot_interval_ms, spec.end.ms);
        panels.snapshot_end_column[k] = static_cast<std::uint64_t>(
            std::lower_bound(column_time.begin(), column_time.end(), bucket_end) - column_time.begin());
    }

    if (!bounds) {
        view.bounds.min_price = view.grid.min_price;
        view.bounds.max_price = view.grid.max_price;
        view.bounds.message_count = messages;
        view.bounds.trade_count = trades;
        view.bounds.trade_volume = cumulative;
        view.bounds.columns = spec.axis == AxisMode::Message ? messages : buckets;
    }
    return view;
}

}  // namespace

std::string_view to_string(AxisMode m) { return m == AxisMode::Message ? "message" : "time"; }

std::string_view to_string(Panel p) {
    for (const auto& [panel, name] : kPanelNames) {
        if (panel == p) return name;
    }
    return "unknown";
}

AxisMode parse_axis_mode(std::string_view s) {
    if (s == "message") return AxisMode::Message;
    if (s == "time") return AxisMode::Time;
    throw QueryError("axis must be 'message' or 'time'", "axis");
}

Panel parse_panel(std::string_view s) {
    for (const auto& [panel, name] : kPanelNames) {
        if (name == s) return panel;
    }
    throw QueryError("unknown panel '" + std::string(s) + "'", "panels");
}

std::vector<Panel> all_panels() {
    std::vector<Panel> out;
    for (const auto& [panel, name] : kPanelNames) out.push_back(panel);
    return out;
}

void WindowSpec::validate() const {
    if (!(start < end)) throw QueryError("start must be before end", "start");
    if (skip < 1) throw QueryError("skip must be at least 1", "skip");
    if (snapshot_interval_ms < 1) throw QueryError("interval must be at least 1 ms", "interval");
}

bool WindowSpec::has_panel(Panel p) const { return std::find(panels.begin(), panels.end(), p) != panels.end(); }

std::int64_t HeatmapGrid::max_volume() const {
    std::int64_t v = 0;
    for (const auto& c : cells) v = std::max(v, c.volume);
    return v;
}

PriceBounds scan_bounds(StateStream& states, const WindowSpec& spec) {
    spec.validate();
    PriceBounds out;
    Extremes ext;
    // Time mode only draws the book closing each interval, so the extremes
    // come from the same sampler the fill pass uses.
    std::optional<SnapshotSampler> sampler;
    if (spec.axis == AxisMode::Time) {
        sampler.emplace(spec.start, spec.end, spec.snapshot_interval_ms, states.start_state(),
                        [&](const SnapshotColumn& c) { ext.take(*c.state); });
    }
    while (const StatePoint* p = states.next()) {
        const Timestamp t = p->message.sending_time;
        if (t >= spec.end) break;
        if (sampler) sampler->observe(p->message, p->state);
        if (t < spec.start) continue;
        ++out.message_count;
        if (p->trade) {
            ++out.trade_count;
            out.trade_volume += p->trade->quantity;
        }
        if (!sampler) ext.take(p->state);
    }
    if (out.message_count == 0) {
        throw EmptyWindowError("no messages in window");
    }
    if (sampler) sampler->finish();
    if (!ext.any()) {
        throw EmptyWindowError("no book levels in window");
    }
    out.min_price = ext.lo;
    out.max_price = ext.hi;
    out.columns = spec.axis == AxisMode::Message ? out.message_count
                                                 : snapshot_count(spec.start, spec.end, spec.snapshot_interval_ms);
    return out;
}

ViewBundle build_view(StateStream& states, const ContractMeta& contract, const WindowSpec& spec,
                      const PriceBounds& bounds) {
    spec.validate();
    return fill_view(states, contract, spec, bounds);
}

ViewBundle build_view_single_pass(StateStream& states, const ContractMeta& contract, const WindowSpec& spec) {
    spec.validate();
    return fill_view(states, contract, spec, std::nullopt);
}

std::uint64_t effective_skip(std::uint64_t columns, std::uint64_t requested, std::uint64_t max_columns) {
    if (max_columns < 1) {
        throw QueryError("max_columns must be at least 1", "max_columns");
    }
    const std::uint64_t needed = (columns + max_columns - 1) / max_columns;
    return std::max<std::uint64_t>({requested, needed, 1});
}

MergeBundle build_merge_view(const MergeReplay& replay, const std::vector<ContractMeta>& contracts, Timestamp start,
                             Timestamp end, std::uint64_t skip, std::uint64_t max_columns) {
    if (!(start < end)) throw QueryError("start must be before end", "start");
    if (skip < 1) throw QueryError("skip must be at least 1", "skip");

    MergeBundle out;
    out.start = start;
    out.end = end;
    out.requested_skip = skip;
    const std::size_t n = contracts.size();

    // Pass 1: per-market extremes and the column count.
    std::vector<Extremes> ext(n);
    std::uint64_t count = 0;
    replay([&](const MergedColumn& c) {
        const Timestamp t = c.message.sending_time;
        if (t < start || t >= end) return;
        if (count == 0) {
            for (std::size_t m = 0; m < n; ++m) {
                if (c.states[m]) ext[m].take(*c.states[m]);
            }
        } else if (c.states[c.market]) {
            ext[c.market].take(*c.states[c.market]);
        }
        ++count;
    });
    if (count == 0) {
        throw EmptyWindowError("no messages in window");
    }
    out.message_count = count;
    out.effective_skip = effective_skip(count, skip, max_columns);

    out.layers.resize(n);
    std::vector<GridFiller> fillers;
    fillers.reserve(n);
    for (std::size_t m = 0; m < n; ++m) {
        auto& layer = out.layers[m];
        layer.contract = contracts[m];
        if (ext[m].any()) {
            layer.min_price = ext[m].lo;
            layer.max_price = ext[m].hi;
        }
        layer.grid.min_price = layer.min_price;
        layer.grid.max_price = layer.max_price;
        fillers.emplace_back(layer.grid, out.fills, true);
    }

    // Pass 2: fill.
    std::vector<std::int64_t> cumulative(n, 0);
    std::uint64_t index = 0;
    replay([&](const MergedColumn& c) {
        const Timestamp t = c.message.sending_time;
        if (t < start || t >= end) return;
        ++index;
        if (c.message.kind == MessageKind::Trade) {
            cumulative[c.market] += c.message.quantity;
        }
        if (!apply_skip(index, out.effective_skip)) return;
        const auto col = static_cast<std::uint64_t>(out.column_market.size());
        out.column_market.push_back(static_cast<std::uint32_t>(c.market));
        out.column_time.push_back(t.ms);
        out.elapsed_seconds.push_back(static_cast<double>(t.ms - start.ms) / 1000.0);
        for (std::size_t m = 0; m < n; ++m) {
            fillers[m].column(c.states[m]);
            out.layers[m].cumulative_trades.push_back(cumulative[m]);
            if (c.states[m] && !out.layers[m].first_known_column) {
                out.layers[m].first_known_column = col;
            }
        }
    });
    return out;
}

}  // namespace lobviz
