#include "lobviz/plot.hpp"

#include "lobviz/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lobviz {

namespace {

constexpr int kLeft = 80;
constexpr int kRight = 100;
constexpr int kTop = 40;
constexpr int kBottom = 44;
constexpr int kHeatHeight = 420;
constexpr int kLayerHeight = 260;
constexpr int kPanelHeight = 110;
constexpr int kGap = 14;

constexpr const char* kStopHex[] = {"#352a87", "#0f5cdd", "#1481d6", "#06a4ca", "#2eb7a4",
                                    "#87bf77", "#d1bb59", "#fec832", "#f9fb0e"};

// Distinguishes layers in shared merge panels.
constexpr Rgb kLayerColors[] = {colors::kCumulative, {200, 80, 30}, {120, 60, 170}, {30, 150, 150}};

struct Frame {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;
    double bottom() const { return y + h; }
    double right() const { return x + w; }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

/// Short label for a count or measure: 1234567 -> "1.23M".
std::string compact(double v) {
    const double a = std::fabs(v);
    if (a >= 1e9) return fmt("%.3gG", v / 1e9);
    if (a >= 1e6) return fmt("%.3gM", v / 1e6);
    if (a >= 1e4) return fmt("%.3gk", v / 1e3);
    if (a == std::floor(a)) return fmt("%.0f", v);
    return fmt("%.3g", v);
}

std::string hex(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

/// Step of roughly `span / target` rounded to 1, 2 or 5 times a power of ten.
double nice_step(double span, int target) {
    if (!(span > 0)) return 1;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / mag;
    return (f < 1.5 ? 1 : f < 3.5 ? 2 : f < 7.5 ? 5 : 10) * mag;
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
    std::vector<double> out;
    const double step = nice_step(hi - lo, target);
    for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) out.push_back(v);
    if (out.empty()) out.push_back(lo);
    return out;
}

void outline(Canvas& c, const Frame& f) {
    c.line(f.x, f.y, f.right(), f.y, colors::kAxis);
    c.line(f.x, f.bottom(), f.right(), f.bottom(), colors::kAxis);
    c.line(f.x, f.y, f.x, f.bottom(), colors::kAxis);
    c.line(f.right(), f.y, f.right(), f.bottom(), colors::kAxis);
}

void y_label(Canvas& c, const Frame& f, std::string_view label) {
    c.text(f.x - 62, f.y + f.h / 2, label, colors::kAxis, Anchor::Middle, 9, true);
}

/// Column geometry shared by a figure's stacked panels.
struct Columns {
    double x0 = 0;
    double width = 0;
    std::size_t count = 0;
    double left(double col) const { return count ? x0 + width * col / static_cast<double>(count) : x0; }
    double center(std::size_t col) const { return left(static_cast<double>(col) + 0.5); }
};

void x_axis(Canvas& c, const Columns& cols, double y, const std::vector<std::string>& labels,
            std::string_view title) {
    if (cols.count > 0) {
        const std::size_t n = std::min<std::size_t>(6, cols.count);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = n == 1 ? 0 : k * (cols.count - 1) / (n - 1);
            const double x = cols.center(i);
            c.line(x, y, x, y + 4, colors::kAxis);
            c.text(x, y + 16, labels[i], colors::kAxis, Anchor::Middle, 9);
        }
    }
    c.text(cols.x0 + cols.width / 2, y + 34, title, colors::kAxis, Anchor::Middle, 9);
}

void colorbar(Canvas& c, const Frame& heat, double max, ColorScale scale) {
    const Frame bar{heat.right() + 22, heat.y, 14, heat.h};
    constexpr int kSteps = 64;
    for (int i = 0; i < kSteps; ++i) {
        const double t0 = static_cast<double>(i) / kSteps;
        c.rect(bar.x, bar.bottom() - (t0 + 1.0 / kSteps) * bar.h, bar.w, bar.h / kSteps + 1.0,
               heat_color(t0 + 0.5 / kSteps));
    }
    outline(c, bar);
    const double lo = scale == ColorScale::Log ? 1 : 0;
    c.text(bar.right() + 4, bar.bottom(), compact(lo), colors::kAxis, Anchor::Start, 9);
    c.text(bar.right() + 4, bar.y + 9, compact(max), colors::kAxis, Anchor::Start, 9);
}

double color_position(double v, double max, ColorScale scale) {
    return scale == ColorScale::Log ? log_scale(v, max) : linear_scale(v, max);
}

/// Heatmap rectangles; horizontally adjacent cells of the same color are drawn
/// as one rectangle.
void draw_grid(Canvas& c, const Frame& f, const Columns& cols, const HeatmapGrid& grid, ColorScale scale) {
    const double bh = f.h / static_cast<double>(grid.bins());
    const double max = static_cast<double>(grid.max_volume());
    std::vector<HeatCell> cells = grid.cells;
    std::sort(cells.begin(), cells.end(), [](const HeatCell& a, const HeatCell& b) {
        return a.bin != b.bin ? a.bin < b.bin : a.column < b.column;
    });
    for (std::size_t i = 0; i < cells.size();) {
        const Rgb color = heat_color(color_position(static_cast<double>(cells[i].volume), max, scale));
        std::size_t j = i + 1;
        while (j < cells.size() && cells[j].bin == cells[i].bin && cells[j].column == cells[j - 1].column + 1 &&
               heat_color(color_position(static_cast<double>(cells[j].volume), max, scale)) == color) {
            ++j;
        }
        const double x = cols.left(cells[i].column);
        const double w = cols.left(cells[j - 1].column + 1.0) - x;
        c.rect(x, f.bottom() - (cells[i].bin + 1.0) * bh, w, bh, color);
        i = j;
    }
    // Midpoint, broken wherever a column has none.
    std::vector<Point> run;
    auto flush = [&] {
        if (!run.empty()) c.polyline(run, colors::kMidpoint, 1.5);
        run.clear();
    };
    for (std::size_t col = 0; col < grid.midpoint.size(); ++col) {
        const auto& m = grid.midpoint[col];
        if (!m) {
            flush();
            continue;
        }
        const double offset = m->ticks() - static_cast<double>(grid.min_price) + 0.5;
        run.push_back({cols.center(col), f.bottom() - offset * bh});
    }
    flush();
}

void price_axis(Canvas& c, const Frame& f, const HeatmapGrid& grid, const ContractMeta& meta) {
    const double bh = f.h / static_cast<double>(grid.bins());
    const auto step = static_cast<std::int64_t>(
        std::max(1.0, nice_step(static_cast<double>(grid.max_price - grid.min_price), 6)));
    // First multiple of `step` at or above the bottom bin.
    for (std::int64_t p = -floor_div(-grid.min_price, step) * step; p <= grid.max_price; p += step) {
        const double y = f.bottom() - (static_cast<double>(p - grid.min_price) + 0.5) * bh;
        c.line(f.x - 4, y, f.x, y, colors::kAxis);
        c.text(f.x - 6, y + 4, meta.format_price(p), colors::kAxis, Anchor::End, 9);
    }
}

void value_axis(Canvas& c, const Frame& f, double max) {
    c.text(f.x - 6, f.y + 9, compact(max), colors::kAxis, Anchor::End, 9);
    c.text(f.x - 6, f.bottom(), "0", colors::kAxis, Anchor::End, 9);
}

template <typename T>
double max_of(const std::vector<T>& v) {
    double m = 0;
    for (const auto& x : v) m = std::max(m, static_cast<double>(x));
    return m;
}

template <typename T>
void line_series(Canvas& c, const Frame& f, const Columns& cols, const std::vector<T>& values, double max, Rgb color) {
    if (values.empty()) return;
    std::vector<Point> pts;
    pts.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double t = max > 0 ? static_cast<double>(values[i]) / max : 0;
        pts.push_back({cols.center(i), f.bottom() - t * f.h});
    }
    c.polyline(pts, color, 1.2);
}

/// Per-snapshot bars; snapshot k spans the columns plotted inside it.
void snapshot_bars(Canvas& c, const Frame& f, const Columns& cols, const std::vector<std::int64_t>& values,
                   const std::vector<std::uint64_t>& end_column, Rgb color) {
    const double max = max_of(values);
    std::uint64_t begin = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const std::uint64_t end = end_column[k];
        if (values[k] > 0 && end > begin && max > 0) {
            const double h = static_cast<double>(values[k]) / max * f.h;
            c.rect(cols.left(static_cast<double>(begin)), f.bottom() - h,
                   cols.left(static_cast<double>(end)) - cols.left(static_cast<double>(begin)), h, color);
        }
        begin = std::max(begin, end);
    }
    value_axis(c, f, max);
}

std::string time_of_day(std::int64_t ms) { return format_iso8601(Timestamp{ms}).substr(11, 8); }

std::vector<Panel> drawn_panels(const ViewBundle& view) {
    std::vector<Panel> out;
    for (Panel p : all_panels()) {
        if (view.spec.has_panel(p)) out.push_back(p);
    }
    return out;
}

ColorScale scale_or(const PlotSpec& spec, ColorScale fallback) { return spec.scale.value_or(fallback); }

Json summary_json(const Summary& s) {
    Json j;
    j["Minimum"] = s.min;
    j["Mean"] = s.mean;
    j["Median"] = s.median;
    j["Maximum"] = s.max;
    j["Count"] = s.count;
    return j;
}

Json legend_json(ColorScale scale, double max) {
    Json j;
    j["color_map"] = "blue-yellow";
    j["stops"] = Json::array();
    for (const char* s : kStopHex) j["stops"].push_back(s);
    j["scale"] = scale == ColorScale::Log ? "log" : "linear";
    j["min"] = scale == ColorScale::Log ? 1 : 0;
    j["max"] = max;
    return j;
}

Json grid_cells(const HeatmapGrid& grid) {
    Json cells = Json::array();
    for (const auto& c : grid.cells) cells.push_back(Json::array({c.column, c.bin, c.volume}));
    return cells;
}

Json midpoint_json(const HeatmapGrid& grid, const ContractMeta& meta) {
    Json out = Json::array();
    for (const auto& m : grid.midpoint) {
        if (m) {
            out.push_back(static_cast<double>(m->value) * static_cast<double>(meta.tick_size_nanos) / 2.0 /
                          static_cast<double>(kNanosPerUnit));
        } else {
            out.push_back(nullptr);
        }
    }
    return out;
}

Json price_axis_json(const HeatmapGrid& grid, const ContractMeta& meta) {
    Json y;
    y["min_tick"] = grid.min_price;
    y["max_tick"] = grid.max_price;
    y["min_price"] = meta.price_of(grid.min_price);
    y["max_price"] = meta.price_of(grid.max_price);
    y["tick_size"] = meta.tick_size();
    y["bins"] = grid.bins();
    return y;
}

Json fills_json(const FillCounters& f) {
    Json j;
    j["writes"] = f.writes;
    j["rewrites"] = f.rewrites;
    j["max_cells_per_column"] = f.max_cells_per_column;
    return j;
}

template <typename Draw>
std::string render(Format format, std::pair<int, int> size, Draw draw) {
    if (format == Format::Svg) {
        SvgCanvas c(size.first, size.second);
        draw(c);
        return c.finish();
    }
    RasterCanvas c(size.first, size.second);
    draw(c);
    return encode_png(c);
}

}  // namespace

Format parse_format(std::string_view s) {
    if (s == "svg") return Format::Svg;
    if (s == "png") return Format::Png;
    if (s == "json") return Format::Json;
    throw QueryError("format must be svg, png or json", "format");
}

std::string_view to_string(Format f) {
    switch (f) {
        case Format::Svg: return "svg";
        case Format::Png: return "png";
        case Format::Json: return "json";
    }
    return "json";
}

std::string_view content_type(Format f) {
    switch (f) {
        case Format::Svg: return "image/svg+xml";
        case Format::Png: return "image/png";
        case Format::Json: return "application/json";
    }
    return "application/octet-stream";
}

std::string dump(const Json& j) { return j.dump() + "\n"; }

Json view_json(const ViewBundle& view) {
    const auto& spec = view.spec;
    const auto& pn = view.panels;
    Json j;
    Json& x = j["axes"]["x"];
    x["mode"] = to_string(spec.axis);
    x["columns"] = view.grid.columns;
    x["start"] = format_iso8601(spec.start);
    x["end"] = format_iso8601(spec.end);
    x["interval_ms"] = spec.snapshot_interval_ms;
    x["skip"] = view.effective_skip;
    x["values"] = view.x_values;
    j["axes"]["y"] = price_axis_json(view.grid, view.contract);
    j["grid"] = grid_cells(view.grid);
    j["midpoint"] = midpoint_json(view.grid, view.contract);

    Json panels = Json::object();
    bool per_snapshot = false;
    for (Panel p : all_panels()) {
        if (!spec.has_panel(p)) continue;
        const std::string key(to_string(p));
        switch (p) {
            case Panel::CumulativeTrades: panels[key] = pn.cumulative_trades; break;
            case Panel::ElapsedTime: panels[key] = pn.elapsed_seconds; break;
            case Panel::TradesPerSnapshot:
                panels[key] = pn.trades_per_snapshot;
                per_snapshot = true;
                break;
            case Panel::MessagesPerSnapshot:
                panels[key] = pn.messages_per_snapshot;
                per_snapshot = true;
                break;
            case Panel::SideTotals:
                panels[key]["bid"] = pn.bid_total;
                panels[key]["ask"] = pn.ask_total;
                break;
        }
    }
    if (per_snapshot) panels["snapshot_end_column"] = pn.snapshot_end_column;
    j["panels"] = std::move(panels);

    Json legend = legend_json(ColorScale::Linear, static_cast<double>(view.grid.max_volume()));
    legend["midpoint_color"] = hex(colors::kMidpoint);
    legend["panel_colors"] = {{"cumulative_trades", hex(colors::kCumulative)},
                              {"elapsed_time", hex(colors::kElapsed)},
                              {"trades_per_snapshot", hex(colors::kBars)},
                              {"messages_per_snapshot", hex(colors::kMessageBars)},
                              {"bid_total", hex(colors::kBidTotal)},
                              {"ask_total", hex(colors::kAskTotal)}};
    j["legend"] = std::move(legend);

    Json& meta = j["meta"];
    meta["symbol"] = view.contract.symbol;
    meta["name"] = view.contract.display_name;
    meta["message_count"] = view.bounds.message_count;
    meta["trade_count"] = view.bounds.trade_count;
    meta["trade_volume"] = view.bounds.trade_volume;
    meta["requested_skip"] = view.requested_skip;
    meta["effective_skip"] = view.effective_skip;
    meta["fills"] = fills_json(view.fills);
    return j;
}

Json merge_json(const MergeBundle& merge) {
    Json j;
    Json& x = j["axes"]["x"];
    x["mode"] = "merged";
    x["columns"] = merge.column_market.size();
    x["start"] = format_iso8601(merge.start);
    x["end"] = format_iso8601(merge.end);
    x["skip"] = merge.effective_skip;
    x["market"] = merge.column_market;
    x["time_ms"] = merge.column_time;
    Json layers = Json::array();
    std::int64_t max_volume = 0;
    for (const auto& layer : merge.layers) {
        Json l;
        l["symbol"] = layer.contract.symbol;
        l["name"] = layer.contract.display_name;
        l["y"] = price_axis_json(layer.grid, layer.contract);
        l["grid"] = grid_cells(layer.grid);
        l["midpoint"] = midpoint_json(layer.grid, layer.contract);
        l["cumulative_trades"] = layer.cumulative_trades;
        if (layer.first_known_column) {
            l["first_known_column"] = *layer.first_known_column;
        } else {
            l["first_known_column"] = nullptr;
        }
        l["max_volume"] = layer.grid.max_volume();
        max_volume = std::max(max_volume, layer.grid.max_volume());
        layers.push_back(std::move(l));
    }
    j["layers"] = std::move(layers);
    j["panels"]["elapsed_time"] = merge.elapsed_seconds;
    Json legend = legend_json(ColorScale::Linear, static_cast<double>(max_volume));
    legend["midpoint_color"] = hex(colors::kMidpoint);
    j["legend"] = std::move(legend);
    Json& meta = j["meta"];
    meta["symbols"] = Json::array();
    for (const auto& layer : merge.layers) meta["symbols"].push_back(layer.contract.symbol);
    meta["message_count"] = merge.message_count;
    meta["requested_skip"] = merge.requested_skip;
    meta["effective_skip"] = merge.effective_skip;
    meta["fills"] = fills_json(merge.fills);
    return j;
}

Json trigger_json(const TriggerHistogram& hist, const std::string& symbol, Timestamp start, Timestamp end) {
    Json j;
    Json& dt = j["axes"]["dt"];
    dt["bin_ms"] = hist.dt_bin;
    dt["half_window_ms"] = hist.half_window;
    dt["min_index"] = -hist.dt_extent;
    dt["max_index"] = hist.dt_extent;
    Json& dp = j["axes"]["dp"];
    dp["bin_ticks"] = hist.dp_bin;
    dp["min_index"] = hist.rows.empty() ? 0 : hist.rows.begin()->first;
    dp["max_index"] = hist.rows.empty() ? 0 : hist.rows.rbegin()->first;
    Json grid = Json::array();
    std::uint64_t max = 0;
    for (const auto& [dp_index, row] : hist.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] == 0) continue;
            grid.push_back(Json::array({static_cast<std::int64_t>(i) - hist.dt_extent, dp_index, row[i]}));
            max = std::max(max, row[i]);
        }
    }
    j["grid"] = std::move(grid);
    j["legend"] = legend_json(ColorScale::Log, static_cast<double>(max));
    Json& meta = j["meta"];
    meta["symbol"] = symbol;
    meta["start"] = format_iso8601(start);
    meta["end"] = format_iso8601(end);
    meta["total_triggers"] = hist.total_triggers;
    meta["total_fills"] = hist.total_fills;
    return j;
}

Json rate_json(const RateHistogram& hist, const std::string& symbol) {
    Json j;
    j["axes"]["x"] = {{"label", "messages per second"}, {"bin_width", hist.bin_width}};
    j["axes"]["y"] = {{"label", "seconds"}, {"scale", "log"}};
    Json bins = Json::array();
    for (const auto& b : hist.bins) bins.push_back(Json::array({b.lower, b.seconds}));
    j["bins"] = std::move(bins);
    j["meta"] = {{"symbol", symbol}, {"seconds", hist.seconds}, {"messages", hist.messages}};
    return j;
}

Json stats_json(const ContractStats& stats, const ContractMeta& meta) {
    Json j;
    j["symbol"] = stats.symbol;
    j["name"] = meta.display_name;
    Json window;
    window["start"] = stats.first_time ? Json(format_iso8601(*stats.first_time)) : Json(nullptr);
    window["end"] = stats.last_time ? Json(format_iso8601(*stats.last_time)) : Json(nullptr);
    j["Time Window"] = std::move(window);
    j["Total # Messages"] = stats.total_messages;
    j["Excluded # Messages"] = stats.excluded_messages;
    j["Messages per day"] = summary_json(stats.per_calendar_day);
    j["Messages per trading day"] = summary_json(stats.per_trading_day);
    j["Messages per second"] = summary_json(stats.per_second);
    j["Total LOB Volume per Message"] = summary_json(stats.volume_per_message);
    j["Total underlying LOB value ($) per message"] = summary_json(stats.value_per_message);
    return j;
}

std::string stats_table(const ContractStats& stats, const ContractMeta& meta) {
    std::string out;
    auto row = [&](const std::string& label, const std::string& value) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-46s %s\n", label.c_str(), value.c_str());
        out += buf;
    };
    auto block = [&](const std::string& label, const Summary& s) {
        row(label, "");
        row("  Minimum", fmt("%.2f", s.min));
        row("  Mean", fmt("%.2f", s.mean));
        row("  Median", fmt("%.2f", s.median));
        row("  Maximum", fmt("%.2f", s.max));
    };
    row("Contract", stats.symbol + (meta.display_name.empty() ? "" : " (" + meta.display_name + ")"));
    row("Time Window", stats.first_time ? format_iso8601(*stats.first_time) + " - " + format_iso8601(*stats.last_time)
                                        : "-");
    row("Total # Messages", std::to_string(stats.total_messages));
    if (stats.excluded_messages) row("Excluded # Messages", std::to_string(stats.excluded_messages));
    block("Messages per day", stats.per_calendar_day);
    block("Messages per trading day", stats.per_trading_day);
    block("Messages per second", stats.per_second);
    block("Total LOB Volume per Message", stats.volume_per_message);
    block("Total underlying LOB value ($) per message", stats.value_per_message);
    return out;
}

std::pair<int, int> view_size(const ViewBundle& view, const PlotSpec& spec) {
    const auto panels = static_cast<int>(drawn_panels(view).size());
    return {spec.width, kTop + kHeatHeight + panels * (kGap + kPanelHeight) + kBottom};
}

std::pair<int, int> merge_size(const MergeBundle& merge, const PlotSpec& spec) {
    const auto layers = static_cast<int>(merge.layers.size());
    return {spec.width, kTop + layers * kLayerHeight + (layers - 1) * kGap + 2 * (kGap + kPanelHeight) + kBottom};
}

std::pair<int, int> trigger_size(const PlotSpec& spec) { return {spec.width, spec.width * 5 / 8}; }

std::pair<int, int> rate_size(const PlotSpec& spec) { return {spec.width, spec.width * 5 / 12}; }

void draw_view(Canvas& c, const ViewBundle& view, const PlotSpec& spec) {
    const double plot_w = c.width() - kLeft - kRight;
    const Columns cols{static_cast<double>(kLeft), plot_w, view.grid.columns};
    const Frame heat{static_cast<double>(kLeft), static_cast<double>(kTop), plot_w, kHeatHeight};
    const ColorScale scale = scale_or(spec, ColorScale::Linear);

    const std::string title = !spec.title.empty()
                                  ? spec.title
                                  : view.contract.symbol + "  " + format_iso8601(view.spec.start) + " - " +
                                        format_iso8601(view.spec.end) + "  skip " +
                                        std::to_string(view.effective_skip);
    c.text(heat.x, kTop - 14, title, colors::kBlack, Anchor::Start, 11);
    draw_grid(c, heat, cols, view.grid, scale);
    outline(c, heat);
    price_axis(c, heat, view.grid, view.contract);
    y_label(c, heat, "price");
    colorbar(c, heat, static_cast<double>(view.grid.max_volume()), scale);

    const auto& pn = view.panels;
    double y = heat.bottom();
    for (Panel p : drawn_panels(view)) {
        const Frame f{heat.x, y + kGap, plot_w, kPanelHeight};
        y = f.bottom();
        switch (p) {
            case Panel::CumulativeTrades: {
                const double max = max_of(pn.cumulative_trades);
                line_series(c, f, cols, pn.cumulative_trades, max, colors::kCumulative);
                value_axis(c, f, max);
                y_label(c, f, "cum. volume");
                break;
            }
            case Panel::ElapsedTime: {
                const double max = max_of(pn.elapsed_seconds);
                line_series(c, f, cols, pn.elapsed_seconds, max, colors::kElapsed);
                value_axis(c, f, max);
                y_label(c, f, "seconds");
                break;
            }
            case Panel::TradesPerSnapshot:
                snapshot_bars(c, f, cols, pn.trades_per_snapshot, pn.snapshot_end_column, colors::kBars);
                y_label(c, f, "volume/snap");
                break;
            case Panel::MessagesPerSnapshot:
                snapshot_bars(c, f, cols, pn.messages_per_snapshot, pn.snapshot_end_column, colors::kMessageBars);
                y_label(c, f, "msgs/snap");
                break;
            case Panel::SideTotals: {
                const double max = std::max(max_of(pn.bid_total), max_of(pn.ask_total));
                line_series(c, f, cols, pn.ask_total, max, colors::kAskTotal);
                line_series(c, f, cols, pn.bid_total, max, colors::kBidTotal);
                value_axis(c, f, max);
                y_label(c, f, "bid/ask");
                break;
            }
        }
        outline(c, f);
    }

    std::vector<std::string> labels;
    labels.reserve(view.x_values.size());
    for (auto v : view.x_values) {
        labels.push_back(view.spec.axis == AxisMode::Time ? time_of_day(v) : std::to_string(v));
    }
    x_axis(c, cols, y, labels, view.spec.axis == AxisMode::Time ? "time" : "message");
}

void draw_merge(Canvas& c, const MergeBundle& merge, const PlotSpec& spec) {
    const double plot_w = c.width() - kLeft - kRight;
    const Columns cols{static_cast<double>(kLeft), plot_w, merge.column_market.size()};
    const ColorScale scale = scale_or(spec, ColorScale::Linear);
    std::string title = spec.title;
    if (title.empty()) {
        for (const auto& l : merge.layers) title += (title.empty() ? "" : " + ") + l.contract.symbol;
        title += "  " + format_iso8601(merge.start) + " - " + format_iso8601(merge.end) + "  skip " +
                 std::to_string(merge.effective_skip);
    }
    c.text(kLeft, kTop - 14, title, colors::kBlack, Anchor::Start, 11);
    double y = kTop;
    for (std::size_t m = 0; m < merge.layers.size(); ++m) {
        const auto& layer = merge.layers[m];
        const Frame f{static_cast<double>(kLeft), y + (m ? kGap : 0), plot_w, kLayerHeight};
        y = f.bottom();
        draw_grid(c, f, cols, layer.grid, scale);
        outline(c, f);
        price_axis(c, f, layer.grid, layer.contract);
        y_label(c, f, layer.contract.symbol);
        colorbar(c, f, static_cast<double>(layer.grid.max_volume()), scale);
    }
    const Frame cum{static_cast<double>(kLeft), y + kGap, plot_w, kPanelHeight};
    double max = 0;
    for (const auto& l : merge.layers) max = std::max(max, max_of(l.cumulative_trades));
    for (std::size_t m = 0; m < merge.layers.size(); ++m) {
        const Rgb color = kLayerColors[m % std::size(kLayerColors)];
        line_series(c, cum, cols, merge.layers[m].cumulative_trades, max, color);
        c.text(cum.right() + 6, cum.y + 10 + 12 * static_cast<double>(m), merge.layers[m].contract.symbol, color,
               Anchor::Start, 9);
    }
    value_axis(c, cum, max);
    y_label(c, cum, "cum. volume");
    outline(c, cum);
    const Frame elapsed{cum.x, cum.bottom() + kGap, plot_w, kPanelHeight};
    const double emax = max_of(merge.elapsed_seconds);
    line_series(c, elapsed, cols, merge.elapsed_seconds, emax, colors::kElapsed);
    value_axis(c, elapsed, emax);
    y_label(c, elapsed, "seconds");
    outline(c, elapsed);

    std::vector<std::string> labels;
    for (std::size_t i = 0; i < merge.column_market.size(); ++i) {
        labels.push_back(std::to_string((i + 1) * merge.effective_skip));
    }
    x_axis(c, cols, elapsed.bottom(), labels, "merged message");
}

void draw_trigger(Canvas& c, const TriggerHistogram& hist, const PlotSpec& spec) {
    const Frame f{static_cast<double>(kLeft), static_cast<double>(kTop),
                  static_cast<double>(c.width() - kLeft - kRight), static_cast<double>(c.height() - kTop - kBottom)};
    const ColorScale scale = scale_or(spec, ColorScale::Log);
    c.text(f.x, kTop - 14,
           spec.title.empty() ? "trades around each trade: " + std::to_string(hist.total_triggers) + " triggers"
                              : spec.title,
           colors::kBlack, Anchor::Start, 11);
    const std::int64_t lo = hist.rows.empty() ? -1 : hist.rows.begin()->first;
    const std::int64_t hi = hist.rows.empty() ? 1 : hist.rows.rbegin()->first;
    const double cw = f.w / static_cast<double>(2 * hist.dt_extent + 1);
    const double ch = f.h / static_cast<double>(hi - lo + 1);
    std::uint64_t max = 0;
    for (const auto& [dp, row] : hist.rows) {
        for (auto v : row) max = std::max(max, v);
    }
    for (const auto& [dp, row] : hist.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i] == 0) continue;
            c.rect(f.x + static_cast<double>(i) * cw, f.bottom() - static_cast<double>(dp - lo + 1) * ch, cw, ch,
                   heat_color(color_position(static_cast<double>(row[i]), static_cast<double>(max), scale)));
        }
    }
    outline(c, f);
    colorbar(c, f, static_cast<double>(max), scale);
    for (double t : nice_ticks(-static_cast<double>(hist.dt_extent), static_cast<double>(hist.dt_extent), 8)) {
        const double x = f.x + (t + static_cast<double>(hist.dt_extent) + 0.5) * cw;
        c.line(x, f.bottom(), x, f.bottom() + 4, colors::kAxis);
        c.text(x, f.bottom() + 16, compact(t * static_cast<double>(hist.dt_bin)), colors::kAxis, Anchor::Middle, 9);
    }
    for (double p : nice_ticks(static_cast<double>(lo), static_cast<double>(hi), 6)) {
        const double y = f.bottom() - (p - static_cast<double>(lo) + 0.5) * ch;
        c.line(f.x - 4, y, f.x, y, colors::kAxis);
        c.text(f.x - 6, y + 4, compact(p * static_cast<double>(hist.dp_bin)), colors::kAxis, Anchor::End, 9);
    }
    c.text(f.x + f.w / 2, f.bottom() + 34, "time offset (ms)", colors::kAxis, Anchor::Middle, 9);
    y_label(c, f, "price offset (ticks)");
}

void draw_rate(Canvas& c, const RateHistogram& hist, const PlotSpec& spec) {
    const Frame f{static_cast<double>(kLeft), static_cast<double>(kTop),
                  static_cast<double>(c.width() - kLeft - kRight), static_cast<double>(c.height() - kTop - kBottom)};
    c.text(f.x, kTop - 14,
           spec.title.empty() ? "messages per second, bin width " + std::to_string(hist.bin_width) : spec.title,
           colors::kBlack, Anchor::Start, 11);
    const double x_max = hist.bins.empty()
                             ? static_cast<double>(hist.bin_width)
                             : static_cast<double>(hist.bins.back().lower + hist.bin_width);
    double y_max = 1;
    for (const auto& b : hist.bins) y_max = std::max(y_max, static_cast<double>(b.seconds));
    // Log axis from 0.1 to the next decade, so single-second bins stay visible.
    const double top_decade = std::max(1.0, std::ceil(std::log10(y_max)));
    auto y_of = [&](double v) {
        const double l = std::log10(std::max(v, 0.1));
        return f.bottom() - (l + 1.0) / (top_decade + 1.0) * f.h;
    };
    auto x_of = [&](double v) { return f.x + v / x_max * f.w; };
    for (double d = -1; d <= top_decade; d += 1) {
        const double y = y_of(std::pow(10.0, d));
        c.line(f.x, y, f.right(), y, colors::kGrid);
        c.text(f.x - 6, y + 4, d < 0 ? "0.1" : compact(std::pow(10.0, d)), colors::kAxis, Anchor::End, 9);
    }
    std::vector<Point> pts{{x_of(0), f.bottom()}};
    for (const auto& b : hist.bins) {
        const double v = static_cast<double>(b.seconds);
        pts.push_back({x_of(static_cast<double>(b.lower)), y_of(v)});
        pts.push_back({x_of(static_cast<double>(b.lower + hist.bin_width)), y_of(v)});
    }
    pts.push_back({x_of(x_max), f.bottom()});
    c.polyline(pts, colors::kCumulative, 1.5);
    outline(c, f);
    for (double t : nice_ticks(0, x_max, 8)) {
        const double x = x_of(t);
        c.line(x, f.bottom(), x, f.bottom() + 4, colors::kAxis);
        c.text(x, f.bottom() + 16, compact(t), colors::kAxis, Anchor::Middle, 9);
    }
    c.text(f.x + f.w / 2, f.bottom() + 34, "messages per second", colors::kAxis, Anchor::Middle, 9);
    y_label(c, f, "seconds (log)");
}

std::string emit_plot(const ViewBundle& view, Format format, const PlotSpec& spec) {
    if (format == Format::Json) return dump(view_json(view));
    return render(format, view_size(view, spec), [&](Canvas& c) { draw_view(c, view, spec); });
}

std::string emit_plot(const MergeBundle& merge, Format format, const PlotSpec& spec) {
    if (format == Format::Json) return dump(merge_json(merge));
    return render(format, merge_size(merge, spec), [&](Canvas& c) { draw_merge(c, merge, spec); });
}

std::string emit_plot(const TriggerHistogram& hist, Format format, const PlotSpec& spec, const std::string& symbol,
                      Timestamp start, Timestamp end) {
    if (format == Format::Json) return dump(trigger_json(hist, symbol, start, end));
    return render(format, trigger_size(spec), [&](Canvas& c) { draw_trigger(c, hist, spec); });
}

std::string emit_plot(const RateHistogram& hist, Format format, const PlotSpec& spec, const std::string& symbol) {
    if (format == Format::Json) return dump(rate_json(hist, symbol));
    return render(format, rate_size(spec), [&](Canvas& c) { draw_rate(c, hist, spec); });
}

}  // namespace lobviz
