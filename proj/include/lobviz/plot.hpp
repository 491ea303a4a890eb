#pragma once

#include "lobviz/analytics.hpp"
#include "lobviz/render.hpp"
#include "lobviz/viz.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

namespace lobviz {

using Json = nlohmann::ordered_json;

enum class Format { Svg, Png, Json };

Format parse_format(std::string_view s);
std::string_view to_string(Format f);
std::string_view content_type(Format f);

enum class ColorScale { Linear, Log };

struct PlotSpec {
    int width = 1200;
    /// Empty picks the default: linear for book views, log for trigger grids.
    std::optional<ColorScale> scale;
    std::string title;
};

Json view_json(const ViewBundle& view);
Json merge_json(const MergeBundle& merge);
Json trigger_json(const TriggerHistogram& hist, const std::string& symbol, Timestamp start, Timestamp end);
Json rate_json(const RateHistogram& hist, const std::string& symbol);
Json stats_json(const ContractStats& stats, const ContractMeta& meta);

/// Compact serialization with a trailing newline; identical input gives
/// identical bytes.
std::string dump(const Json& j);

/// Human-readable two-column table of the same fields as stats_json.
std::string stats_table(const ContractStats& stats, const ContractMeta& meta);

void draw_view(Canvas& c, const ViewBundle& view, const PlotSpec& spec);
void draw_merge(Canvas& c, const MergeBundle& merge, const PlotSpec& spec);
void draw_trigger(Canvas& c, const TriggerHistogram& hist, const PlotSpec& spec);
void draw_rate(Canvas& c, const RateHistogram& hist, const PlotSpec& spec);

/// Canvas size each figure needs for `spec`.
std::pair<int, int> view_size(const ViewBundle& view, const PlotSpec& spec);
std::pair<int, int> merge_size(const MergeBundle& merge, const PlotSpec& spec);
std::pair<int, int> trigger_size(const PlotSpec& spec);
std::pair<int, int> rate_size(const PlotSpec& spec);

/// SVG, PNG or JSON bytes. Image formats share the drawing code.
std::string emit_plot(const ViewBundle& view, Format format, const PlotSpec& spec = {});
std::string emit_plot(const MergeBundle& merge, Format format, const PlotSpec& spec = {});
std::string emit_plot(const TriggerHistogram& hist, Format format, const PlotSpec& spec = {},
                      const std::string& symbol = {}, Timestamp start = {}, Timestamp end = {});
std::string emit_plot(const RateHistogram& hist, Format format, const PlotSpec& spec = {},
                      const std::string& symbol = {});

}  // namespace lobviz
