#include "lobviz/error.hpp"
#include "lobviz/frontdoor.hpp"
#include "lobviz/http.hpp"
#include "lobviz/synthetic.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <queue>

using namespace lobviz;

namespace {

/// Options shared by the query subcommands, kept as text so they reach the
/// service exactly as an HTTP query string would.
struct QueryFlags {
    std::optional<std::string> start, end, axis, interval, skip, panels, half_window, dt_bin, dp_bin, bin_width,
        max_columns, exclude, format;
    std::string output;

    Params params() const {
        Params p;
        auto put = [&](const char* key, const std::optional<std::string>& v) {
            if (v) p.emplace(key, *v);
        };
        put("start", start);
        put("end", end);
        put("axis", axis);
        put("interval", interval);
        put("skip", skip);
        put("panels", panels);
        put("half_window", half_window);
        put("dt_bin", dt_bin);
        put("dp_bin", dp_bin);
        put("bin_width", bin_width);
        put("max_columns", max_columns);
        put("exclude", exclude);
        put("format", format);
        return p;
    }
};

void add_window(CLI::App* cmd, QueryFlags& f) {
    cmd->add_option("--start", f.start, "Window start, ISO-8601 (default: first message)");
    cmd->add_option("--end", f.end, "Window end, exclusive (default: after the last message)");
    cmd->add_option("-o,--output", f.output, "Write to this file instead of stdout");
}

void add_format(CLI::App* cmd, QueryFlags& f, const std::string& help) {
    cmd->add_option("--format", f.format, help);
}

int emit(const Response& r, const std::string& output) {
    if (r.status != 200) {
        std::cerr << r.body;
        return r.status < 500 ? 2 : 1;
    }
    if (output.empty() || output == "-") {
        std::cout.write(r.body.data(), static_cast<std::streamsize>(r.body.size()));
        std::cout.flush();
    } else {
        std::ofstream out(output, std::ios::binary);
        out.write(r.body.data(), static_cast<std::streamsize>(r.body.size()));
        if (!out) {
            std::cerr << "cannot write " << output << "\n";
            return 1;
        }
    }
    return 0;
}

std::string need_store(const std::string& store) {
    if (store.empty()) throw Error("no store given; pass --store or set LOBVIZ_STORE");
    return store;
}

HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

std::string text_report(const IngestReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "messages        %llu\nsymbols         %zu\nbytes in        %llu\nbytes out       %llu\n"
                  "ratio           %.2f\nseconds         %.3f\nmessages/s      %.0f\nMB/s            %.1f\n"
                  "warnings        %llu\n",
                  static_cast<unsigned long long>(r.messages), r.per_symbol.size(),
                  static_cast<unsigned long long>(r.bytes_in), static_cast<unsigned long long>(r.bytes_out), r.ratio(),
                  r.seconds, r.messages_per_second(), r.megabytes_per_second(),
                  static_cast<unsigned long long>(r.warnings));
    std::string out = buf;
    for (const auto& [symbol, n] : r.per_symbol) out += "  " + symbol + "  " + std::to_string(n) + "\n";
    return out;
}

/// Writes tag-value text for one or more synthetic markets, interleaved by time.
void write_synthetic(std::ostream& out, const std::vector<std::string>& symbols, std::uint64_t messages,
                     std::uint64_t seed, double gap_ms) {
    struct Market {
        SyntheticFeed feed;
        ContractMeta meta;
        MarketMessage head;
    };
    std::vector<Market> markets;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        SyntheticConfig cfg;
        cfg.symbol = symbols[i];
        cfg.seed = seed + i;
        cfg.mean_gap_ms = gap_ms;
        markets.push_back(Market{SyntheticFeed(cfg), synthetic_meta(symbols[i]), {}});
        out << encode_definition(markets.back().meta, cfg.start) << '\n';
    }
    auto later = [&](std::size_t a, std::size_t b) {
        const auto& x = markets[a].head;
        const auto& y = markets[b].head;
        return x.sending_time != y.sending_time ? x.sending_time > y.sending_time : a > b;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> heads(later);
    for (std::size_t i = 0; i < markets.size(); ++i) {
        markets[i].head = markets[i].feed.next();
        heads.push(i);
    }
    for (std::uint64_t n = 0; n < messages && !heads.empty(); ++n) {
        const std::size_t i = heads.top();
        heads.pop();
        out << encode_entry(markets[i].head, markets[i].meta) << '\n';
        markets[i].head = markets[i].feed.next();
        heads.push(i);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limit order book toolkit: ingest market data, then query statistics and plots"};
    app.require_subcommand(1);
    std::string store;
    app.add_option("--store", store, "Store directory")->envname("LOBVIZ_STORE");
    std::uint64_t max_columns = kDefaultMaxColumns;
    app.add_option("--max-columns-default", max_columns, "Server-side column bound when a query gives none")
        ->envname("LOBVIZ_MAX_COLUMNS");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Convert tag-value text into a store");
    std::vector<std::string> inputs;
    bool strict = true;
    int level = 6;
    std::uint32_t checkpoint = kDefaultCheckpointInterval;
    std::string contracts_file, report_format = "text";
    bool overwrite = false;
    ingest->add_option("inputs", inputs, "Input files ('-' reads stdin)")->required();
    ingest->add_flag("--strict,!--tolerant", strict, "Reject (default) or repair invalid book updates");
    ingest->add_option("--level", level, "zlib level for blocks, 0 stores them raw")->check(CLI::Range(0, 9));
    ingest->add_option("--checkpoint", checkpoint, "Messages per block")->check(CLI::PositiveNumber);
    ingest->add_option("--contracts", contracts_file, "Contract metadata JSON");
    ingest->add_flag("--overwrite", overwrite, "Replace an existing store");
    ingest->add_option("--report", report_format, "text or json")->check(CLI::IsMember({"text", "json"}));

    // stats
    auto* stats = app.add_subcommand("stats", "Descriptive statistics of one contract");
    std::string stats_symbol;
    QueryFlags stats_flags;
    stats->add_option("symbol", stats_symbol)->required();
    add_window(stats, stats_flags);
    stats->add_option("--exclude", stats_flags.exclude, "Comma-separated dates left out of every statistic");
    add_format(stats, stats_flags, "table (default) or json");

    // plot
    auto* plot = app.add_subcommand("plot", "Heatmap view of one contract");
    std::string plot_symbol;
    QueryFlags plot_flags;
    plot->add_option("symbol", plot_symbol)->required();
    add_window(plot, plot_flags);
    plot->add_option("--axis", plot_flags.axis, "message or time");
    plot->add_option("--interval", plot_flags.interval, "Snapshot interval, e.g. 5s or 250ms");
    plot->add_option("--skip", plot_flags.skip, "Plot every n-th message (or snapshot)");
    plot->add_option("--panels", plot_flags.panels, "Comma list of panels, or none");
    plot->add_option("--max-columns", plot_flags.max_columns, "Raise skip so at most this many columns remain");
    add_format(plot, plot_flags, "svg, png or json (default)");

    // hist-rate
    auto* rate = app.add_subcommand("hist-rate", "Histogram of messages per second");
    std::string rate_symbol;
    QueryFlags rate_flags;
    rate->add_option("symbol", rate_symbol)->required();
    add_window(rate, rate_flags);
    rate->add_option("--bin-width", rate_flags.bin_width, "Messages per bar (default 20)");
    add_format(rate, rate_flags, "svg, png or json (default)");

    // trigger
    auto* trigger = app.add_subcommand("trigger", "Trades around each trade, by time and price offset");
    std::string trigger_symbol;
    QueryFlags trigger_flags;
    trigger->add_option("symbol", trigger_symbol)->required();
    add_window(trigger, trigger_flags);
    trigger->add_option("--half-window", trigger_flags.half_window, "Milliseconds on each side (default 50)");
    trigger->add_option("--dt-bin", trigger_flags.dt_bin, "Time bin in ms (default 1)");
    trigger->add_option("--dp-bin", trigger_flags.dp_bin, "Price bin in ticks (default 1)");
    add_format(trigger, trigger_flags, "svg, png or json (default)");

    // merge
    auto* merge = app.add_subcommand("merge", "Several contracts on one merged message axis");
    std::vector<std::string> merge_symbols;
    QueryFlags merge_flags;
    merge->add_option("symbols", merge_symbols)->required();
    add_window(merge, merge_flags);
    merge->add_option("--skip", merge_flags.skip, "Plot every n-th merged message");
    merge->add_option("--max-columns", merge_flags.max_columns, "Raise skip so at most this many columns remain");
    add_format(merge, merge_flags, "svg, png or json (default)");

    // serve
    auto* serve = app.add_subcommand("serve", "Read-only HTTP JSON API over a store");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host);
    serve->add_option("--port", port)->envname("LOBVIZ_PORT");

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic tag-value feed");
    std::string synth_out = "-";
    std::uint64_t synth_messages = 100'000, synth_seed = 1;
    double synth_gap = 5.0;
    std::vector<std::string> synth_symbols{"SYNZ5"};
    synth->add_option("-o,--output", synth_out, "Output file ('-' for stdout)");
    synth->add_option("-n,--messages", synth_messages, "Number of entries");
    synth->add_option("--seed", synth_seed);
    synth->add_option("--gap-ms", synth_gap, "Mean milliseconds between messages");
    synth->add_option("--symbol", synth_symbols, "Symbol(s); repeat for several markets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            IngestOptions options;
            options.mode = strict ? Mode::Strict : Mode::Tolerant;
            options.compression_level = level;
            options.checkpoint_interval = checkpoint;
            options.overwrite = overwrite;
            if (!contracts_file.empty()) options.contracts = ContractRegistry::from_json_file(contracts_file);
            Diagnostics diagnostics([](std::string_view w) { std::cerr << "warning: " << w << "\n"; });
            options.diagnostics = &diagnostics;
            IngestReport report;
            if (inputs.size() == 1 && inputs[0] == "-") {
                StreamOptions so;
                so.mode = options.mode;
                so.contracts = options.contracts;
                so.diagnostics = &diagnostics;
                TagValueStream in(std::cin, so);
                report = ingest_stream(in, 0, need_store(store), options);
                report.bytes_in = in.bytes_read();
            } else {
                report = ingest_files(inputs, need_store(store), options);
            }
            std::cout << (report_format == "json" ? dump(report.to_json()) : text_report(report));
            return 0;
        }
        if (*synth) {
            if (synth_out == "-") {
                write_synthetic(std::cout, synth_symbols, synth_messages, synth_seed, synth_gap);
            } else {
                std::ofstream out(synth_out, std::ios::binary);
                write_synthetic(out, synth_symbols, synth_messages, synth_seed, synth_gap);
                if (!out) throw Error("cannot write " + synth_out);
            }
            return 0;
        }

        const Store st(need_store(store));
        const Service service(st, ServiceOptions{max_columns});
        if (*stats) {
            if (!stats_flags.format || *stats_flags.format == "table") {
                auto flags = stats_flags;
                flags.format.reset();
                const auto q = QueryRequest::parse(flags.params(), max_columns);
                const auto s = service.compute_stats(stats_symbol, q);
                const auto& meta = st.entry(stats_symbol).meta;
                return emit(Response{200, "text/plain", stats_table(s, meta)}, stats_flags.output);
            }
            return emit(service.stats(stats_symbol, stats_flags.params()), stats_flags.output);
        }
        if (*plot) return emit(service.view(plot_symbol, plot_flags.params()), plot_flags.output);
        if (*rate) return emit(service.rate_histogram(rate_symbol, rate_flags.params()), rate_flags.output);
        if (*trigger) return emit(service.trigger(trigger_symbol, trigger_flags.params()), trigger_flags.output);
        if (*merge) {
            auto params = merge_flags.params();
            std::string joined;
            for (const auto& s : merge_symbols) joined += (joined.empty() ? "" : ",") + s;
            params.emplace("symbols", joined);
            return emit(service.merge(params), merge_flags.output);
        }
        if (*serve) {
            HttpServer server(service);
            const int bound = server.bind(host, port);
            std::cerr << "serving " << st.directory() << " on http://" << host << ":" << bound << "\n";
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.run();
            g_server = nullptr;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
