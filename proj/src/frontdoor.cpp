#include "lobviz/frontdoor.hpp"

#include "lobviz/analytics.hpp"
#include "lobviz/error.hpp"
#include "lobviz/event_log.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace lobviz {

namespace {

std::string file_name_for(std::string_view symbol) {
    std::string out;
    for (char c : symbol) {
        const bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out += safe ? c : '_';
    }
    if (out.empty() || out[0] == '.') out.insert(out.begin(), '_');
    return out + kStoreExtension;
}

template <typename T>
T parse_number(std::string_view text, const std::string& field) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw QueryError(field + " must be an integer, got '" + std::string(text) + "'", field);
    }
    return value;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view item = text.substr(pos, comma - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.emplace_back(item);
        pos = comma + 1;
    }
    return out;
}

Timestamp parse_time_field(const std::string& text, const std::string& field) {
    try {
        return parse_iso8601(text);
    } catch (const Error& e) {
        throw QueryError(field + ": " + e.what(), field);
    }
}

Json catalog_json(const CatalogEntry& e) {
    Json j;
    j["symbol"] = e.meta.symbol;
    j["name"] = e.meta.display_name;
    j["tick_size"] = e.meta.tick_size();
    j["book_depth"] = e.meta.book_depth;
    j["dollar_multiplier"] = e.meta.dollar_multiplier;
    j["expiry"] = e.meta.expiry ? Json(format_date(*e.meta.expiry)) : Json(nullptr);
    j["messages"] = e.messages;
    j["first_time"] = e.first_time ? Json(format_iso8601(*e.first_time)) : Json(nullptr);
    j["last_time"] = e.last_time ? Json(format_iso8601(*e.last_time)) : Json(nullptr);
    j["blocks"] = e.blocks;
    j["checkpoint_interval"] = e.checkpoint_interval;
    j["bytes"] = e.bytes;
    j["mode"] = e.mode == Mode::Strict ? "strict" : "tolerant";
    return j;
}

Response json_response(const Json& j) { return Response{200, "application/json", dump(j)}; }

/// Writes one event log per symbol into a scratch directory.
class StoreBuilder {
public:
    StoreBuilder(const std::string& store_dir, const IngestOptions& options)
        : store_(store_dir), options_(options), diagnostics_(options.diagnostics ? options.diagnostics : &local_) {
        if (fs::exists(store_) && !options_.overwrite) {
            throw Error("store " + store_.string() + " already exists");
        }
        tmp_ = store_;
        tmp_ += ".partial-" + std::to_string(::getpid());
        fs::remove_all(tmp_);
        fs::create_directories(tmp_);
        started_ = std::chrono::steady_clock::now();
    }

    ~StoreBuilder() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(tmp_, ec);
        }
    }

    StreamOptions stream_options() const {
        StreamOptions s;
        s.mode = options_.mode;
        s.contracts = options_.contracts;
        s.diagnostics = diagnostics_;
        return s;
    }

    void add(MessageStream& source) {
        MarketMessage msg;
        while (source.next(msg)) {
            // Definitions live in the log header, not in the event stream.
            if (msg.kind == MessageKind::Definition) continue;
            writer_for(msg.symbol, source.contracts()).append(msg);
            ++report_.messages;
            ++report_.per_symbol[msg.symbol];
        }
    }

    IngestReport commit(std::uint64_t bytes_in) {
        for (auto& [symbol, out] : writers_) {
            out.writer->finish();
            out.file->flush();
            if (!*out.file) throw Error("write failed for " + symbol);
            out.file->close();
            report_.bytes_out += out.writer->bytes_written();
            report_.peak_buffer_bytes = std::max(report_.peak_buffer_bytes, out.writer->buffers().peak);
        }
        if (fs::exists(store_)) fs::remove_all(store_);
        fs::rename(tmp_, store_);
        committed_ = true;
        report_.bytes_in = bytes_in;
        report_.warnings = diagnostics_->warnings();
        report_.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        return report_;
    }

private:
    struct Output {
        std::unique_ptr<std::ofstream> file;
        std::unique_ptr<EventLogWriter> writer;
    };

    EventLogWriter& writer_for(const std::string& symbol, const ContractRegistry& seen) {
        auto it = writers_.find(symbol);
        if (it != writers_.end()) return *it->second.writer;
        ContractMeta meta = ContractMeta::placeholder(symbol);
        if (const auto* m = seen.find(symbol)) {
            meta = *m;
        } else if (const auto* m2 = options_.contracts.find(symbol)) {
            meta = *m2;
        }
        Output out;
        out.file = std::make_unique<std::ofstream>(tmp_ / file_name_for(symbol), std::ios::binary);
        if (!*out.file) throw Error("cannot create store file for " + symbol);
        EventLogOptions log;
        log.checkpoint_interval = options_.checkpoint_interval;
        log.compression_level = options_.compression_level;
        log.mode = options_.mode;
        out.writer = std::make_unique<EventLogWriter>(*out.file, std::vector<ContractMeta>{meta}, log);
        return *writers_.emplace(symbol, std::move(out)).first->second.writer;
    }

    fs::path store_;
    fs::path tmp_;
    IngestOptions options_;
    Diagnostics local_;
    Diagnostics* diagnostics_;
    std::map<std::string, Output> writers_;
    IngestReport report_;
    std::chrono::steady_clock::time_point started_;
    bool committed_ = false;
};

}  // namespace

// ---------------------------------------------------------------------------

Store::Store(std::string directory) : directory_(std::move(directory)) {
    if (!fs::is_directory(directory_)) {
        throw Error("store directory " + directory_ + " does not exist");
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(directory_)) {
        if (e.is_regular_file() && e.path().extension() == kStoreExtension) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        EventLogReader reader(in);
        const auto& header = reader.header();
        if (header.symbols.empty()) continue;
        const auto& trailer = reader.trailer();
        CatalogEntry entry;
        entry.meta = header.symbols.front();
        entry.path = path.string();
        entry.mode = header.mode;
        entry.messages = trailer.total_records;
        entry.blocks = trailer.blocks.size();
        entry.checkpoint_interval = header.checkpoint_interval;
        entry.bytes = fs::file_size(path);
        if (!trailer.blocks.empty()) {
            entry.first_time = trailer.blocks.front().first_time;
            entry.last_time = trailer.blocks.back().last_time;
        }
        catalog_.push_back(std::move(entry));
    }
    std::sort(catalog_.begin(), catalog_.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) { return a.meta.symbol < b.meta.symbol; });
}

const CatalogEntry& Store::entry(std::string_view symbol) const {
    for (const auto& e : catalog_) {
        if (e.meta.symbol == symbol) return e;
    }
    throw NotFoundError("unknown symbol '" + std::string(symbol) + "'");
}

std::unique_ptr<MessageStream> Store::open(std::string_view symbol, std::optional<TimeWindow> window) const {
    const auto& e = entry(symbol);
    StreamOptions options;
    options.window = window;
    options.symbol = std::string(symbol);
    options.mode = e.mode;
    return open_message_file(e.path, std::move(options));
}

SymbolReplay::SymbolReplay(const Store& store, std::string_view symbol, std::optional<TimeWindow> window)
    : messages_(store.open(symbol, window)) {
    BookOptions book;
    book.mode = store.entry(symbol).mode;
    states_ = std::make_unique<Reconstructor>(*messages_, messages_->start_state(symbol), book);
}

// ---------------------------------------------------------------------------

Json IngestReport::to_json() const {
    Json j;
    j["messages"] = messages;
    j["symbols"] = Json::object();
    for (const auto& [s, n] : per_symbol) j["symbols"][s] = n;
    j["bytes_in"] = bytes_in;
    j["bytes_out"] = bytes_out;
    j["compression_ratio"] = ratio();
    j["seconds"] = seconds;
    j["messages_per_second"] = messages_per_second();
    j["megabytes_per_second"] = megabytes_per_second();
    j["warnings"] = warnings;
    j["peak_buffer_bytes"] = peak_buffer_bytes;
    return j;
}

IngestReport ingest_files(const std::vector<std::string>& inputs, const std::string& store_dir,
                          const IngestOptions& options) {
    StoreBuilder builder(store_dir, options);
    std::uint64_t bytes_in = 0;
    for (const auto& path : inputs) {
        bytes_in += fs::file_size(path);
        auto stream = open_message_file(path, builder.stream_options());
        builder.add(*stream);
    }
    return builder.commit(bytes_in);
}

IngestReport ingest_stream(MessageStream& source, std::uint64_t bytes_in, const std::string& store_dir,
                           const IngestOptions& options) {
    StoreBuilder builder(store_dir, options);
    builder.add(source);
    return builder.commit(bytes_in);
}

// ---------------------------------------------------------------------------

std::int64_t parse_duration_ms(std::string_view text) {
    std::size_t digits = 0;
    while (digits < text.size() && text[digits] >= '0' && text[digits] <= '9') ++digits;
    if (digits == 0) throw QueryError("interval must look like 5s, 250ms or 5000", "interval");
    const auto value = parse_number<std::int64_t>(text.substr(0, digits), "interval");
    const std::string_view unit = text.substr(digits);
    if (unit.empty() || unit == "ms") return value;
    if (unit == "s") return value * 1000;
    if (unit == "m") return value * 60'000;
    if (unit == "h") return value * 3'600'000;
    throw QueryError("unknown interval unit '" + std::string(unit) + "'", "interval");
}

QueryRequest QueryRequest::parse(const Params& params, std::uint64_t default_max_columns) {
    QueryRequest q;
    q.max_columns = default_max_columns;
    for (const auto& [key, value] : params) {
        if (key == "symbols" || key == "symbol") {
            for (auto& s : split_list(value)) q.symbols.push_back(std::move(s));
        } else if (key == "start") {
            q.start = parse_time_field(value, key);
        } else if (key == "end") {
            q.end = parse_time_field(value, key);
        } else if (key == "axis") {
            q.axis = parse_axis_mode(value);
        } else if (key == "interval") {
            q.interval_ms = parse_duration_ms(value);
        } else if (key == "skip") {
            q.skip = parse_number<std::uint64_t>(value, key);
        } else if (key == "panels") {
            q.panels.clear();
            if (value != "none") {
                for (const auto& p : split_list(value)) q.panels.push_back(parse_panel(p));
            }
        } else if (key == "half_window") {
            q.half_window = parse_number<std::int64_t>(value, key);
        } else if (key == "dt_bin") {
            q.dt_bin = parse_number<std::int64_t>(value, key);
        } else if (key == "dp_bin") {
            q.dp_bin = parse_number<std::int64_t>(value, key);
        } else if (key == "bin_width") {
            q.bin_width = parse_number<std::int64_t>(value, key);
        } else if (key == "max_columns") {
            q.max_columns = parse_number<std::uint64_t>(value, key);
        } else if (key == "exclude") {
            for (const auto& d : split_list(value)) {
                try {
                    q.exclude.push_back(parse_date(d));
                } catch (const Error& e) {
                    throw QueryError(std::string("exclude: ") + e.what(), key);
                }
            }
        } else if (key == "format") {
            q.format = value;
        } else {
            throw QueryError("unknown parameter '" + key + "'", key);
        }
    }
    if (q.start && q.end && !(*q.start < *q.end)) throw QueryError("start must be before end", "start");
    if (q.skip < 1) throw QueryError("skip must be at least 1", "skip");
    if (q.interval_ms < 1) throw QueryError("interval must be at least 1 ms", "interval");
    if (q.half_window < 0) throw QueryError("half_window must not be negative", "half_window");
    if (q.dt_bin < 1) throw QueryError("dt_bin must be at least 1", "dt_bin");
    if (q.dp_bin < 1) throw QueryError("dp_bin must be at least 1", "dp_bin");
    if (q.bin_width < 1) throw QueryError("bin_width must be at least 1", "bin_width");
    if (q.max_columns < 1) throw QueryError("max_columns must be at least 1", "max_columns");
    return q;
}

// ---------------------------------------------------------------------------

Response error_response(int status, const std::string& message, const std::string& field,
                        std::optional<std::uint64_t> position) {
    Json j;
    j["error"] = message;
    if (!field.empty()) j["field"] = field;
    if (position) j["position"] = *position;
    return Response{status, "application/json", dump(j)};
}

Service::Service(const Store& store, ServiceOptions options) : store_(store), options_(options) {}

template <typename F>
Response Service::guarded(F&& f) const {
    try {
        return f();
    } catch (const QueryError& e) {
        return error_response(400, e.what(), e.field());
    } catch (const NotFoundError& e) {
        return error_response(404, e.what());
    } catch (const EmptyWindowError& e) {
        return error_response(422, e.what());
    } catch (const ReconstructionError& e) {
        return error_response(500, e.what(), {}, e.seq());
    } catch (const ParseError& e) {
        return error_response(500, e.what(), {}, e.line() ? *e.line() : e.offset());
    } catch (const FormatError& e) {
        return error_response(500, e.what(), {}, e.block());
    } catch (const std::exception& e) {
        return error_response(500, e.what());
    }
}

TimeWindow Service::window_of(const QueryRequest& q, const std::vector<std::string>& symbols) const {
    std::optional<Timestamp> first, last;
    for (const auto& s : symbols) {
        const auto& e = store_.entry(s);
        if (e.first_time && (!first || *e.first_time < *first)) first = e.first_time;
        if (e.last_time && (!last || *e.last_time > *last)) last = e.last_time;
    }
    TimeWindow w;
    if (q.start) {
        w.start = *q.start;
    } else if (first) {
        w.start = *first;
    } else {
        throw EmptyWindowError("no messages in window");
    }
    if (q.end) {
        w.end = *q.end;
    } else if (last) {
        w.end = Timestamp{last->ms + 1};
    } else {
        throw EmptyWindowError("no messages in window");
    }
    if (!(w.start < w.end)) throw QueryError("start must be before end", q.start ? "start" : "end");
    return w;
}

Response Service::handle(std::string_view path, const Params& params) const {
    if (path == "/contracts") return contracts();
    if (path == "/merge") return merge(params);
    constexpr std::string_view prefix = "/contracts/";
    if (path.substr(0, prefix.size()) == prefix) {
        const std::string_view rest = path.substr(prefix.size());
        const auto slash = rest.find('/');
        if (slash != std::string_view::npos && slash > 0) {
            const std::string_view symbol = rest.substr(0, slash);
            const std::string_view what = rest.substr(slash + 1);
            if (what == "stats") return stats(symbol, params);
            if (what == "view") return view(symbol, params);
            if (what == "trigger") return trigger(symbol, params);
            if (what == "rate-histogram") return rate_histogram(symbol, params);
        }
    }
    return error_response(404, "no such endpoint: " + std::string(path));
}

Response Service::contracts() const {
    return guarded([&] {
        Json j;
        j["contracts"] = Json::array();
        for (const auto& e : store_.catalog()) j["contracts"].push_back(catalog_json(e));
        return json_response(j);
    });
}

ContractStats Service::compute_stats(std::string_view symbol, const QueryRequest& q) const {
    const auto& e = store_.entry(symbol);
    std::optional<TimeWindow> window;
    if (q.start || q.end) window = window_of(q, {std::string(symbol)});
    SymbolReplay replay(store_, symbol, window);
    return contract_stats(replay, e.meta, q.exclude);
}

Response Service::stats(std::string_view symbol, const Params& params) const {
    return guarded([&] {
        const auto q = QueryRequest::parse(params, options_.max_columns);
        if (q.format != "json") throw QueryError("stats are only available as json", "format");
        return json_response(stats_json(compute_stats(symbol, q), store_.entry(symbol).meta));
    });
}

Response Service::view(std::string_view symbol, const Params& params) const {
    return guarded([&] {
        const auto q = QueryRequest::parse(params, options_.max_columns);
        const Format format = parse_format(q.format);
        const auto& e = store_.entry(symbol);
        const TimeWindow w = window_of(q, {std::string(symbol)});
        WindowSpec spec;
        spec.start = w.start;
        spec.end = w.end;
        spec.axis = q.axis;
        spec.snapshot_interval_ms = q.interval_ms;
        spec.skip = q.skip;
        spec.panels = q.panels;
        spec.validate();

        SymbolReplay scan(store_, symbol, w);
        const PriceBounds bounds = scan_bounds(scan, spec);
        const std::uint64_t skip = effective_skip(bounds.columns, q.skip, q.max_columns);
        WindowSpec fill_spec = spec;
        fill_spec.skip = skip;
        SymbolReplay fill(store_, symbol, w);
        ViewBundle bundle = build_view(fill, e.meta, fill_spec, bounds);
        bundle.requested_skip = q.skip;
        bundle.effective_skip = skip;
        if (format == Format::Json) {
            Json j = view_json(bundle);
            j["meta"]["max_columns"] = q.max_columns;
            return json_response(j);
        }
        return Response{200, std::string(content_type(format)), emit_plot(bundle, format)};
    });
}

Response Service::trigger(std::string_view symbol, const Params& params) const {
    return guarded([&] {
        const auto q = QueryRequest::parse(params, options_.max_columns);
        const Format format = parse_format(q.format);
        store_.entry(symbol);
        const TimeWindow w = window_of(q, {std::string(symbol)});
        auto stream = store_.open(symbol, w);
        const auto trades = collect_trades(*stream);
        const auto hist = trigger_impact(trades, q.half_window, q.dt_bin, q.dp_bin);
        if (format == Format::Json) {
            Json j = trigger_json(hist, std::string(symbol), w.start, w.end);
            j["meta"]["empty"] = trades.empty();
            return json_response(j);
        }
        return Response{200, std::string(content_type(format)),
                        emit_plot(hist, format, {}, std::string(symbol), w.start, w.end)};
    });
}

Response Service::rate_histogram(std::string_view symbol, const Params& params) const {
    return guarded([&] {
        const auto q = QueryRequest::parse(params, options_.max_columns);
        const Format format = parse_format(q.format);
        store_.entry(symbol);
        std::optional<TimeWindow> window;
        if (q.start || q.end) window = window_of(q, {std::string(symbol)});
        auto stream = store_.open(symbol, window);
        const auto hist = lobviz::rate_histogram(*stream, q.bin_width);
        if (format == Format::Json) return json_response(rate_json(hist, std::string(symbol)));
        return Response{200, std::string(content_type(format)), emit_plot(hist, format, {}, std::string(symbol))};
    });
}

Response Service::merge(const Params& params) const {
    return guarded([&] {
        const auto q = QueryRequest::parse(params, options_.max_columns);
        const Format format = parse_format(q.format);
        if (q.symbols.empty()) throw QueryError("symbols is required", "symbols");
        std::vector<ContractMeta> metas;
        for (const auto& s : q.symbols) metas.push_back(store_.entry(s).meta);
        const TimeWindow w = window_of(q, q.symbols);
        MergeReplay replay = [&](const std::function<void(const MergedColumn&)>& visit) {
            std::vector<std::unique_ptr<SymbolReplay>> markets;
            std::vector<StateStream*> streams;
            for (const auto& s : q.symbols) {
                markets.push_back(std::make_unique<SymbolReplay>(store_, s, w));
                streams.push_back(markets.back().get());
            }
            MergeCursor cursor(streams);
            while (const MergedColumn* c = cursor.next()) visit(*c);
        };
        const MergeBundle bundle = build_merge_view(replay, metas, w.start, w.end, q.skip, q.max_columns);
        if (format == Format::Json) {
            Json j = merge_json(bundle);
            j["meta"]["max_columns"] = q.max_columns;
            return json_response(j);
        }
        return Response{200, std::string(content_type(format)), emit_plot(bundle, format)};
    });
}

}  // namespace lobviz
