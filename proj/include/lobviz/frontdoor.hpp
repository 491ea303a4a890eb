#pragma once

#include "lobviz/contract.hpp"
#include "lobviz/diagnostics.hpp"
#include "lobviz/message_stream.hpp"
#include "lobviz/plot.hpp"
#include "lobviz/reconstruct.hpp"
#include "lobviz/viz.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lobviz {

inline constexpr std::uint64_t kDefaultMaxColumns = 100'000;
inline constexpr const char* kStoreExtension = ".lobl";

/// One symbol of a store, read from its event-log header and trailer.
struct CatalogEntry {
    ContractMeta meta;
    std::string path;
    Mode mode = Mode::Strict;
    std::uint64_t messages = 0;
    std::optional<Timestamp> first_time;
    std::optional<Timestamp> last_time;
    std::size_t blocks = 0;
    std::uint32_t checkpoint_interval = 0;
    std::uint64_t bytes = 0;
};

/// A write-once directory holding one event log per symbol.
class Store {
public:
    explicit Store(std::string directory);

    const std::string& directory() const { return directory_; }
    const std::vector<CatalogEntry>& catalog() const { return catalog_; }
    /// Throws NotFoundError for an unknown symbol.
    const CatalogEntry& entry(std::string_view symbol) const;

    std::unique_ptr<MessageStream> open(std::string_view symbol, std::optional<TimeWindow> window = {}) const;

private:
    std::string directory_;
    std::vector<CatalogEntry> catalog_;
};

/// Messages plus the reconstructed books of one symbol, kept alive together.
class SymbolReplay final : public StateStream {
public:
    SymbolReplay(const Store& store, std::string_view symbol, std::optional<TimeWindow> window = {});
    const StatePoint* next() override { return states_->next(); }
    const BookState& start_state() const override { return states_->start_state(); }
    MessageStream& messages() { return *messages_; }

private:
    std::unique_ptr<MessageStream> messages_;
    std::unique_ptr<Reconstructor> states_;
};

struct IngestOptions {
    Mode mode = Mode::Strict;
    int compression_level = 6;
    std::uint32_t checkpoint_interval = kDefaultCheckpointInterval;
    ContractRegistry contracts;
    /// Replace an existing store instead of failing.
    bool overwrite = false;
    Diagnostics* diagnostics = nullptr;
};

struct IngestReport {
    std::uint64_t messages = 0;
    std::map<std::string, std::uint64_t> per_symbol;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
    double seconds = 0;
    std::uint64_t warnings = 0;
    /// Peak bytes held in block buffers across all writers.
    std::size_t peak_buffer_bytes = 0;

    double ratio() const { return bytes_out ? static_cast<double>(bytes_in) / static_cast<double>(bytes_out) : 0.0; }
    double messages_per_second() const { return seconds > 0 ? static_cast<double>(messages) / seconds : 0.0; }
    double megabytes_per_second() const { return seconds > 0 ? static_cast<double>(bytes_in) / 1e6 / seconds : 0.0; }
    Json to_json() const;
};

/// Converts tag-value text (or event logs) into a store. Output is written to a
/// temporary directory beside `store_dir` and renamed into place only on
/// success, so a failed ingest leaves nothing behind.
IngestReport ingest_files(const std::vector<std::string>& inputs, const std::string& store_dir,
                          const IngestOptions& options);

/// Same for an already-open source; `bytes_in` is only used for the report.
IngestReport ingest_stream(MessageStream& source, std::uint64_t bytes_in, const std::string& store_dir,
                           const IngestOptions& options);

/// Query parameters as received over HTTP or assembled from CLI flags.
using Params = std::multimap<std::string, std::string>;

/// Validated request. Absent start/end mean the symbol's full range.
struct QueryRequest {
    std::vector<std::string> symbols;
    std::optional<Timestamp> start;
    std::optional<Timestamp> end;
    AxisMode axis = AxisMode::Message;
    std::int64_t interval_ms = 5000;
    std::uint64_t skip = 1;
    std::vector<Panel> panels = all_panels();
    std::int64_t half_window = 50;
    std::int64_t dt_bin = 1;
    std::int64_t dp_bin = 1;
    std::int64_t bin_width = 20;
    std::uint64_t max_columns = kDefaultMaxColumns;
    std::vector<Date> exclude;
    std::string format = "json";

    /// Throws QueryError naming the first bad or unknown parameter.
    static QueryRequest parse(const Params& params, std::uint64_t default_max_columns = kDefaultMaxColumns);
};

/// `5s`, `250ms`, `2m`, `1h` or a bare number of milliseconds.
std::int64_t parse_duration_ms(std::string_view text);

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ServiceOptions {
    std::uint64_t max_columns = kDefaultMaxColumns;
};

/// Read-only query layer shared by the HTTP server and the CLI, so both
/// produce the same bytes for the same parameters.
class Service {
public:
    Service(const Store& store, ServiceOptions options = {});

    /// Dispatches a GET path; errors become structured JSON responses.
    Response handle(std::string_view path, const Params& params) const;

    Response contracts() const;
    Response stats(std::string_view symbol, const Params& params) const;
    Response view(std::string_view symbol, const Params& params) const;
    Response trigger(std::string_view symbol, const Params& params) const;
    Response rate_histogram(std::string_view symbol, const Params& params) const;
    Response merge(const Params& params) const;

    /// The numbers behind stats(); throws instead of returning an error body.
    ContractStats compute_stats(std::string_view symbol, const QueryRequest& q) const;

    const Store& store() const { return store_; }
    const ServiceOptions& options() const { return options_; }

private:
    template <typename F>
    Response guarded(F&& f) const;
    TimeWindow window_of(const QueryRequest& q, const std::vector<std::string>& symbols) const;

    const Store& store_;
    ServiceOptions options_;
};

/// Structured error body: {"error": ..., "field"?: ..., "position"?: ...}.
Response error_response(int status, const std::string& message, const std::string& field = {},
                        std::optional<std::uint64_t> position = {});

}  // namespace lobviz
