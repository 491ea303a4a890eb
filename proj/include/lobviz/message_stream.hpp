#pragma once

#include "lobviz/book.hpp"
#include "lobviz/contract.hpp"
#include "lobviz/decoder.hpp"
#include "lobviz/event_log.hpp"
#include "lobviz/message.hpp"

#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lobviz {

/// Half-open time range [start, end).
struct TimeWindow {
    Timestamp start;
    Timestamp end;

    bool contains(Timestamp t) const { return start <= t && t < end; }
};

/// Pull-based source of messages in (sending_time, seq) order.
class MessageStream {
public:
    virtual ~MessageStream() = default;

    virtual bool next(MarketMessage& out) = 0;

    /// Book of `symbol` just before the first message this stream yields: the
    /// replayed pre-window state for windowed reads, the empty book otherwise.
    virtual BookState start_state(std::string_view symbol) const = 0;

    virtual const ContractRegistry& contracts() const = 0;
};

struct StreamOptions {
    std::optional<TimeWindow> window;
    /// Only yield messages of this symbol.
    std::optional<std::string> symbol;
    Mode mode = Mode::Strict;
    /// Metadata for tag-value input; definition records extend it.
    ContractRegistry contracts;
    Diagnostics* diagnostics = nullptr;
    EventLogReaderOptions log;
};

/// Opens `in` as an event log when it starts with the log magic, otherwise as
/// tag-value text. Event logs need a seekable stream for windowed reads.
std::unique_ptr<MessageStream> open_message_stream(std::unique_ptr<std::istream> in, StreamOptions options = {});
std::unique_ptr<MessageStream> open_message_file(const std::string& path, StreamOptions options = {});

/// Tag-value text, one entry per line. Blank lines and lines starting with '#'
/// are skipped. Sequence numbers count the records decoded so far.
class TagValueStream final : public MessageStream {
public:
    TagValueStream(std::istream& in, StreamOptions options);

    bool next(MarketMessage& out) override;
    BookState start_state(std::string_view symbol) const override;
    const ContractRegistry& contracts() const override { return decoder_.registry(); }

    std::uint64_t lines_read() const { return line_no_; }
    std::uint64_t bytes_read() const { return bytes_read_; }

private:
    std::istream& in_;
    StreamOptions options_;
    MessageDecoder decoder_;
    RawTagValueRecord record_;
    std::string line_;
    std::uint64_t line_no_ = 0;
    std::uint64_t bytes_read_ = 0;
    std::map<std::string, BookState, std::less<>> pre_window_;
    bool done_ = false;
};

class EventLogStream final : public MessageStream {
public:
    EventLogStream(std::istream& in, StreamOptions options);

    bool next(MarketMessage& out) override;
    BookState start_state(std::string_view symbol) const override;
    const ContractRegistry& contracts() const override { return contracts_; }

    EventLogReader& reader() { return reader_; }

private:
    EventLogReader reader_;
    StreamOptions options_;
    ContractRegistry contracts_;
};

/// In-memory source, mostly for tests and for merging precomputed series.
class VectorMessageStream final : public MessageStream {
public:
    explicit VectorMessageStream(std::vector<MarketMessage> messages, std::map<std::string, BookState, std::less<>> start = {})
        : messages_(std::move(messages)), start_(std::move(start)) {}

    bool next(MarketMessage& out) override;
    BookState start_state(std::string_view symbol) const override;
    const ContractRegistry& contracts() const override { return contracts_; }

private:
    std::vector<MarketMessage> messages_;
    std::map<std::string, BookState, std::less<>> start_;
    ContractRegistry contracts_;
    std::size_t pos_ = 0;
};

/// Reads every message of a stream into memory.
std::vector<MarketMessage> read_all(MessageStream& stream);

}  // namespace lobviz
