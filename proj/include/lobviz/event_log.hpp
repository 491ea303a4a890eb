#pragma once

#include "lobviz/book.hpp"
#include "lobviz/contract.hpp"
#include "lobviz/message.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lobviz {

inline constexpr std::array<char, 4> kLogMagic{'L', 'O', 'B', 'L'};
inline constexpr std::uint16_t kLogVersion = 1;
inline constexpr std::uint32_t kDefaultCheckpointInterval = 10'000;

enum class BlockCodec : std::uint8_t { Identity = 0, Zlib = 1 };

struct EventLogOptions {
    std::uint32_t checkpoint_interval = kDefaultCheckpointInterval;
    /// 0 stores blocks verbatim; 1..9 deflates them at that zlib level.
    int compression_level = 0;
    /// Book-rebuild mode used for checkpoints, recorded in the header so readers
    /// replay the same way.
    Mode mode = Mode::Strict;
};

struct EventLogHeader {
    std::uint16_t version = kLogVersion;
    Mode mode = Mode::Strict;
    std::uint32_t checkpoint_interval = kDefaultCheckpointInterval;
    std::vector<ContractMeta> symbols;
};

struct BlockIndexEntry {
    std::uint64_t offset = 0;
    std::uint64_t first_seq = 0;
    Timestamp first_time;
    Timestamp last_time;
    std::uint32_t record_count = 0;

    bool operator==(const BlockIndexEntry&) const = default;
};

struct EventLogTrailer {
    std::vector<BlockIndexEntry> blocks;
    std::uint64_t total_records = 0;
};

/// Tracks bytes held in block buffers; `peak` is the high-water mark.
struct BufferStats {
    std::size_t current = 0;
    std::size_t peak = 0;

    void observe(std::size_t bytes) {
        current = bytes;
        if (bytes > peak) {
            peak = bytes;
        }
    }
};

/// Streams messages into the event-log format. Holds one block in memory.
class EventLogWriter {
public:
    EventLogWriter(std::ostream& out, std::vector<ContractMeta> symbols, EventLogOptions options = {});

    /// Throws OrderError when `msg` sorts before the previous message, Error for
    /// an unknown symbol, and ReconstructionError when the checkpoint book
    /// rejects the message.
    void append(const MarketMessage& msg);

    /// Flushes the open block and writes the trailer. Idempotent.
    void finish();

    std::uint64_t records() const { return total_records_; }
    std::uint64_t bytes_written() const { return bytes_written_; }
    std::size_t block_count() const { return index_.size(); }
    const BufferStats& buffers() const { return buffers_; }
    const std::vector<BookState>& books() const { return books_; }

private:
    void begin_block(const MarketMessage& first);
    void flush_block();
    void write(std::string_view bytes);

    std::ostream& out_;
    EventLogHeader header_;
    int compression_level_;
    std::unordered_map<std::string, std::uint16_t> symbol_index_;
    std::vector<BookState> books_;
    BookOptions book_options_;

    std::string block_;
    std::string stored_;
    BufferStats buffers_;
    std::uint32_t block_records_ = 0;
    std::uint64_t block_first_seq_ = 0;
    Timestamp block_first_time_;
    Timestamp block_last_time_;

    std::optional<MarketMessage> last_;
    std::uint16_t last_symbol_ = 0;
    std::int64_t prev_price_ = 0;

    std::vector<BlockIndexEntry> index_;
    std::uint64_t total_records_ = 0;
    std::uint64_t bytes_written_ = 0;
    bool finished_ = false;
};

/// Encodes a whole message sequence; symbols get placeholder metadata unless
/// supplied in `symbols`.
std::string write_segment(std::span<const MarketMessage> messages, std::uint32_t checkpoint_interval,
                          int compression_level, std::vector<ContractMeta> symbols = {});

struct EventLogReaderOptions {
    /// Replays every record and checks each block checkpoint against the
    /// replayed book.
    bool verify_checkpoints = false;
};

/// Reads an event log sequentially, one block in memory at a time. With
/// seek_window() it jumps to the nearest checkpoint before the window start via
/// the trailer index and replays from there.
class EventLogReader {
public:
    explicit EventLogReader(std::istream& in, EventLogReaderOptions options = {});

    const EventLogHeader& header() const { return header_; }

    /// Yields the next message. Throws FormatError for a corrupt or truncated
    /// block; after an error the reader stays exhausted.
    bool next(MarketMessage& out);

    /// Reads the trailer through the footer. Needs a seekable stream.
    const EventLogTrailer& trailer();

    /// Restricts output to start <= sending_time < end. Must be called before
    /// the first next().
    void seek_window(Timestamp start, Timestamp end);

    /// Book of symbol `index` just before the first message at or after the
    /// window start (the empty book without a window).
    const BookState& window_start_state(std::size_t index) const { return books_.at(index); }
    std::optional<std::size_t> symbol_index(std::string_view symbol) const;

    std::size_t blocks_loaded() const { return blocks_loaded_; }
    std::uint64_t records_replayed() const { return records_replayed_; }
    const BufferStats& buffers() const { return buffers_; }

private:
    bool load_block();
    void decode_record(MarketMessage& out);
    [[noreturn]] void corrupt(const std::string& why) const;

    std::istream& in_;
    EventLogReaderOptions options_;
    EventLogHeader header_;
    std::optional<EventLogTrailer> trailer_;
    std::vector<BookState> books_;
    std::vector<BookState> verify_books_;
    BookOptions book_options_;

    std::string stored_;
    std::string raw_;
    std::size_t cursor_ = 0;
    BufferStats buffers_;

    std::size_t next_block_ = 0;
    std::size_t current_block_ = 0;
    std::uint32_t block_remaining_ = 0;
    std::uint64_t prev_seq_ = 0;
    std::int64_t prev_time_ = 0;
    std::int64_t prev_price_ = 0;

    std::optional<MarketMessage> pending_;
    std::optional<Timestamp> window_end_;
    std::size_t blocks_loaded_ = 0;
    std::uint64_t records_replayed_ = 0;
    bool done_ = false;
};

/// True when `prefix` starts with the event-log magic.
bool is_event_log(std::string_view prefix);

}  // namespace lobviz
