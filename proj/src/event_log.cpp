#include "lobviz/event_log.hpp"

#include "byte_io.hpp"
#include "lobviz/error.hpp"

#include <zlib.h>

#include <istream>
#include <ostream>
#include <sstream>

namespace lobviz {

using namespace detail;

namespace {

constexpr std::string_view kBlockTag = "BLK1";
constexpr std::string_view kTrailerTag = "LOBT";
constexpr std::string_view kFooterTag = "LOBE";
constexpr std::size_t kBlockHeaderSize = 45;  // tag included
constexpr std::size_t kFooterSize = 12;
constexpr std::uint32_t kMaxBlockBytes = 1u << 28;

constexpr std::uint8_t kHasStatistic = 0x40;

std::uint32_t crc_of(std::string_view bytes) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::uint32_t encode_date(const std::optional<Date>& d) {
    if (!d) {
        return 0;
    }
    return static_cast<std::uint32_t>(static_cast<int>(d->year()) * 10000 +
                                      static_cast<int>(static_cast<unsigned>(d->month())) * 100 +
                                      static_cast<int>(static_cast<unsigned>(d->day())));
}

std::optional<Date> decode_date(std::uint32_t v) {
    if (v == 0) {
        return std::nullopt;
    }
    return Date{std::chrono::year{static_cast<int>(v / 10000)}, std::chrono::month{v / 100 % 100},
                std::chrono::day{v % 100}};
}

void put_book(std::string& out, std::uint16_t index, const BookState& book) {
    put_u16be(out, index);
    put_u8(out, static_cast<std::uint8_t>((book.initialized ? 1 : 0) | (book.crossed ? 2 : 0)));
    put_u64be(out, book.last_seq);
    put_i64be(out, book.last_time.ms);
    put_u8(out, static_cast<std::uint8_t>(book.bids.size()));
    put_u8(out, static_cast<std::uint8_t>(book.asks.size()));
    for (const auto* ladder : {&book.bids, &book.asks}) {
        for (const auto& level : ladder->levels()) {
            put_i64be(out, level.price);
            put_i64be(out, level.quantity);
        }
    }
}

}  // namespace

bool is_event_log(std::string_view prefix) {
    return prefix.size() >= kLogMagic.size() && std::string_view(kLogMagic.data(), kLogMagic.size()) == prefix.substr(0, 4);
}

// ---------------------------------------------------------------------------
// Writer

EventLogWriter::EventLogWriter(std::ostream& out, std::vector<ContractMeta> symbols, EventLogOptions options)
    : out_(out), compression_level_(options.compression_level) {
    if (options.checkpoint_interval < 1) {
        throw Error("checkpoint interval must be at least 1");
    }
    if (compression_level_ < 0 || compression_level_ > 9) {
        throw Error("compression level must be within [0, 9]");
    }
    if (symbols.size() > 0xFFFF) {
        throw Error("too many symbols for one event log");
    }
    header_.mode = options.mode;
    header_.checkpoint_interval = options.checkpoint_interval;
    header_.symbols = std::move(symbols);
    for (std::size_t i = 0; i < header_.symbols.size(); ++i) {
        header_.symbols[i].validate();
        if (!symbol_index_.emplace(header_.symbols[i].symbol, static_cast<std::uint16_t>(i)).second) {
            throw Error("duplicate symbol " + header_.symbols[i].symbol + " in event log header");
        }
    }
    books_.resize(header_.symbols.size());
    book_options_.mode = options.mode;

    std::string head(kLogMagic.data(), kLogMagic.size());
    put_u16be(head, kLogVersion);
    put_u8(head, static_cast<std::uint8_t>(header_.mode));
    put_u32be(head, header_.checkpoint_interval);
    put_u16be(head, static_cast<std::uint16_t>(header_.symbols.size()));
    for (const auto& meta : header_.symbols) {
        put_bytes16(head, meta.symbol);
        put_bytes16(head, meta.display_name);
        put_i64be(head, meta.tick_size_nanos);
        put_u8(head, static_cast<std::uint8_t>(meta.book_depth));
        put_u32be(head, encode_date(meta.expiry));
        put_f64be(head, meta.dollar_multiplier);
    }
    put_u32be(head, crc_of(std::string_view(head).substr(4)));
    write(head);
}

void EventLogWriter::write(std::string_view bytes) {
    out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out_) {
        throw Error("event log write failed");
    }
    bytes_written_ += bytes.size();
}

void EventLogWriter::append(const MarketMessage& msg) {
    if (finished_) {
        throw Error("append after finish");
    }
    if (last_ && stream_before(msg, *last_)) {
        throw OrderError("message seq " + std::to_string(msg.seq) + " at " + format_iso8601(msg.sending_time) +
                             " is out of (sending_time, seq) order",
                         msg.seq);
    }
    if (msg.quantity < 0) {
        throw Error("message seq " + std::to_string(msg.seq) + " has a negative quantity");
    }
    std::uint16_t symbol = last_symbol_;
    if (!last_ || msg.symbol != last_->symbol) {
        auto it = symbol_index_.find(msg.symbol);
        if (it == symbol_index_.end()) {
            throw Error("symbol " + msg.symbol + " is not in the event log header");
        }
        symbol = it->second;
    }
    // Reject before encoding so a failed append leaves the log unchanged.
    BookState next = books_[symbol];
    book_options_.depth = static_cast<std::size_t>(header_.symbols[symbol].book_depth);
    apply_message(next, msg, book_options_);

    if (block_records_ == header_.checkpoint_interval) {
        flush_block();
    }
    if (block_records_ == 0) {
        begin_block(msg);
    }

    const std::int64_t seq_delta = static_cast<std::int64_t>(msg.seq - (last_ && block_records_ ? last_->seq : block_first_seq_));
    const std::int64_t time_base = last_ && block_records_ ? last_->sending_time.ms : block_first_time_.ms;
    std::uint8_t head = static_cast<std::uint8_t>(static_cast<std::uint8_t>(msg.kind) |
                                                  (static_cast<std::uint8_t>(msg.action) << 3) |
                                                  (static_cast<std::uint8_t>(msg.side) << 5));
    if (msg.statistic) {
        head |= kHasStatistic;
    }
    put_u8(block_, head);
    put_uvarint(block_, symbol);
    put_svarint(block_, seq_delta);
    put_uvarint(block_, static_cast<std::uint64_t>(msg.sending_time.ms - time_base));
    put_u8(block_, msg.level);
    put_svarint(block_, msg.price - prev_price_);
    put_uvarint(block_, static_cast<std::uint64_t>(msg.quantity));
    if (msg.statistic) {
        put_u8(block_, static_cast<std::uint8_t>(msg.statistic->code));
        put_u8(block_, msg.statistic->other);
    }

    books_[symbol] = next;
    prev_price_ = msg.price;
    block_last_time_ = msg.sending_time;
    ++block_records_;
    ++total_records_;
    last_symbol_ = symbol;
    last_ = msg;
    buffers_.observe(block_.capacity() + stored_.capacity());
}

void EventLogWriter::begin_block(const MarketMessage& first) {
    block_.clear();
    block_first_seq_ = first.seq;
    block_first_time_ = first.sending_time;
    prev_price_ = 0;
    put_u16be(block_, static_cast<std::uint16_t>(books_.size()));
    for (std::size_t i = 0; i < books_.size(); ++i) {
        put_book(block_, static_cast<std::uint16_t>(i), books_[i]);
    }
}

void EventLogWriter::flush_block() {
    if (block_records_ == 0) {
        return;
    }
    BlockCodec codec = BlockCodec::Identity;
    std::string_view payload = block_;
    if (compression_level_ > 0) {
        uLongf bound = compressBound(static_cast<uLong>(block_.size()));
        stored_.resize(bound);
        const int rc = compress2(reinterpret_cast<Bytef*>(stored_.data()), &bound,
                                 reinterpret_cast<const Bytef*>(block_.data()), static_cast<uLong>(block_.size()),
                                 compression_level_);
        if (rc != Z_OK) {
            throw Error("zlib compression failed");
        }
        stored_.resize(bound);
        if (stored_.size() < block_.size()) {
            codec = BlockCodec::Zlib;
            payload = stored_;
        }
    }
    buffers_.observe(block_.capacity() + stored_.capacity());

    std::string head(kBlockTag);
    put_u8(head, static_cast<std::uint8_t>(codec));
    put_u32be(head, block_records_);
    put_u64be(head, block_first_seq_);
    put_i64be(head, block_first_time_.ms);
    put_i64be(head, block_last_time_.ms);
    put_u32be(head, static_cast<std::uint32_t>(block_.size()));
    put_u32be(head, static_cast<std::uint32_t>(payload.size()));
    put_u32be(head, crc_of(payload));

    index_.push_back(BlockIndexEntry{bytes_written_, block_first_seq_, block_first_time_, block_last_time_, block_records_});
    write(head);
    write(payload);
    block_.clear();
    block_records_ = 0;
}

void EventLogWriter::finish() {
    if (finished_) {
        return;
    }
    flush_block();
    const std::uint64_t trailer_offset = bytes_written_;
    std::string trailer(kTrailerTag);
    put_u32be(trailer, static_cast<std::uint32_t>(index_.size()));
    for (const auto& entry : index_) {
        put_u64be(trailer, entry.offset);
        put_u64be(trailer, entry.first_seq);
        put_i64be(trailer, entry.first_time.ms);
        put_i64be(trailer, entry.last_time.ms);
        put_u32be(trailer, entry.record_count);
    }
    put_u64be(trailer, total_records_);
    put_u32be(trailer, crc_of(trailer));
    put_u64be(trailer, trailer_offset);
    trailer.append(kFooterTag);
    write(trailer);
    out_.flush();
    finished_ = true;
}

std::string write_segment(std::span<const MarketMessage> messages, std::uint32_t checkpoint_interval,
                          int compression_level, std::vector<ContractMeta> symbols) {
    std::vector<ContractMeta> table;
    for (const auto& msg : messages) {
        bool seen = false;
        for (const auto& m : table) {
            if (m.symbol == msg.symbol) {
                seen = true;
                break;
            }
        }
        if (seen) {
            continue;
        }
        ContractMeta meta = ContractMeta::placeholder(msg.symbol);
        for (const auto& given : symbols) {
            if (given.symbol == msg.symbol) {
                meta = given;
            }
        }
        table.push_back(std::move(meta));
    }
    std::ostringstream out;
    EventLogOptions options;
    options.checkpoint_interval = checkpoint_interval;
    options.compression_level = compression_level;
    EventLogWriter writer(out, std::move(table), options);
    for (const auto& msg : messages) {
        writer.append(msg);
    }
    writer.finish();
    return std::move(out).str();
}

// ---------------------------------------------------------------------------
// Reader

void EventLogReader::corrupt(const std::string& why) const {
    throw FormatError("event log block " + std::to_string(current_block_) + ": " + why, current_block_);
}

EventLogReader::EventLogReader(std::istream& in, EventLogReaderOptions options) : in_(in), options_(options) {
    std::string head;
    auto read_exact = [&](std::size_t n) {
        const std::size_t at = head.size();
        head.resize(at + n);
        in_.read(head.data() + at, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw FormatError("event log header truncated", 0);
        }
        return std::string_view(head).substr(at, n);
    };
    auto fail = [](const char* why) { throw FormatError(std::string("event log header: ") + why, 0); };

    if (!is_event_log(read_exact(4))) {
        throw FormatError("not an event log (bad magic)", 0);
    }
    {
        Cursor c(read_exact(2 + 1 + 4 + 2), fail);
        header_.version = c.u16be();
        if (header_.version != kLogVersion) {
            throw FormatError("unsupported event log version " + std::to_string(header_.version), 0);
        }
        const auto mode = c.u8();
        if (mode > 1) {
            fail("bad mode");
        }
        header_.mode = static_cast<Mode>(mode);
        header_.checkpoint_interval = c.u32be();
        header_.symbols.resize(c.u16be());
    }
    for (auto& meta : header_.symbols) {
        meta.symbol = std::string(read_exact(Cursor(read_exact(2), fail).u16be()));
        meta.display_name = std::string(read_exact(Cursor(read_exact(2), fail).u16be()));
        Cursor c(read_exact(8 + 1 + 4 + 8), fail);
        meta.tick_size_nanos = c.i64be();
        meta.book_depth = c.u8();
        meta.expiry = decode_date(c.u32be());
        meta.dollar_multiplier = c.f64be();
    }
    const std::uint32_t expected = crc_of(std::string_view(head).substr(4));
    if (Cursor(read_exact(4), fail).u32be() != expected) {
        throw FormatError("event log header checksum mismatch", 0);
    }
    books_.resize(header_.symbols.size());
    book_options_.mode = header_.mode;
}

std::optional<std::size_t> EventLogReader::symbol_index(std::string_view symbol) const {
    for (std::size_t i = 0; i < header_.symbols.size(); ++i) {
        if (header_.symbols[i].symbol == symbol) {
            return i;
        }
    }
    return std::nullopt;
}

bool EventLogReader::load_block() {
    current_block_ = next_block_;
    char head[kBlockHeaderSize];
    in_.read(head, 4);
    const auto got = static_cast<std::size_t>(in_.gcount());
    if (got == 0) {
        corrupt("missing trailer (file truncated after the last complete block)");
    }
    if (got < 4) {
        corrupt("truncated block header");
    }
    const std::string_view tag(head, 4);
    if (tag == kTrailerTag) {
        done_ = true;
        return false;
    }
    if (tag != kBlockTag) {
        corrupt("bad block marker");
    }
    in_.read(head + 4, kBlockHeaderSize - 4);
    if (static_cast<std::size_t>(in_.gcount()) != kBlockHeaderSize - 4) {
        corrupt("truncated block header");
    }
    Cursor c(std::string_view(head + 4, kBlockHeaderSize - 4), [this](const char* why) { corrupt(why); });
    const auto codec = c.u8();
    const auto record_count = c.u32be();
    const auto first_seq = c.u64be();
    const auto first_time = c.i64be();
    c.i64be();  // last time, only needed by the index
    const auto raw_len = c.u32be();
    const auto stored_len = c.u32be();
    const auto crc = c.u32be();
    if (raw_len > kMaxBlockBytes || stored_len > kMaxBlockBytes) {
        corrupt("block length out of range");
    }
    stored_.resize(stored_len);
    in_.read(stored_.data(), stored_len);
    if (static_cast<std::size_t>(in_.gcount()) != stored_len) {
        corrupt("truncated block payload");
    }
    if (crc_of(stored_) != crc) {
        corrupt("checksum mismatch");
    }
    if (codec == static_cast<std::uint8_t>(BlockCodec::Identity)) {
        if (stored_len != raw_len) {
            corrupt("identity block length mismatch");
        }
        raw_.swap(stored_);
    } else if (codec == static_cast<std::uint8_t>(BlockCodec::Zlib)) {
        raw_.resize(raw_len);
        uLongf out_len = raw_len;
        if (uncompress(reinterpret_cast<Bytef*>(raw_.data()), &out_len, reinterpret_cast<const Bytef*>(stored_.data()),
                       stored_len) != Z_OK ||
            out_len != raw_len) {
            corrupt("zlib payload does not inflate");
        }
    } else {
        corrupt("unknown block codec " + std::to_string(codec));
    }
    buffers_.observe(raw_.capacity() + stored_.capacity());

    Cursor p(std::string_view(raw_), [this](const char* why) { corrupt(why); });
    const auto books = p.u16be();
    if (books != books_.size()) {
        corrupt("checkpoint book count does not match the symbol table");
    }
    const bool adopt = !pending_ && window_end_.has_value() && blocks_loaded_ == 0;
    for (std::size_t i = 0; i < books; ++i) {
        BookState book;
        const auto index = p.u16be();
        if (index != i) {
            corrupt("checkpoint books out of order");
        }
        const auto flags = p.u8();
        book.initialized = (flags & 1) != 0;
        book.crossed = (flags & 2) != 0;
        book.last_seq = p.u64be();
        book.last_time = Timestamp{p.i64be()};
        const auto nb = p.u8();
        const auto na = p.u8();
        if (nb > kMaxDepth || na > kMaxDepth) {
            corrupt("checkpoint ladder deeper than 10 levels");
        }
        for (std::size_t k = 0; k < nb; ++k) {
            const auto price = p.i64be();
            book.bids.insert(k, PriceLevel{price, p.i64be()});
        }
        for (std::size_t k = 0; k < na; ++k) {
            const auto price = p.i64be();
            book.asks.insert(k, PriceLevel{price, p.i64be()});
        }
        if (adopt) {
            books_[i] = book;
        }
        if (options_.verify_checkpoints) {
            if (blocks_loaded_ == 0) {
                verify_books_.push_back(book);
            } else if (!(verify_books_[i] == book)) {
                corrupt("checkpoint does not match the replayed book of the previous blocks");
            }
        }
    }
    cursor_ = p.position();
    block_remaining_ = record_count;
    prev_seq_ = first_seq;
    prev_time_ = first_time;
    prev_price_ = 0;
    ++blocks_loaded_;
    ++next_block_;
    return true;
}

void EventLogReader::decode_record(MarketMessage& out) {
    Cursor c(std::string_view(raw_).substr(cursor_), [this](const char* why) { corrupt(why); });
    const auto head = c.u8();
    const auto kind = head & 0x07u;
    const auto action = (head >> 3) & 0x03u;
    if (kind > static_cast<unsigned>(MessageKind::SecurityStatus) || action > static_cast<unsigned>(Action::Delete) ||
        (head & 0x80u) != 0) {
        corrupt("bad record header byte");
    }
    const auto symbol = c.uvarint();
    if (symbol >= header_.symbols.size()) {
        corrupt("record symbol index out of range");
    }
    out.kind = static_cast<MessageKind>(kind);
    out.action = static_cast<Action>(action);
    out.side = static_cast<Side>((head >> 5) & 1u);
    if (out.symbol != header_.symbols[symbol].symbol) {
        out.symbol = header_.symbols[symbol].symbol;
    }
    prev_seq_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(prev_seq_) + c.svarint());
    prev_time_ += static_cast<std::int64_t>(c.uvarint());
    out.seq = prev_seq_;
    out.sending_time = Timestamp{prev_time_};
    out.level = c.u8();
    prev_price_ += c.svarint();
    out.price = prev_price_;
    out.quantity = static_cast<std::int64_t>(c.uvarint());
    if (head & kHasStatistic) {
        StatisticKind stat;
        const auto code = c.u8();
        if (code > static_cast<std::uint8_t>(StatisticKind::Code::Other)) {
            corrupt("bad statistic code");
        }
        stat.code = static_cast<StatisticKind::Code>(code);
        stat.other = c.u8();
        out.statistic = stat;
    } else {
        out.statistic.reset();
    }
    cursor_ += c.position();
    if (--block_remaining_ == 0 && cursor_ != raw_.size()) {
        corrupt("trailing bytes after the last record");
    }
    if (options_.verify_checkpoints) {
        BookOptions opts = book_options_;
        opts.depth = static_cast<std::size_t>(header_.symbols[symbol].book_depth);
        apply_message(verify_books_[symbol], out, opts);
    }
}

bool EventLogReader::next(MarketMessage& out) {
    if (pending_) {
        out = std::move(*pending_);
        pending_.reset();
        return true;
    }
    try {
        while (!done_) {
            if (block_remaining_ == 0) {
                if (!load_block()) {
                    return false;
                }
                continue;
            }
            decode_record(out);
            if (window_end_ && out.sending_time >= *window_end_) {
                done_ = true;
                return false;
            }
            return true;
        }
    } catch (...) {
        done_ = true;
        throw;
    }
    return false;
}

const EventLogTrailer& EventLogReader::trailer() {
    if (trailer_) {
        return *trailer_;
    }
    const auto restore = in_.tellg();
    auto bad = [](const std::string& why) -> FormatError { return FormatError("event log trailer: " + why, 0); };
    in_.clear();
    in_.seekg(0, std::ios::end);
    const auto size = static_cast<std::int64_t>(in_.tellg());
    if (size < static_cast<std::int64_t>(kFooterSize)) {
        throw bad("file too short");
    }
    std::string footer(kFooterSize, '\0');
    in_.seekg(size - static_cast<std::int64_t>(kFooterSize));
    in_.read(footer.data(), kFooterSize);
    if (footer.substr(8) != kFooterTag) {
        throw bad("missing footer (file truncated?)");
    }
    auto fail = [&](const char* why) { throw bad(why); };
    const auto offset = Cursor(std::string_view(footer), fail).u64be();
    if (offset >= static_cast<std::uint64_t>(size)) {
        throw bad("trailer offset out of range");
    }
    std::string body(static_cast<std::size_t>(size - static_cast<std::int64_t>(offset) - static_cast<std::int64_t>(kFooterSize)), '\0');
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(body.data(), static_cast<std::streamsize>(body.size()));
    if (static_cast<std::size_t>(in_.gcount()) != body.size() || body.size() < 4 + 4 + 8 + 4) {
        throw bad("truncated trailer");
    }
    Cursor c(std::string_view(body), fail);
    if (c.take(4) != kTrailerTag) {
        throw bad("bad trailer marker");
    }
    EventLogTrailer t;
    t.blocks.resize(c.u32be());
    for (auto& entry : t.blocks) {
        entry.offset = c.u64be();
        entry.first_seq = c.u64be();
        entry.first_time = Timestamp{c.i64be()};
        entry.last_time = Timestamp{c.i64be()};
        entry.record_count = c.u32be();
    }
    t.total_records = c.u64be();
    const auto covered = c.position();
    if (c.u32be() != crc_of(std::string_view(body).substr(0, covered))) {
        throw bad("checksum mismatch");
    }
    in_.clear();
    in_.seekg(restore);
    trailer_ = std::move(t);
    return *trailer_;
}

void EventLogReader::seek_window(Timestamp start, Timestamp end) {
    if (blocks_loaded_ != 0 || pending_) {
        throw Error("seek_window must be called before reading");
    }
    const auto& index = trailer().blocks;
    window_end_ = end;
    if (index.empty()) {
        done_ = true;
        return;
    }
    std::size_t b = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i].first_time < start) {
            b = i;
        }
    }
    in_.clear();
    in_.seekg(static_cast<std::streamoff>(index[b].offset));
    next_block_ = b;
    try {
        MarketMessage msg;
        while (true) {
            if (block_remaining_ == 0) {
                if (!load_block()) {
                    return;
                }
                continue;
            }
            decode_record(msg);
            if (msg.sending_time >= start) {
                if (msg.sending_time >= end) {
                    done_ = true;
                } else {
                    pending_ = std::move(msg);
                }
                return;
            }
            const auto sym = *symbol_index(msg.symbol);
            BookOptions opts = book_options_;
            opts.depth = static_cast<std::size_t>(header_.symbols[sym].book_depth);
            apply_message(books_[sym], msg, opts);
            ++records_replayed_;
        }
    } catch (...) {
        done_ = true;
        throw;
    }
}

}  // namespace lobviz
