#include "lobviz/message_stream.hpp"

#include "lobviz/error.hpp"

#include <fstream>

namespace lobviz {

namespace {

// Owns the underlying istream for streams returned by open_message_stream().
template <typename Inner>
class Owning final : public MessageStream {
public:
    Owning(std::unique_ptr<std::istream> in, StreamOptions options)
        : in_(std::move(in)), inner_(*in_, std::move(options)) {}

    bool next(MarketMessage& out) override { return inner_.next(out); }
    BookState start_state(std::string_view symbol) const override { return inner_.start_state(symbol); }
    const ContractRegistry& contracts() const override { return inner_.contracts(); }

private:
    std::unique_ptr<std::istream> in_;
    Inner inner_;
};

}  // namespace

std::unique_ptr<MessageStream> open_message_stream(std::unique_ptr<std::istream> in, StreamOptions options) {
    char magic[4] = {};
    in->read(magic, 4);
    const auto got = static_cast<std::size_t>(in->gcount());
    in->clear();
    in->seekg(0);
    if (!*in) {
        throw Error("input stream is not seekable");
    }
    if (is_event_log(std::string_view(magic, got))) {
        return std::make_unique<Owning<EventLogStream>>(std::move(in), std::move(options));
    }
    return std::make_unique<Owning<TagValueStream>>(std::move(in), std::move(options));
}

std::unique_ptr<MessageStream> open_message_file(const std::string& path, StreamOptions options) {
    auto in = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*in) {
        throw Error("cannot open " + path);
    }
    return open_message_stream(std::move(in), std::move(options));
}

// ---------------------------------------------------------------------------

TagValueStream::TagValueStream(std::istream& in, StreamOptions options)
    : in_(in),
      options_(std::move(options)),
      decoder_(options_.contracts, DecodeOptions{options_.mode, options_.diagnostics}) {}

bool TagValueStream::next(MarketMessage& out) {
    while (!done_ && std::getline(in_, line_)) {
        ++line_no_;
        bytes_read_ += line_.size() + 1;
        if (line_.empty() || line_[0] == '#') {
            continue;
        }
        try {
            parse_tag_value(line_, record_);
        } catch (const ParseError& e) {
            if (options_.mode == Mode::Strict) {
                throw ParseError("line " + std::to_string(line_no_) + ", byte " + std::to_string(e.offset()) + ": " +
                                     e.what(),
                                 e.offset(), line_no_);
            }
            if (options_.diagnostics) {
                options_.diagnostics->warn("line " + std::to_string(line_no_) + ": " + e.what());
            }
            continue;
        }
        bool decoded = false;
        try {
            decoded = decoder_.decode(record_, out);
        } catch (const DecodeError& e) {
            throw DecodeError("line " + std::to_string(line_no_) + ": " + e.what(), e.missing_tags());
        }
        if (!decoded) {
            continue;
        }
        if (options_.symbol && out.symbol != *options_.symbol) {
            continue;
        }
        if (options_.window) {
            if (out.sending_time < options_.window->start) {
                const ContractMeta* meta = decoder_.registry().find(out.symbol);
                BookOptions book{options_.mode, static_cast<std::size_t>(meta ? meta->book_depth : kDefaultBookDepth),
                                 options_.diagnostics};
                auto it = pre_window_.find(out.symbol);
                if (it == pre_window_.end()) {
                    it = pre_window_.emplace(out.symbol, BookState{}).first;
                }
                apply_message(it->second, out, book);
                continue;
            }
            if (out.sending_time >= options_.window->end) {
                done_ = true;
                return false;
            }
        }
        return true;
    }
    return false;
}

BookState TagValueStream::start_state(std::string_view symbol) const {
    auto it = pre_window_.find(symbol);
    return it == pre_window_.end() ? BookState{} : it->second;
}

// ---------------------------------------------------------------------------

EventLogStream::EventLogStream(std::istream& in, StreamOptions options)
    : reader_(in, options.log), options_(std::move(options)) {
    for (const auto& meta : reader_.header().symbols) {
        contracts_.add(meta);
    }
    if (options_.window) {
        reader_.seek_window(options_.window->start, options_.window->end);
    }
}

bool EventLogStream::next(MarketMessage& out) {
    while (reader_.next(out)) {
        if (!options_.symbol || out.symbol == *options_.symbol) {
            return true;
        }
    }
    return false;
}

BookState EventLogStream::start_state(std::string_view symbol) const {
    const auto index = reader_.symbol_index(symbol);
    return index ? reader_.window_start_state(*index) : BookState{};
}

// ---------------------------------------------------------------------------

bool VectorMessageStream::next(MarketMessage& out) {
    if (pos_ >= messages_.size()) {
        return false;
    }
    out = messages_[pos_++];
    return true;
}

BookState VectorMessageStream::start_state(std::string_view symbol) const {
    auto it = start_.find(symbol);
    return it == start_.end() ? BookState{} : it->second;
}

std::vector<MarketMessage> read_all(MessageStream& stream) {
    std::vector<MarketMessage> out;
    MarketMessage msg;
    while (stream.next(msg)) {
        out.push_back(msg);
    }
    return out;
}

}  // namespace lobviz
