#pragma once

#include "lobviz/book.hpp"
#include "lobviz/message_stream.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lobviz {

/// A message together with the book right after it was applied.
struct StatePoint {
    MarketMessage message;
    BookState state;
    std::optional<TradeRecord> trade;
};

/// Pull-based sequence of post-message book states. The returned pointer stays
/// valid until the next call.
class StateStream {
public:
    virtual ~StateStream() = default;
    virtual const StatePoint* next() = 0;
    /// Book before the first yielded message.
    virtual const BookState& start_state() const = 0;
};

/// Replays a message stream onto a starting book, one apply per message, holding
/// only the current state.
class Reconstructor final : public StateStream {
public:
    Reconstructor(MessageStream& messages, BookState start, BookOptions options = {})
        : messages_(messages), start_(start), options_(options) {
        current_.state = start;
    }

    const StatePoint* next() override;
    const BookState& start_state() const override { return start_; }

    std::uint64_t apply_count() const { return applied_; }

private:
    MessageStream& messages_;
    BookState start_;
    BookOptions options_;
    StatePoint current_;
    std::uint64_t applied_ = 0;
};

/// Replays precomputed points.
class VectorStateStream final : public StateStream {
public:
    explicit VectorStateStream(std::span<const StatePoint> points, BookState start = {}) : points_(points), start_(start) {}

    const StatePoint* next() override { return pos_ < points_.size() ? &points_[pos_++] : nullptr; }
    const BookState& start_state() const override { return start_; }

private:
    std::span<const StatePoint> points_;
    BookState start_;
    std::size_t pos_ = 0;
};

std::vector<StatePoint> reconstruct_all(MessageStream& messages, BookState start = {}, BookOptions options = {});
std::vector<StatePoint> reconstruct_all(std::span<const MarketMessage> messages, BookState start = {},
                                        BookOptions options = {});

}  // namespace lobviz
