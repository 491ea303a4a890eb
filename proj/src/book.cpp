#include "lobviz/book.hpp"

#include "lobviz/error.hpp"

namespace lobviz {

void Ladder::insert(std::size_t index, PriceLevel level, std::size_t depth) {
    if (depth > kMaxDepth) {
        depth = kMaxDepth;
    }
    if (index >= depth) {
        return;
    }
    const std::size_t new_size = size_ < depth ? size_ + 1u : depth;
    for (std::size_t i = new_size - 1; i > index; --i) {
        levels_[i] = levels_[i - 1];
    }
    levels_[index] = level;
    for (std::size_t i = new_size; i < size_; ++i) {
        levels_[i] = PriceLevel{};
    }
    size_ = static_cast<std::uint8_t>(new_size);
}

void Ladder::erase(std::size_t index) {
    for (std::size_t i = index; i + 1 < size_; ++i) {
        levels_[i] = levels_[i + 1];
    }
    levels_[size_ - 1] = PriceLevel{};
    --size_;
}

void Ladder::clear() {
    levels_.fill(PriceLevel{});
    size_ = 0;
}

std::int64_t Ladder::total_quantity() const {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < size_; ++i) {
        total += levels_[i].quantity;
    }
    return total;
}

bool Ladder::operator==(const Ladder& other) const {
    if (size_ != other.size_) {
        return false;
    }
    for (std::size_t i = 0; i < size_; ++i) {
        if (!(levels_[i] == other.levels_[i])) {
            return false;
        }
    }
    return true;
}

namespace {

// Strictly better: higher for bids, lower for asks.
bool better(Side side, std::int64_t a, std::int64_t b) { return side == Side::Bid ? a > b : a < b; }

bool fits_at(const Ladder& ladder, Side side, std::size_t index, std::int64_t price, bool replacing) {
    if (index > 0 && !better(side, ladder[index - 1].price, price)) {
        return false;
    }
    const std::size_t next = replacing ? index + 1 : index;
    if (next < ladder.size() && !better(side, price, ladder[next].price)) {
        return false;
    }
    return true;
}

// Re-ranks a level by price: drops any level already at that price and inserts
// at the sorted position.
void upsert_by_price(Ladder& ladder, Side side, PriceLevel level, std::size_t depth) {
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (ladder[i].price == level.price) {
            ladder.erase(i);
            break;
        }
    }
    std::size_t pos = 0;
    while (pos < ladder.size() && better(side, ladder[pos].price, level.price)) {
        ++pos;
    }
    ladder.insert(pos, level, depth);
}

std::string describe(const MarketMessage& msg) {
    return std::string(to_string(msg.action)) + " " + std::string(to_string(msg.side)) + " level " +
           std::to_string(msg.level) + " (seq " + std::to_string(msg.seq) + ")";
}

class Applier {
public:
    Applier(const BookOptions& options, const MarketMessage& msg) : options_(options), msg_(msg) {}

    [[noreturn]] void fail(const std::string& why) const {
        throw ReconstructionError(describe(msg_) + ": " + why, msg_.seq);
    }

    void warn(const std::string& why) const {
        if (options_.diagnostics) {
            options_.diagnostics->warn(describe(msg_) + ": " + why);
        }
    }

    bool strict() const { return options_.mode == Mode::Strict; }

    void apply_update(Ladder& ladder) const {
        const Side side = msg_.side;
        const std::size_t depth = options_.depth;
        if (msg_.level < 1 || msg_.level > depth) {
            if (strict()) {
                fail("level outside [1, " + std::to_string(depth) + "]");
            }
            warn("level out of range, ignored");
            return;
        }
        std::size_t index = msg_.level - 1u;
        const PriceLevel level{msg_.price, msg_.quantity};
        switch (msg_.action) {
            case Action::New:
                insert_new(ladder, index, level);
                return;
            case Action::Change:
                if (index >= ladder.size()) {
                    if (strict()) {
                        fail("change addressed to an empty level");
                    }
                    warn("change addressed to an empty level, applied as new");
                    insert_new(ladder, index, level);
                    return;
                }
                if (msg_.quantity < 0) {
                    fail("negative quantity");
                }
                if (ladder[index].price != level.price && !fits_at(ladder, side, index, level.price, true)) {
                    if (strict()) {
                        fail("changed price breaks ladder ordering");
                    }
                    warn("changed price breaks ladder ordering, re-ranked");
                    ladder.erase(index);
                    upsert_by_price(ladder, side, level, depth);
                    return;
                }
                ladder[index] = level;
                return;
            case Action::Delete:
                if (index >= ladder.size()) {
                    if (strict()) {
                        fail("delete addressed to an empty level");
                    }
                    warn("delete addressed to an empty level, ignored");
                    return;
                }
                ladder.erase(index);
                return;
        }
    }

private:
    void insert_new(Ladder& ladder, std::size_t index, PriceLevel level) const {
        const Side side = msg_.side;
        if (level.quantity <= 0) {
            if (strict()) {
                fail("new level needs a positive quantity");
            }
            warn("new level without quantity, ignored");
            return;
        }
        if (index > ladder.size()) {
            if (strict()) {
                fail("new level leaves a gap (side holds " + std::to_string(ladder.size()) + " levels)");
            }
            warn("new level leaves a gap, moved up");
            index = ladder.size();
        }
        if (!fits_at(ladder, side, index, level.price, false)) {
            if (strict()) {
                fail("new price breaks ladder ordering");
            }
            warn("new price breaks ladder ordering, re-ranked");
            upsert_by_price(ladder, side, level, options_.depth);
            return;
        }
        ladder.insert(index, level, options_.depth);
    }

    const BookOptions& options_;
    const MarketMessage& msg_;
};

}  // namespace

std::optional<TradeRecord> apply_message(BookState& state, const MarketMessage& msg, const BookOptions& options) {
    const Applier applier(options, msg);
    std::optional<TradeRecord> trade;
    switch (msg.kind) {
        case MessageKind::BookUpdate: {
            Ladder next = state.side(msg.side);
            applier.apply_update(next);
            const Ladder& bids = msg.side == Side::Bid ? next : state.bids;
            const Ladder& asks = msg.side == Side::Ask ? next : state.asks;
            const bool crossed = !bids.empty() && !asks.empty() && bids[0].price >= asks[0].price;
            if (crossed) {
                if (applier.strict()) {
                    applier.fail("crossed book (best bid " + std::to_string(bids[0].price) + " >= best ask " +
                                 std::to_string(asks[0].price) + " ticks)");
                }
                if (!state.crossed) {
                    applier.warn("book crossed");
                }
            }
            state.side(msg.side) = next;
            state.crossed = crossed;
            break;
        }
        case MessageKind::Trade:
            if (msg.quantity <= 0) {
                if (applier.strict()) {
                    applier.fail("trade needs a positive quantity");
                }
                applier.warn("trade without quantity, ignored");
                break;
            }
            trade = TradeRecord{msg.sending_time, msg.price, msg.quantity, msg.seq};
            break;
        case MessageKind::Statistic:
        case MessageKind::Definition:
        case MessageKind::SecurityStatus:
            break;
    }
    state.last_seq = msg.seq;
    state.last_time = msg.sending_time;
    state.initialized = true;
    return trade;
}

namespace {

// Best level with volume; pending deletions do not quote a price.
const PriceLevel* best_quoted(const Ladder& ladder) {
    for (const auto& level : ladder.levels()) {
        if (level.quantity > 0) {
            return &level;
        }
    }
    return nullptr;
}

}  // namespace

std::optional<HalfTicks> midpoint(const BookState& state) {
    const PriceLevel* bid = best_quoted(state.bids);
    const PriceLevel* ask = best_quoted(state.asks);
    if (!bid || !ask) {
        return std::nullopt;
    }
    return HalfTicks{bid->price + ask->price};
}

std::optional<std::int64_t> spread(const BookState& state) {
    const PriceLevel* bid = best_quoted(state.bids);
    const PriceLevel* ask = best_quoted(state.asks);
    if (!bid || !ask) {
        return std::nullopt;
    }
    return ask->price - bid->price;
}

SideTotals side_totals(const BookState& state) {
    return SideTotals{state.bids.total_quantity(), state.asks.total_quantity()};
}

std::int64_t book_value_ticks(const BookState& state) {
    std::int64_t total = 0;
    for (const auto* ladder : {&state.bids, &state.asks}) {
        for (const auto& level : ladder->levels()) {
            total += level.price * level.quantity;
        }
    }
    return total;
}

double book_value(const BookState& state, const ContractMeta& meta) {
    return static_cast<double>(book_value_ticks(state)) * meta.tick_size() * meta.dollar_multiplier;
}

std::optional<std::string> check_invariants(const BookState& state) {
    for (Side side : {Side::Bid, Side::Ask}) {
        const Ladder& ladder = state.side(side);
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            if (ladder[i].quantity < 0) {
                return std::string(to_string(side)) + " level " + std::to_string(i + 1) + " has negative quantity";
            }
            if (i > 0 && !better(side, ladder[i - 1].price, ladder[i].price)) {
                return std::string(to_string(side)) + " prices not strictly ordered at level " + std::to_string(i + 1);
            }
        }
        for (std::size_t i = ladder.size(); i < kMaxDepth; ++i) {
            if (!(ladder[i] == PriceLevel{})) {
                return std::string(to_string(side)) + " slot past the ladder end is not empty";
            }
        }
    }
    if (!state.crossed && !state.bids.empty() && !state.asks.empty() && state.bids[0].price >= state.asks[0].price) {
        return std::string("book is crossed but not flagged");
    }
    return std::nullopt;
}

}  // namespace lobviz
