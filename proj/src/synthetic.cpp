#include "lobviz/synthetic.hpp"

#include "lobviz/tag_value.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace lobviz {

SyntheticFeed::SyntheticFeed(SyntheticConfig config)
    : config_(std::move(config)),
      rng_(config_.seed),
      gap_(1.0 / std::max(config_.mean_gap_ms, 1e-9)),
      seq_(config_.first_seq),
      clock_(static_cast<double>(config_.start.ms)),
      pick_({config_.trade_weight, config_.change_weight, config_.new_weight, config_.delete_weight,
             config_.statistic_weight}) {
    if (!config_.initialize) {
        init_emitted_ = 2 * config_.depth;
    }
}

Side SyntheticFeed::random_side() { return (rng_() & 1u) ? Side::Ask : Side::Bid; }

std::int64_t SyntheticFeed::reference_mid() const {
    if (!bids_.empty() && !asks_.empty()) {
        return (bids_.front().price + asks_.front().price) / 2;
    }
    if (!bids_.empty()) {
        return bids_.front().price + 1;
    }
    if (!asks_.empty()) {
        return asks_.front().price - 1;
    }
    return config_.initial_mid;
}

MarketMessage SyntheticFeed::make(MessageKind kind) {
    MarketMessage msg;
    msg.seq = seq_++;
    msg.sending_time = Timestamp{static_cast<std::int64_t>(std::floor(clock_))};
    msg.symbol = config_.symbol;
    msg.kind = kind;
    return msg;
}

bool SyntheticFeed::try_new(MarketMessage& msg) {
    const Side s = random_side();
    for (Side side : {s, s == Side::Bid ? Side::Ask : Side::Bid}) {
        auto& ladder = this->side(side);
        const auto& other = side == Side::Bid ? asks_ : bids_;
        const std::size_t max_level = std::min(ladder.size() + 1, config_.depth);
        const std::size_t first = std::uniform_int_distribution<std::size_t>(0, max_level - 1)(rng_);
        for (std::size_t k = 0; k < max_level; ++k) {
            const std::size_t idx = (first + k) % max_level;
            // Open interval (worse, better) of admissible prices, expressed as
            // distances so both sides share the arithmetic.
            const std::int64_t dir = side == Side::Bid ? 1 : -1;
            std::int64_t better_bound;
            if (idx == 0) {
                better_bound = other.empty() ? reference_mid() + dir : other.front().price;
            } else {
                better_bound = ladder[idx - 1].price;
            }
            std::int64_t worse_bound;
            if (idx < ladder.size()) {
                worse_bound = ladder[idx].price;
            } else {
                worse_bound = better_bound - dir * 4;
            }
            const std::int64_t lo = std::min(worse_bound, better_bound) + 1;
            const std::int64_t hi = std::max(worse_bound, better_bound) - 1;
            if (lo > hi) {
                continue;
            }
            const std::int64_t price = std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
            const std::int64_t qty = std::uniform_int_distribution<std::int64_t>(1, config_.max_quantity)(rng_);
            ladder.insert(ladder.begin() + static_cast<std::ptrdiff_t>(idx), Level{price, qty});
            if (ladder.size() > config_.depth) {
                ladder.pop_back();
            }
            msg = make(MessageKind::BookUpdate);
            msg.action = Action::New;
            msg.side = side;
            msg.level = static_cast<std::uint8_t>(idx + 1);
            msg.price = price;
            msg.quantity = qty;
            return true;
        }
    }
    return false;
}

bool SyntheticFeed::try_change(MarketMessage& msg) {
    Side side = random_side();
    if (this->side(side).empty()) {
        side = side == Side::Bid ? Side::Ask : Side::Bid;
    }
    auto& ladder = this->side(side);
    if (ladder.empty()) {
        return false;
    }
    const std::size_t idx = std::uniform_int_distribution<std::size_t>(0, ladder.size() - 1)(rng_);
    const std::int64_t qty = std::uniform_int_distribution<std::int64_t>(1, config_.max_quantity)(rng_);
    ladder[idx].quantity = qty;
    msg = make(MessageKind::BookUpdate);
    msg.action = Action::Change;
    msg.side = side;
    msg.level = static_cast<std::uint8_t>(idx + 1);
    msg.price = ladder[idx].price;
    msg.quantity = qty;
    return true;
}

bool SyntheticFeed::try_delete(MarketMessage& msg) {
    Side side = random_side();
    if (this->side(side).empty()) {
        side = side == Side::Bid ? Side::Ask : Side::Bid;
    }
    auto& ladder = this->side(side);
    if (ladder.empty()) {
        return false;
    }
    const std::size_t idx = std::uniform_int_distribution<std::size_t>(0, ladder.size() - 1)(rng_);
    const Level level = ladder[idx];
    ladder.erase(ladder.begin() + static_cast<std::ptrdiff_t>(idx));

    MarketMessage del = make(MessageKind::BookUpdate);
    del.action = Action::Delete;
    del.side = side;
    del.level = static_cast<std::uint8_t>(idx + 1);
    del.price = level.price;
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < config_.zero_before_delete) {
        // Volume reaches zero first, then the level is deleted.
        msg = del;
        msg.action = Action::Change;
        msg.quantity = 0;
        del.seq = seq_++;
        queued_.push_back(del);
        return true;
    }
    msg = del;
    return true;
}

void SyntheticFeed::emit_trade(MarketMessage& msg) {
    msg = make(MessageKind::Trade);
    const bool at_ask = (rng_() & 1u) != 0;
    if (at_ask && !asks_.empty()) {
        msg.price = asks_.front().price;
    } else if (!bids_.empty()) {
        msg.price = bids_.front().price;
    } else {
        msg.price = reference_mid();
    }
    msg.quantity = std::uniform_int_distribution<std::int64_t>(1, 20)(rng_);
}

MarketMessage SyntheticFeed::next() {
    if (!queued_.empty()) {
        MarketMessage msg = std::move(queued_.front());
        queued_.pop_front();
        return msg;
    }
    MarketMessage msg;
    if (init_emitted_ < 2 * config_.depth) {
        const bool bid = init_emitted_ < config_.depth;
        const auto k = static_cast<std::int64_t>(bid ? init_emitted_ : init_emitted_ - config_.depth);
        msg = make(MessageKind::BookUpdate);
        msg.action = Action::New;
        msg.side = bid ? Side::Bid : Side::Ask;
        msg.level = static_cast<std::uint8_t>(k + 1);
        msg.price = bid ? config_.initial_mid - 1 - k : config_.initial_mid + 1 + k;
        msg.quantity = std::uniform_int_distribution<std::int64_t>(1, config_.max_quantity)(rng_);
        side(msg.side).push_back(Level{msg.price, msg.quantity});
        ++init_emitted_;
        return msg;
    }

    clock_ += gap_(rng_);
    const int choice = pick_(rng_);
    switch (choice) {
        case 0:
            emit_trade(msg);
            return msg;
        case 4: {
            msg = make(MessageKind::Statistic);
            StatisticKind stat;
            const auto r = rng_() % 3;
            stat.code = r == 0 ? StatisticKind::Code::OpeningPrice
                               : (r == 1 ? StatisticKind::Code::SettlementPrice : StatisticKind::Code::Other);
            stat.other = stat.code == StatisticKind::Code::Other ? static_cast<std::uint8_t>('7') : 0;
            msg.statistic = stat;
            msg.price = reference_mid();
            return msg;
        }
        default:
            break;
    }
    // Book update, with fallbacks so that one is always produced.
    if (choice == 2 && try_new(msg)) return msg;
    if (choice == 3 && try_delete(msg)) return msg;
    if (try_change(msg)) return msg;
    if (try_new(msg)) return msg;
    if (try_delete(msg)) return msg;
    emit_trade(msg);
    return msg;
}

std::vector<MarketMessage> SyntheticFeed::take(std::size_t n) {
    std::vector<MarketMessage> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(next());
    }
    return out;
}

ContractMeta synthetic_meta(const std::string& symbol) {
    ContractMeta meta;
    meta.symbol = symbol;
    meta.display_name = "Synthetic " + symbol;
    meta.tick_size_nanos = 250'000'000;
    meta.book_depth = 10;
    meta.dollar_multiplier = 50.0;
    return meta;
}

std::string encode_entry(const MarketMessage& msg, const ContractMeta& meta) {
    std::string line;
    line.reserve(96);
    auto field = [&](std::uint32_t tag, std::string_view value) {
        if (!line.empty()) {
            line += ' ';
        }
        line += std::to_string(tag);
        line += '=';
        line += value;
    };
    const std::string ts = format_sending_time(msg.sending_time);
    switch (msg.kind) {
        case MessageKind::Definition:
            field(tag::kMsgType, "d");
            field(tag::kSendingTime, ts);
            field(tag::kSecurityDesc, msg.symbol);
            field(tag::kMinPriceIncrement, format_decimal_nanos(meta.tick_size_nanos));
            field(tag::kMarketDepth, std::to_string(meta.book_depth));
            return line;
        case MessageKind::SecurityStatus:
            field(tag::kMsgType, "f");
            field(tag::kSendingTime, ts);
            field(tag::kSecurityDesc, msg.symbol);
            return line;
        default:
            break;
    }
    field(tag::kSendingTime, ts);
    field(tag::kSecurityDesc, msg.symbol);
    if (msg.kind == MessageKind::BookUpdate) {
        field(tag::kEntryType, msg.side == Side::Bid ? "0" : "1");
    } else if (msg.kind == MessageKind::Trade) {
        field(tag::kEntryType, "2");
    } else {
        const auto code = msg.statistic.value_or(StatisticKind{});
        const char c = code.code == StatisticKind::Code::OpeningPrice
                           ? '4'
                           : (code.code == StatisticKind::Code::SettlementPrice ? '6' : static_cast<char>(code.other));
        field(tag::kEntryType, std::string_view(&c, 1));
    }
    field(tag::kEntryPx, meta.format_price(msg.price));
    field(tag::kEntrySize, std::to_string(msg.quantity));
    if (msg.kind == MessageKind::BookUpdate) {
        field(tag::kUpdateAction, std::to_string(static_cast<int>(msg.action)));
        field(tag::kPriceLevel, std::to_string(msg.level));
    }
    return line;
}

std::string encode_definition(const ContractMeta& meta, Timestamp at) {
    std::string line = "35=d 52=" + format_sending_time(at) + " 107=" + meta.symbol;
    line += " 55=" + meta.symbol;
    line += " 969=" + format_decimal_nanos(meta.tick_size_nanos);
    line += " 264=" + std::to_string(meta.book_depth);
    const auto multiplier = std::llround(meta.dollar_multiplier * static_cast<double>(kNanosPerUnit));
    line += " 231=" + format_decimal_nanos(multiplier);
    if (meta.expiry) line += " 541=" + format_date(*meta.expiry);
    return line;
}

SyntheticTextBuf::SyntheticTextBuf(SyntheticConfig config, std::uint64_t min_bytes)
    : feed_(std::move(config)), meta_(synthetic_meta(feed_.config().symbol)), min_bytes_(min_bytes) {}

SyntheticTextBuf::int_type SyntheticTextBuf::underflow() {
    if (gptr() < egptr()) {
        return traits_type::to_int_type(*gptr());
    }
    if (produced_ >= min_bytes_) {
        return traits_type::eof();
    }
    chunk_.clear();
    if (!header_done_) {
        chunk_ += encode_definition(meta_, feed_.config().start);
        chunk_ += '\n';
        header_done_ = true;
    }
    while (chunk_.size() < (1u << 16)) {
        chunk_ += encode_entry(feed_.next(), meta_);
        chunk_ += '\n';
        ++messages_;
    }
    produced_ += chunk_.size();
    setg(chunk_.data(), chunk_.data(), chunk_.data() + chunk_.size());
    return traits_type::to_int_type(*gptr());
}

}  // namespace lobviz
