#include "lobviz/decoder.hpp"

#include "lobviz/error.hpp"

#include <charconv>

namespace lobviz {

namespace {

std::string missing_text(const std::vector<std::uint32_t>& tags) {
    std::string s = "missing ";
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i) {
            s += ", ";
        }
        s += std::to_string(tags[i]);
    }
    return s;
}

template <typename Int>
Int parse_int(std::string_view v, std::uint32_t tag) {
    Int out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || v.empty()) {
        throw DecodeError("tag " + std::to_string(tag) + ": expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::int64_t to_ticks(std::string_view text, const ContractMeta& meta, const DecodeOptions& options) {
    std::int64_t nanos = 0;
    try {
        nanos = parse_decimal_nanos(text);
    } catch (const ParseError& e) {
        throw DecodeError(std::string("tag 270: ") + e.what());
    }
    const std::int64_t tick = meta.tick_size_nanos;
    const std::int64_t q = floor_div(nanos, tick);
    const std::int64_t r = nanos - q * tick;
    if (r == 0) {
        return q;
    }
    if (options.mode == Mode::Strict) {
        throw DecodeError("price " + std::string(text) + " is not a multiple of tick size " +
                          format_decimal_nanos(tick) + " for " + meta.symbol);
    }
    if (options.diagnostics) {
        options.diagnostics->warn("off-tick price " + std::string(text) + " for " + meta.symbol + " rounded");
    }
    return 2 * r >= tick ? q + 1 : q;
}

}  // namespace

MarketMessage decode_entry(const RawTagValueRecord& record, const ContractMeta& meta, std::uint64_t seq,
                           const DecodeOptions& options) {
    MarketMessage msg;
    msg.seq = seq;

    const auto msg_type = record.find(tag::kMsgType);
    const auto sending_time = record.find(tag::kSendingTime);
    const auto symbol = record.find(tag::kSecurityDesc);
    const auto entry_type = record.find(tag::kEntryType);
    const auto px = record.find(tag::kEntryPx);
    const auto size = record.find(tag::kEntrySize);
    const auto action = record.find(tag::kUpdateAction);
    const auto level = record.find(tag::kPriceLevel);

    const bool definition = msg_type && *msg_type == "d";
    const bool status = msg_type && *msg_type == "f";
    if (msg_type && !definition && !status && *msg_type != "X") {
        throw DecodeError("unsupported message type 35=" + std::string(*msg_type));
    }

    std::vector<std::uint32_t> missing;
    if (!sending_time) missing.push_back(tag::kSendingTime);
    if (!symbol) missing.push_back(tag::kSecurityDesc);
    const bool entry = !definition && !status;
    if (entry && !entry_type) missing.push_back(tag::kEntryType);

    bool book = false;
    bool trade = false;
    bool deleting = false;
    if (entry && entry_type) {
        const auto et = *entry_type;
        book = et == "0" || et == "1";
        trade = et == "2";
        if (book) {
            deleting = action && *action == "2";
            if (!deleting && !px) missing.push_back(tag::kEntryPx);
            if (!deleting && !size) missing.push_back(tag::kEntrySize);
            if (!action) missing.push_back(tag::kUpdateAction);
            if (!level) missing.push_back(tag::kPriceLevel);
        } else if (trade) {
            if (!px) missing.push_back(tag::kEntryPx);
            if (!size) missing.push_back(tag::kEntrySize);
        }
    }
    if (!missing.empty()) {
        const std::string text = missing_text(missing);
        throw DecodeError(text, std::move(missing));
    }

    try {
        msg.sending_time = parse_timestamp(*sending_time);
    } catch (const ParseError& e) {
        throw DecodeError(std::string("tag 52: ") + e.what());
    }
    if (*symbol != meta.symbol) {
        throw DecodeError("record symbol " + std::string(*symbol) + " does not match contract " + meta.symbol);
    }
    msg.symbol = meta.symbol;

    if (definition) {
        msg.kind = MessageKind::Definition;
        return msg;
    }
    if (status) {
        msg.kind = MessageKind::SecurityStatus;
        return msg;
    }

    if (px) {
        msg.price = to_ticks(*px, meta, options);
    }
    if (size) {
        msg.quantity = parse_int<std::int64_t>(*size, tag::kEntrySize);
        if (msg.quantity < 0) {
            throw DecodeError("tag 271: quantity must be non-negative");
        }
    }

    if (book) {
        msg.kind = MessageKind::BookUpdate;
        msg.side = *entry_type == "0" ? Side::Bid : Side::Ask;
        if (*action == "0") {
            msg.action = Action::New;
        } else if (*action == "1") {
            msg.action = Action::Change;
        } else if (*action == "2") {
            msg.action = Action::Delete;
        } else {
            throw DecodeError("tag 279: unknown update action '" + std::string(*action) + "'");
        }
        const auto lvl = parse_int<int>(*level, tag::kPriceLevel);
        if (lvl < 1 || lvl > meta.book_depth) {
            throw DecodeError("tag 1023: level " + std::to_string(lvl) + " outside [1, " +
                              std::to_string(meta.book_depth) + "]");
        }
        msg.level = static_cast<std::uint8_t>(lvl);
    } else if (trade) {
        msg.kind = MessageKind::Trade;
    } else {
        const auto et = *entry_type;
        if (et.size() != 1) {
            throw DecodeError("tag 269: unknown entry type '" + std::string(et) + "'");
        }
        msg.kind = MessageKind::Statistic;
        StatisticKind stat;
        if (et == "4") {
            stat.code = StatisticKind::Code::OpeningPrice;
        } else if (et == "6") {
            stat.code = StatisticKind::Code::SettlementPrice;
        } else {
            stat.code = StatisticKind::Code::Other;
            stat.other = static_cast<std::uint8_t>(et[0]);
        }
        msg.statistic = stat;
    }
    return msg;
}

ContractMeta decode_definition(const RawTagValueRecord& record) {
    std::vector<std::uint32_t> missing;
    const auto symbol = record.find(tag::kSecurityDesc);
    const auto tick = record.find(tag::kMinPriceIncrement);
    if (!symbol) missing.push_back(tag::kSecurityDesc);
    if (!tick) missing.push_back(tag::kMinPriceIncrement);
    if (!missing.empty()) {
        const std::string text = "definition " + missing_text(missing);
        throw DecodeError(text, std::move(missing));
    }
    ContractMeta meta;
    meta.symbol = std::string(*symbol);
    meta.display_name = std::string(record.find(tag::kSymbolName).value_or(*symbol));
    try {
        meta.tick_size_nanos = parse_decimal_nanos(*tick);
        if (auto depth = record.find(tag::kMarketDepth)) {
            meta.book_depth = parse_int<int>(*depth, tag::kMarketDepth);
        }
        if (auto expiry = record.find(tag::kMaturityDate)) {
            meta.expiry = parse_date(*expiry);
        }
        if (auto mult = record.find(tag::kContractMultiplier)) {
            meta.dollar_multiplier =
                static_cast<double>(parse_decimal_nanos(*mult)) / static_cast<double>(kNanosPerUnit);
        }
    } catch (const ParseError& e) {
        throw DecodeError(std::string("definition: ") + e.what());
    }
    try {
        meta.validate();
    } catch (const Error& e) {
        throw DecodeError(e.what());
    }
    return meta;
}

bool MessageDecoder::decode(const RawTagValueRecord& record, MarketMessage& out) {
    if (record.empty()) {
        return false;
    }
    try {
        const auto msg_type = record.find(tag::kMsgType);
        if (msg_type && *msg_type == "d") {
            ContractMeta meta = decode_definition(record);
            // Configured multipliers win over the feed's.
            if (const ContractMeta* known = registry_.find(meta.symbol)) {
                meta.dollar_multiplier = known->dollar_multiplier;
                if (meta.display_name == meta.symbol) {
                    meta.display_name = known->display_name;
                }
            }
            registry_.add(meta);
        }
        const auto symbol = record.find(tag::kSecurityDesc);
        if (!symbol) {
            throw DecodeError("missing 107", {tag::kSecurityDesc});
        }
        const ContractMeta* meta = registry_.find(*symbol);
        if (!meta) {
            throw DecodeError("no contract metadata for symbol " + std::string(*symbol));
        }
        out = decode_entry(record, *meta, next_seq_, options_);
    } catch (const DecodeError& e) {
        if (options_.mode == Mode::Strict) {
            throw;
        }
        if (options_.diagnostics) {
            options_.diagnostics->warn(std::string("skipped record: ") + e.what());
        }
        ++next_seq_;
        return false;
    }
    ++next_seq_;
    return true;
}

}  // namespace lobviz
