#pragma once

#include "lobviz/timestamp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lobviz {

enum class MessageKind : std::uint8_t { BookUpdate = 0, Trade = 1, Statistic = 2, Definition = 3, SecurityStatus = 4 };
enum class Action : std::uint8_t { New = 0, Change = 1, Delete = 2 };
enum class Side : std::uint8_t { Bid = 0, Ask = 1 };

struct StatisticKind {
    enum class Code : std::uint8_t { OpeningPrice = 0, SettlementPrice = 1, Other = 2 };
    Code code = Code::Other;
    /// Raw entry-type byte when code == Other.
    std::uint8_t other = 0;

    bool operator==(const StatisticKind&) const = default;
};

/// One decoded incremental update. `price` is in integer ticks of the contract;
/// action/side/level only carry meaning for BookUpdate.
struct MarketMessage {
    std::uint64_t seq = 0;
    Timestamp sending_time;
    std::string symbol;
    MessageKind kind = MessageKind::BookUpdate;
    Action action = Action::New;
    Side side = Side::Bid;
    std::uint8_t level = 0;
    std::int64_t price = 0;
    std::int64_t quantity = 0;
    std::optional<StatisticKind> statistic;

    bool operator==(const MarketMessage&) const = default;
};

/// (sending_time, seq) ordering used throughout the stream.
inline bool stream_before(const MarketMessage& a, const MarketMessage& b) {
    return a.sending_time != b.sending_time ? a.sending_time < b.sending_time : a.seq < b.seq;
}

std::string_view to_string(MessageKind k);
std::string_view to_string(Action a);
std::string_view to_string(Side s);

}  // namespace lobviz
