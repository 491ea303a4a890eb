#pragma once

#include "lobviz/contract.hpp"
#include "lobviz/message.hpp"

#include <cstdint>
#include <deque>
#include <random>
#include <streambuf>
#include <string>
#include <vector>

namespace lobviz {

/// Knobs for the random market-by-price feed. Every message it emits is valid
/// for a strict-mode book of `depth` levels.
struct SyntheticConfig {
    std::string symbol = "SYNZ5";
    std::uint64_t seed = 1;
    Timestamp start = Timestamp{1'425'286'800'000};  // 2015-03-02T09:00:00.000
    /// Mean gap between messages; gaps are exponential, so per-second counts
    /// are Poisson.
    double mean_gap_ms = 5.0;
    std::int64_t initial_mid = 1570;  // ticks
    std::size_t depth = 10;
    std::int64_t max_quantity = 60;
    double trade_weight = 0.10;
    double change_weight = 0.45;
    double new_weight = 0.22;
    double delete_weight = 0.20;
    double statistic_weight = 0.01;
    /// Share of deletes announced by a change-to-zero first.
    double zero_before_delete = 0.2;
    /// Emit the 20 initialization inserts (ten per side) first.
    bool initialize = true;
    std::uint64_t first_seq = 0;
};

class SyntheticFeed {
public:
    explicit SyntheticFeed(SyntheticConfig config);

    MarketMessage next();
    std::vector<MarketMessage> take(std::size_t n);

    const SyntheticConfig& config() const { return config_; }

private:
    struct Level {
        std::int64_t price;
        std::int64_t quantity;
    };

    MarketMessage make(MessageKind kind);
    bool try_new(MarketMessage& msg);
    bool try_change(MarketMessage& msg);
    bool try_delete(MarketMessage& msg);
    void emit_trade(MarketMessage& msg);
    std::int64_t reference_mid() const;
    std::vector<Level>& side(Side s) { return s == Side::Bid ? bids_ : asks_; }
    Side random_side();

    SyntheticConfig config_;
    std::mt19937_64 rng_;
    std::exponential_distribution<double> gap_;
    std::vector<Level> bids_;
    std::vector<Level> asks_;
    std::deque<MarketMessage> queued_;
    std::uint64_t seq_;
    double clock_;
    std::discrete_distribution<int> pick_;
    std::size_t init_emitted_ = 0;
};

/// Contract metadata used with synthetic feeds: quarter-tick prices, depth 10,
/// $50 per point.
ContractMeta synthetic_meta(const std::string& symbol);

/// Renders `msg` as one tag-value line (no trailing newline) in the dialect
/// read by MessageDecoder.
std::string encode_entry(const MarketMessage& msg, const ContractMeta& meta);

/// The definition record announcing `meta`.
std::string encode_definition(const ContractMeta& meta, Timestamp at);

/// std::streambuf producing synthetic tag-value text on the fly until at least
/// `min_bytes` have been produced, so arbitrarily large inputs can be fed to
/// stream readers without touching disk.
class SyntheticTextBuf : public std::streambuf {
public:
    SyntheticTextBuf(SyntheticConfig config, std::uint64_t min_bytes);

    std::uint64_t bytes_produced() const { return produced_; }
    std::uint64_t messages_produced() const { return messages_; }

protected:
    int_type underflow() override;

private:
    SyntheticFeed feed_;
    ContractMeta meta_;
    std::uint64_t min_bytes_;
    std::uint64_t produced_ = 0;
    std::uint64_t messages_ = 0;
    std::string chunk_;
    bool header_done_ = false;
};

}  // namespace lobviz
