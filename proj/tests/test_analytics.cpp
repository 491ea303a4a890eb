#include "lobviz/analytics.hpp"
#include "lobviz/error.hpp"
#include "lobviz/synthetic.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lobviz;

namespace {

MarketMessage at(std::int64_t ms, std::uint64_t seq, const std::string& symbol = "SYNZ5") {
    MarketMessage m;
    m.seq = seq;
    m.sending_time = Timestamp{ms};
    m.symbol = symbol;
    m.kind = MessageKind::Trade;
    m.price = 1570;
    m.quantity = 1;
    return m;
}

std::vector<StatePoint> replay(const std::vector<MarketMessage>& messages) { return reconstruct_all(messages); }

std::vector<MarketMessage> synthetic(std::size_t n, std::uint64_t seed, double gap = 5.0,
                                     const std::string& symbol = "SYNZ5") {
    return SyntheticFeed(SyntheticConfig{.symbol = symbol, .seed = seed, .mean_gap_ms = gap}).take(n);
}

TradeRecord trade_at(std::int64_t ms, std::int64_t price) { return TradeRecord{Timestamp{ms}, price, 1, 0}; }

}  // namespace

TEST(IntegerSample, MedianOfEvenSampleAveragesMiddlePair) {
    IntegerSample s;
    for (int v : {4, 1, 3, 2}) s.add(v);
    const auto sum = s.summary();
    EXPECT_DOUBLE_EQ(sum.median, 2.5);
    EXPECT_DOUBLE_EQ(sum.mean, 2.5);
    EXPECT_DOUBLE_EQ(sum.min, 1);
    EXPECT_DOUBLE_EQ(sum.max, 4);
    s.add(100);
    EXPECT_DOUBLE_EQ(s.summary().median, 3);
}

TEST(ContractStats, EmptyStream) {
    VectorStateStream empty({});
    const auto stats = contract_stats(empty, synthetic_meta("SYNZ5"));
    EXPECT_EQ(stats.total_messages, 0u);
    EXPECT_EQ(stats.per_second.count, 0u);
    EXPECT_FALSE(stats.first_time.has_value());
}

TEST(ContractStats, ThreeMessagesInOneSecond) {
    const auto points = replay({at(1'000'100, 0), at(1'000'400, 1), at(1'000'999, 2)});
    VectorStateStream states(points);
    const auto stats = contract_stats(states, synthetic_meta("SYNZ5"));
    EXPECT_EQ(stats.total_messages, 3u);
    EXPECT_EQ(stats.per_second.count, 1u);
    EXPECT_DOUBLE_EQ(stats.per_second.max, 3);
    EXPECT_DOUBLE_EQ(stats.per_second.median, 3);
}

TEST(ContractStats, EmptySecondsBetweenMessagesCountAsZero) {
    const auto points = replay({at(1'000'100, 0), at(1'000'400, 1), at(1'003'000, 2)});
    VectorStateStream states(points);
    const auto stats = contract_stats(states, synthetic_meta("SYNZ5"));
    EXPECT_EQ(stats.per_second.count, 4u);  // counts 2, 0, 0, 1
    EXPECT_DOUBLE_EQ(stats.per_second.min, 0);
    EXPECT_DOUBLE_EQ(stats.per_second.median, 0.5);
}

TEST(ContractStats, ExcludedDayIsDroppedEverywhere) {
    const std::int64_t day = kMillisPerDay;
    const std::int64_t monday = day_of_date(parse_date("2015-03-02")) * day;
    const auto points = replay({at(monday + 1000, 0), at(monday + 2000, 1), at(monday + day + 5000, 2)});
    const Date tuesday = parse_date("2015-03-03");
    VectorStateStream states(points);
    const auto stats = contract_stats(states, synthetic_meta("SYNZ5"), std::span<const Date>(&tuesday, 1));
    EXPECT_EQ(stats.total_messages, 2u);
    EXPECT_EQ(stats.excluded_messages, 1u);
    ASSERT_EQ(stats.calendar_days.size(), 1u);
    EXPECT_EQ(stats.per_calendar_day.count, 1u);
    EXPECT_DOUBLE_EQ(stats.per_calendar_day.mean, 2);
    EXPECT_EQ(stats.per_second.count, 2u);
}

TEST(ContractStats, CalendarAndTradingDayVariants) {
    // Friday and the following Monday; the weekend is empty.
    const std::int64_t friday = day_of_date(parse_date("2015-03-06")) * kMillisPerDay;
    const auto points = replay({at(friday + 1000, 0), at(friday + 3 * kMillisPerDay + 1000, 1)});
    VectorStateStream states(points);
    const auto stats = contract_stats(states, synthetic_meta("SYNZ5"));
    EXPECT_EQ(stats.per_calendar_day.count, 4u);
    EXPECT_DOUBLE_EQ(stats.per_calendar_day.min, 0);
    EXPECT_EQ(stats.per_trading_day.count, 2u);
    EXPECT_DOUBLE_EQ(stats.per_trading_day.min, 1);
}

TEST(ContractStats, MatchesBruteForceOnSyntheticStream) {
    const auto messages = synthetic(30'000, 31, 40.0);
    const auto points = replay(messages);
    const auto meta = synthetic_meta("SYNZ5");
    VectorStateStream states(points);
    const auto stats = contract_stats(states, meta);

    std::vector<std::int64_t> times;
    std::vector<double> volumes, values, per_second;
    for (const auto& p : points) {
        times.push_back(p.message.sending_time.ms);
        double vol = 0, val = 0;
        for (const auto* side : {&p.state.bids, &p.state.asks}) {
            for (const auto& l : side->levels()) {
                vol += static_cast<double>(l.quantity);
                val += static_cast<double>(l.price) * 0.25 * static_cast<double>(l.quantity) * 50.0;
            }
        }
        volumes.push_back(vol);
        values.push_back(val);
    }
    for (const auto& [sec, n] : oracle::counts_per_second(times, true)) per_second.push_back(static_cast<double>(n));

    EXPECT_EQ(stats.total_messages, messages.size());
    EXPECT_EQ(stats.per_second.count, per_second.size());
    EXPECT_DOUBLE_EQ(stats.per_second.median, oracle::median_of(per_second));
    EXPECT_DOUBLE_EQ(stats.per_second.max, *std::max_element(per_second.begin(), per_second.end()));
    EXPECT_DOUBLE_EQ(stats.volume_per_message.median, oracle::median_of(volumes));
    EXPECT_DOUBLE_EQ(stats.volume_per_message.min, *std::min_element(volumes.begin(), volumes.end()));
    EXPECT_NEAR(stats.value_per_message.median, oracle::median_of(values), 1e-6);
    EXPECT_NEAR(stats.value_per_message.max, *std::max_element(values.begin(), values.end()), 1e-6);

    std::uint64_t daily_total = 0;
    for (const auto& d : stats.calendar_days) daily_total += d.messages;
    EXPECT_EQ(daily_total, stats.total_messages);
    for (const auto* s : {&stats.per_second, &stats.volume_per_message, &stats.value_per_message}) {
        EXPECT_LE(s->min, s->median);
        EXPECT_LE(s->median, s->max);
        EXPECT_LE(s->min, s->mean);
        EXPECT_LE(s->mean, s->max);
    }
}

TEST(RateHistogram, WorkedExample) {
    // Seconds with 5, 25, 25 and 47 messages.
    std::vector<Timestamp> times;
    std::int64_t sec = 0;
    for (int n : {5, 25, 25, 47}) {
        for (int i = 0; i < n; ++i) times.push_back(Timestamp{sec * 1000 + i});
        ++sec;
    }
    const auto h = rate_histogram(times, 20);
    ASSERT_EQ(h.bins.size(), 3u);
    EXPECT_EQ(h.bins[0].lower, 0);
    EXPECT_EQ(h.bins[0].seconds, 1u);
    EXPECT_EQ(h.bins[1].lower, 20);
    EXPECT_EQ(h.bins[1].seconds, 2u);
    EXPECT_EQ(h.bins[2].lower, 40);
    EXPECT_EQ(h.bins[2].seconds, 1u);
    EXPECT_EQ(h.seconds, 4u);
    EXPECT_EQ(h.messages, 102u);
}

TEST(RateHistogram, SingleMessage) {
    const std::vector<Timestamp> one{Timestamp{12'345}};
    const auto h = rate_histogram(one, 20);
    ASSERT_EQ(h.bins.size(), 1u);
    EXPECT_EQ(h.bins[0].seconds, 1u);
}

TEST(RateHistogram, PoissonStreamMatchesBruteForceBinning) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto messages = synthetic(60'000, seed, 2.0 + static_cast<double>(seed) * 20.0);
        std::vector<Timestamp> times;
        std::vector<std::int64_t> ms;
        for (const auto& m : messages) {
            times.push_back(m.sending_time);
            ms.push_back(m.sending_time.ms);
        }
        const auto counts = oracle::counts_per_second(ms, true);
        for (std::int64_t width : {1, 7, 20}) {
            std::map<std::int64_t, std::uint64_t> expected;
            for (const auto& [s, n] : counts) expected[n / width]++;
            const auto h = rate_histogram(times, width);
            std::uint64_t total = 0;
            for (std::size_t i = 0; i < h.bins.size(); ++i) {
                const auto it = expected.find(static_cast<std::int64_t>(i));
                ASSERT_EQ(h.bins[i].seconds, it == expected.end() ? 0u : it->second) << "bin " << i;
                total += h.bins[i].seconds;
            }
            EXPECT_EQ(h.bins.size(), static_cast<std::size_t>(expected.rbegin()->first + 1));
            EXPECT_EQ(total, counts.size());
        }
    }
}

TEST(SnapshotSample, LastMessageRule) {
    const auto points = replay({at(200, 0), at(700, 1), at(1400, 2)});
    VectorStateStream states(points);
    const auto snaps = snapshot_sample(states, 1000, Timestamp{0}, Timestamp{2000});
    ASSERT_EQ(snaps.size(), 2u);
    EXPECT_EQ(snaps[0].last_seq, 1u);
    EXPECT_EQ(snaps[1].last_seq, 2u);
}

TEST(SnapshotSample, EmptyIntervalRepeatsPrevious) {
    const auto points = replay({at(200, 0), at(2400, 1)});
    VectorStateStream states(points);
    const auto snaps = snapshot_sample(states, 1000, Timestamp{0}, Timestamp{3000});
    ASSERT_EQ(snaps.size(), 3u);
    EXPECT_EQ(snaps[0].last_seq, 0u);
    EXPECT_EQ(snaps[1].last_seq, 0u);
    EXPECT_EQ(snaps[2].last_seq, 1u);
}

TEST(SnapshotSample, WindowBeforeFirstMessageCarriesEmptyState) {
    const auto points = replay({at(5200, 0)});
    VectorStateStream states(points);
    const auto snaps = snapshot_sample(states, 1000, Timestamp{3000}, Timestamp{6000});
    ASSERT_EQ(snaps.size(), 3u);
    EXPECT_FALSE(snaps[0].initialized);
    EXPECT_FALSE(snaps[1].initialized);
    EXPECT_TRUE(snaps[2].initialized);
}

TEST(SnapshotSample, RandomStreamsMatchFilterOracle) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        const auto messages = synthetic(4000, 100 + static_cast<std::uint64_t>(trial), 3.0 + trial * 40.0);
        const auto points = replay(messages);
        const auto first = messages.front().sending_time.ms, last = messages.back().sending_time.ms;
        const auto t0 = std::uniform_int_distribution<std::int64_t>(first - 3000, last)(rng);
        const auto t1 = std::uniform_int_distribution<std::int64_t>(t0 + 1, last + 3000)(rng);
        for (std::int64_t interval : {1000, 5000, 333}) {
            VectorStateStream states(points);
            ASSERT_EQ(snapshot_sample(states, interval, Timestamp{t0}, Timestamp{t1}),
                      oracle::snapshot_columns(points, BookState{}, t0, t1, interval))
                << "trial " << trial << " interval " << interval;
        }
    }
}

TEST(MergeMarkets, TableTwoRepetitionPattern) {
    // A1, B1, A2, A3, B2
    const auto a = replay({at(1, 1, "A"), at(3, 2, "A"), at(4, 3, "A")});
    const auto b = replay({at(2, 1, "B"), at(5, 2, "B")});
    VectorStateStream sa(a), sb(b);
    const auto merged = merge_markets({&sa, &sb});
    ASSERT_EQ(merged.columns.size(), 5u);
    const std::vector<std::pair<int, int>> expected{{1, 0}, {1, 1}, {2, 1}, {3, 1}, {3, 2}};
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& col = merged.columns[i];
        ASSERT_TRUE(col.states[0].has_value());
        EXPECT_EQ(static_cast<int>(col.states[0]->last_seq), expected[i].first) << "column " << i;
        if (expected[i].second == 0) {
            EXPECT_FALSE(col.states[1].has_value()) << "B0 is the unknown placeholder";
        } else {
            ASSERT_TRUE(col.states[1].has_value());
            EXPECT_EQ(static_cast<int>(col.states[1]->last_seq), expected[i].second) << "column " << i;
        }
    }
    EXPECT_EQ(merged.columns[0].market, 0u);
    EXPECT_EQ(merged.columns[1].market, 1u);
}

TEST(MergeMarkets, SingleMarketIsItsOwnSeries) {
    const auto points = replay(synthetic(2000, 7));
    VectorStateStream s(points);
    const auto merged = merge_markets({&s});
    ASSERT_EQ(merged.columns.size(), points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        ASSERT_EQ(*merged.columns[i].states[0], points[i].state);
        ASSERT_EQ(merged.columns[i].message, points[i].message);
    }
}

TEST(MergeMarkets, TwoSyntheticMarketsMatchForwardFillOracle) {
    for (std::uint64_t seed : {1, 2, 3}) {
        // Coarse clocks force many equal timestamps across markets.
        auto a_msgs = SyntheticFeed(SyntheticConfig{.symbol = "AAA", .seed = seed, .mean_gap_ms = 3}).take(5000);
        auto b_msgs =
            SyntheticFeed(SyntheticConfig{.symbol = "BBB", .seed = seed + 50, .mean_gap_ms = 4}).take(4000);
        const auto a = replay(a_msgs), b = replay(b_msgs);
        VectorStateStream sa(a), sb(b);
        const auto merged = merge_markets({&sa, &sb});
        const auto expected = oracle::merged_columns(std::vector<std::vector<StatePoint>>{a, b});
        ASSERT_EQ(merged.columns.size(), a.size() + b.size());
        ASSERT_EQ(merged.columns.size(), expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            ASSERT_EQ(merged.columns[i].states, expected[i]) << "column " << i;
        }

        // Projection onto market A, dropping repeats, is A's own series.
        std::vector<BookState> projected;
        for (const auto& col : merged.columns) {
            if (col.market == 0) projected.push_back(*col.states[0]);
        }
        ASSERT_EQ(projected.size(), a.size());
        for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(projected[i], a[i].state);
    }
}

TEST(TriggerImpact, SingleTrade) {
    const std::vector<TradeRecord> trades{trade_at(1000, 50)};
    const auto h = trigger_impact(trades);
    EXPECT_EQ(h.total_triggers, 1u);
    EXPECT_EQ(h.total_fills, 1u);
    EXPECT_EQ(h.count(0, 0), 1u);
    ASSERT_EQ(h.rows.size(), 1u);
}

TEST(TriggerImpact, ThreeTradeExample) {
    const std::vector<TradeRecord> trades{trade_at(0, 10), trade_at(30, 10), trade_at(80, 10)};
    const auto h = trigger_impact(trades, 50, 1, 1);
    EXPECT_EQ(h.count(0, 0), 3u);
    EXPECT_EQ(h.count(30, 0), 1u);
    EXPECT_EQ(h.count(-30, 0), 1u);
    EXPECT_EQ(h.count(50, 0), 1u);
    EXPECT_EQ(h.count(-50, 0), 1u);
    EXPECT_EQ(h.total_fills, 7u);
    std::uint64_t sum = 0;
    for (const auto& [dp, row] : h.rows) {
        for (auto c : row) sum += c;
    }
    EXPECT_EQ(sum, 7u);
}

TEST(TriggerImpact, RandomTapesMatchDoubleLoopOracle) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<TradeRecord> trades;
        std::int64_t t = 0, p = 400;
        for (int i = 0; i < 1000; ++i) {
            t += std::uniform_int_distribution<std::int64_t>(0, 12)(rng);
            p += std::uniform_int_distribution<std::int64_t>(-2, 2)(rng);
            trades.push_back(trade_at(t, p));
        }
        const std::int64_t dt_bin = trial < 3 ? 1 : 4, dp_bin = trial < 3 ? 1 : 3;
        const auto h = trigger_impact(trades, 50, dt_bin, dp_bin);
        const auto expected = oracle::trigger_pairs(trades, 50, dt_bin, dp_bin);
        std::uint64_t expected_total = 0;
        for (const auto& [key, n] : expected) {
            ASSERT_EQ(h.count(key.first, key.second), n) << "(" << key.first << ", " << key.second << ")";
            expected_total += n;
        }
        std::uint64_t sum = 0;
        for (const auto& [dp, row] : h.rows) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                sum += row[k];
                // 180 degree rotation symmetry.
                const auto dt = static_cast<std::int64_t>(k) - h.dt_extent;
                ASSERT_EQ(row[k], h.count(-dt, -dp));
            }
        }
        EXPECT_EQ(sum, expected_total);
        EXPECT_EQ(h.total_fills, expected_total);
        EXPECT_GE(h.count(0, 0), h.total_triggers);
    }
}

TEST(TriggerImpact, RejectsUnorderedTrades) {
    const std::vector<TradeRecord> trades{trade_at(10, 1), trade_at(5, 1)};
    EXPECT_THROW(trigger_impact(trades), Error);
}

TEST(Liquidity, Examples) {
    BookState s;
    s.bids.insert(0, PriceLevel{100, 5});
    const auto one_sided = liquidity_of(MarketMessage{}, s);
    EXPECT_EQ(one_sided.bid_total, 5);
    EXPECT_FALSE(one_sided.spread.has_value());
    EXPECT_FALSE(one_sided.midpoint.has_value());
    s.asks.insert(0, PriceLevel{102, 2});
    const auto p = liquidity_of(MarketMessage{}, s);
    EXPECT_EQ(p.bid_total, 5);
    EXPECT_EQ(p.ask_total, 2);
    EXPECT_EQ(p.spread, 2);
    EXPECT_EQ(p.midpoint->ticks(), 101.0);
}

TEST(Liquidity, SyntheticSeriesMatchesLadders) {
    const auto points = replay(synthetic(5000, 17));
    VectorStateStream states(points);
    const auto series = liquidity_series(states);
    ASSERT_EQ(series.size(), points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& st = points[i].state;
        std::int64_t bid = 0, ask = 0;
        for (const auto& l : st.bids.levels()) bid += l.quantity;
        for (const auto& l : st.asks.levels()) ask += l.quantity;
        ASSERT_EQ(series[i].bid_total, bid);
        ASSERT_EQ(series[i].ask_total, ask);
        if (!st.bids.empty() && !st.asks.empty() && st.bids[0].quantity > 0 && st.asks[0].quantity > 0) {
            ASSERT_EQ(series[i].spread, st.asks[0].price - st.bids[0].price);
        }
    }
}
