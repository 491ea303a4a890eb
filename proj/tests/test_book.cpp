#include "lobviz/book.hpp"
#include "lobviz/error.hpp"
#include "lobviz/reconstruct.hpp"
#include "lobviz/synthetic.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lobviz;

namespace {

MarketMessage update(Side side, Action action, int level, std::int64_t price, std::int64_t qty,
                     std::uint64_t seq = 0) {
    MarketMessage m;
    m.seq = seq;
    m.sending_time = Timestamp{1'425'308'644'453};
    m.symbol = "ZCK5";
    m.kind = MessageKind::BookUpdate;
    m.side = side;
    m.action = action;
    m.level = static_cast<std::uint8_t>(level);
    m.price = price;
    m.quantity = qty;
    return m;
}

MarketMessage trade(std::int64_t price, std::int64_t qty) {
    MarketMessage m = update(Side::Bid, Action::New, 0, price, qty);
    m.kind = MessageKind::Trade;
    return m;
}

BookState book_of(std::initializer_list<PriceLevel> bids, std::initializer_list<PriceLevel> asks) {
    BookState s;
    std::size_t i = 0;
    for (const auto& l : bids) s.bids.insert(i++, l);
    i = 0;
    for (const auto& l : asks) s.asks.insert(i++, l);
    s.initialized = true;
    return s;
}

ContractMeta corn() {
    ContractMeta meta = synthetic_meta("ZCK5");
    meta.dollar_multiplier = 50.0;
    return meta;
}

}  // namespace

TEST(ApplyMessage, ChangeReplacesQuantity) {
    // 392.50 = 1570 quarter ticks
    BookState s = book_of({{1570, 20}}, {});
    apply_message(s, update(Side::Bid, Action::Change, 1, 1570, 8));
    ASSERT_EQ(s.bids.size(), 1u);
    EXPECT_EQ(s.bids[0], (PriceLevel{1570, 8}));
}

TEST(ApplyMessage, NewOnEmptyBook) {
    BookState s;
    apply_message(s, update(Side::Bid, Action::New, 1, 100, 5));
    ASSERT_EQ(s.bids.size(), 1u);
    EXPECT_EQ(s.bids[0], (PriceLevel{100, 5}));
    EXPECT_TRUE(s.asks.empty());
    EXPECT_TRUE(s.initialized);
}

TEST(ApplyMessage, NewShiftsAndDeletePullsUp) {
    BookState s = book_of({{100, 5}}, {});
    apply_message(s, update(Side::Bid, Action::New, 1, 101, 3));
    ASSERT_EQ(s.bids.size(), 2u);
    EXPECT_EQ(s.bids[0], (PriceLevel{101, 3}));
    EXPECT_EQ(s.bids[1], (PriceLevel{100, 5}));
    apply_message(s, update(Side::Bid, Action::Delete, 1, 0, 0));
    ASSERT_EQ(s.bids.size(), 1u);
    EXPECT_EQ(s.bids[0], (PriceLevel{100, 5}));
}

TEST(ApplyMessage, NewOnFullLadderDropsDeepest) {
    BookState s;
    for (int k = 0; k < 10; ++k) apply_message(s, update(Side::Ask, Action::New, k + 1, 200 + k, 1));
    apply_message(s, update(Side::Ask, Action::New, 1, 199, 7));
    ASSERT_EQ(s.asks.size(), 10u);
    EXPECT_EQ(s.asks[0], (PriceLevel{199, 7}));
    EXPECT_EQ(s.asks[9].price, 208);
}

TEST(ApplyMessage, TwentyInitializationInserts) {
    BookState s;
    for (int k = 0; k < 10; ++k) apply_message(s, update(Side::Bid, Action::New, k + 1, 1569 - k, 10 + k));
    for (int k = 0; k < 10; ++k) apply_message(s, update(Side::Ask, Action::New, k + 1, 1571 + k, 20 + k));
    EXPECT_EQ(s.bids.size(), 10u);
    EXPECT_EQ(s.asks.size(), 10u);
    EXPECT_FALSE(check_invariants(s).has_value());
}

TEST(ApplyMessage, ChangeToZeroKeepsSlotUntilDelete) {
    BookState s = book_of({{101, 3}, {100, 5}}, {});
    apply_message(s, update(Side::Bid, Action::Change, 1, 101, 0));
    ASSERT_EQ(s.bids.size(), 2u);
    EXPECT_EQ(side_totals(s).bid, 5);
    EXPECT_FALSE(check_invariants(s).has_value());
    apply_message(s, update(Side::Bid, Action::Delete, 1, 101, 0));
    ASSERT_EQ(s.bids.size(), 1u);
    EXPECT_EQ(s.bids[0], (PriceLevel{100, 5}));
}

TEST(ApplyMessage, TradeReturnsRecordAndLeavesBook) {
    BookState s = book_of({{100, 5}}, {{102, 4}});
    const BookState before = s;
    const auto t = apply_message(s, trade(101, 2));
    ASSERT_TRUE(t.has_value());
    EXPECT_EQ(t->price, 101);
    EXPECT_EQ(t->quantity, 2);
    EXPECT_EQ(s.bids, before.bids);
    EXPECT_EQ(s.asks, before.asks);
}

TEST(ApplyMessage, StrictRejectsAndLeavesStateUntouched) {
    const BookState base = book_of({{101, 3}, {100, 5}}, {{103, 1}});
    auto rejects = [&](const MarketMessage& m) {
        BookState s = base;
        EXPECT_THROW(apply_message(s, m), ReconstructionError);
        EXPECT_EQ(s, base);
    };
    rejects(update(Side::Bid, Action::Change, 3, 99, 1));  // empty level
    rejects(update(Side::Bid, Action::Delete, 3, 0, 0));   // empty level
    rejects(update(Side::Bid, Action::New, 4, 98, 1));     // gap
    rejects(update(Side::Bid, Action::New, 1, 100, 1));    // not better than level 2
    rejects(update(Side::Bid, Action::New, 1, 103, 1));    // crosses the ask
    rejects(update(Side::Ask, Action::New, 1, 101, 1));    // crosses the bid
    rejects(update(Side::Bid, Action::New, 1, 102, -1));   // negative size
}

TEST(ApplyMessage, TolerantRepairsAndWarns) {
    Diagnostics diag;
    const BookOptions opts{Mode::Tolerant, kMaxDepth, &diag};
    BookState s = book_of({{100, 5}}, {{103, 1}});
    apply_message(s, update(Side::Bid, Action::Change, 2, 99, 4), opts);  // becomes New
    ASSERT_EQ(s.bids.size(), 2u);
    EXPECT_EQ(s.bids[1], (PriceLevel{99, 4}));
    apply_message(s, update(Side::Bid, Action::Delete, 5, 0, 0), opts);  // ignored
    EXPECT_EQ(s.bids.size(), 2u);
    apply_message(s, update(Side::Bid, Action::New, 1, 98, 2), opts);  // re-ranked
    EXPECT_FALSE(check_invariants(s).has_value()) << *check_invariants(s);
    EXPECT_EQ(s.bids[2], (PriceLevel{98, 2}));
    apply_message(s, update(Side::Bid, Action::New, 1, 104, 1), opts);  // crosses
    EXPECT_TRUE(s.crossed);
    EXPECT_GE(diag.warnings(), 4u);
}

TEST(Midpoint, Examples) {
    EXPECT_EQ(midpoint(book_of({{100, 1}}, {{102, 1}}))->value, 202);  // 101 ticks
    const auto mid = midpoint(book_of({{1570, 1}}, {{1571, 1}}));
    ASSERT_TRUE(mid.has_value());
    EXPECT_DOUBLE_EQ(mid->ticks() * corn().tick_size(), 392.625);
    EXPECT_FALSE(midpoint(book_of({{100, 1}}, {})).has_value());
    EXPECT_FALSE(midpoint(BookState{}).has_value());
}

TEST(Midpoint, IgnoresPendingZeroLevel) {
    BookState s = book_of({{101, 0}, {100, 5}}, {{102, 1}});
    EXPECT_EQ(midpoint(s)->value, 202);
    EXPECT_EQ(spread(s), 2);
}

TEST(SideTotals, Examples) {
    EXPECT_EQ(side_totals(book_of({{100, 5}, {99, 7}}, {{101, 3}})), (SideTotals{12, 3}));
    EXPECT_EQ(side_totals(BookState{}), (SideTotals{0, 0}));
}

TEST(BookValue, FootnoteLevel) {
    const BookState s = book_of({{1570, 8}}, {});
    EXPECT_DOUBLE_EQ(book_value(s, corn()), 157000.0);  // 392.5 x 8 x $50
}

TEST(BookValue, MatchesBruteForceSum) {
    const BookState s = book_of({{1570, 8}, {1569, 3}}, {{1572, 2}});
    const ContractMeta meta = corn();
    double expected = 0;
    for (const auto& [p, q] : std::vector<std::pair<double, double>>{{392.5, 8}, {392.25, 3}, {393.0, 2}}) {
        expected += p * q * 50.0;
    }
    EXPECT_NEAR(book_value(s, meta), expected, 1e-6);
    EXPECT_EQ(book_value_ticks(s), 1570 * 8 + 1569 * 3 + 1572 * 2);
}

TEST(BookProperties, ChangeIsIdempotent) {
    SyntheticFeed feed(SyntheticConfig{.seed = 11});
    BookState s;
    for (int i = 0; i < 5000; ++i) {
        const auto m = feed.next();
        apply_message(s, m);
        if (m.kind == MessageKind::BookUpdate && m.action == Action::Change) {
            BookState again = s;
            apply_message(again, m);
            ASSERT_EQ(again, s);
        }
    }
}

TEST(BookProperties, NewThenDeleteRestoresBook) {
    SyntheticFeed feed(SyntheticConfig{.seed = 12});
    BookState s;
    std::mt19937 rng(3);
    for (int i = 0; i < 3000; ++i) {
        apply_message(s, feed.next());
        // A fresh best-bid level one tick inside the spread, when room exists
        // and the ladder is not full (a full ladder would drop its tail).
        if (s.bids.empty() || s.asks.empty() || s.bids.size() >= kMaxDepth) continue;
        if (s.asks[0].price - s.bids[0].price < 2) continue;
        BookState probe = s;
        apply_message(probe, update(Side::Bid, Action::New, 1, s.bids[0].price + 1, 1 + rng() % 9));
        apply_message(probe, update(Side::Bid, Action::Delete, 1, 0, 0));
        ASSERT_EQ(probe.bids, s.bids);
        ASSERT_EQ(probe.asks, s.asks);
    }
}

TEST(BookProperties, TradesNeverMoveTotalsOrMidpoint) {
    SyntheticFeed feed(SyntheticConfig{.seed = 13});
    BookState s;
    for (int i = 0; i < 5000; ++i) {
        const auto m = feed.next();
        const auto totals = side_totals(s);
        const auto mid = midpoint(s);
        apply_message(s, m);
        if (m.kind == MessageKind::Trade || m.kind == MessageKind::Statistic) {
            ASSERT_EQ(side_totals(s), totals);
            ASSERT_EQ(midpoint(s), mid);
        }
    }
}

TEST(Reconstruction, MatchesSortedMapOracleOnHundredThousandMessages) {
    SyntheticFeed feed(SyntheticConfig{.seed = 2024});
    const auto messages = feed.take(100'000);
    VectorMessageStream source(messages);
    Reconstructor rec(source, BookState{});
    oracle::SortedMapBook ref;
    std::size_t n = 0;
    while (const StatePoint* p = rec.next()) {
        ref.apply(p->message);
        ASSERT_TRUE(ref.matches(p->state)) << "after seq " << p->message.seq << ": " << ref.describe();
        const auto bad = check_invariants(p->state);
        ASSERT_FALSE(bad.has_value()) << *bad;
        ++n;
    }
    EXPECT_EQ(n, messages.size());
    EXPECT_EQ(rec.apply_count(), messages.size());
}

TEST(Reconstruction, ErrorNamesSequenceNumber) {
    std::vector<MarketMessage> messages{update(Side::Bid, Action::New, 1, 100, 1, 0),
                                        update(Side::Bid, Action::Delete, 3, 0, 0, 1)};
    try {
        reconstruct_all(messages);
        FAIL() << "expected ReconstructionError";
    } catch (const ReconstructionError& e) {
        EXPECT_EQ(e.seq(), 1u);
    }
}
