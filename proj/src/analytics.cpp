#include "lobviz/analytics.hpp"

#include "lobviz/error.hpp"

#include <algorithm>

namespace lobviz {

void IntegerSample::add(std::int64_t value, std::uint64_t times) {
    if (times == 0) {
        return;
    }
    freq_[value] += times;
    count_ += times;
    sum_ += static_cast<long double>(value) * static_cast<long double>(times);
}

Summary IntegerSample::summary(double scale) const {
    Summary s;
    if (count_ == 0) {
        return s;
    }
    s.count = count_;
    s.min = static_cast<double>(freq_.begin()->first) * scale;
    s.max = static_cast<double>(freq_.rbegin()->first) * scale;
    s.mean = static_cast<double>(sum_ / static_cast<long double>(count_)) * scale;

    // Values at ranks (n-1)/2 and n/2; equal for odd n.
    const std::uint64_t lo_rank = (count_ - 1) / 2;
    const std::uint64_t hi_rank = count_ / 2;
    std::optional<std::int64_t> lo, hi;
    std::uint64_t seen = 0;
    for (const auto& [value, times] : freq_) {
        seen += times;
        if (!lo && seen > lo_rank) lo = value;
        if (seen > hi_rank) {
            hi = value;
            break;
        }
    }
    s.median = (static_cast<double>(*lo) + static_cast<double>(*hi)) / 2.0 * scale;
    return s;
}

StatsAccumulator::StatsAccumulator(ContractMeta meta, std::span<const Date> exclusions) : meta_(std::move(meta)) {
    for (const auto& d : exclusions) {
        excluded_.insert(day_of_date(d));
    }
}

std::uint64_t StatsAccumulator::included_seconds_between(std::int64_t from_sec, std::int64_t to_sec) const {
    if (from_sec > to_sec) {
        return 0;
    }
    std::int64_t n = to_sec - from_sec + 1;
    constexpr std::int64_t kSecondsPerDay = 86'400;
    for (const auto day : excluded_) {
        const std::int64_t a = std::max(from_sec, day * kSecondsPerDay);
        const std::int64_t b = std::min(to_sec, day * kSecondsPerDay + kSecondsPerDay - 1);
        if (a <= b) n -= b - a + 1;
    }
    return static_cast<std::uint64_t>(n);
}

void StatsAccumulator::add(const MarketMessage& msg, const BookState& after) {
    const Timestamp t = msg.sending_time;
    const std::int64_t day = day_index(t);
    if (excluded(day)) {
        ++excluded_messages_;
        return;
    }
    const std::int64_t sec = second_index(t);
    if (!first_) {
        first_ = t;
        current_second_ = sec;
    } else if (sec != current_second_) {
        per_second_.add(static_cast<std::int64_t>(current_count_));
        per_second_.add(0, included_seconds_between(current_second_ + 1, sec - 1));
        current_second_ = sec;
        current_count_ = 0;
    }
    ++current_count_;
    ++per_day_[day];
    ++total_;
    last_ = t;
    volume_.add(side_totals(after).total());
    value_ticks_.add(book_value_ticks(after));
}

ContractStats StatsAccumulator::finish() const {
    ContractStats out;
    out.symbol = meta_.symbol;
    out.first_time = first_;
    out.last_time = last_;
    out.total_messages = total_;
    out.excluded_messages = excluded_messages_;
    if (!first_) {
        return out;
    }

    IntegerSample seconds = per_second_;
    seconds.add(static_cast<std::int64_t>(current_count_));
    out.per_second = seconds.summary();

    IntegerSample calendar, trading;
    for (std::int64_t day = day_index(*first_); day <= day_index(*last_); ++day) {
        if (excluded(day)) continue;
        const auto it = per_day_.find(day);
        const std::uint64_t n = it == per_day_.end() ? 0 : it->second;
        out.calendar_days.push_back(DailyCount{date_of_day(day), n});
        calendar.add(static_cast<std::int64_t>(n));
        if (is_weekday(day) || n > 0) {
            trading.add(static_cast<std::int64_t>(n));
        }
    }
    out.per_calendar_day = calendar.summary();
    out.per_trading_day = trading.summary();
    out.volume_per_message = volume_.summary();
    out.value_per_message = value_ticks_.summary(meta_.tick_size() * meta_.dollar_multiplier);
    return out;
}

ContractStats contract_stats(StateStream& states, const ContractMeta& meta, std::span<const Date> exclusions) {
    StatsAccumulator acc(meta, exclusions);
    while (const StatePoint* p = states.next()) {
        acc.add(p->message, p->state);
    }
    return acc.finish();
}

RateAccumulator::RateAccumulator(std::int64_t bin_width) : bin_width_(bin_width) {
    if (bin_width < 1) {
        throw QueryError("bin_width must be at least 1", "bin_width");
    }
}

void RateAccumulator::bump(std::uint64_t count, std::uint64_t seconds) {
    if (seconds == 0) {
        return;
    }
    const auto idx = static_cast<std::size_t>(count / static_cast<std::uint64_t>(bin_width_));
    if (bins_.size() <= idx) {
        bins_.resize(idx + 1, 0);
    }
    bins_[idx] += seconds;
    seconds_ += seconds;
}

void RateAccumulator::add(Timestamp t) {
    const std::int64_t sec = second_index(t);
    ++messages_;
    if (!second_) {
        second_ = sec;
        count_ = 1;
        return;
    }
    if (sec == *second_) {
        ++count_;
        return;
    }
    bump(count_, 1);
    if (sec > *second_ + 1) {
        bump(0, static_cast<std::uint64_t>(sec - *second_ - 1));
    }
    second_ = sec;
    count_ = 1;
}

RateHistogram RateAccumulator::finish() const {
    RateAccumulator done = *this;
    if (done.second_) {
        done.bump(done.count_, 1);
    }
    RateHistogram out;
    out.bin_width = bin_width_;
    out.seconds = done.seconds_;
    out.messages = messages_;
    for (std::size_t i = 0; i < done.bins_.size(); ++i) {
        out.bins.push_back(RateBin{static_cast<std::int64_t>(i) * bin_width_, done.bins_[i]});
    }
    return out;
}

RateHistogram rate_histogram(MessageStream& messages, std::int64_t bin_width) {
    RateAccumulator acc(bin_width);
    MarketMessage msg;
    while (messages.next(msg)) {
        acc.add(msg.sending_time);
    }
    return acc.finish();
}

RateHistogram rate_histogram(std::span<const Timestamp> times, std::int64_t bin_width) {
    RateAccumulator acc(bin_width);
    for (const auto t : times) {
        acc.add(t);
    }
    return acc.finish();
}

std::size_t snapshot_count(Timestamp t0, Timestamp t1, std::int64_t interval_ms) {
    if (interval_ms <= 0) {
        throw QueryError("interval must be positive", "interval");
    }
    if (t1 <= t0) {
        return 0;
    }
    return static_cast<std::size_t>((t1.ms - t0.ms + interval_ms - 1) / interval_ms);
}

SnapshotSampler::SnapshotSampler(Timestamp t0, Timestamp t1, std::int64_t interval_ms, const BookState& start,
                                 Sink sink)
    : t0_(t0),
      t1_(t1),
      interval_(interval_ms),
      columns_(snapshot_count(t0, t1, interval_ms)),
      state_(start),
      sink_(std::move(sink)) {}

void SnapshotSampler::emit_through(std::size_t column) {
    column = std::min(column, columns_);
    while (next_column_ < column) {
        SnapshotColumn c;
        c.index = next_column_;
        c.start = Timestamp{t0_.ms + static_cast<std::int64_t>(next_column_) * interval_};
        c.state = &state_;
        c.last_message = last_ ? &*last_ : nullptr;
        c.messages = pending_messages_;
        pending_messages_ = 0;
        sink_(c);
        ++next_column_;
    }
}

void SnapshotSampler::observe(const MarketMessage& msg, const BookState& after) {
    const Timestamp t = msg.sending_time;
    if (t >= t1_) {
        return;
    }
    if (t >= t0_) {
        emit_through(static_cast<std::size_t>((t.ms - t0_.ms) / interval_));
        ++pending_messages_;
    }
    state_ = after;
    last_ = msg;
}

void SnapshotSampler::finish() {
    if (finished_) {
        return;
    }
    finished_ = true;
    emit_through(columns_);
}

std::vector<BookState> snapshot_sample(StateStream& states, std::int64_t interval_ms, Timestamp t0, Timestamp t1) {
    std::vector<BookState> out;
    SnapshotSampler sampler(t0, t1, interval_ms, states.start_state(),
                            [&](const SnapshotColumn& c) { out.push_back(*c.state); });
    while (const StatePoint* p = states.next()) {
        sampler.observe(p->message, p->state);
    }
    sampler.finish();
    return out;
}

MergeCursor::MergeCursor(std::vector<StateStream*> markets) : markets_(std::move(markets)) {
    for (auto* m : markets_) {
        current_.push_back(m->start_state());
        known_.push_back(m->start_state().initialized);
        heads_.push_back(m->next());
    }
    column_.states.resize(markets_.size(), nullptr);
}

const MergedColumn* MergeCursor::next() {
    std::optional<std::size_t> pick;
    for (std::size_t m = 0; m < heads_.size(); ++m) {
        if (!heads_[m]) continue;
        if (!pick) {
            pick = m;
            continue;
        }
        const auto& a = heads_[m]->message;
        const auto& b = heads_[*pick]->message;
        // Ties on time go to the lower market id, which is already `pick`.
        if (a.sending_time < b.sending_time) {
            pick = m;
        }
    }
    if (!pick) {
        return nullptr;
    }
    const std::size_t m = *pick;
    current_[m] = heads_[m]->state;
    known_[m] = true;
    column_.market = m;
    column_.message = heads_[m]->message;
    heads_[m] = markets_[m]->next();
    for (std::size_t i = 0; i < markets_.size(); ++i) {
        column_.states[i] = known_[i] ? &current_[i] : nullptr;
    }
    return &column_;
}

MergedSeries merge_markets(std::vector<StateStream*> markets) {
    MergeCursor cursor(std::move(markets));
    MergedSeries out;
    while (const MergedColumn* c = cursor.next()) {
        MergedSeries::Column col;
        col.market = c->market;
        col.message = c->message;
        for (const BookState* s : c->states) {
            col.states.push_back(s ? std::optional<BookState>(*s) : std::nullopt);
        }
        out.columns.push_back(std::move(col));
    }
    return out;
}

std::uint64_t TriggerHistogram::count(std::int64_t dt_index, std::int64_t dp_index) const {
    if (dt_index < -dt_extent || dt_index > dt_extent) {
        return 0;
    }
    const auto it = rows.find(dp_index);
    if (it == rows.end()) {
        return 0;
    }
    return it->second[static_cast<std::size_t>(dt_index + dt_extent)];
}

TriggerHistogram trigger_impact(std::span<const TradeRecord> trades, std::int64_t half_window, std::int64_t dt_bin,
                                std::int64_t dp_bin) {
    if (half_window < 0) throw QueryError("half_window must be non-negative", "half_window");
    if (dt_bin < 1) throw QueryError("dt_bin must be at least 1", "dt_bin");
    if (dp_bin < 1) throw QueryError("dp_bin must be at least 1", "dp_bin");

    TriggerHistogram h;
    h.half_window = half_window;
    h.dt_bin = dt_bin;
    h.dp_bin = dp_bin;
    h.dt_extent = centered_bin(half_window, dt_bin);
    const auto width = static_cast<std::size_t>(2 * h.dt_extent + 1);

    // Dense rows over [dp_lo, dp_lo + row_count); grown on demand.
    std::vector<std::uint64_t> dense;
    std::int64_t dp_lo = 0;
    std::int64_t row_count = 0;
    auto cell = [&](std::int64_t dt_k, std::int64_t dp_k) -> std::uint64_t& {
        if (row_count == 0) {
            dp_lo = dp_k;
            row_count = 1;
            dense.assign(width, 0);
        } else if (dp_k < dp_lo || dp_k >= dp_lo + row_count) {
            const std::int64_t new_lo = std::min(dp_lo, dp_k);
            const std::int64_t new_hi = std::max(dp_lo + row_count, dp_k + 1);
            std::vector<std::uint64_t> grown(static_cast<std::size_t>(new_hi - new_lo) * width, 0);
            std::copy(dense.begin(), dense.end(),
                      grown.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(dp_lo - new_lo) * width));
            dense = std::move(grown);
            dp_lo = new_lo;
            row_count = new_hi - new_lo;
        }
        return dense[static_cast<std::size_t>(dp_k - dp_lo) * width + static_cast<std::size_t>(dt_k + h.dt_extent)];
    };

    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < trades.size(); ++i) {
        const std::int64_t t = trades[i].sending_time.ms;
        if (i > 0 && t < trades[i - 1].sending_time.ms) {
            throw Error("trades are not ordered by time");
        }
        while (trades[lo].sending_time.ms < t - half_window) ++lo;
        if (hi < i) hi = i;
        while (hi + 1 < trades.size() && trades[hi + 1].sending_time.ms <= t + half_window) ++hi;
        for (std::size_t j = lo; j <= hi; ++j) {
            const std::int64_t dt = trades[j].sending_time.ms - t;
            const std::int64_t dp = trades[j].price - trades[i].price;
            ++cell(centered_bin(dt, dt_bin), centered_bin(dp, dp_bin));
        }
        h.total_fills += hi - lo + 1;
    }
    h.total_triggers = trades.size();
    for (std::int64_t r = 0; r < row_count; ++r) {
        const auto begin = dense.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * width);
        h.rows.emplace(dp_lo + r, std::vector<std::uint64_t>(begin, begin + static_cast<std::ptrdiff_t>(width)));
    }
    return h;
}

std::vector<TradeRecord> collect_trades(MessageStream& messages) {
    std::vector<TradeRecord> out;
    MarketMessage msg;
    while (messages.next(msg)) {
        if (msg.kind == MessageKind::Trade) {
            out.push_back(TradeRecord{msg.sending_time, msg.price, msg.quantity, msg.seq});
        }
    }
    return out;
}

LiquidityPoint liquidity_of(const MarketMessage& msg, const BookState& state) {
    const SideTotals totals = side_totals(state);
    return LiquidityPoint{msg.seq, msg.sending_time, totals.bid, totals.ask, spread(state), midpoint(state)};
}

std::vector<LiquidityPoint> liquidity_series(StateStream& states) {
    std::vector<LiquidityPoint> out;
    while (const StatePoint* p = states.next()) {
        out.push_back(liquidity_of(p->message, p->state));
    }
    return out;
}

}  // namespace lobviz
