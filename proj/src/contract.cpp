#include "lobviz/contract.hpp"

#include "lobviz/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <limits>
#include <sstream>

namespace lobviz {

std::int64_t parse_decimal_nanos(std::string_view text) {
    const std::string_view original = text;
    auto fail = [&](const std::string& why, std::size_t at) {
        return ParseError("invalid decimal '" + std::string(original) + "': " + why, at);
    };
    if (text.empty()) {
        throw fail("empty", 0);
    }
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        pos = 1;
    }
    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
    std::int64_t whole = 0;
    std::size_t whole_digits = 0;
    for (; pos < text.size() && text[pos] != '.'; ++pos) {
        const char c = text[pos];
        if (c < '0' || c > '9') {
            throw fail("unexpected character", pos);
        }
        if (whole > (kMax / kNanosPerUnit - 9) / 10) {
            throw fail("out of range", pos);
        }
        whole = whole * 10 + (c - '0');
        ++whole_digits;
    }
    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (pos < text.size()) {
        ++pos;  // '.'
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c < '0' || c > '9') {
                throw fail("unexpected character", pos);
            }
            if (frac_digits == 9) {
                if (c != '0') {
                    throw fail("more than nine fractional digits", pos);
                }
                continue;
            }
            frac = frac * 10 + (c - '0');
            ++frac_digits;
        }
    }
    if (whole_digits == 0 && frac_digits == 0) {
        throw fail("no digits", 0);
    }
    for (std::size_t i = frac_digits; i < 9; ++i) {
        frac *= 10;
    }
    const std::int64_t v = whole * kNanosPerUnit + frac;
    return negative ? -v : v;
}

std::string format_decimal_nanos(std::int64_t nanos) {
    const bool negative = nanos < 0;
    const std::uint64_t mag = negative ? 0 - static_cast<std::uint64_t>(nanos) : static_cast<std::uint64_t>(nanos);
    std::string out = negative ? "-" : "";
    out += std::to_string(mag / kNanosPerUnit);
    std::uint64_t frac = mag % kNanosPerUnit;
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, 9 - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') {
            digits.pop_back();
        }
        out += '.';
        out += digits;
    }
    return out;
}

void ContractMeta::validate() const {
    if (symbol.empty()) {
        throw Error("contract symbol is empty");
    }
    if (tick_size_nanos <= 0) {
        throw Error("contract " + symbol + ": tick size must be positive");
    }
    if (book_depth < 1 || book_depth > kDefaultBookDepth) {
        throw Error("contract " + symbol + ": book depth must be within [1, 10]");
    }
    if (!(dollar_multiplier > 0.0)) {
        throw Error("contract " + symbol + ": dollar multiplier must be positive");
    }
}

ContractMeta ContractMeta::placeholder(std::string symbol) {
    ContractMeta meta;
    meta.display_name = symbol;
    meta.symbol = std::move(symbol);
    return meta;
}

void ContractRegistry::add(ContractMeta meta) {
    meta.validate();
    auto key = meta.symbol;
    contracts_.insert_or_assign(std::move(key), std::move(meta));
}

const ContractMeta* ContractRegistry::find(std::string_view symbol) const {
    auto it = contracts_.find(symbol);
    return it == contracts_.end() ? nullptr : &it->second;
}

ContractRegistry ContractRegistry::from_json_text(std::string_view text) {
    ContractRegistry registry;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("contract config: ") + e.what());
    }
    const auto& list = doc.contains("contracts") ? doc.at("contracts") : doc;
    if (!list.is_array()) {
        throw Error("contract config: expected an array of contracts");
    }
    for (const auto& c : list) {
        try {
            ContractMeta meta;
            meta.symbol = c.at("symbol").get<std::string>();
            meta.display_name = c.value("name", meta.symbol);
            const auto& tick = c.at("tick_size");
            meta.tick_size_nanos = parse_decimal_nanos(tick.is_string() ? tick.get<std::string>() : tick.dump());
            meta.book_depth = c.value("book_depth", kDefaultBookDepth);
            if (c.contains("expiry")) {
                meta.expiry = parse_date(c.at("expiry").get<std::string>());
            }
            meta.dollar_multiplier = c.value("dollar_multiplier", 1.0);
            registry.add(std::move(meta));
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("contract config: ") + e.what());
        }
    }
    return registry;
}

ContractRegistry ContractRegistry::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open contract config " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

}  // namespace lobviz
