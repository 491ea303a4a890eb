#include "lobviz/tag_value.hpp"

#include "lobviz/error.hpp"
#include "lobviz/message.hpp"

namespace lobviz {

std::string_view to_string(MessageKind k) {
    switch (k) {
        case MessageKind::BookUpdate: return "book_update";
        case MessageKind::Trade: return "trade";
        case MessageKind::Statistic: return "statistic";
        case MessageKind::Definition: return "definition";
        case MessageKind::SecurityStatus: return "security_status";
    }
    return "unknown";
}

std::string_view to_string(Action a) {
    switch (a) {
        case Action::New: return "new";
        case Action::Change: return "change";
        case Action::Delete: return "delete";
    }
    return "unknown";
}

std::string_view to_string(Side s) { return s == Side::Bid ? "bid" : "ask"; }

namespace {

constexpr bool is_separator(char c) { return c == ' ' || c == '\t' || c == '\x01' || c == '|' || c == '\r' || c == '\n'; }

}  // namespace

std::optional<std::string_view> RawTagValueRecord::find(std::uint32_t tag) const {
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (fields_[i].tag == tag) {
            return value_at(i);
        }
    }
    return std::nullopt;
}

void RawTagValueRecord::push_back(std::uint32_t tag, std::string_view value) {
    fields_.push_back(Field{tag, static_cast<std::uint32_t>(buffer_.size()), static_cast<std::uint32_t>(value.size())});
    buffer_.append(value);
}

std::vector<std::pair<std::uint32_t, std::string>> RawTagValueRecord::pairs() const {
    std::vector<std::pair<std::uint32_t, std::string>> out;
    out.reserve(fields_.size());
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        out.emplace_back(fields_[i].tag, std::string(value_at(i)));
    }
    return out;
}

std::string RawTagValueRecord::to_text() const {
    std::string out;
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) {
            out += ' ';
        }
        out += std::to_string(fields_[i].tag);
        out += '=';
        out += value_at(i);
    }
    return out;
}

void parse_tag_value(std::string_view line, RawTagValueRecord& out) {
    out.clear();
    std::size_t pos = 0;
    const std::size_t n = line.size();
    while (pos < n) {
        while (pos < n && is_separator(line[pos])) {
            ++pos;
        }
        if (pos >= n) {
            break;
        }
        const std::size_t token_start = pos;
        std::uint64_t tag = 0;
        while (pos < n && line[pos] >= '0' && line[pos] <= '9') {
            tag = tag * 10 + static_cast<std::uint64_t>(line[pos] - '0');
            if (tag > 0xFFFFFFFFull) {
                throw ParseError("tag out of range", token_start);
            }
            ++pos;
        }
        if (pos == token_start) {
            if (line[pos] == '=') {
                throw ParseError("empty tag", token_start);
            }
            throw ParseError("non-numeric tag", token_start);
        }
        if (pos >= n || is_separator(line[pos])) {
            throw ParseError("token without '='", token_start);
        }
        if (line[pos] != '=') {
            throw ParseError("non-numeric tag", token_start);
        }
        if (tag == 0) {
            throw ParseError("tag must be positive", token_start);
        }
        ++pos;
        const std::size_t value_start = pos;
        while (pos < n && !is_separator(line[pos])) {
            ++pos;
        }
        out.push_back(static_cast<std::uint32_t>(tag), line.substr(value_start, pos - value_start));
    }
}

RawTagValueRecord parse_tag_value(std::string_view line) {
    RawTagValueRecord record;
    parse_tag_value(line, record);
    return record;
}

}  // namespace lobviz
