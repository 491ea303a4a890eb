#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lobviz {

/// Tags of the supported tag-value dialect.
namespace tag {
inline constexpr std::uint32_t kMsgType = 35;
inline constexpr std::uint32_t kSymbolName = 55;
inline constexpr std::uint32_t kSendingTime = 52;
inline constexpr std::uint32_t kSecurityDesc = 107;
inline constexpr std::uint32_t kContractMultiplier = 231;
inline constexpr std::uint32_t kMarketDepth = 264;
inline constexpr std::uint32_t kEntryType = 269;
inline constexpr std::uint32_t kEntryPx = 270;
inline constexpr std::uint32_t kEntrySize = 271;
inline constexpr std::uint32_t kUpdateAction = 279;
inline constexpr std::uint32_t kMaturityDate = 541;
inline constexpr std::uint32_t kMinPriceIncrement = 969;
inline constexpr std::uint32_t kPriceLevel = 1023;
}  // namespace tag

/// Ordered (tag, value) pairs of one record. Values live in one owned buffer so
/// a record can be reused across lines without reallocating.
class RawTagValueRecord {
public:
    struct Field {
        std::uint32_t tag;
        std::uint32_t offset;
        std::uint32_t length;
    };

    std::size_t size() const { return fields_.size(); }
    bool empty() const { return fields_.empty(); }

    std::uint32_t tag_at(std::size_t i) const { return fields_[i].tag; }
    std::string_view value_at(std::size_t i) const {
        return std::string_view(buffer_).substr(fields_[i].offset, fields_[i].length);
    }

    /// First value carried for `tag`, if any.
    std::optional<std::string_view> find(std::uint32_t tag) const;

    void clear() {
        fields_.clear();
        buffer_.clear();
    }
    void push_back(std::uint32_t tag, std::string_view value);

    std::vector<std::pair<std::uint32_t, std::string>> pairs() const;

    /// Re-encodes as space separated `tag=value` tokens.
    std::string to_text() const;

private:
    std::vector<Field> fields_;
    std::string buffer_;
};

/// Splits `line` into tag=value tokens separated by spaces, tabs, SOH or '|'.
/// Unknown tags are preserved in order. Throws ParseError with the byte offset of
/// the malformed token.
void parse_tag_value(std::string_view line, RawTagValueRecord& out);
RawTagValueRecord parse_tag_value(std::string_view line);

}  // namespace lobviz
