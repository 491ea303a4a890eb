#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lobviz {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed tag-value text or timestamp. `offset` is the byte offset within
/// the parsed input; `line` is filled in by line-oriented readers.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::optional<std::uint64_t> line = {})
        : Error(what), offset_(offset), line_(line) {}

    std::size_t offset() const noexcept { return offset_; }
    std::optional<std::uint64_t> line() const noexcept { return line_; }

private:
    std::size_t offset_;
    std::optional<std::uint64_t> line_;
};

/// A well-formed record that cannot be turned into a MarketMessage.
class DecodeError : public Error {
public:
    explicit DecodeError(const std::string& what, std::vector<std::uint32_t> missing = {})
        : Error(what), missing_tags_(std::move(missing)) {}

    const std::vector<std::uint32_t>& missing_tags() const noexcept { return missing_tags_; }

private:
    std::vector<std::uint32_t> missing_tags_;
};

/// A message that cannot be applied to the current book.
class ReconstructionError : public Error {
public:
    ReconstructionError(const std::string& what, std::uint64_t seq) : Error(what), seq_(seq) {}
    std::uint64_t seq() const noexcept { return seq_; }

private:
    std::uint64_t seq_;
};

/// Input handed to the event-log writer is not ordered by (sending_time, seq).
class OrderError : public Error {
public:
    OrderError(const std::string& what, std::uint64_t seq) : Error(what), seq_(seq) {}
    std::uint64_t seq() const noexcept { return seq_; }

private:
    std::uint64_t seq_;
};

/// Corrupt or truncated event log. `block` is the index of the block that failed;
/// it equals the block count when the trailer is the broken part.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t block) : Error(what), block_(block) {}
    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

/// Invalid request parameter. `field` names the offending parameter.
class QueryError : public Error {
public:
    QueryError(const std::string& what, std::string field) : Error(what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// A window with nothing to draw or compute.
class EmptyWindowError : public Error {
public:
    using Error::Error;
};

}  // namespace lobviz
