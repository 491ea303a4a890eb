#pragma once

#include "lobviz/contract.hpp"
#include "lobviz/diagnostics.hpp"
#include "lobviz/message.hpp"
#include "lobviz/tag_value.hpp"

#include <cstdint>

namespace lobviz {

struct DecodeOptions {
    Mode mode = Mode::Strict;
    Diagnostics* diagnostics = nullptr;
};

/// Maps one incremental-refresh entry onto a MarketMessage.
///
/// Entry type (269): 0 bid, 1 ask, 2 trade, 4 opening price, 6 settlement
/// price, any other single byte an opaque statistic. Book updates additionally
/// need the update action (279: 0 new, 1 change, 2 delete) and the price level
/// (1023). Prices are checked against the tick grid of `meta`; an off-tick price
/// throws in strict mode and is rounded to the nearest tick with a warning in
/// tolerant mode.
MarketMessage decode_entry(const RawTagValueRecord& record, const ContractMeta& meta, std::uint64_t seq,
                           const DecodeOptions& options = {});

/// Builds contract metadata from a security definition record (35=d).
ContractMeta decode_definition(const RawTagValueRecord& record);

/// Stateful decoder for a whole tag-value stream: tracks definitions, assigns
/// sequence numbers and decodes entries with the right contract.
class MessageDecoder {
public:
    MessageDecoder(ContractRegistry registry, DecodeOptions options)
        : registry_(std::move(registry)), options_(options) {}

    /// Decodes `record` into `out`. Returns false when the record was skipped
    /// (empty record, or an unknown symbol in tolerant mode).
    bool decode(const RawTagValueRecord& record, MarketMessage& out);

    const ContractRegistry& registry() const { return registry_; }
    std::uint64_t next_seq() const { return next_seq_; }

private:
    ContractRegistry registry_;
    DecodeOptions options_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace lobviz
