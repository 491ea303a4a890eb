#include "lobviz/reconstruct.hpp"

#include "lobviz/error.hpp"

namespace lobviz {

const StatePoint* Reconstructor::next() {
    if (!messages_.next(current_.message)) {
        return nullptr;
    }
    try {
        current_.trade = apply_message(current_.state, current_.message, options_);
    } catch (const ReconstructionError& e) {
        throw ReconstructionError(std::string(e.what()) + " at stream position " + std::to_string(applied_), e.seq());
    }
    ++applied_;
    return &current_;
}

std::vector<StatePoint> reconstruct_all(MessageStream& messages, BookState start, BookOptions options) {
    Reconstructor rec(messages, start, options);
    std::vector<StatePoint> out;
    while (const StatePoint* p = rec.next()) {
        out.push_back(*p);
    }
    return out;
}

std::vector<StatePoint> reconstruct_all(std::span<const MarketMessage> messages, BookState start, BookOptions options) {
    VectorMessageStream stream(std::vector<MarketMessage>(messages.begin(), messages.end()));
    return reconstruct_all(stream, start, options);
}

}  // namespace lobviz
