#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace lobviz {

enum class Mode : std::uint8_t { Strict = 0, Tolerant = 1 };

/// Collects warnings raised in tolerant mode. The callback, when set, receives
/// every message; the counter is always maintained.
class Diagnostics {
public:
    Diagnostics() = default;
    explicit Diagnostics(std::function<void(std::string_view)> sink) : sink_(std::move(sink)) {}

    void warn(std::string_view message) {
        ++warnings_;
        if (sink_) {
            sink_(message);
        }
    }

    std::uint64_t warnings() const { return warnings_; }

private:
    std::function<void(std::string_view)> sink_;
    std::uint64_t warnings_ = 0;
};

}  // namespace lobviz
