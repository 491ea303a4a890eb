#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace lobviz::detail {

inline void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u16be(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v));
}

inline void put_u32be(std::string& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) {
        out.push_back(static_cast<char>(v >> shift));
    }
}

inline void put_u64be(std::string& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
        out.push_back(static_cast<char>(v >> shift));
    }
}

inline void put_i64be(std::string& out, std::int64_t v) { put_u64be(out, static_cast<std::uint64_t>(v)); }

inline void put_f64be(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64be(out, bits);
}

inline void put_uvarint(std::string& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7F) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

inline std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

inline std::int64_t unzigzag(std::uint64_t v) {
    return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

inline void put_svarint(std::string& out, std::int64_t v) { put_uvarint(out, zigzag(v)); }

inline void put_bytes16(std::string& out, std::string_view s) {
    put_u16be(out, static_cast<std::uint16_t>(s.size()));
    out.append(s);
}

/// Bounds-checked reader over a byte range. `Fail` is a callable that throws.
template <typename Fail>
class Cursor {
public:
    Cursor(std::string_view data, Fail fail) : data_(data), fail_(fail) {}

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool done() const { return pos_ >= data_.size(); }

    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }

    std::uint16_t u16be() {
        need(2);
        const auto* p = bytes();
        pos_ += 2;
        return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
    }

    std::uint32_t u32be() {
        need(4);
        const auto* p = bytes();
        pos_ += 4;
        return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
    }

    std::uint64_t u64be() {
        need(8);
        const auto* p = bytes();
        pos_ += 8;
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v = (v << 8) | p[i];
        }
        return v;
    }

    std::int64_t i64be() { return static_cast<std::int64_t>(u64be()); }

    double f64be() {
        const std::uint64_t bits = u64be();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }

    std::uint64_t uvarint() {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            need(1);
            const auto b = static_cast<std::uint8_t>(data_[pos_++]);
            v |= std::uint64_t{b & 0x7Fu} << shift;
            if ((b & 0x80) == 0) {
                return v;
            }
        }
        fail_("varint too long");
        return 0;
    }

    std::int64_t svarint() { return unzigzag(uvarint()); }

    std::string_view take(std::size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::string_view bytes16() { return take(u16be()); }

private:
    const unsigned char* bytes() const { return reinterpret_cast<const unsigned char*>(data_.data() + pos_); }

    void need(std::size_t n) {
        if (data_.size() - pos_ < n) {
            fail_("unexpected end of data");
        }
    }

    std::string_view data_;
    std::size_t pos_ = 0;
    Fail fail_;
};

}  // namespace lobviz::detail
