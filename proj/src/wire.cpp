#include "dice/wire.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "dice/errors.hpp"

namespace dice::wire {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
public:
    explicit Writer(Bytes& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

private:
    void put(std::uint64_t v, int width) {
        for (int b = 0; b < width; ++b) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
        }
    }
    Bytes& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t remaining() const { return in_.size() - pos_; }
    std::span<const std::uint8_t> rest() const { return in_.subspan(pos_); }

private:
    std::uint64_t get(std::size_t width) {
        if (remaining() < width) {
            throw MalformedFrame("frame truncated");
        }
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < width; ++b) {
            v |= static_cast<std::uint64_t>(in_[pos_ + b]) << (8 * b);
        }
        pos_ += width;
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::uint64_t v, const char* field) {
    if (v > UINT32_MAX) {
        throw InvalidParameter(std::string("encode_update: ") + field + " does not fit in u32");
    }
    return static_cast<std::uint32_t>(v);
}

} // namespace

Bytes encode_update(const SparseUpdate& update) {
    const auto& entries = update.entries.entries();
    Bytes out;
    out.reserve(kHeaderSize + kEntrySize * entries.size());
    Writer w(out);
    for (auto c : kMagic) w.u8(c);
    w.u8(kVersion);
    w.u32(update.machine_id);
    w.u32(checked_u32(update.p, "p"));
    w.u32(checked_u32(update.n, "n"));
    w.f64(update.rho);
    w.u32(checked_u32(entries.size(), "entry_count"));
    for (const auto& e : entries) {
        w.u32(checked_u32(e.i, "i"));
        w.u32(checked_u32(e.j, "j"));
        w.f64(e.v);
    }
    return out;
}

SparseUpdate decode_update(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) {
        throw MalformedFrame("update frame shorter than its header (" +
                             std::to_string(bytes.size()) + " bytes)");
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw MalformedFrame("update frame has bad magic");
    }
    Reader r(bytes.subspan(kMagic.size()));
    if (const auto version = r.u8(); version != kVersion) {
        throw MalformedFrame("unsupported update frame version " + std::to_string(version));
    }
    SparseUpdate u;
    u.machine_id = r.u32();
    u.p = r.u32();
    u.n = r.u32();
    u.rho = r.f64();
    const std::uint64_t count = r.u32();
    if (r.remaining() != count * kEntrySize) {
        throw MalformedFrame("update frame announces " + std::to_string(count) + " entries but carries " +
                             std::to_string(r.remaining()) + " payload bytes");
    }
    std::vector<SparseEntry> entries;
    entries.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        const Index i = r.u32();
        const Index j = r.u32();
        const double v = r.f64();
        entries.push_back({i, j, v});
    }
    u.entries = SparseSymMatrix(u.p, std::move(entries));
    u.bandwidth_used = bandwidth_of(u.entries);
    return u;
}

Bytes encode_message(const Message& message) {
    Bytes out;
    Writer w(out);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Hello>) {
                w.u8(static_cast<std::uint8_t>(Kind::hello));
                w.u32(m.machine_id);
            } else if constexpr (std::is_same_v<T, Config>) {
                w.u8(static_cast<std::uint8_t>(Kind::config));
                w.u32(m.p);
                w.u32(m.n);
                w.f64(m.lambda);
                w.u64(m.budget);
                w.u64(m.base_seed);
            } else if constexpr (std::is_same_v<T, Update>) {
                w.u8(static_cast<std::uint8_t>(Kind::update));
                out.insert(out.end(), m.frame.begin(), m.frame.end());
            } else {
                w.u8(static_cast<std::uint8_t>(Kind::ack));
                w.u8(static_cast<std::uint8_t>(m.status));
            }
        },
        message);
    return out;
}

Message decode_message(std::span<const std::uint8_t> payload) {
    Reader r(payload);
    const auto kind = r.u8();
    Message out;
    switch (static_cast<Kind>(kind)) {
    case Kind::hello:
        out = Hello{r.u32()};
        break;
    case Kind::config: {
        Config c;
        c.p = r.u32();
        c.n = r.u32();
        c.lambda = r.f64();
        c.budget = r.u64();
        c.base_seed = r.u64();
        out = c;
        break;
    }
    case Kind::update: {
        auto rest = r.rest();
        return Update{Bytes(rest.begin(), rest.end())};
    }
    case Kind::ack: {
        const auto status = r.u8();
        if (status > static_cast<std::uint8_t>(AckStatus::reject)) {
            throw MalformedFrame("unknown ACK status " + std::to_string(status));
        }
        out = Ack{static_cast<AckStatus>(status)};
        break;
    }
    default:
        throw MalformedFrame("unknown message kind " + std::to_string(kind));
    }
    if (r.remaining() != 0) {
        throw MalformedFrame("trailing bytes after message body");
    }
    return out;
}

} // namespace dice::wire
