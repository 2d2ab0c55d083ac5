#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dice/debias.hpp"

namespace dice::wire {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::array<std::uint8_t, 4> kMagic{'D', 'I', 'C', '1'};
inline constexpr std::uint8_t kVersion = 1;

/// magic(4) version(1) machine_id(4) p(4) n(4) rho(8) entry_count(4)
inline constexpr std::size_t kHeaderSize = 29;
/// i(4) j(4) v(8)
inline constexpr std::size_t kEntrySize = 16;

/// Fixed little-endian layout; size is kHeaderSize + kEntrySize * entry_count.
Bytes encode_update(const SparseUpdate& update);

/// Throws MalformedFrame on bad magic, version or length and InvariantViolation
/// on entries that are unsorted, duplicated, outside the upper triangle or zero.
SparseUpdate decode_update(std::span<const std::uint8_t> bytes);

// Protocol payloads. Every payload starts with a one-byte kind tag.

enum class Kind : std::uint8_t { hello = 1, config = 2, update = 3, ack = 4 };

enum class AckStatus : std::uint8_t { ok = 0, reject = 1 };

struct Hello {
    std::uint32_t machine_id = 0;
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct Config {
    std::uint32_t p = 0;
    std::uint32_t n = 0;
    double lambda = 0.0;
    std::uint64_t budget = 0;
    std::uint64_t base_seed = 0;
    friend bool operator==(const Config&, const Config&) = default;
};

struct Update {
    Bytes frame;
    friend bool operator==(const Update&, const Update&) = default;
};

struct Ack {
    AckStatus status = AckStatus::ok;
    friend bool operator==(const Ack&, const Ack&) = default;
};

using Message = std::variant<Hello, Config, Update, Ack>;

Bytes encode_message(const Message& message);
Message decode_message(std::span<const std::uint8_t> payload);

/// Largest payload a peer may announce in a length prefix.
inline constexpr std::uint32_t kMaxPayload = 1u << 30;

} // namespace dice::wire
