#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "dice/wire.hpp"

namespace dice {

/**
 * Reliable, ordered transport of whole frames. On a byte stream each frame is
 * a u32 little-endian payload length followed by the payload.
 */
class FrameChannel {
public:
    virtual ~FrameChannel() = default;

    virtual void send(std::span<const std::uint8_t> payload) = 0;

    /// Next payload, or nullopt once the peer has closed cleanly between frames.
    /// Throws Timeout when nothing arrives within `timeout`.
    virtual std::optional<wire::Bytes> receive(std::chrono::milliseconds timeout) = 0;
};

class TcpChannel final : public FrameChannel {
public:
    explicit TcpChannel(int fd) noexcept : fd_(fd) {}
    TcpChannel(TcpChannel&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    TcpChannel& operator=(TcpChannel&& other) noexcept;
    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;
    ~TcpChannel() override;

    /// Throws ConnectionFailed.
    static TcpChannel connect(const std::string& host, std::uint16_t port,
                              std::chrono::milliseconds timeout);

    void send(std::span<const std::uint8_t> payload) override;
    std::optional<wire::Bytes> receive(std::chrono::milliseconds timeout) override;

private:
    // false on clean EOF before the first byte
    bool read_exact(std::uint8_t* dst, std::size_t len,
                    std::chrono::steady_clock::time_point deadline, bool eof_ok);
    int fd_ = -1;
};

class TcpListener {
public:
    /// Port 0 binds an ephemeral port; see port(). Throws ConnectionFailed.
    TcpListener(const std::string& host, std::uint16_t port);
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener();

    std::uint16_t port() const noexcept { return port_; }
    std::optional<TcpChannel> accept(std::chrono::milliseconds timeout);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Two connected in-process endpoints. Destroying one closes the other's inbound side.
std::pair<std::unique_ptr<FrameChannel>, std::unique_ptr<FrameChannel>> make_memory_channel_pair();

} // namespace dice
