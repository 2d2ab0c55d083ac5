#include "dice/channel.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <thread>
#include <unistd.h>

#include "dice/errors.hpp"

namespace dice {
namespace {

using Clock = std::chrono::steady_clock;

std::string errno_text(const char* what) {
    return std::string(what) + ": " + std::strerror(errno);
}

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return static_cast<int>(std::max<std::int64_t>(0, left.count()));
}

// Waits for `events` on fd; false on timeout.
bool wait_for(int fd, short events, Clock::time_point deadline) {
    for (;;) {
        pollfd pfd{fd, events, 0};
        const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
        if (rc > 0) return true;
        if (rc == 0) return false;
        if (errno != EINTR) throw ConnectionFailed(errno_text("poll"));
    }
}

addrinfo* resolve(const std::string& host, std::uint16_t port, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    addrinfo* res = nullptr;
    const auto service = std::to_string(port);
    const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
    if (rc != 0) {
        throw ConnectionFailed("cannot resolve " + host + ": " + ::gai_strerror(rc));
    }
    return res;
}

} // namespace

TcpChannel& TcpChannel::operator=(TcpChannel&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

TcpChannel::~TcpChannel() {
    if (fd_ >= 0) ::close(fd_);
}

TcpChannel TcpChannel::connect(const std::string& host, std::uint16_t port,
                               std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    addrinfo* res = resolve(host, port, false);
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
    // retry while the hub is still coming up
    for (;;) {
        const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
        if (fd < 0) throw ConnectionFailed(errno_text("socket"));
        if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
            const int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return TcpChannel(fd);
        }
        const auto err = errno;
        ::close(fd);
        if (Clock::now() >= deadline || (err != ECONNREFUSED && err != EINTR)) {
            errno = err;
            throw ConnectionFailed(errno_text(("connect to " + host + ":" + std::to_string(port)).c_str()));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

void TcpChannel::send(std::span<const std::uint8_t> payload) {
    if (payload.size() > wire::kMaxPayload) {
        throw InvalidParameter("frame payload too large");
    }
    wire::Bytes buf;
    buf.reserve(payload.size() + 4);
    const auto len = static_cast<std::uint32_t>(payload.size());
    for (int b = 0; b < 4; ++b) buf.push_back(static_cast<std::uint8_t>(len >> (8 * b)));
    buf.insert(buf.end(), payload.begin(), payload.end());
    std::size_t sent = 0;
    while (sent < buf.size()) {
        const auto rc = ::send(fd_, buf.data() + sent, buf.size() - sent, MSG_NOSIGNAL);
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw ConnectionFailed(errno_text("send"));
        }
        sent += static_cast<std::size_t>(rc);
    }
}

bool TcpChannel::read_exact(std::uint8_t* dst, std::size_t len, Clock::time_point deadline,
                            bool eof_ok) {
    std::size_t got = 0;
    while (got < len) {
        if (!wait_for(fd_, POLLIN, deadline)) {
            throw Timeout(std::nullopt, "receive timed out");
        }
        const auto rc = ::recv(fd_, dst + got, len - got, 0);
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw ConnectionFailed(errno_text("recv"));
        }
        if (rc == 0) {
            if (got == 0 && eof_ok) return false;
            throw MalformedFrame("connection closed mid-frame");
        }
        got += static_cast<std::size_t>(rc);
    }
    return true;
}

std::optional<wire::Bytes> TcpChannel::receive(std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    std::uint8_t prefix[4];
    if (!read_exact(prefix, 4, deadline, true)) {
        return std::nullopt;
    }
    std::uint32_t len = 0;
    for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(prefix[b]) << (8 * b);
    if (len > wire::kMaxPayload) {
        throw MalformedFrame("announced payload of " + std::to_string(len) + " bytes is too large");
    }
    wire::Bytes payload(len);
    if (len > 0) read_exact(payload.data(), len, deadline, false);
    return payload;
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
    addrinfo* res = resolve(host, port, true);
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, &::freeaddrinfo);
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd_ < 0) throw ConnectionFailed(errno_text("socket"));
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd_, res->ai_addr, res->ai_addrlen) != 0 || ::listen(fd_, 64) != 0) {
        const auto msg = errno_text(("listen on " + host + ":" + std::to_string(port)).c_str());
        ::close(fd_);
        throw ConnectionFailed(msg);
    }
    sockaddr_in bound{};
    socklen_t size = sizeof bound;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &size);
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::optional<TcpChannel> TcpListener::accept(std::chrono::milliseconds timeout) {
    if (!wait_for(fd_, POLLIN, Clock::now() + timeout)) {
        return std::nullopt;
    }
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) {
        if (errno == EINTR || errno == ECONNABORTED || errno == EAGAIN) return std::nullopt;
        throw ConnectionFailed(errno_text("accept"));
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return TcpChannel(fd);
}

namespace {

struct MemoryLink {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<wire::Bytes> inbox[2];
    bool closed[2] = {false, false};
};

class MemoryChannel final : public FrameChannel {
public:
    MemoryChannel(std::shared_ptr<MemoryLink> link, int side) : link_(std::move(link)), side_(side) {}

    ~MemoryChannel() override {
        {
            std::lock_guard lock(link_->mutex);
            link_->closed[side_] = true;
        }
        link_->cv.notify_all();
    }

    void send(std::span<const std::uint8_t> payload) override {
        {
            std::lock_guard lock(link_->mutex);
            if (link_->closed[1 - side_]) {
                throw ConnectionFailed("peer closed");
            }
            link_->inbox[1 - side_].emplace_back(payload.begin(), payload.end());
        }
        link_->cv.notify_all();
    }

    std::optional<wire::Bytes> receive(std::chrono::milliseconds timeout) override {
        std::unique_lock lock(link_->mutex);
        auto& inbox = link_->inbox[side_];
        const bool ready = link_->cv.wait_for(
            lock, timeout, [&] { return !inbox.empty() || link_->closed[1 - side_]; });
        if (!ready) {
            throw Timeout(std::nullopt, "receive timed out");
        }
        if (inbox.empty()) {
            return std::nullopt;
        }
        auto front = std::move(inbox.front());
        inbox.pop_front();
        return front;
    }

private:
    std::shared_ptr<MemoryLink> link_;
    int side_;
};

} // namespace

std::pair<std::unique_ptr<FrameChannel>, std::unique_ptr<FrameChannel>> make_memory_channel_pair() {
    auto link = std::make_shared<MemoryLink>();
    return {std::make_unique<MemoryChannel>(link, 0), std::make_unique<MemoryChannel>(link, 1)};
}

} // namespace dice
