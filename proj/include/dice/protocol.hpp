#pragma once

#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "dice/channel.hpp"
#include "dice/debias.hpp"
#include "dice/hub.hpp"
#include "dice/wire.hpp"

namespace dice {

struct HubConfig {
    std::uint32_t p = 0;
    std::uint32_t n = 0;
    std::uint32_t machines = 1;
    double lambda = 0.0;
    double tau = 0.0;
    std::uint64_t budget = 0;
    /// Seed of the trial; machine m draws its sample from base_seed + m.
    std::uint64_t base_seed = 0;
    /// Per-connection deadline for each expected frame, and the idle limit while waiting for workers.
    std::chrono::milliseconds timeout{30000};

    wire::Config wire_config() const;
};

/**
 * Hub side of the single-round exchange. Each connection runs
 * HELLO -> CONFIG -> UPDATE -> ACK exactly once; ids must be distinct and
 * below `machines`. A duplicate or out-of-range HELLO is answered with
 * ACK(reject) and the session ends without affecting the others.
 * serve_session may be called concurrently from several threads.
 */
class Hub {
public:
    explicit Hub(HubConfig config);

    /// Throws Timeout (carrying the machine id once known), MalformedFrame or InvariantViolation.
    void serve_session(FrameChannel& channel);

    bool complete() const;
    std::vector<std::uint32_t> missing() const;
    const HubConfig& config() const noexcept { return config_; }

    /// Aggregates the collected updates in machine-id order. Throws InvalidParameter if incomplete.
    HubEstimate result() const;

private:
    HubConfig config_;
    mutable std::mutex mutex_;
    std::set<std::uint32_t> claimed_;
    std::map<std::uint32_t, SparseUpdate> updates_;
};

/// Accepts connections until every machine has delivered, then aggregates.
HubEstimate hub_serve(const HubConfig& config, TcpListener& listener);
HubEstimate hub_serve(const HubConfig& config, const std::string& host, std::uint16_t port);

/// Produces a machine's local sample once CONFIG has fixed p, n and the seed.
using DataProvider = std::function<DataMatrix(const wire::Config&)>;

/// Worker side of one session. Returns the hub's ACK status.
/// Throws ConnectionFailed if the hub hangs up early, MalformedFrame on a bad reply.
wire::AckStatus worker_session(FrameChannel& channel, std::uint32_t machine_id,
                               const DataProvider& data,
                               std::chrono::milliseconds timeout = std::chrono::seconds(60),
                               const GlassoOptions& options = {});

wire::AckStatus worker_run(const DataProvider& data, const std::string& host, std::uint16_t port,
                           std::uint32_t machine_id,
                           std::chrono::milliseconds timeout = std::chrono::seconds(60));

wire::AckStatus worker_run(const DataMatrix& data, const std::string& host, std::uint16_t port,
                           std::uint32_t machine_id,
                           std::chrono::milliseconds timeout = std::chrono::seconds(60));

} // namespace dice
