#include "dice/protocol.hpp"

#include <atomic>
#include <string>
#include <thread>

#include "dice/errors.hpp"

namespace dice {
namespace {

using Clock = std::chrono::steady_clock;

void send_message(FrameChannel& channel, const wire::Message& m) {
    const auto payload = wire::encode_message(m);
    channel.send(payload);
}

std::string id_text(std::uint32_t id) { return "machine " + std::to_string(id); }

} // namespace

wire::Config HubConfig::wire_config() const {
    return wire::Config{p, n, lambda, budget, base_seed};
}

Hub::Hub(HubConfig config) : config_(config) {
    if (config_.machines < 1) {
        throw InvalidParameter("Hub: need at least one machine");
    }
    if (config_.budget < config_.p) {
        throw InvalidParameter("Hub: budget must cover the diagonal");
    }
}

void Hub::serve_session(FrameChannel& channel) {
    std::optional<wire::Bytes> frame;
    try {
        frame = channel.receive(config_.timeout);
    } catch (const Timeout&) {
        throw Timeout(std::nullopt, "no HELLO within the deadline");
    }
    if (!frame) {
        throw Timeout(std::nullopt, "peer closed before HELLO");
    }
    const auto hello_msg = wire::decode_message(*frame);
    const auto* hello = std::get_if<wire::Hello>(&hello_msg);
    if (hello == nullptr) {
        throw MalformedFrame("expected HELLO as the first message");
    }
    const std::uint32_t id = hello->machine_id;
    {
        std::lock_guard lock(mutex_);
        if (id >= config_.machines || claimed_.contains(id)) {
            send_message(channel, wire::Ack{wire::AckStatus::reject});
            return;
        }
        claimed_.insert(id);
    }
    // a session that dies before delivering must not keep the id reserved
    struct Release {
        Hub* hub;
        std::uint32_t id;
        bool armed = true;
        ~Release() {
            if (armed) {
                std::lock_guard lock(hub->mutex_);
                hub->claimed_.erase(id);
            }
        }
    } release{this, id};

    send_message(channel, config_.wire_config());

    try {
        frame = channel.receive(config_.timeout);
    } catch (const Timeout&) {
        throw Timeout(id, id_text(id) + " sent no UPDATE within the deadline");
    } catch (const Error& e) {
        throw Timeout(id, id_text(id) + " dropped before UPDATE: " + e.what());
    }
    if (!frame) {
        throw Timeout(id, id_text(id) + " disconnected before UPDATE");
    }
    const auto update_msg = wire::decode_message(*frame);
    const auto* update_frame = std::get_if<wire::Update>(&update_msg);
    if (update_frame == nullptr) {
        throw MalformedFrame(id_text(id) + ": expected UPDATE after CONFIG");
    }
    SparseUpdate update = wire::decode_update(update_frame->frame);
    std::string problem;
    if (update.machine_id != id) {
        problem = "update carries machine id " + std::to_string(update.machine_id);
    } else if (update.p != config_.p || update.n != config_.n) {
        problem = "update dimensions do not match CONFIG";
    } else if (update.bandwidth_used > config_.budget) {
        problem = "update uses " + std::to_string(update.bandwidth_used) + " cells, budget is " +
                  std::to_string(config_.budget);
    }
    if (!problem.empty()) {
        send_message(channel, wire::Ack{wire::AckStatus::reject});
        throw InvariantViolation(id_text(id) + ": " + problem);
    }
    {
        std::lock_guard lock(mutex_);
        updates_.emplace(id, std::move(update));
    }
    release.armed = false;
    send_message(channel, wire::Ack{wire::AckStatus::ok});
}

bool Hub::complete() const {
    std::lock_guard lock(mutex_);
    return updates_.size() == config_.machines;
}

std::vector<std::uint32_t> Hub::missing() const {
    std::lock_guard lock(mutex_);
    std::vector<std::uint32_t> out;
    for (std::uint32_t m = 0; m < config_.machines; ++m) {
        if (!updates_.contains(m)) out.push_back(m);
    }
    return out;
}

HubEstimate Hub::result() const {
    std::vector<SparseUpdate> ordered;
    {
        std::lock_guard lock(mutex_);
        if (updates_.size() != config_.machines) {
            throw InvalidParameter("Hub::result: still waiting for updates");
        }
        for (const auto& [id, u] : updates_) ordered.push_back(u);
    }
    return combine_updates(ordered, config_.tau);
}

HubEstimate hub_serve(const HubConfig& config, TcpListener& listener) {
    Hub hub(config);
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::atomic<std::int64_t> last_activity{Clock::now().time_since_epoch().count()};
    std::vector<std::jthread> sessions;

    const auto slice = std::chrono::milliseconds(20);
    while (!hub.complete() && !failed.load()) {
        auto channel = listener.accept(slice);
        const auto now = Clock::now();
        if (channel) {
            last_activity = now.time_since_epoch().count();
            sessions.emplace_back([&, ch = std::move(*channel)]() mutable {
                try {
                    hub.serve_session(ch);
                    last_activity = Clock::now().time_since_epoch().count();
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    failed = true;
                }
            });
            continue;
        }
        const auto idle = now - Clock::time_point(Clock::duration(last_activity.load()));
        if (idle > config.timeout) {
            const auto missing = hub.missing();
            std::string ids;
            for (auto m : missing) ids += (ids.empty() ? "" : ",") + std::to_string(m);
            failed = true;
            std::lock_guard lock(error_mutex);
            if (!first_error) {
                first_error = std::make_exception_ptr(Timeout(
                    missing.size() == 1 ? std::optional(missing.front()) : std::nullopt,
                    "hub timed out waiting for machines " + ids));
            }
        }
    }
    sessions.clear();
    if (first_error) std::rethrow_exception(first_error);
    return hub.result();
}

HubEstimate hub_serve(const HubConfig& config, const std::string& host, std::uint16_t port) {
    TcpListener listener(host, port);
    return hub_serve(config, listener);
}

wire::AckStatus worker_session(FrameChannel& channel, std::uint32_t machine_id,
                               const DataProvider& data, std::chrono::milliseconds timeout,
                               const GlassoOptions& options) {
    send_message(channel, wire::Hello{machine_id});
    auto frame = channel.receive(timeout);
    if (!frame) {
        throw ConnectionFailed("hub closed the connection before CONFIG");
    }
    const auto reply = wire::decode_message(*frame);
    if (const auto* ack = std::get_if<wire::Ack>(&reply)) {
        return ack->status;
    }
    const auto* config = std::get_if<wire::Config>(&reply);
    if (config == nullptr) {
        throw MalformedFrame("expected CONFIG or ACK after HELLO");
    }
    const DataMatrix x = data(*config);
    if (x.p() != config->p || x.n() != config->n) {
        throw InvalidParameter("worker data is " + std::to_string(x.n()) + "x" +
                               std::to_string(x.p()) + " but the hub expects " +
                               std::to_string(config->n) + "x" + std::to_string(config->p));
    }
    const SparseUpdate update = machine_estimate(x, config->lambda, config->budget, machine_id, options);
    send_message(channel, wire::Update{wire::encode_update(update)});
    frame = channel.receive(timeout);
    if (!frame) {
        throw ConnectionFailed("hub closed the connection before ACK");
    }
    const auto ack_msg = wire::decode_message(*frame);
    const auto* ack = std::get_if<wire::Ack>(&ack_msg);
    if (ack == nullptr) {
        throw MalformedFrame("expected ACK after UPDATE");
    }
    return ack->status;
}

wire::AckStatus worker_run(const DataProvider& data, const std::string& host, std::uint16_t port,
                           std::uint32_t machine_id, std::chrono::milliseconds timeout) {
    TcpChannel channel = TcpChannel::connect(host, port, timeout);
    return worker_session(channel, machine_id, data, timeout);
}

wire::AckStatus worker_run(const DataMatrix& data, const std::string& host, std::uint16_t port,
                           std::uint32_t machine_id, std::chrono::milliseconds timeout) {
    return worker_run([&](const wire::Config&) { return data; }, host, port, machine_id, timeout);
}

} // namespace dice
