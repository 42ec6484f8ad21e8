// Websocket transport for LiveSession (one session per connection).
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "rssa/live_session.hpp"
#include "rssa/scenario.hpp"

namespace rssa {

struct ServeOptions {
    std::string address{"127.0.0.1"};
    /// 0 picks a free port; see WsServer::port().
    unsigned short port{8765};
    /// Finished and disconnected trials are written here when set.
    std::optional<std::filesystem::path> record_dir;
    /// Wall-clock tick period; defaults to the scenario dt.
    std::optional<double> tick_interval_s;
};

class WsServer {
public:
    WsServer(Scenario scenario_template, ServeOptions options);
    ~WsServer();
    WsServer(const WsServer&) = delete;
    WsServer& operator=(const WsServer&) = delete;

    unsigned short port() const;

    /// Serves until stop() is called.
    void run();
    /// Safe to call from any thread.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Writes <stem>.replay.json (a scenario run_trial can replay), <stem>.log.csv
/// and <stem>.summary.json. Returns the stem path.
std::filesystem::path persist_live_record(const LiveRecord& record,
                                          const std::filesystem::path& dir, int index);

}  // namespace rssa
