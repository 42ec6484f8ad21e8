// Transport-independent live session: the protocol state machine behind
// `rssa serve`. The websocket layer only moves strings in and out.
//
// client -> server
//   {"type":"cursor","x":<m>,"y":<m>}
//   {"type":"start","method":"M4"}     starts a trial (method optional)
//   {"type":"reset","method":"M2"}     ends the current trial, starts a new one
// server -> client
//   {"type":"frame","k":..,"t":..,"theta":[..],"cursor":[..],"d":..,"phi":..,
//    "phi_alpha":..,"mode":"..","goals":{"reached":n,"index":i,"current":[x,y]|null}}
//   {"type":"summary","trial":..,"method":..,"GOAL":..,"VIOL":..,"DIST":..,
//    "AVG_DIST":..,"clipped_ticks":..,"infeasible_ticks":..,"ticks":..}
//   {"type":"warning","message":".."}
#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rssa/scenario.hpp"
#include "rssa/trial.hpp"

namespace rssa {

struct LiveRecord {
    TrialRecord record;
    /// Template with the cursor stream recorded; feeding it to run_trial
    /// reproduces the session.
    Scenario replay;
};

class LiveSession {
public:
    explicit LiveSession(Scenario scenario_template);

    /// Parses one inbound message. Cursor updates are queued and take effect
    /// on the next tick. Returns any replies (warnings) to send immediately.
    std::vector<std::string> handle_message(std::string_view text);

    /// Advances one tick when a trial is running. Returns the frame and, when
    /// the trial reaches max_steps, the summary after it.
    std::vector<std::string> tick();

    /// Ends the running trial (e.g. on disconnect). Returns its summary, if any.
    std::optional<std::string> end();

    bool running() const { return runner_ != nullptr; }
    const Eigen::Vector2d& cursor() const { return cursor_; }

    /// Completed trials not yet collected.
    std::vector<LiveRecord> take_records();

private:
    void start(MethodId method);
    std::string finalize();

    Scenario template_;
    MethodId method_{MethodId::kM4};
    std::unique_ptr<TrialRunner> runner_;
    Eigen::Vector2d cursor_;
    std::deque<Eigen::Vector2d> pending_;
    std::vector<Eigen::Vector2d> stream_;
    std::vector<LiveRecord> records_;
};

std::string summary_json(const TrialRecord& record);

}  // namespace rssa
