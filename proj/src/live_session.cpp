#include "rssa/live_session.hpp"

#include <cmath>

#include <json.hpp>

namespace rssa {

using nlohmann::json;

namespace {

std::string warning(std::string_view message) {
    return json{{"type", "warning"}, {"message", message}}.dump();
}

}  // namespace

std::string summary_json(const TrialRecord& r) {
    const TrialMetrics& m = r.metrics;
    json j = {{"type", "summary"},
              {"trial", r.trial},
              {"method", to_string(r.method)},
              {"GOAL", m.goals_reached},
              {"VIOL", m.violations},
              {"DIST", m.min_distance},
              {"AVG_DIST", m.avg_distance},
              {"clipped_ticks", m.clipped_ticks},
              {"infeasible_ticks", m.infeasible_ticks},
              {"ticks", r.log.size()},
              {"aborted", r.aborted}};
    return j.dump();
}

LiveSession::LiveSession(Scenario scenario_template)
    : template_(std::move(scenario_template)), cursor_(template_.human.spawn) {
    template_.human_kind = HumanTrackKind::kLive;
    template_.recorded_track.clear();
    template_.validate();
}

std::vector<std::string> LiveSession::handle_message(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        return {warning("malformed message ignored")};
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "cursor") {
        if (!j.contains("x") || !j.contains("y") || !j["x"].is_number() || !j["y"].is_number()) {
            return {warning("cursor message needs numeric x and y")};
        }
        const Eigen::Vector2d p{j["x"].get<double>(), j["y"].get<double>()};
        if (!p.allFinite()) {
            return {warning("cursor position must be finite")};
        }
        pending_.push_back(p);
        return {};
    }
    if (type == "start" || type == "reset") {
        MethodId method = method_;
        if (j.contains("method")) {
            if (!j["method"].is_string()) {
                return {warning("method must be a string")};
            }
            try {
                method = parse_method(j["method"].get<std::string>());
            } catch (const std::invalid_argument& ex) {
                return {warning(ex.what())};
            }
        }
        std::vector<std::string> out;
        if (runner_) {
            out.push_back(finalize());
        }
        start(method);
        return out;
    }
    return {warning("unknown message type '" + type + "'")};
}

void LiveSession::start(MethodId method) {
    method_ = method;
    stream_.clear();
    pending_.clear();
    cursor_ = template_.human.spawn;
    runner_ = std::make_unique<TrialRunner>(template_, method);
}

std::vector<std::string> LiveSession::tick() {
    if (!runner_) {
        return {};
    }
    if (!pending_.empty()) {
        cursor_ = pending_.back();
        pending_.clear();
    }
    stream_.push_back(cursor_);
    const TickLog& e = runner_->tick(cursor_);

    json goals = {{"reached", e.goals_reached}, {"index", runner_->goal_index()}};
    if (const auto g = runner_->current_goal()) {
        goals["current"] = {(*g)(0), (*g)(1)};
    } else {
        goals["current"] = nullptr;
    }
    json frame = {{"type", "frame"},
                  {"k", e.k},
                  {"t", e.t},
                  {"theta", {e.theta(0), e.theta(1)}},
                  {"cursor", {e.cursor_true(0), e.cursor_true(1)}},
                  {"d", e.d},
                  {"phi", std::isfinite(e.phi) ? e.phi : 0.0},
                  {"phi_alpha", std::isfinite(e.phi_alpha) ? e.phi_alpha : 0.0},
                  {"mode", to_string(e.mode)},
                  {"goals", goals}};
    std::vector<std::string> out{frame.dump()};
    if (runner_->done()) {
        out.push_back(finalize());
    }
    return out;
}

std::optional<std::string> LiveSession::end() {
    if (!runner_) {
        return std::nullopt;
    }
    return finalize();
}

std::string LiveSession::finalize() {
    LiveRecord rec;
    rec.record = runner_->finish();
    rec.replay = template_;
    rec.replay.human_kind = HumanTrackKind::kRecorded;
    rec.replay.recorded_track = stream_;
    rec.replay.max_steps = static_cast<int>(stream_.size());
    runner_.reset();
    std::string summary = summary_json(rec.record);
    if (!stream_.empty()) {
        records_.push_back(std::move(rec));
    }
    stream_.clear();
    return summary;
}

std::vector<LiveRecord> LiveSession::take_records() {
    std::vector<LiveRecord> out;
    out.swap(records_);
    return out;
}

}  // namespace rssa
