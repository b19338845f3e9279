#include "gm3/session.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "gm3/csv_log.hpp"
#include "gm3/errors.hpp"

namespace gm3 {
namespace {

using nlohmann::json;

VehicleConfig build_vehicle(const SessionConfig& c, const std::filesystem::path& dir) {
  auto vc = load_vehicle_config(resolve_vehicle_config(c.vehicle, dir), c.param_overrides);
  if (c.dt) vc.dt = *c.dt;
  if (!(vc.dt > 0.0) || !std::isfinite(vc.dt)) throw ConfigError("session dt must be positive");
  if (!(c.stream_rate > 0.0) || c.stream_rate > 1.0 / vc.dt + 1e-9) {
    throw ConfigError("stream_rate must lie in (0, 1/dt]");
  }
  return vc;
}

std::shared_ptr<const DynamicsModel> lookup_model(const std::string& id) {
  return ModelRegistry::instance().get(id);
}

}  // namespace

Session::Session(std::string id, const SessionConfig& config, const std::filesystem::path& dir)
    : id_(std::move(id)),
      config_(config),
      sim_(build_vehicle(config, dir), lookup_model(config.model), config.initial_state) {}

double Session::steps_per_message() const { return 1.0 / (dt() * config_.stream_rate); }

bool Session::post_control(const ControlCommand& intents, std::uint64_t seq) {
  std::lock_guard lock(mailbox_mutex_);
  if (seq <= mailbox_seq_ && mailbox_seq_ != 0) return false;
  mailbox_ = intents;
  mailbox_seq_ = seq;
  return true;
}

std::size_t Session::advance(std::size_t n) {
  std::size_t due = 0;
  const double spm = steps_per_message();
  for (std::size_t i = 0; i < n; ++i) {
    ControlCommand intents;
    {
      std::lock_guard lock(mailbox_mutex_);
      intents = mailbox_;
      applied_seq_ = mailbox_seq_;
    }
    intents.timestamp = sim_.time();
    if (!sim_.step(intents)) break;
    const auto idx = static_cast<std::size_t>(
        std::floor(static_cast<double>(sim_.steps()) / spm + 1.0e-9));
    due += idx - stream_index_;
    stream_index_ = idx;
  }
  return due;
}

std::size_t Session::steps_due(double elapsed) const {
  if (!(elapsed > 0.0)) return 0;
  const auto target = static_cast<std::size_t>(std::floor(elapsed / dt() + 1.0e-9));
  if (target <= sim_.steps()) return 0;
  return std::min(target - sim_.steps(), kMaxCatchUpSteps);
}

void Session::reset_state() {
  sim_.reset_state();
  std::lock_guard lock(mailbox_mutex_);
  mailbox_ = ControlCommand{};
}

void Session::reset_trace() {
  sim_.clear_trace();
  trace_sent_ = 0;
}

std::vector<PlanarVector> Session::drain_pending_trace() {
  const auto& tr = sim_.trace();
  std::vector<PlanarVector> out(tr.begin() + static_cast<long>(trace_sent_), tr.end());
  trace_sent_ = tr.size();
  return out;
}

std::string Session::export_csv() const { return to_csv(sim_.log()); }

std::unique_ptr<Session> open_session(const std::string& id, const SessionConfig& config,
                                      const std::filesystem::path& config_dir) {
  return std::make_unique<Session>(id, config, config_dir);
}

// ---------------------------------------------------------------------------

std::string SessionRegistry::next_id() {
  std::lock_guard lock(mutex_);
  return "s" + std::to_string(++counter_);
}

void SessionRegistry::add(std::shared_ptr<Session> session) {
  std::lock_guard lock(mutex_);
  sessions_[session->id()] = std::move(session);
}

void SessionRegistry::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  sessions_.erase(id);
}

std::shared_ptr<Session> SessionRegistry::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionRegistry::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

// ---------------------------------------------------------------------------

namespace {

double number_field(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  const auto& v = p.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

SessionConfig parse_configure(const json& p, const SessionConfig& defaults) {
  if (!p.is_object()) throw ConfigError("configure payload must be an object");
  static const char* known[] = {"vehicle", "model", "dt", "stream_rate", "initial_state",
                                "param_overrides"};
  for (const auto& [k, v] : p.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* s) { return k == s; }) ==
        std::end(known)) {
      throw ConfigError("unknown configure field '" + k + "'");
    }
  }
  SessionConfig c = defaults;
  if (p.contains("vehicle")) c.vehicle = p.at("vehicle").get<std::string>();
  if (p.contains("model")) c.model = p.at("model").get<std::string>();
  if (p.contains("dt")) c.dt = number_field(p, "dt", 0.0);
  c.stream_rate = number_field(p, "stream_rate", c.stream_rate);
  if (p.contains("initial_state")) {
    const auto& s = p.at("initial_state");
    if (!s.is_object()) throw ConfigError("initial_state must be an object");
    auto& v = c.initial_state;
    v = VehicleState{};
    v.x = number_field(s, "x", 0.0);
    v.y = number_field(s, "y", 0.0);
    v.heading = number_field(s, "heading", 0.0);
    v.vx = number_field(s, "vx", 0.0);
    v.vy = number_field(s, "vy", 0.0);
    v.yaw_rate = number_field(s, "yaw_rate", 0.0);
    v.lean = number_field(s, "lean", 0.0);
  }
  if (p.contains("param_overrides")) {
    const auto& o = p.at("param_overrides");
    if (!o.is_object()) throw ConfigError("param_overrides must be an object");
    c.param_overrides.clear();
    for (const auto& [k, v] : o.items()) {
      c.param_overrides[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  return c;
}

json wheel_layout(const VehicleSpec& spec) {
  json out = json::array();
  for (const auto& w : spec.wheels) {
    out.push_back({{"x", w.x},
                   {"y", w.y},
                   {"radius", w.tire.radius},
                   {"steerable", w.steerable},
                   {"driven", w.driven}});
  }
  return out;
}

}  // namespace

Connection::Connection(SessionRegistry& registry, std::filesystem::path config_dir,
                       SessionConfig defaults)
    : registry_(registry), config_dir_(std::move(config_dir)), defaults_(std::move(defaults)) {}

Connection::~Connection() {
  if (session_) registry_.remove(session_->id());
}

std::string Connection::make(const std::string& kind, const std::string& payload_json) {
  return R"({"kind":")" + kind + R"(","seq":)" + std::to_string(++out_seq_) +
         R"(,"payload":)" + payload_json + "}";
}

std::string Connection::error(const std::string& message, std::optional<std::uint64_t> ref_seq) {
  json p{{"message", message}};
  if (ref_seq) p["ref_seq"] = *ref_seq;
  return make("error", p.dump());
}

std::string Connection::state_message() {
  const auto& sim = session_->simulator();
  const auto& s = sim.state();
  const auto cg = sim.cg_position();
  const auto& cmd = sim.mapped_command();
  const auto& in = sim.intents();
  json p;
  p["session_id"] = session_->id();
  p["step"] = sim.steps();
  p["t"] = sim.time();
  p["ack_seq"] = session_->applied_seq();
  p["state"] = {{"x", s.x},       {"y", s.y},     {"heading", s.heading},
                {"vx", s.vx},     {"vy", s.vy},   {"yaw_rate", s.yaw_rate},
                {"lean", s.lean}, {"cg_x", cg.x}, {"cg_y", cg.y}};
  p["intents"] = {{"steering", in.steering}, {"speed", in.speed}, {"brake", in.brake}};
  p["command"] = {
      {"steer_or_lean", cmd.steer_or_lean},
      {"longitudinal", cmd.longitudinal_value()},
      {"longitudinal_kind",
       std::holds_alternative<WheelSpeedCommand>(cmd.longitudinal) ? "wheel_speed"
                                                                    : "acceleration"},
      {"brake", cmd.brake}};
  const auto& log = sim.log();
  if (log.has_column("fz_0") && !log.rows.empty()) {
    const auto& row = log.rows.back();
    json tires = json::array();
    for (std::size_t i = 0; i < sim.config().spec.wheels.size(); ++i) {
      const auto n = std::to_string(i);
      tires.push_back({{"steer", row[log.column_index("delta_" + n)]},
                       {"fz", row[log.column_index("fz_" + n)]},
                       {"fx", row[log.column_index("fx_" + n)]},
                       {"fy", row[log.column_index("fy_" + n)]},
                       {"mz", row[log.column_index("mz_" + n)]}});
    }
    p["tires"] = std::move(tires);
  }
  json trace = json::array();
  for (const auto& pt : session_->drain_pending_trace()) trace.push_back({pt.x, pt.y});
  p["trace"] = std::move(trace);
  p["trace_length"] = session_->trace_length();
  p["faulted"] = sim.faulted();
  if (sim.faulted()) p["error"] = *log.metadata.error;
  return make("state", p.dump());
}

std::vector<std::string> Connection::emit_due(std::size_t due) {
  if (due == 0 || lagging_) return {};
  return {state_message()};
}

std::vector<std::string> Connection::step(std::size_t n) {
  if (!session_) return {};
  return emit_due(session_->advance(n));
}

std::vector<std::string> Connection::on_tick(double elapsed) {
  if (!session_) return {};
  return step(session_->steps_due(elapsed));
}

std::vector<std::string> Connection::on_message(const std::string& text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error& e) {
    return {error(std::string("malformed message: ") + e.what(), std::nullopt)};
  }
  if (!msg.is_object() || !msg.contains("kind") || !msg.at("kind").is_string()) {
    return {error("message needs a string 'kind'", std::nullopt)};
  }
  if (!msg.contains("seq") || !msg.at("seq").is_number_unsigned()) {
    return {error("message needs a non-negative integer 'seq'", std::nullopt)};
  }
  const auto kind = msg.at("kind").get<std::string>();
  const auto seq = msg.at("seq").get<std::uint64_t>();
  const json payload = msg.contains("payload") ? msg.at("payload") : json::object();

  static const char* client_kinds[] = {"hello", "configure", "control", "state_reset",
                                       "trace_reset", "log_export"};
  if (std::find_if(std::begin(client_kinds), std::end(client_kinds),
                   [&](const char* k) { return kind == k; }) == std::end(client_kinds)) {
    return {error("unknown or server-only message kind '" + kind + "'", seq)};
  }
  if (last_in_seq_ && seq <= *last_in_seq_) return {};  // stale
  last_in_seq_ = seq;

  try {
    if (kind == "hello") {
      json p{{"protocol", kProtocolVersion},
             {"models", ModelRegistry::instance().ids()},
             {"vehicles", list_vehicle_configs(config_dir_)}};
      if (session_) p["session_id"] = session_->id();
      return {make("hello", p.dump())};
    }
    if (kind == "configure") {
      const auto cfg = parse_configure(payload, defaults_);
      auto fresh = std::shared_ptr<Session>(open_session(registry_.next_id(), cfg, config_dir_));
      if (session_) registry_.remove(session_->id());
      session_ = fresh;
      registry_.add(session_);
      const auto& sim = session_->simulator();
      json p{{"protocol", kProtocolVersion},
             {"session_id", session_->id()},
             {"model", cfg.model},
             {"vehicle", sim.config().spec.name},
             {"steering_mode", to_string(sim.config().spec.steering_mode)},
             {"dt", session_->dt()},
             {"stream_rate", cfg.stream_rate},
             {"wheels", wheel_layout(sim.config().spec)},
             {"columns", sim.log().columns}};
      return {make("hello", p.dump()), state_message()};
    }
    if (!session_) return {error("no session; send 'configure' first", seq)};
    if (kind == "control") {
      if (!payload.is_object()) throw ConfigError("control payload must be an object");
      ControlCommand c;
      c.steering = number_field(payload, "steering", 0.0);
      c.speed = number_field(payload, "speed", 0.0);
      c.brake = number_field(payload, "brake", 0.0);
      session_->post_control(c, seq);
      return {};
    }
    if (kind == "state_reset") {
      session_->reset_state();
      return {state_message()};
    }
    if (kind == "trace_reset") {
      session_->reset_trace();
      return {state_message()};
    }
    // log_export
    const auto& sim = session_->simulator();
    json p{{"session_id", session_->id()},
           {"rows", sim.log().rows.size()},
           {"csv", session_->export_csv()},
           {"metadata", json::parse(metadata_json(sim.log().metadata))}};
    return {make("log_export", p.dump())};
  } catch (const json::exception& e) {
    return {error(std::string("bad payload: ") + e.what(), seq)};
  } catch (const std::exception& e) {
    return {error(e.what(), seq)};
  }
}

}  // namespace gm3
