#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gm3/config.hpp"
#include "gm3/simulator.hpp"

namespace gm3 {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxCatchUpSteps = 5;

struct SessionConfig {
  std::string vehicle = "bicycle";  // config id or path
  std::string model = "gm3";
  std::optional<double> dt;         // defaults to the vehicle config's dt
  double stream_rate = 30.0;        // Hz, at most 1/dt
  VehicleState initial_state;
  ParamOverrides param_overrides;
};

// One simulated vehicle driven by a latest-wins control mailbox. Not
// thread-safe apart from post_control.
class Session {
public:
  Session(std::string id, const SessionConfig& config, const std::filesystem::path& config_dir = {});

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return config_; }
  double dt() const { return sim_.config().dt; }
  std::size_t steps() const { return sim_.steps(); }
  // Steps between state messages, as a real number (1 / (dt * rate)).
  double steps_per_message() const;

  // Stores intents unless `seq` is not newer than the last accepted one.
  bool post_control(const ControlCommand& intents, std::uint64_t seq);

  // Runs `n` steps, each sampling the mailbox at its start. Returns the
  // number of state messages that fell due.
  std::size_t advance(std::size_t n);
  // Steps owed to wall-clock time `elapsed` seconds after start, capped.
  std::size_t steps_due(double elapsed) const;

  void reset_state();
  void reset_trace();

  // Trace points recorded since the last drain.
  std::vector<PlanarVector> drain_pending_trace();
  std::size_t trace_length() const { return sim_.trace().size(); }
  std::uint64_t applied_seq() const { return applied_seq_; }

  const Simulator& simulator() const { return sim_; }
  std::string export_csv() const;

private:
  std::string id_;
  SessionConfig config_;
  Simulator sim_;
  std::size_t stream_index_ = 0;

  mutable std::mutex mailbox_mutex_;
  ControlCommand mailbox_;
  std::uint64_t mailbox_seq_ = 0;
  std::uint64_t applied_seq_ = 0;

  std::size_t trace_sent_ = 0;
};

// Builds a session, throwing ConfigError / UnknownModelError on bad input.
std::unique_ptr<Session> open_session(const std::string& id, const SessionConfig& config,
                                      const std::filesystem::path& config_dir = {});

// Access-serialized map of live sessions.
class SessionRegistry {
public:
  std::string next_id();
  void add(std::shared_ptr<Session> session);
  void remove(const std::string& id);
  std::shared_ptr<Session> find(const std::string& id) const;
  std::size_t size() const;

private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

// Protocol endpoint for one connection: parses JSON wire messages, owns at
// most one session and produces outbound JSON messages with increasing seq.
class Connection {
public:
  explicit Connection(SessionRegistry& registry, std::filesystem::path config_dir = {},
                      SessionConfig defaults = {});
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  std::vector<std::string> on_message(const std::string& text);
  // Steps the session as wall-clock time requires (at most
  // kMaxCatchUpSteps) and returns the state messages that fell due.
  std::vector<std::string> on_tick(double elapsed_since_start);
  // Deterministic stepping for tests and headless replay.
  std::vector<std::string> step(std::size_t n);

  // While lagging, due state messages are withheld and their trace points
  // folded into the next message that is sent.
  void set_lagging(bool lagging) { lagging_ = lagging; }

  std::shared_ptr<Session> session() const { return session_; }

private:
  std::string make(const std::string& kind, const std::string& payload_json);
  std::string error(const std::string& message, std::optional<std::uint64_t> ref_seq);
  std::string state_message();
  std::vector<std::string> emit_due(std::size_t due);

  SessionRegistry& registry_;
  std::filesystem::path config_dir_;
  SessionConfig defaults_;
  std::shared_ptr<Session> session_;
  std::uint64_t out_seq_ = 0;
  std::optional<std::uint64_t> last_in_seq_;
  bool lagging_ = false;
};

}  // namespace gm3
