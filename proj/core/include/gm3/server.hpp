#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>

#include "gm3/session.hpp"

namespace gm3 {

inline constexpr std::uint16_t kDefaultPort = 8731;

// $GM3_SIM_PORT if set and valid, otherwise 8731.
std::uint16_t server_port_from_env();

struct ServerOptions {
  std::string address = "0.0.0.0";
  std::uint16_t port = kDefaultPort;  // 0 picks a free port
  std::filesystem::path config_dir;
  // Applied to a connection's first configure when the client omits them.
  SessionConfig defaults;
};

// WebSocket server; one session per connection, each paced to real time.
class Server {
public:
  explicit Server(ServerOptions options);
  ~Server();

  // Binds and starts serving on a background thread.
  void start();
  void stop();
  // Blocks until stop() (or a signal when handle_signals is set).
  void run(bool handle_signals = true);
  std::uint16_t port() const;
  SessionRegistry& registry();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gm3
