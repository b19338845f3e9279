#include "gm3/server.hpp"

#include <chrono>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace gm3 {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::uint16_t server_port_from_env() {
  const char* env = std::getenv("GM3_SIM_PORT");
  if (!env || !*env) return kDefaultPort;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 65535) {
    std::cerr << "ignoring invalid GM3_SIM_PORT='" << env << "'\n";
    return kDefaultPort;
  }
  return static_cast<std::uint16_t>(v);
}

namespace {

constexpr std::size_t kLagThreshold = 8;  // queued outbound messages

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
  WsSession(tcp::socket socket, SessionRegistry& registry, const ServerOptions& opt)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        connection_(registry, opt.config_dir, opt.defaults) {}

  void run() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (!ec) {
        self->read();
        self->arm_timer();
      }
    });
  }

private:
  using clock = std::chrono::steady_clock;

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_read(ec);
    });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    const auto before = connection_.session();
    auto replies = connection_.on_message(beast::buffers_to_string(buffer_.data()));
    buffer_.consume(buffer_.size());
    if (connection_.session() != before) start_ = clock::now();
    for (auto& r : replies) send(std::move(r));
    read();
  }

  void arm_timer() {
    if (closed_) return;
    double period = 0.005;
    if (const auto s = connection_.session()) period = s->dt();
    timer_.expires_after(std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(std::max(period, 0.001))));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->on_tick();
      self->arm_timer();
    });
  }

  void on_tick() {
    if (!connection_.session()) return;
    connection_.set_lagging(queue_.size() > kLagThreshold);
    const std::chrono::duration<double> elapsed = clock::now() - start_;
    for (auto& m : connection_.on_tick(elapsed.count())) send(std::move(m));
  }

  void send(std::string text) {
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->closed_ = true;
                        self->timer_.cancel();
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  Connection connection_;
  std::deque<std::string> queue_;
  clock::time_point start_ = clock::now();
  bool closed_ = false;
};

}  // namespace

struct Server::Impl {
  // Declared before the io_context: handlers still queued at destruction
  // reference both.
  ServerOptions options;
  SessionRegistry registry;
  asio::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::thread thread;

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<WsSession>(std::move(socket), registry, options)->run();
      accept();
    });
  }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
}

Server::~Server() { stop(); }

void Server::start() {
  auto& a = impl_->acceptor;
  const tcp::endpoint ep(asio::ip::make_address(impl_->options.address), impl_->options.port);
  a.open(ep.protocol());
  a.set_option(asio::socket_base::reuse_address(true));
  a.bind(ep);
  a.listen(asio::socket_base::max_listen_connections);
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void Server::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Server::run(bool handle_signals) {
  if (!impl_->thread.joinable()) start();
  if (handle_signals) {
    asio::io_context sig_ctx;
    asio::signal_set signals(sig_ctx, SIGINT, SIGTERM);
    signals.async_wait([this](beast::error_code, int) { impl_->ioc.stop(); });
    std::thread waiter([&] { sig_ctx.run(); });
    impl_->thread.join();
    sig_ctx.stop();
    waiter.join();
  } else {
    impl_->thread.join();
  }
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

SessionRegistry& Server::registry() { return impl_->registry; }

}  // namespace gm3
