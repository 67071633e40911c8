#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "service/service.hpp"

namespace trellis {

// "Content-Length: N\r\n\r\n" followed by N bytes of JSON.
std::string frame_message(std::string_view body);

/// Incremental decoder for framed messages.
class FrameReader {
 public:
  void feed(std::string_view bytes);
  // Next complete body. Throws MalformedMessage on a bad header.
  std::optional<std::string> next();
  bool idle() const { return buffer_.empty(); }

 private:
  std::string buffer_;
};

// Reads framed requests from `in` until EOF and writes framed replies and
// notifications to `out`. Returns the number of requests answered.
std::size_t serve_stream(Service& service, std::istream& in, std::ostream& out);

/// Framed protocol over TCP. One thread per connection; the service
/// serializes requests.
class TcpServer {
 public:
  explicit TcpServer(Service& service) : service_(service) {}
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  // Port 0 picks a free port. Throws Io.
  void start(std::uint16_t port, const std::string& host = "127.0.0.1");
  void stop();
  std::uint16_t port() const { return port_; }
  // Blocks until stop() is called from another thread.
  void wait();

 private:
  void accept_loop();
  void connection(int fd);

  Service& service_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex connections_mutex_;
  std::vector<int> connection_fds_;
  std::vector<std::thread> connections_;
};

// Blocking client call: sends one framed request and reads frames until the
// reply with the same id. Notifications are skipped. For tests and tools.
nlohmann::json tcp_request(int fd, FrameReader& reader, const nlohmann::json& request);
int tcp_connect(const std::string& host, std::uint16_t port);

}  // namespace trellis
