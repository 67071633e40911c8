#include "service/framing.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>

namespace trellis {

namespace {

constexpr std::string_view kHeader = "Content-Length:";
constexpr std::size_t kMaxMessage = 64u << 20;

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    auto n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

Error io_error(const std::string& what) { return Error(ErrorCode::Io, what + ": " + std::strerror(errno)); }

}  // namespace

std::string frame_message(std::string_view body) {
  std::string out = "Content-Length: " + std::to_string(body.size()) + "\r\n\r\n";
  out.append(body);
  return out;
}

void FrameReader::feed(std::string_view bytes) { buffer_.append(bytes); }

namespace {

// Length from a header block without the terminating blank line.
std::size_t content_length(std::string_view headers) {
  std::optional<std::size_t> length;
  while (!headers.empty()) {
    auto eol = headers.find("\r\n");
    auto line = headers.substr(0, eol);
    headers = eol == std::string_view::npos ? std::string_view{} : headers.substr(eol + 2);
    if (line.substr(0, kHeader.size()) != kHeader) continue;
    auto value = line.substr(kHeader.size());
    while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || ptr != value.data() + value.size() || n > kMaxMessage) {
      throw Error(ErrorCode::MalformedMessage, "bad Content-Length");
    }
    length = n;
  }
  if (!length) throw Error(ErrorCode::MalformedMessage, "missing Content-Length");
  return *length;
}

}  // namespace

std::optional<std::string> FrameReader::next() {
  auto end = buffer_.find("\r\n\r\n");
  if (end == std::string::npos) {
    if (buffer_.size() > 1024) {
      buffer_.clear();
      throw Error(ErrorCode::MalformedMessage, "header too long");
    }
    return std::nullopt;
  }
  std::size_t length = 0;
  try {
    length = content_length(std::string_view(buffer_.data(), end));
  } catch (const Error&) {
    buffer_.erase(0, end + 4);
    throw;
  }
  if (buffer_.size() < end + 4 + length) return std::nullopt;
  std::string body = buffer_.substr(end + 4, length);
  buffer_.erase(0, end + 4 + length);
  return body;
}

std::size_t serve_stream(Service& service, std::istream& in, std::ostream& out) {
  std::mutex out_mutex;
  auto write = [&](const std::string& body) {
    std::lock_guard lock(out_mutex);
    out << frame_message(body);
    out.flush();
  };
  service.set_notifier([&](const nlohmann::json& n) { write(n.dump()); });
  std::size_t answered = 0;
  // Line-wise headers, exact-size bodies: an interactive pipe never waits on a full buffer.
  std::string line;
  std::string headers;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      headers += line + "\r\n";
      continue;
    }
    if (headers.empty()) continue;
    std::size_t length = 0;
    try {
      length = content_length(headers);
    } catch (const Error& e) {
      write(error_reply(nullptr, e.code(), e.what()).dump());
      ++answered;
      headers.clear();
      continue;
    }
    headers.clear();
    std::string body(length, '\0');
    in.read(body.data(), static_cast<std::streamsize>(length));
    if (static_cast<std::size_t>(in.gcount()) != length) break;
    write(service.handle_text(body));
    ++answered;
  }
  service.set_notifier({});
  return answered;
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::start(std::uint16_t port, const std::string& host) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw io_error("socket");
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error(ErrorCode::Io, "bad host address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    auto err = io_error("bind " + host + ":" + std::to_string(port));
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw err;
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  service_.set_notifier([this](const nlohmann::json& n) {
    auto framed = frame_message(n.dump());
    std::lock_guard lock(connections_mutex_);
    for (int fd : connection_fds_) send_all(fd, framed);
  });
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void TcpServer::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    std::lock_guard lock(connections_mutex_);
    if (!running_) {
      ::close(fd);
      break;
    }
    connection_fds_.push_back(fd);
    connections_.emplace_back([this, fd] { connection(fd); });
  }
}

void TcpServer::connection(int fd) {
  FrameReader reader;
  char chunk[4096];
  for (;;) {
    auto n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    reader.feed(std::string_view(chunk, static_cast<std::size_t>(n)));
    bool ok = true;
    for (;;) {
      std::string reply;
      try {
        auto body = reader.next();
        if (!body) break;
        reply = service_.handle_text(*body);
      } catch (const Error& e) {
        reply = error_reply(nullptr, e.code(), e.what()).dump();
      }
      // Replies and broadcasts share the socket.
      std::lock_guard lock(connections_mutex_);
      if (!send_all(fd, frame_message(reply))) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
  }
  std::lock_guard lock(connections_mutex_);
  std::erase(connection_fds_, fd);
  ::shutdown(fd, SHUT_RDWR);
  ::close(fd);
}

void TcpServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(connections_mutex_);
    for (int fd : connection_fds_) ::shutdown(fd, SHUT_RDWR);
    threads.swap(connections_);
  }
  for (auto& t : threads) t.join();
  service_.set_notifier({});
}

void TcpServer::wait() {
  if (acceptor_.joinable()) acceptor_.join();
}

int tcp_connect(const std::string& host, std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw io_error("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, host.c_str(), &addr.sin_addr);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    auto err = io_error("connect");
    ::close(fd);
    throw err;
  }
  return fd;
}

nlohmann::json tcp_request(int fd, FrameReader& reader, const nlohmann::json& request) {
  if (!send_all(fd, frame_message(request.dump()))) throw io_error("send");
  char chunk[4096];
  for (;;) {
    while (auto body = reader.next()) {
      auto msg = nlohmann::json::parse(*body);
      if (msg.contains("id") && msg.at("id") == request.value("id", nlohmann::json())) return msg;
    }
    auto n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw Error(ErrorCode::Io, "connection closed");
    reader.feed(std::string_view(chunk, static_cast<std::size_t>(n)));
  }
}

}  // namespace trellis
