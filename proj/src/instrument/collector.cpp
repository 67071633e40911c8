#include "instrument/collector.hpp"

#include <httplib.h>

#include "syntax/text.hpp"

namespace trellis {

Collector::Collector(ValueHub& hub) : hub_(hub) {}

Collector::~Collector() { stop(); }

int Collector::start(int port, const std::string& host) {
  stop();
  server_ = std::make_unique<httplib::Server>();
  server_->Post("/watch", [this](const httplib::Request& req, httplib::Response& res) {
    res.status = collect_value(hub_, req.body);
    if (res.status != 204) res.set_content("{\"error\":\"BadRequest\"}", "application/json");
  });
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ <= 0) {
    server_.reset();
    throw Error(ErrorCode::Io, "cannot bind collector to " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([srv = server_.get()] { srv->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Collector::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

std::string Collector::endpoint() const { return "http://" + host_ + ":" + std::to_string(port_) + "/watch"; }

}  // namespace trellis
