#pragma once

#include <memory>
#include <string>
#include <thread>

#include "instrument/values.hpp"

namespace httplib {
class Server;
}

namespace trellis {

/// Loopback HTTP endpoint receiving POST /watch bodies.
class Collector {
 public:
  explicit Collector(ValueHub& hub);
  ~Collector();
  Collector(const Collector&) = delete;
  Collector& operator=(const Collector&) = delete;

  // Port 0 picks a free port. Throws Io when binding fails.
  int start(int port = 3000, const std::string& host = "127.0.0.1");
  void stop();
  int port() const { return port_; }
  std::string endpoint() const;

 private:
  ValueHub& hub_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::string host_;
};

}  // namespace trellis
