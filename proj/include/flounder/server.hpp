// Session protocol: one JSON object per line. A client either asks for the
// answers of a goal ("run") or starts a diagnosis ("start") and then answers
// the questions it is sent, one at a time.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

#include "flounder/engine.hpp"

namespace flounder {

class LineChannel {
 public:
  virtual ~LineChannel() = default;
  // Nullopt at end of input.
  virtual std::optional<std::string> read_line() = 0;
  virtual void write_line(const std::string& line) = 0;
};

class StreamChannel : public LineChannel {
 public:
  StreamChannel(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  std::optional<std::string> read_line() override;
  void write_line(const std::string& line) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

class SocketChannel : public LineChannel {
 public:
  // With `owns`, the socket is closed with the channel.
  explicit SocketChannel(int fd, bool owns = true) : fd_(fd), owns_(owns) {}
  ~SocketChannel() override;
  SocketChannel(const SocketChannel&) = delete;
  SocketChannel& operator=(const SocketChannel&) = delete;

  std::optional<std::string> read_line() override;
  void write_line(const std::string& line) override;

 private:
  int fd_;
  bool owns_;
  std::string buffer_;
};

struct ServerOptions {
  Limits limits;
};

class SessionServer {
 public:
  explicit SessionServer(ServerOptions options = {}) : options_(options) {}

  // Serves one client until its input ends.
  void handle(LineChannel& channel);
  // Answers a single request that needs no further input ("run"), or an
  // "error" message for anything else.
  nlohmann::json run_request(const nlohmann::json& request) const;

 private:
  void diagnosis(LineChannel& channel, const nlohmann::json& request);

  ServerOptions options_;
  std::mutex diagnosis_;
};

// Accepts connections on 127.0.0.1:port (0 picks a free port), one thread
// per client, until `stop` is set. `on_listen` receives the bound port.
void serve_tcp(SessionServer& server, std::uint16_t port, const std::atomic<bool>& stop,
               const std::function<void(std::uint16_t)>& on_listen = {});

// Client side of serve_tcp, for tools and tests.
int connect_local(std::uint16_t port);

}  // namespace flounder
