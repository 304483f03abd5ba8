#include "flounder/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "flounder/corpus.hpp"
#include "flounder/diagnoser.hpp"
#include "flounder/intent.hpp"

namespace flounder {

using nlohmann::json;

std::optional<std::string> StreamChannel::read_line() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  return line;
}

void StreamChannel::write_line(const std::string& line) { out_ << line << "\n" << std::flush; }

SocketChannel::~SocketChannel() {
  if (owns_ && fd_ >= 0) ::close(fd_);
}

std::optional<std::string> SocketChannel::read_line() {
  for (;;) {
    std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      if (buffer_.empty()) return std::nullopt;
      std::string rest = std::move(buffer_);
      buffer_.clear();
      return rest;
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void SocketChannel::write_line(const std::string& line) {
  std::string data = line + "\n";
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw std::runtime_error("connection lost");
    sent += static_cast<std::size_t>(n);
  }
}

namespace {

json error_message(const std::string& text) { return {{"kind", "error"}, {"message", text}}; }

void send(LineChannel& ch, const json& j) { ch.write_line(j.dump()); }

std::string request_path(const std::string& path) {
  if (std::filesystem::exists(path)) return path;
  std::string in_corpus = corpus_file(path);
  if (std::filesystem::exists(in_corpus)) return in_corpus;
  throw std::runtime_error("cannot open " + path);
}

Program request_program(const json& r) {
  if (r.contains("program_text")) return parse_program(r.at("program_text").get<std::string>(), {"<request>", false});
  if (!r.contains("program")) throw std::runtime_error("request has no program");
  return load_program(request_path(r.at("program").get<std::string>()));
}

EngineOptions request_engine(const json& r, const Limits& defaults) {
  EngineOptions eo;
  eo.limits = defaults;
  if (r.contains("max_steps")) eo.limits.max_steps = r.at("max_steps").get<std::size_t>();
  if (r.contains("seed")) eo.strategy = SelectionStrategy::random(r.at("seed").get<std::uint64_t>());
  return eo;
}

// Questions go out over the channel; the matching answer comes back.
class ProtocolOracle : public Oracle {
 public:
  explicit ProtocolOracle(LineChannel& channel) : channel_(channel) {}

  Verdict ask(const Question& q) override {
    json msg = {{"kind", "question"},
                {"id", ++id_},
                {"atom", q.text},
                {"status", to_string(q.status)},
                {"prompt", q.prompt()},
                {"node", q.node},
                {"answer_index", q.answer_index}};
    if (q.tree && q.answer_index != tree_sent_) {
      msg["tree"] = q.tree->to_json();
      tree_sent_ = q.answer_index;
    }
    send(channel_, msg);
    for (;;) {
      std::optional<std::string> line = channel_.read_line();
      if (!line) throw OracleAbort();
      if (line->empty()) continue;
      json reply = json::parse(*line, nullptr, false);
      if (reply.is_discarded() || !reply.is_object()) {
        send(channel_, error_message("malformed message"));
        continue;
      }
      std::string kind = reply.value("kind", "");
      if (kind == "abort") throw OracleAbort();
      if (kind != "answer") {
        send(channel_, error_message("question " + std::to_string(id_) + " is outstanding"));
        continue;
      }
      if (reply.value("id", std::uint64_t{0}) != id_) {
        send(channel_, error_message("answer does not match question " + std::to_string(id_)));
        continue;
      }
      std::optional<Verdict> v = parse_verdict(reply.value("verdict", ""));
      if (!v) {
        send(channel_, error_message("verdict must be v, e or i"));
        continue;
      }
      return *v;
    }
  }

 private:
  LineChannel& channel_;
  std::uint64_t id_ = 0;
  std::size_t tree_sent_ = 0;
};

}  // namespace

json SessionServer::run_request(const json& r) const {
  try {
    if (r.value("kind", "") != "run") return error_message("expected a run request");
    Program p = request_program(r);
    Goal g = parse_goal(r.at("goal").get<std::string>(), {"<goal>", false});
    EngineOptions eo = request_engine(r, options_.limits);
    if (r.contains("answers")) eo.limits.max_answers = r.at("answers").get<std::size_t>();
    json answers = json::array();
    json out = {{"kind", "answers-list"}};
    Engine engine(p, g, eo);
    std::size_t index = 0;
    while (auto o = engine.next()) {
      if (!o->is_answer()) {
        out["end"] = to_string(o->kind);
        out["steps"] = o->steps;
        break;
      }
      answers.push_back({{"index", ++index},
                         {"kind", to_string(o->kind)},
                         {"bindings", o->bindings_text()},
                         {"atom", format_atom(o->answer_term())}});
    }
    out["answers"] = std::move(answers);
    return out;
  } catch (const std::exception& e) {
    return error_message(e.what());
  }
}

void SessionServer::diagnosis(LineChannel& channel, const json& r) {
  std::unique_lock<std::mutex> lock(diagnosis_, std::try_to_lock);
  if (!lock.owns_lock()) {
    send(channel, error_message("busy: another diagnosis session is active"));
    return;
  }
  Program p;
  Goal g;
  WrongOptions wo;
  try {
    p = request_program(r);
    g = parse_goal(r.at("goal").get<std::string>(), {"<goal>", false});
    wo.engine = request_engine(r, options_.limits);
    wo.first_answer = r.value("answer", std::size_t{1});
    if (wo.first_answer == 0) throw std::runtime_error("answer numbers start at 1");
  } catch (const std::exception& e) {
    send(channel, error_message(e.what()));
    return;
  }

  ProtocolOracle oracle(channel);
  DiagnosisSession session(oracle);
  try {
    WrongReport report = diagnose_wrong(p, g, session, wo);
    json out = {{"kind", "diagnosis"}, {"transcript", session.transcript()}};
    if (report.diagnosis) {
      const Diagnosis& d = *report.diagnosis;
      out["category"] = to_string(d.category);
      out["rendered"] = render_diagnosis(d);
      out["clause"] = d.clause_instance ? d.clause_instance->render() : format_annotated(d.buggy);
      out["location"] = d.location.line > 0 ? json(d.location.str()) : json(nullptr);
      out["details"] = render_details(d);
      out["node"] = d.node;
      out["answer_index"] = d.answer_index;
    } else {
      out["category"] = "root-not-erroneous";
      out["rendered"] = "no buggy node: no answer was judged erroneous";
      out["clause"] = nullptr;
      out["location"] = nullptr;
      out["end"] = to_string(report.end);
    }
    send(channel, out);
  } catch (const OracleAbort&) {
    send(channel, error_message("diagnosis aborted"));
  } catch (const std::exception& e) {
    send(channel, error_message(e.what()));
  }
}

void SessionServer::handle(LineChannel& channel) {
  while (std::optional<std::string> line = channel.read_line()) {
    if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
    json r = json::parse(*line, nullptr, false);
    if (r.is_discarded() || !r.is_object()) {
      send(channel, error_message("malformed message"));
      continue;
    }
    std::string kind = r.value("kind", "");
    if (kind == "run") {
      send(channel, run_request(r));
    } else if (kind == "start") {
      diagnosis(channel, r);
    } else if (kind == "answer") {
      send(channel, error_message("no question is outstanding"));
    } else {
      send(channel, error_message("unknown message kind '" + kind + "'"));
    }
  }
}

void serve_tcp(SessionServer& server, std::uint16_t port, const std::atomic<bool>& stop,
               const std::function<void(std::uint16_t)>& on_listen) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 16) < 0) {
    std::string why = std::strerror(errno);
    ::close(fd);
    throw std::runtime_error("cannot listen on port " + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listen) on_listen(ntohs(addr.sin_port));

  struct Client {
    int fd;
    std::thread thread;
  };
  std::vector<std::unique_ptr<Client>> clients;
  while (!stop.load()) {
    pollfd p{fd, POLLIN, 0};
    int ready = ::poll(&p, 1, 100);
    if (ready <= 0) continue;
    int c = ::accept(fd, nullptr, nullptr);
    if (c < 0) continue;
    auto client = std::make_unique<Client>();
    client->fd = c;
    client->thread = std::thread([&server, c] {
      SocketChannel channel(c, false);
      try {
        server.handle(channel);
      } catch (const std::exception&) {
        // Connection dropped mid-message.
      }
    });
    clients.push_back(std::move(client));
  }
  ::close(fd);
  // Unblock clients still reading.
  for (auto& c : clients) ::shutdown(c->fd, SHUT_RDWR);
  for (auto& c : clients) {
    c->thread.join();
    ::close(c->fd);
  }
}

int connect_local(std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    std::string why = std::strerror(errno);
    ::close(fd);
    throw std::runtime_error("cannot connect to port " + std::to_string(port) + ": " + why);
  }
  return fd;
}

}  // namespace flounder
