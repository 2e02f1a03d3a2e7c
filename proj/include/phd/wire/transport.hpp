#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "phd/wire/packet.hpp"

namespace phd::wire {

class link_closed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One end of a packet channel. A receiver thread (or the peer, for the
// in-memory pair) fills an inbox; receive() drains it. send() is safe to call
// from any thread.
class link {
 public:
  virtual ~link() = default;

  // Throws link_closed when there is no peer to send to.
  virtual void send(const packet& p) = 0;

  // Next delivery, waiting up to `timeout`. Returns nullopt on timeout, or when
  // the peer is gone and the inbox is empty.
  virtual std::optional<delivery> receive(std::chrono::milliseconds timeout) = 0;

  // True while a peer is attached.
  virtual bool connected() const = 0;

  // Waits until a peer attaches. Returns false on timeout.
  virtual bool wait_connected(std::chrono::milliseconds timeout) = 0;

  virtual void close() = 0;
};

std::pair<std::unique_ptr<link>, std::unique_ptr<link>> memory_link_pair();

enum class transport { stream, datagram };

struct endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

// Accepts `host:port` or `:port`.
endpoint parse_endpoint(const std::string& text);

// Controller side. Binds immediately; one director at a time. A second
// director is refused with ERROR 7. Port 0 picks a free port.
class server_link : public link {
 public:
  virtual std::uint16_t port() const = 0;
};

std::unique_ptr<server_link> listen(const endpoint& at, transport kind);

// Director side. Throws std::runtime_error when the controller is unreachable
// (stream transport only; datagrams cannot tell).
std::unique_ptr<link> connect(const endpoint& to, transport kind,
                              std::chrono::milliseconds timeout = std::chrono::seconds(5));

}  // namespace phd::wire
