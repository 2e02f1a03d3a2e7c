#include "phd/wire/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

namespace phd::wire {

namespace {

using namespace std::chrono_literals;

// Inbox shared between a producer (receiver thread or peer) and the owner.
class inbox {
 public:
  void push(delivery d) {
    {
      std::lock_guard lock(mu_);
      items_.push_back(std::move(d));
    }
    cv_.notify_all();
  }

  void set_connected(bool up) {
    {
      std::lock_guard lock(mu_);
      if (connected_ && !up) ++losses_;
      had_peer_ = had_peer_ || up;
      connected_ = up;
    }
    cv_.notify_all();
  }

  bool connected() const {
    std::lock_guard lock(mu_);
    return connected_;
  }

  // Waits for an item; wakes early when the peer drops or the inbox closes.
  std::optional<delivery> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    auto losses = losses_;
    cv_.wait_for(lock, timeout, [&] {
      return !items_.empty() || closed_ || losses_ != losses || (!connected_ && had_peer_);
    });
    if (items_.empty()) return std::nullopt;
    auto d = std::move(items_.front());
    items_.pop_front();
    return d;
  }

  bool wait_connected(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    return cv_.wait_for(lock, timeout, [&] { return connected_ || closed_; }) && connected_;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
      connected_ = false;
    }
    cv_.notify_all();
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<delivery> items_;
  bool connected_ = false;
  bool had_peer_ = false;
  bool closed_ = false;
  std::uint64_t losses_ = 0;
};

// In-memory pair: each end pushes straight into the other's inbox.
struct memory_shared {
  inbox boxes[2];
};

class memory_end : public link {
 public:
  memory_end(std::shared_ptr<memory_shared> shared, int side) : shared_(std::move(shared)), side_(side) {}
  ~memory_end() override { close(); }

  void send(const packet& p) override {
    if (!connected()) throw link_closed("peer closed the in-memory link");
    shared_->boxes[1 - side_].push(p);
  }
  std::optional<delivery> receive(std::chrono::milliseconds timeout) override {
    return shared_->boxes[side_].pop(timeout);
  }
  bool connected() const override { return shared_->boxes[side_].connected(); }
  bool wait_connected(std::chrono::milliseconds timeout) override {
    return shared_->boxes[side_].wait_connected(timeout);
  }
  void close() override {
    shared_->boxes[side_].close();
    shared_->boxes[1 - side_].set_connected(false);
  }

 private:
  std::shared_ptr<memory_shared> shared_;
  int side_;
};

sockaddr_in resolve(const endpoint& e) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  addrinfo* found = nullptr;
  std::string host = e.host.empty() ? "0.0.0.0" : e.host;
  if (int rc = getaddrinfo(host.c_str(), nullptr, &hints, &found); rc != 0 || found == nullptr) {
    throw std::runtime_error("cannot resolve '" + host + "': " + gai_strerror(rc));
  }
  sockaddr_in addr{};
  std::memcpy(&addr, found->ai_addr, sizeof addr);
  freeaddrinfo(found);
  addr.sin_port = htons(e.port);
  return addr;
}

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

bool send_all(int fd, const std::vector<std::uint8_t>& bytes) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    ssize_t n = ::send(fd, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    done += static_cast<std::size_t>(n);
  }
  return true;
}

// Reads frames from a connected stream socket into an inbox until EOF, error,
// or loss of sync.
void pump_stream(int fd, inbox& box) {
  stream_framer framer;
  std::uint8_t buf[4096];
  for (;;) {
    ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    framer.feed({buf, static_cast<std::size_t>(n)});
    try {
      while (auto d = framer.next()) box.push(std::move(*d));
    } catch (const wire_error& e) {
      spdlog::warn("dropping connection: {}", e.what());
      break;
    }
  }
}

class tcp_server : public server_link {
 public:
  explicit tcp_server(const endpoint& at) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) fail("socket");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    auto addr = resolve(at);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
      int saved = errno;
      ::close(listen_fd_);
      errno = saved;
      fail("bind " + at.host + ":" + std::to_string(at.port));
    }
    if (::listen(listen_fd_, 4) < 0) fail("listen");
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  ~tcp_server() override { close(); }

  std::uint16_t port() const override { return port_; }

  void send(const packet& p) override {
    std::lock_guard lock(send_mu_);
    if (peer_fd_ < 0 || !box_.connected() || !send_all(peer_fd_, encode(p))) {
      throw link_closed("no director connected");
    }
  }

  std::optional<delivery> receive(std::chrono::milliseconds timeout) override {
    return box_.pop(timeout);
  }
  bool connected() const override { return box_.connected(); }
  bool wait_connected(std::chrono::milliseconds timeout) override {
    return box_.wait_connected(timeout);
  }

  void close() override {
    if (stopping_.exchange(true)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    {
      std::lock_guard lock(send_mu_);
      if (peer_fd_ >= 0) ::shutdown(peer_fd_, SHUT_RDWR);
    }
    if (acceptor_.joinable()) acceptor_.join();
    if (reader_.joinable()) reader_.join();
    box_.close();
  }

 private:
  void accept_loop() {
    while (!stopping_) {
      pollfd pfd{listen_fd_, POLLIN, 0};
      int ready = ::poll(&pfd, 1, 100);
      if (stopping_) break;
      if (ready <= 0) continue;
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) continue;
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      if (box_.connected()) {
        spdlog::info("refusing a second director");
        send_all(fd, encode(make_error(0, error_code::not_interactive)));
        ::close(fd);
        continue;
      }
      if (reader_.joinable()) reader_.join();
      {
        std::lock_guard lock(send_mu_);
        peer_fd_ = fd;
      }
      box_.set_connected(true);
      spdlog::info("director connected");
      reader_ = std::thread([this, fd] {
        pump_stream(fd, box_);
        box_.set_connected(false);
        std::lock_guard lock(send_mu_);
        ::close(fd);
        peer_fd_ = -1;
        spdlog::info("director disconnected");
      });
    }
  }

  int listen_fd_ = -1;
  int peer_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex send_mu_;
  inbox box_;
  std::thread acceptor_;
  std::thread reader_;
};

class tcp_client : public link {
 public:
  tcp_client(const endpoint& to, std::chrono::milliseconds timeout) {
    auto addr = resolve(to);
    auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
      if (fd_ < 0) fail("socket");
      if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0) break;
      int saved = errno;
      ::close(fd_);
      fd_ = -1;
      if (std::chrono::steady_clock::now() >= deadline) {
        errno = saved;
        fail("connect " + to.host + ":" + std::to_string(to.port));
      }
      std::this_thread::sleep_for(50ms);
    }
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    box_.set_connected(true);
    reader_ = std::thread([this] {
      pump_stream(fd_, box_);
      box_.set_connected(false);
    });
  }

  ~tcp_client() override { close(); }

  void send(const packet& p) override {
    std::lock_guard lock(send_mu_);
    if (closed_ || !send_all(fd_, encode(p))) throw link_closed("controller connection lost");
  }
  std::optional<delivery> receive(std::chrono::milliseconds timeout) override {
    return box_.pop(timeout);
  }
  bool connected() const override { return box_.connected(); }
  bool wait_connected(std::chrono::milliseconds timeout) override {
    return box_.wait_connected(timeout);
  }
  void close() override {
    {
      std::lock_guard lock(send_mu_);
      if (closed_) return;
      closed_ = true;
      ::shutdown(fd_, SHUT_RDWR);
    }
    if (reader_.joinable()) reader_.join();
    ::close(fd_);
    box_.close();
  }

 private:
  int fd_ = -1;
  bool closed_ = false;
  std::mutex send_mu_;
  inbox box_;
  std::thread reader_;
};

// One packet per datagram. Undecodable datagrams with a readable header are
// delivered as bad frames; anything else is dropped.
std::optional<delivery> decode_datagram(std::span<const std::uint8_t> bytes) {
  try {
    return delivery{decode(bytes)};
  } catch (const wire_error& e) {
    if (bytes.size() < header_size || e.reason() == malformed::bad_magic ||
        e.reason() == malformed::bad_version) {
      spdlog::warn("dropping datagram: {}", e.what());
      return std::nullopt;
    }
    std::uint32_t seq = 0;
    for (int i = 6; i < 10; ++i) seq = (seq << 8) | bytes[i];
    return delivery{bad_frame{seq, e.reason()}};
  }
}

class udp_socket : public server_link {
 public:
  // Binds and accepts one peer when `server`; otherwise talks to `at`.
  udp_socket(const endpoint& at, bool server) : server_(server) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) fail("socket");
    auto addr = resolve(at);
    if (server) {
      if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        fail("bind " + at.host + ":" + std::to_string(at.port));
      }
      socklen_t len = sizeof addr;
      ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
      port_ = ntohs(addr.sin_port);
    } else {
      if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) fail("connect");
      peer_ = addr;
      box_.set_connected(true);
    }
    reader_ = std::thread([this] { read_loop(); });
  }

  ~udp_socket() override { close(); }

  std::uint16_t port() const override { return port_; }

  void send(const packet& p) override {
    auto bytes = encode(p);
    std::lock_guard lock(mu_);
    if (!peer_) throw link_closed("no director has contacted this controller");
    if (::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&*peer_),
                 sizeof *peer_) < 0) {
      throw link_closed(std::string("sendto: ") + std::strerror(errno));
    }
  }
  std::optional<delivery> receive(std::chrono::milliseconds timeout) override {
    return box_.pop(timeout);
  }
  bool connected() const override { return box_.connected(); }
  bool wait_connected(std::chrono::milliseconds timeout) override {
    return box_.wait_connected(timeout);
  }
  void close() override {
    if (stopping_.exchange(true)) return;
    ::shutdown(fd_, SHUT_RDWR);
    if (reader_.joinable()) reader_.join();
    ::close(fd_);
    box_.close();
  }

 private:
  void read_loop() {
    std::vector<std::uint8_t> buf(header_size + max_payload);
    while (!stopping_) {
      pollfd pfd{fd_, POLLIN, 0};
      if (::poll(&pfd, 1, 100) <= 0) continue;
      sockaddr_in from{};
      socklen_t len = sizeof from;
      ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
      if (n < 0 || stopping_) continue;
      if (server_) {
        std::lock_guard lock(mu_);
        if (!peer_) {
          peer_ = from;
          box_.set_connected(true);
        } else if (peer_->sin_addr.s_addr != from.sin_addr.s_addr || peer_->sin_port != from.sin_port) {
          auto refusal = encode(make_error(0, error_code::not_interactive));
          ::sendto(fd_, refusal.data(), refusal.size(), 0, reinterpret_cast<sockaddr*>(&from), len);
          continue;
        }
      }
      if (auto d = decode_datagram({buf.data(), static_cast<std::size_t>(n)})) box_.push(std::move(*d));
    }
  }

  int fd_ = -1;
  bool server_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex mu_;
  std::optional<sockaddr_in> peer_;
  inbox box_;
  std::thread reader_;
};

}  // namespace

std::pair<std::unique_ptr<link>, std::unique_ptr<link>> memory_link_pair() {
  auto shared = std::make_shared<memory_shared>();
  shared->boxes[0].set_connected(true);
  shared->boxes[1].set_connected(true);
  return {std::make_unique<memory_end>(shared, 0), std::make_unique<memory_end>(shared, 1)};
}

endpoint parse_endpoint(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("address must look like host:port");
  endpoint e;
  if (colon > 0) e.host = text.substr(0, colon);
  auto port_text = text.substr(colon + 1);
  std::size_t used = 0;
  unsigned long port = 0;
  try {
    port = std::stoul(port_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (port_text.empty() || used != port_text.size() || port > 65535) {
    throw std::invalid_argument("bad port '" + port_text + "'");
  }
  e.port = static_cast<std::uint16_t>(port);
  return e;
}

std::unique_ptr<server_link> listen(const endpoint& at, transport kind) {
  if (kind == transport::stream) return std::make_unique<tcp_server>(at);
  return std::make_unique<udp_socket>(at, true);
}

std::unique_ptr<link> connect(const endpoint& to, transport kind, std::chrono::milliseconds timeout) {
  if (kind == transport::stream) return std::make_unique<tcp_client>(to, timeout);
  return std::make_unique<udp_socket>(to, false);
}

}  // namespace phd::wire
