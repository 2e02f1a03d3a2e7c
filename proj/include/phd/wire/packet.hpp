#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phd/error_code.hpp"

namespace phd::wire {

// Layout: "DIRP" | version u8 | kind u8 | seq u32 BE | payload_len u16 BE | payload
inline constexpr std::uint8_t magic[4] = {0x44, 0x49, 0x52, 0x50};
inline constexpr std::uint8_t version = 0x01;
inline constexpr std::size_t header_size = 12;
inline constexpr std::size_t max_payload = 0xFFFF;

enum class packet_kind : std::uint8_t { exec = 1, reply = 2, break_event = 3, error = 4 };

std::string_view to_string(packet_kind kind);

struct packet {
  packet_kind kind = packet_kind::exec;
  std::uint32_t seq = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const packet&) const = default;
};

packet make_exec(std::uint32_t seq, std::string_view casp_text);
packet make_reply(std::uint32_t seq, std::int64_t value);
packet make_break_event(std::uint32_t seq, std::int64_t label_code);
packet make_error(std::uint32_t seq, error_code code);

// Payload accessors. They assume a packet that passed decode (or was built by
// the make_* helpers) and check the kind.
std::string exec_text(const packet& p);
std::int64_t numeral(const packet& p);
error_code error_of(const packet& p);

enum class malformed {
  truncated,
  bad_magic,
  bad_version,
  bad_kind,
  bad_length,
  bad_payload,
  trailing_bytes,
  oversize,
};

std::string_view to_string(malformed reason);

class wire_error : public std::runtime_error {
 public:
  wire_error(malformed reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  malformed reason() const noexcept { return reason_; }

 private:
  malformed reason_;
};

// Throws wire_error(oversize) when the payload does not fit a u16 length.
std::vector<std::uint8_t> encode(const packet& p);

// Exactly one packet; throws wire_error with the first violated rule.
packet decode(std::span<const std::uint8_t> bytes);

// A frame whose header was sound but whose body was rejected. The stream stays
// in sync, so the peer can be told with an ERROR reply carrying `seq`.
struct bad_frame {
  std::uint32_t seq = 0;
  malformed reason = malformed::bad_payload;
  bool operator==(const bad_frame&) const = default;
};

using delivery = std::variant<packet, bad_frame>;

// Splits a reliable byte stream into frames by the declared payload length.
// A bad magic or version means the stream has lost sync: next() throws and
// the framer stays failed.
class stream_framer {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<delivery> next();
  std::size_t buffered() const { return buffer_.size() - start_; }
  bool failed() const { return failed_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t start_ = 0;
  bool failed_ = false;
};

// All packets of a byte sequence, for tests and tools.
std::vector<delivery> frame_all(std::span<const std::uint8_t> bytes);

std::string hex(std::span<const std::uint8_t> bytes);

}  // namespace phd::wire
