#include "phd/wire/packet.hpp"

#include <algorithm>
#include <cstring>

namespace phd::wire {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t get_be(std::span<const std::uint8_t> bytes) {
  std::uint64_t v = 0;
  for (auto b : bytes) v = (v << 8) | b;
  return v;
}

std::vector<std::uint8_t> numeral_payload(std::int64_t value) {
  std::vector<std::uint8_t> out;
  auto u = static_cast<std::uint64_t>(value);
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(u >> shift));
  return out;
}

bool valid_utf8(std::span<const std::uint8_t> s) {
  std::size_t i = 0;
  while (i < s.size()) {
    std::uint8_t c = s[i];
    std::size_t extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3F);
    }
    static constexpr std::uint32_t smallest[] = {0, 0x80, 0x800, 0x10000};
    if (cp < smallest[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += extra + 1;
  }
  return true;
}

// Checks that a payload fits its kind. Returns false on violation.
bool payload_fits(packet_kind kind, std::span<const std::uint8_t> payload, malformed& why) {
  switch (kind) {
    case packet_kind::exec:
      why = malformed::bad_payload;
      return valid_utf8(payload);
    case packet_kind::reply:
    case packet_kind::break_event:
      why = malformed::bad_length;
      return payload.size() == 8;
    case packet_kind::error:
      if (payload.size() != 2) {
        why = malformed::bad_length;
        return false;
      }
      why = malformed::bad_payload;
      return error_code_from_int(static_cast<std::uint16_t>(get_be(payload))).has_value();
  }
  why = malformed::bad_kind;
  return false;
}

bool known_kind(std::uint8_t k) { return k >= 1 && k <= 4; }

}  // namespace

std::string_view to_string(packet_kind kind) {
  switch (kind) {
    case packet_kind::exec: return "EXEC";
    case packet_kind::reply: return "REPLY";
    case packet_kind::break_event: return "BREAK_EVENT";
    case packet_kind::error: return "ERROR";
  }
  return "UNKNOWN";
}

std::string_view to_string(malformed reason) {
  switch (reason) {
    case malformed::truncated: return "truncated";
    case malformed::bad_magic: return "bad magic";
    case malformed::bad_version: return "bad version";
    case malformed::bad_kind: return "bad kind";
    case malformed::bad_length: return "bad length";
    case malformed::bad_payload: return "bad payload";
    case malformed::trailing_bytes: return "trailing bytes";
    case malformed::oversize: return "oversize payload";
  }
  return "malformed";
}

packet make_exec(std::uint32_t seq, std::string_view casp_text) {
  return {packet_kind::exec, seq, {casp_text.begin(), casp_text.end()}};
}

packet make_reply(std::uint32_t seq, std::int64_t value) {
  return {packet_kind::reply, seq, numeral_payload(value)};
}

packet make_break_event(std::uint32_t seq, std::int64_t label_code) {
  return {packet_kind::break_event, seq, numeral_payload(label_code)};
}

packet make_error(std::uint32_t seq, error_code code) {
  std::vector<std::uint8_t> payload;
  put_u16(payload, static_cast<std::uint16_t>(code));
  return {packet_kind::error, seq, payload};
}

std::string exec_text(const packet& p) {
  if (p.kind != packet_kind::exec) throw wire_error(malformed::bad_kind, "not an EXEC packet");
  return {p.payload.begin(), p.payload.end()};
}

std::int64_t numeral(const packet& p) {
  if (p.kind != packet_kind::reply && p.kind != packet_kind::break_event) {
    throw wire_error(malformed::bad_kind, "packet carries no numeral");
  }
  if (p.payload.size() != 8) throw wire_error(malformed::bad_length, "numeral payload is not 8 bytes");
  return static_cast<std::int64_t>(get_be(p.payload));
}

error_code error_of(const packet& p) {
  if (p.kind != packet_kind::error) throw wire_error(malformed::bad_kind, "not an ERROR packet");
  if (p.payload.size() != 2) throw wire_error(malformed::bad_length, "error payload is not 2 bytes");
  auto code = error_code_from_int(static_cast<std::uint16_t>(get_be(p.payload)));
  if (!code) throw wire_error(malformed::bad_payload, "unknown error code");
  return *code;
}

std::vector<std::uint8_t> encode(const packet& p) {
  if (p.payload.size() > max_payload) {
    throw wire_error(malformed::oversize,
                     "payload of " + std::to_string(p.payload.size()) + " bytes exceeds 65535");
  }
  std::vector<std::uint8_t> out(std::begin(magic), std::end(magic));
  out.reserve(header_size + p.payload.size());
  out.push_back(version);
  out.push_back(static_cast<std::uint8_t>(p.kind));
  put_u32(out, p.seq);
  put_u16(out, static_cast<std::uint16_t>(p.payload.size()));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

packet decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < header_size) {
    throw wire_error(malformed::truncated, "packet shorter than the 12-byte header");
  }
  if (!std::equal(std::begin(magic), std::end(magic), bytes.begin())) {
    throw wire_error(malformed::bad_magic, "missing DIRP magic");
  }
  if (bytes[4] != version) {
    throw wire_error(malformed::bad_version, "unsupported version " + std::to_string(bytes[4]));
  }
  if (!known_kind(bytes[5])) {
    throw wire_error(malformed::bad_kind, "unknown packet kind " + std::to_string(bytes[5]));
  }
  auto len = static_cast<std::size_t>(get_be(bytes.subspan(10, 2)));
  if (bytes.size() < header_size + len) {
    throw wire_error(malformed::truncated, "payload shorter than declared length");
  }
  if (bytes.size() > header_size + len) {
    throw wire_error(malformed::trailing_bytes, "bytes after the declared payload");
  }
  packet p{static_cast<packet_kind>(bytes[5]), static_cast<std::uint32_t>(get_be(bytes.subspan(6, 4))),
           {bytes.begin() + header_size, bytes.end()}};
  malformed why{};
  if (!payload_fits(p.kind, p.payload, why)) {
    throw wire_error(why, std::string(to_string(p.kind)) + " payload rejected: " +
                              std::string(to_string(why)));
  }
  return p;
}

void stream_framer::feed(std::span<const std::uint8_t> bytes) {
  if (start_ > 0 && start_ >= buffer_.size() / 2) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(start_));
    start_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<delivery> stream_framer::next() {
  if (failed_) throw wire_error(malformed::bad_magic, "stream is out of sync");
  std::span<const std::uint8_t> view(buffer_.data() + start_, buffer_.size() - start_);
  // Reject a bad prefix as soon as it is visible rather than waiting for a
  // full header.
  std::size_t check = std::min<std::size_t>(view.size(), 4);
  if (!std::equal(magic, magic + check, view.begin())) {
    failed_ = true;
    throw wire_error(malformed::bad_magic, "stream lost sync: missing DIRP magic");
  }
  if (view.size() >= 5 && view[4] != version) {
    failed_ = true;
    throw wire_error(malformed::bad_version, "stream lost sync: unsupported version");
  }
  if (view.size() < header_size) return std::nullopt;
  auto len = static_cast<std::size_t>(get_be(view.subspan(10, 2)));
  if (view.size() < header_size + len) return std::nullopt;
  auto frame = view.subspan(0, header_size + len);
  start_ += frame.size();
  try {
    return delivery{decode(frame)};
  } catch (const wire_error& e) {
    return delivery{bad_frame{static_cast<std::uint32_t>(get_be(frame.subspan(6, 4))), e.reason()}};
  }
}

std::vector<delivery> frame_all(std::span<const std::uint8_t> bytes) {
  stream_framer f;
  f.feed(bytes);
  std::vector<delivery> out;
  while (auto d = f.next()) out.push_back(std::move(*d));
  return out;
}

std::string hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789ABCDEF";
  std::string out;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i) out.push_back(' ');
    out.push_back(digits[bytes[i] >> 4]);
    out.push_back(digits[bytes[i] & 0xF]);
  }
  return out;
}

}  // namespace phd::wire
