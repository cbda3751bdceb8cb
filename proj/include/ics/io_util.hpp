// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "ics/error.hpp"

namespace ics::io {

// Little-endian scalar I/O on a little-endian host (asserted in network.cpp).

inline void write_u8(std::ostream& out, std::uint8_t v) {
  out.write(reinterpret_cast<const char*>(&v), 1);
}

inline void write_u16(std::ostream& out, std::uint16_t v) {
  out.write(reinterpret_cast<const char*>(&v), 2);
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

inline std::streamoff offset_of(std::istream& in) {
  in.clear();
  const auto pos = in.tellg();
  return pos < 0 ? 0 : std::streamoff(pos);
}

[[noreturn]] inline void fail_truncated(std::istream& in, const std::string& op,
                                        const std::string& field) {
  throw DataError(op + ": truncated input reading " + field + " near offset " +
                  std::to_string(offset_of(in)));
}

inline std::uint8_t read_u8(std::istream& in, const std::string& op,
                            const std::string& field) {
  std::uint8_t v;
  in.read(reinterpret_cast<char*>(&v), 1);
  if (!in) fail_truncated(in, op, field);
  return v;
}

inline std::uint16_t read_u16(std::istream& in, const std::string& op,
                              const std::string& field) {
  std::uint16_t v;
  in.read(reinterpret_cast<char*>(&v), 2);
  if (!in) fail_truncated(in, op, field);
  return v;
}

inline std::uint32_t read_u32(std::istream& in, const std::string& op,
                              const std::string& field) {
  std::uint32_t v;
  in.read(reinterpret_cast<char*>(&v), 4);
  if (!in) fail_truncated(in, op, field);
  return v;
}

}  // namespace ics::io
