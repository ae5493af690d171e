#include "common.hpp"

#include <charconv>
#include <cstdio>

namespace ctxrec {

std::string hex_u64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

uint64_t parse_hex_u64(const std::string& s) {
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  require(ec == std::errc() && p == s.data() + s.size(), Errc::format, "bad hex id: " + s);
  return v;
}

}  // namespace ctxrec
