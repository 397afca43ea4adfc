#include "beliefmap/utf8.hpp"

namespace beliefmap::utf8 {

namespace {

// Advances i past one scalar starting at s[i].
void advance_scalar(std::string_view s, std::size_t& i) {
  unsigned char b = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  if ((b & 0xE0) == 0xC0) len = 2;
  else if ((b & 0xF0) == 0xE0) len = 3;
  else if ((b & 0xF8) == 0xF0) len = 4;
  ++i;
  for (std::size_t k = 1; k < len && i < s.size() && is_continuation(static_cast<unsigned char>(s[i])); ++k) ++i;
}

}  // namespace

std::size_t scalar_count(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    advance_scalar(s, i);
    ++n;
  }
  return n;
}

std::string_view scalar_prefix(std::string_view s, std::size_t n) {
  std::size_t i = 0;
  std::size_t seen = 0;
  while (i < s.size() && seen < n) {
    advance_scalar(s, i);
    ++seen;
  }
  return s.substr(0, i);
}

}  // namespace beliefmap::utf8
