#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

namespace dagbft {

// Index of a server in Srvrs; 0 <= index < n.
struct ServerId {
  std::uint32_t index = 0;

  auto operator<=>(const ServerId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, ServerId s) { return os << 's' << s.index; }
inline std::string to_string(ServerId s) { return "s" + std::to_string(s.index); }

// Identifies one protocol instance. The originator is the only server
// whose request for this label authenticates.
struct Label {
  ServerId originator;
  std::uint64_t nonce = 0;

  auto operator<=>(const Label&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Label& l) {
  return os << "l(" << l.originator << ',' << l.nonce << ')';
}

// Scenario parameters shared by everything that computes quorums.
struct SystemSize {
  std::uint32_t n = 4;
  std::uint32_t f = 1;

  // n = 3f + 1 is required.
  bool well_formed() const { return n == 3 * f + 1; }
};

}  // namespace dagbft

template <>
struct std::hash<dagbft::ServerId> {
  std::size_t operator()(dagbft::ServerId s) const noexcept { return s.index; }
};
