#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace actctx {

/// Index of an object class inside a Vocabulary. The null token sits at
/// index `size()` of its vocabulary.
using ClassId = int;

/// Identifier of one object instance inside a WorldState.
enum class InstanceId : std::int32_t {};

constexpr std::int32_t to_index(InstanceId id) { return static_cast<std::int32_t>(id); }

/// Planar position in meters.
using Vec2 = Eigen::Vector2d;

/// Input could not be decoded (bad syntax, missing fields).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input decoded but violates a documented contract.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// FNV-1a 64-bit digest, as 16 lowercase hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = "0123456789abcdef"[h & 0xf];
  return out;
}

}  // namespace actctx
