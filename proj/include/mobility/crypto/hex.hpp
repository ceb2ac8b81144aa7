#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mobility::crypto {

/// Lowercase hex.
[[nodiscard]] std::string to_hex(std::span<const std::uint8_t> bytes);

/// Accepts upper- or lowercase digits. Throws std::invalid_argument on odd
/// length or non-hex characters.
[[nodiscard]] std::vector<std::uint8_t> from_hex(std::string_view hex);

[[nodiscard]] bool is_hex(std::string_view text) noexcept;

}  // namespace mobility::crypto
