#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace usdr {

// %.17g: enough digits for an exact double round trip.
std::string format_real(double v);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

std::string to_hex(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace usdr
