#ifndef MCU_DIGEST_HPP
#define MCU_DIGEST_HPP

#include <string>
#include <string_view>

namespace mcu {

/// Lowercase hex SHA-256 of the given bytes (OpenSSL EVP backend).
std::string sha256_hex(std::string_view bytes);

}  // namespace mcu

#endif
