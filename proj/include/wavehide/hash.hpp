#ifndef WAVEHIDE_HASH_HPP
#define WAVEHIDE_HASH_HPP

#include <cstddef>
#include <string>

namespace wavehide {

/// SHA-256 of a byte buffer as lowercase hex.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& data);

/// SHA-256 of a file's contents as lowercase hex. Throws std::runtime_error
/// if the file cannot be read.
std::string sha256_file_hex(const std::string& path);

}  // namespace wavehide

#endif
