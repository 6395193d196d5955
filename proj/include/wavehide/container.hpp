#ifndef WAVEHIDE_CONTAINER_HPP
#define WAVEHIDE_CONTAINER_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "wavehide/tensor.hpp"

namespace wavehide {

/// Named-tensor archive with a free-form JSON metadata block.
///
/// Byte layout: 8-byte magic, u32 little-endian header length, UTF-8 JSON
/// header, then all tensor payloads as packed little-endian float64. The
/// header records each tensor's name, shape and element offset into the
/// payload in insertion order, so identical content always serializes to
/// identical bytes. Nothing time- or host-dependent is ever written.
class TensorContainer {
 public:
  void put(const std::string& name, PlanarTensor t);
  const PlanarTensor& get(const std::string& name) const;
  PlanarTensor& get_mutable(const std::string& name);
  bool contains(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }

  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }

  std::vector<unsigned char> serialize() const;
  static TensorContainer deserialize(const unsigned char* bytes,
                                     std::size_t len);
  static TensorContainer deserialize(const std::vector<unsigned char>& bytes);

  void save(const std::string& path) const;
  static TensorContainer load(const std::string& path);

 private:
  std::vector<std::string> order_;
  std::vector<PlanarTensor> tensors_;
  nlohmann::json meta_ = nlohmann::json::object();

  int index_of(const std::string& name) const;
};

}  // namespace wavehide

#endif
