#include "wavehide/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace wavehide {

static_assert(std::endian::native == std::endian::little,
              "container payload layout assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'W', 'H', 'T', 'C', '\0', '\0', '\0', '\1'};

}  // namespace

int TensorContainer::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void TensorContainer::put(const std::string& name, PlanarTensor t) {
  int idx = index_of(name);
  if (idx >= 0) {
    tensors_[idx] = std::move(t);
  } else {
    order_.push_back(name);
    tensors_.push_back(std::move(t));
  }
}

const PlanarTensor& TensorContainer::get(const std::string& name) const {
  int idx = index_of(name);
  if (idx < 0) throw std::out_of_range("container: no tensor named " + name);
  return tensors_[idx];
}

PlanarTensor& TensorContainer::get_mutable(const std::string& name) {
  int idx = index_of(name);
  if (idx < 0) throw std::out_of_range("container: no tensor named " + name);
  return tensors_[idx];
}

bool TensorContainer::contains(const std::string& name) const {
  return index_of(name) >= 0;
}

std::vector<unsigned char> TensorContainer::serialize() const {
  nlohmann::json header;
  header["format_version"] = 1;
  header["meta"] = meta_;
  nlohmann::json entries = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const PlanarTensor& t = tensors_[i];
    entries.push_back({{"name", order_[i]},
                       {"shape", {t.channels(), t.height(), t.width()}},
                       {"offset", offset}});
    offset += t.size();
  }
  header["tensors"] = entries;

  std::string header_str = header.dump();
  if (header_str.size() > 0xffffffffULL) {
    throw std::runtime_error("container: header too large");
  }
  std::uint32_t header_len = static_cast<std::uint32_t>(header_str.size());

  std::vector<unsigned char> out;
  out.reserve(sizeof(kMagic) + 4 + header_str.size() +
              offset * sizeof(double));
  out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
  unsigned char lenbuf[4];
  std::memcpy(lenbuf, &header_len, 4);
  out.insert(out.end(), lenbuf, lenbuf + 4);
  out.insert(out.end(), header_str.begin(), header_str.end());
  for (const PlanarTensor& t : tensors_) {
    const unsigned char* p =
        reinterpret_cast<const unsigned char*>(t.data());
    out.insert(out.end(), p, p + t.size() * sizeof(double));
  }
  return out;
}

TensorContainer TensorContainer::deserialize(const unsigned char* bytes,
                                             std::size_t len) {
  if (len < sizeof(kMagic) + 4 ||
      std::memcmp(bytes, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("container: bad magic");
  }
  std::uint32_t header_len = 0;
  std::memcpy(&header_len, bytes + sizeof(kMagic), 4);
  std::size_t header_start = sizeof(kMagic) + 4;
  if (header_start + header_len > len) {
    throw std::runtime_error("container: truncated header");
  }
  nlohmann::json header = nlohmann::json::parse(
      bytes + header_start, bytes + header_start + header_len);
  if (header.at("format_version").get<int>() != 1) {
    throw std::runtime_error("container: unsupported format version");
  }

  TensorContainer c;
  c.meta_ = header.value("meta", nlohmann::json::object());
  std::size_t payload_start = header_start + header_len;
  std::size_t payload_elems = (len - payload_start) / sizeof(double);
  for (const auto& entry : header.at("tensors")) {
    std::string name = entry.at("name").get<std::string>();
    auto shape = entry.at("shape");
    int ch = shape.at(0).get<int>();
    int h = shape.at(1).get<int>();
    int w = shape.at(2).get<int>();
    std::uint64_t off = entry.at("offset").get<std::uint64_t>();
    std::size_t count = static_cast<std::size_t>(ch) * h * w;
    if (off + count > payload_elems) {
      throw std::runtime_error("container: tensor " + name +
                               " exceeds payload");
    }
    PlanarTensor t(ch, h, w);
    std::memcpy(t.data(), bytes + payload_start + off * sizeof(double),
                count * sizeof(double));
    c.put(name, std::move(t));
  }
  return c;
}

TensorContainer TensorContainer::deserialize(
    const std::vector<unsigned char>& bytes) {
  return deserialize(bytes.data(), bytes.size());
}

void TensorContainer::save(const std::string& path) const {
  std::vector<unsigned char> bytes = serialize();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("container: cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("container: write failed on " + path);
}

TensorContainer TensorContainer::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("container: cannot open " + path);
  std::vector<unsigned char> bytes(
      (std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace wavehide
