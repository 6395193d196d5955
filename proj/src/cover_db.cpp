#include "wavehide/cover_db.hpp"

#include <stdexcept>

#include "wavehide/hash.hpp"
#include "wavehide/image_io.hpp"

namespace wavehide {

CoverDatabase CoverDatabase::scan(const std::string& dir) {
  CoverDatabase db;
  for (const std::string& path : list_pngs(dir)) {
    PixelImage img = read_png(path);
    std::string id = sha256_hex(img.rgb.data(), img.rgb.size());
    auto [it, inserted] = db.index_.emplace(id, path);
    if (!inserted) {
      throw std::runtime_error("cover database: '" + path + "' and '" +
                               it->second + "' have identical pixel content");
    }
  }
  return db;
}

const std::string& CoverDatabase::lookup(const std::string& cover_id) const {
  auto it = index_.find(cover_id);
  if (it == index_.end()) {
    throw std::runtime_error("cover id " + cover_id +
                             " not found in database of " +
                             std::to_string(index_.size()) + " cover(s)");
  }
  return it->second;
}

}  // namespace wavehide
