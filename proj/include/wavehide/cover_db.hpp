#ifndef WAVEHIDE_COVER_DB_HPP
#define WAVEHIDE_COVER_DB_HPP

#include <map>
#include <string>

namespace wavehide {

/// Index of a directory of PNG covers, keyed by the content hash of each
/// image's raw 8-bit RGB bytes (the same id the hide step stamps into its
/// sidecar). Two files with identical pixel content cannot coexist.
class CoverDatabase {
 public:
  static CoverDatabase scan(const std::string& dir);

  /// Path of the cover with this id; throws (mentioning the database size)
  /// if absent.
  const std::string& lookup(const std::string& cover_id) const;
  std::size_t size() const { return index_.size(); }

 private:
  std::map<std::string, std::string> index_;
};

}  // namespace wavehide

#endif
