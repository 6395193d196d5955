#ifndef WAVEHIDE_IMAGE_IO_HPP
#define WAVEHIDE_IMAGE_IO_HPP

#include <string>
#include <vector>

#include "wavehide/image.hpp"

namespace wavehide {

/// Reads any PNG as 8-bit RGB (alpha composited away, palettes expanded).
PixelImage read_png(const std::string& path);
void write_png(const std::string& path, const PixelImage& img);

/// Sorted list of *.png paths directly inside dir.
std::vector<std::string> list_pngs(const std::string& dir);

}  // namespace wavehide

#endif
