#include <cstring>

#include <fmt/format.h>
#include <png.h>

#include "a11y/errors.hpp"
#include "a11y/imaging.hpp"

namespace a11y {

void write_png(const std::filesystem::path& path, const PixelBuffer& buf) {
  if (buf.channels != 1 && buf.channels != 3) {
    throw ExportError(fmt::format("{}: unsupported channel count {}", path.string(), buf.channels));
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(buf.width);
  image.height = static_cast<png_uint_32>(buf.height);
  image.format = buf.channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw ExportError(fmt::format("{}: {}", path.string(), msg));
  }
}

PixelBuffer read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw LoadError(fmt::format("{}: {}", path.string(), image.message));
  }
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  PixelBuffer buf(static_cast<int>(image.width), static_cast<int>(image.height), gray ? 1 : 3);
  if (!png_image_finish_read(&image, nullptr, buf.data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw LoadError(fmt::format("{}: {}", path.string(), msg));
  }
  return buf;
}

}  // namespace a11y
