#include <png.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

#include "brcf/media_io.hpp"

namespace brcf {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Skips whitespace and '#' comments in a PNM header.
int read_pnm_int(std::istream& in) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = 0;
  if (!(in >> v)) throw std::runtime_error("malformed PNM header");
  return v;
}

Frame read_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image: " + path.string());
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (!(ascii || magic == "P5" || magic == "P6")) throw std::runtime_error("unsupported PNM type in " + path.string());

  const int w = read_pnm_int(in);
  const int h = read_pnm_int(in);
  const int maxval = read_pnm_int(in);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("unsupported PNM geometry or depth in " + path.string());
  const int ch = color ? 3 : 1;
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * ch);
  if (ascii) {
    for (auto& v : data) {
      int x = 0;
      if (!(in >> x)) throw std::runtime_error("truncated PNM data in " + path.string());
      v = static_cast<std::uint8_t>(x * 255 / maxval);
    }
  } else {
    in.get();  // single whitespace after maxval
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size()))
      throw std::runtime_error("truncated PNM data in " + path.string());
    if (maxval != 255) {
      for (auto& v : data) v = static_cast<std::uint8_t>(v * 255 / maxval);
    }
  }
  return Frame(w, h, ch, std::move(data));
}

void write_pnm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image: " + path.string());
  out << (frame.channels() == 3 ? "P6" : "P5") << '\n'
      << frame.width() << ' ' << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.data().data()),
            static_cast<std::streamsize>(frame.data().size()));
}

Frame read_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    throw std::runtime_error("cannot decode PNG " + path.string() + ": " + image.message);
  const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw std::runtime_error("cannot decode PNG " + path.string() + ": " + msg);
  }
  return Frame(static_cast<int>(image.width), static_cast<int>(image.height), gray ? 1 : 3,
               std::move(data));
}

void write_png(const fs::path& path, const Frame& frame) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = frame.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, frame.data().data(), 0, nullptr))
    throw std::runtime_error("cannot write PNG " + path.string() + ": " + image.message);
}

}  // namespace

Frame read_image(const fs::path& path) {
  const auto ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return read_pnm(path);
  throw std::runtime_error("unsupported image format: " + path.string());
}

void write_image(const fs::path& path, const Frame& frame) {
  if (frame.empty()) throw std::invalid_argument("write_image: empty frame");
  const auto ext = lower_ext(path);
  if (ext == ".png") return write_png(path, frame);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return write_pnm(path, frame);
  throw std::runtime_error("unsupported image format: " + path.string());
}

}  // namespace brcf
