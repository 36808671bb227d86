#include "advdet/core/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>

namespace advdet {

namespace {

std::string lower_ext(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::vector<std::uint8_t> read_png_buffer(const std::string& path, png_uint_32 format,
                                          int bytes_per_pixel, int* height, int* width) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    fail(ErrorCode::Io, "failed to open PNG: " + path + " (" + image.message + ")");
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = image.message;
    png_image_free(&image);
    fail(ErrorCode::Io, "failed to decode PNG: " + path + " (" + message + ")");
  }
  *height = static_cast<int>(image.height);
  *width = static_cast<int>(image.width);
  require(buffer.size() == static_cast<std::size_t>(*height) * *width * bytes_per_pixel,
          ErrorCode::Io, "unexpected PNG buffer size: " + path);
  return buffer;
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(err->jump, 1);
}

RawImage load_jpeg(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "rb"),
                                                       &std::fclose);
  if (!file) fail(ErrorCode::Io, "failed to open JPEG: " + path);

  jpeg_decompress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(ErrorCode::Io, "failed to decode JPEG: " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  RawImage img;
  img.height = static_cast<int>(cinfo.output_height);
  img.width = static_cast<int>(cinfo.output_width);
  img.channels = 3;
  img.source_path = path;
  img.pixels.resize(static_cast<std::size_t>(img.height) * img.width * 3);
  const int stride = img.width * 3;
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

}  // namespace

RawImage load_image(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") {
    RawImage img;
    img.pixels = read_png_buffer(path, PNG_FORMAT_RGB, 3, &img.height, &img.width);
    img.channels = 3;
    img.source_path = path;
    return img;
  }
  if (ext == ".jpg" || ext == ".jpeg") {
    return load_jpeg(path);
  }
  fail(ErrorCode::Io, "unsupported image container (want .png/.jpg/.jpeg): " + path);
}

LabelMap load_mask(const std::string& path, int num_classes) {
  require(lower_ext(path) == ".png", ErrorCode::Io, "masks must be PNG: " + path);
  int h = 0, w = 0;
  std::vector<std::uint8_t> buffer = read_png_buffer(path, PNG_FORMAT_GRAY, 1, &h, &w);
  LabelMap mask(h, w, num_classes);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      mask.labels(y, x) = buffer[static_cast<std::size_t>(y) * w + x];
    }
  }
  mask.validate();
  return mask;
}

namespace {

void write_png_buffer(const std::string& path, const std::uint8_t* data, int height, int width,
                      png_uint_32 format) {
  std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data, 0, nullptr)) {
    fail(ErrorCode::Io, "failed to write PNG: " + path + " (" + image.message + ")");
  }
}

}  // namespace

void save_png(const RawImage& img, const std::string& path) {
  img.validate();
  write_png_buffer(path, img.pixels.data(), img.height, img.width, PNG_FORMAT_RGB);
}

void save_mask_png(const LabelMap& mask, const std::string& path) {
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(mask.height()) * mask.width());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const int v = mask.labels(y, x);
      require(v >= 0 && v <= 255, ErrorCode::Validation, "mask value outside 8-bit range");
      buffer[static_cast<std::size_t>(y) * mask.width() + x] = static_cast<std::uint8_t>(v);
    }
  }
  write_png_buffer(path, buffer.data(), mask.height(), mask.width(), PNG_FORMAT_GRAY);
}

RawImage to_raw_image(const Tensor3<float>& unit) {
  require(unit.channels == 3, ErrorCode::InvalidArgument, "to_raw_image expects 3 channels");
  RawImage img;
  img.height = unit.height;
  img.width = unit.width;
  img.channels = 3;
  img.pixels.resize(static_cast<std::size_t>(unit.height) * unit.width * 3);
  for (int y = 0; y < unit.height; ++y) {
    for (int x = 0; x < unit.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = std::clamp(unit(c, y, x), 0.0f, 1.0f);
        img.at(y, x, c) = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  return img;
}

}  // namespace advdet
