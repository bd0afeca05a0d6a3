#pragma once

#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "patchfinder/errors.hpp"
#include "patchfinder/raster.hpp"

namespace patchfinder {

namespace detail {

inline RasterImage from_mat(const cv::Mat& mat) {
  cv::Mat m = mat;
  if (m.depth() != CV_8U) m.convertTo(m, CV_8U);
  if (m.channels() == 4) cv::cvtColor(m, m, cv::COLOR_BGRA2BGR);
  if (m.channels() != 1 && m.channels() != 3) throw FormatError("unsupported channel count");
  if (!m.isContinuous()) m = m.clone();
  std::vector<std::uint8_t> px(m.data, m.data + m.total() * m.elemSize());
  return RasterImage(m.cols, m.rows, m.channels(), std::move(px));
}

inline cv::Mat to_mat(const RasterImage& image) {
  const int type = image.channels() == 1 ? CV_8UC1 : CV_8UC3;
  // imencode/imwrite only read from the buffer.
  return cv::Mat(image.height(), image.width(), type, const_cast<std::uint8_t*>(image.pixels().data()));
}

}  // namespace detail

// PNG, JPEG and TIFF are accepted; grayscale stays single-channel.
inline RasterImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw FormatError("image not found: " + path.string());
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_ANYCOLOR);
  if (m.empty()) throw FormatError("cannot decode image: " + path.string());
  return detail::from_mat(m);
}

inline void save_image(const RasterImage& image, const std::filesystem::path& path) {
  if (!cv::imwrite(path.string(), detail::to_mat(image))) throw FormatError("cannot write image: " + path.string());
}

inline std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", detail::to_mat(image), out)) throw FormatError("PNG encoding failed");
  return out;
}

inline RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw FormatError("empty image buffer");
  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat m = cv::imdecode(buf, cv::IMREAD_ANYCOLOR);
  if (m.empty()) throw FormatError("cannot decode image buffer");
  return detail::from_mat(m);
}

// Standard alphabet, padded.
inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw FormatError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  if (n < 0) throw FormatError("invalid base64");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock counts padding as zero bytes.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

}  // namespace patchfinder
