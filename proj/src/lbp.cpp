#include "lbpopt/lbp.hpp"

#include <bit>
#include <string>

#include "lbpopt/error.hpp"

namespace lbpopt {

GrayImage::GrayImage(int side, std::vector<std::uint8_t> pixels)
    : side_(side), pixels_(std::move(pixels)) {
  if (side < 1) throw ShapeError("image side must be positive, got " + std::to_string(side));
  if (pixels_.size() != static_cast<std::size_t>(side) * side) {
    throw ShapeError("image data has " + std::to_string(pixels_.size()) +
                     " pixels, expected " + std::to_string(side) + "x" + std::to_string(side));
  }
}

GrayImage GrayImage::filled(int side, std::uint8_t value) {
  return GrayImage(side, std::vector<std::uint8_t>(static_cast<std::size_t>(side) * side, value));
}

LbpCode encode_block(const Block3x3& block) noexcept {
  const std::uint8_t center = block[1][1];
  int code = 0;
  for (int i = 0; i < 8; ++i) {
    const auto [dr, dc] = kNeighborOffsets[i];
    code |= threshold(block[1 + dr][1 + dc], center) << i;
  }
  return static_cast<LbpCode>(code);
}

namespace {

void check_encodable(const GrayImage& image) {
  if (image.side() < 3) {
    throw DegenerateInputError("LBP encoding needs at least a 3x3 image, got side " +
                               std::to_string(image.side()));
  }
}

// Out-of-image neighbors read as the zero pad.
inline std::uint8_t padded(const GrayImage& image, int row, int col) {
  const int n = image.side();
  if (row < 0 || col < 0 || row >= n || col >= n) return 0;
  return image(row, col);
}

void encode_row(const GrayImage& image, int row, LbpCode* out) {
  const int n = image.side();
  const bool interior_row = row > 0 && row < n - 1;
  for (int col = 0; col < n; ++col) {
    const std::uint8_t center = image(row, col);
    int code = 0;
    if (interior_row && col > 0 && col < n - 1) {
      for (int i = 0; i < 8; ++i) {
        const auto [dr, dc] = kNeighborOffsets[i];
        code |= threshold(image(row + dr, col + dc), center) << i;
      }
    } else {
      for (int i = 0; i < 8; ++i) {
        const auto [dr, dc] = kNeighborOffsets[i];
        code |= threshold(padded(image, row + dr, col + dc), center) << i;
      }
    }
    out[col] = static_cast<LbpCode>(code);
  }
}

}  // namespace

namespace reference {

LbpCodeMap encode_image(const GrayImage& image) {
  check_encodable(image);
  const int n = image.side();
  LbpCodeMap map{n, std::vector<LbpCode>(image.pixel_count())};
  for (int row = 0; row < n; ++row) encode_row(image, row, map.codes.data() + row * n);
  return map;
}

}  // namespace reference

LbpCodeMap encode_image(const GrayImage& image, Exec exec) {
  if (exec == Exec::serial) return reference::encode_image(image);
  check_encodable(image);
  const int n = image.side();
  LbpCodeMap map{n, std::vector<LbpCode>(image.pixel_count())};
#pragma omp parallel for schedule(static)
  for (int row = 0; row < n; ++row) encode_row(image, row, map.codes.data() + row * n);
  return map;
}

std::vector<LbpCodeMap> encode_images(std::span<const GrayImage> images, Exec exec) {
  for (const auto& image : images) check_encodable(image);
  std::vector<LbpCodeMap> maps(images.size());
  const auto count = static_cast<std::ptrdiff_t>(images.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) maps[i] = reference::encode_image(images[i]);
  } else {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < count; ++i) maps[i] = reference::encode_image(images[i]);
  }
  return maps;
}

BitPattern decode(int code) {
  if (code < 0 || code > 255) {
    throw DomainError("LBP code must lie in [0, 255], got " + std::to_string(code));
  }
  BitPattern a{};
  int rest = code;
  for (int i = 7; i >= 0; --i) {
    if (rest >= (1 << i)) {
      a[i] = 1;
      rest -= 1 << i;
    }
  }
  return a;
}

int pattern_value(const BitPattern& bits) noexcept {
  int value = 0;
  for (int i = 0; i < 8; ++i) value += bits[i] << i;
  return value;
}

int transitions(LbpCode code) noexcept {
  // Rotating by one aligns a[i] with a[i+1 mod 8].
  const auto rotated = static_cast<std::uint8_t>((code >> 1) | (code << 7));
  return std::popcount(static_cast<std::uint8_t>(code ^ rotated));
}

bool is_uniform(LbpCode code) noexcept { return transitions(code) <= 2; }

double uniform_fraction(std::span<const int> codes) noexcept {
  if (codes.empty()) return 0.0;
  std::size_t uniform = 0;
  for (int c : codes) {
    if (c >= 0 && c < kCodeCount && is_uniform(static_cast<LbpCode>(c))) ++uniform;
  }
  return static_cast<double>(uniform) / static_cast<double>(codes.size());
}

}  // namespace lbpopt
