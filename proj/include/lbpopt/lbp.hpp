#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lbpopt/exec.hpp"

namespace lbpopt {

inline constexpr int kCodeCount = 256;

using LbpCode = std::uint8_t;

// a[i] is the coefficient of 2^i, i.e. the threshold result of neighbor p_{i+1}.
using BitPattern = std::array<std::uint8_t, 8>;

struct Offset {
  int drow;
  int dcol;
};

// Neighbor p_{i+1} carries weight 2^i. Order starts at the top-left neighbor
// and proceeds clockwise. Frozen: selected codes depend on it.
inline constexpr std::array<Offset, 8> kNeighborOffsets{{
    {-1, -1},  // p1 top-left      2^0
    {-1, 0},   // p2 top           2^1
    {-1, 1},   // p3 top-right     2^2
    {0, 1},    // p4 right         2^3
    {1, 1},    // p5 bottom-right  2^4
    {1, 0},    // p6 bottom        2^5
    {1, -1},   // p7 bottom-left   2^6
    {0, -1},   // p8 left          2^7
}};

// Square 8-bit grayscale image stored row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int side, std::vector<std::uint8_t> pixels);

  static GrayImage filled(int side, std::uint8_t value);

  int side() const noexcept { return side_; }
  int width() const noexcept { return side_; }
  int height() const noexcept { return side_; }
  std::size_t pixel_count() const noexcept { return pixels_.size(); }

  std::uint8_t operator()(int row, int col) const { return pixels_[row * side_ + col]; }
  std::uint8_t& operator()(int row, int col) { return pixels_[row * side_ + col]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int side_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// One LBP code per pixel, row-major, same side as the source image.
struct LbpCodeMap {
  int side = 0;
  std::vector<LbpCode> codes;

  LbpCode operator()(int row, int col) const { return codes[row * side + col]; }
  friend bool operator==(const LbpCodeMap&, const LbpCodeMap&) = default;
};

// S(p, c): 1 iff neighbor >= center.
constexpr int threshold(std::uint8_t neighbor, std::uint8_t center) noexcept {
  return neighbor >= center ? 1 : 0;
}

using Block3x3 = std::array<std::array<std::uint8_t, 3>, 3>;

LbpCode encode_block(const Block3x3& block) noexcept;

// Borders are encoded against a one-pixel zero pad; throws
// DegenerateInputError when the image is smaller than 3x3.
LbpCodeMap encode_image(const GrayImage& image, Exec exec = Exec::parallel);

std::vector<LbpCodeMap> encode_images(std::span<const GrayImage> images,
                                      Exec exec = Exec::parallel);

namespace reference {
LbpCodeMap encode_image(const GrayImage& image);
}

// Inverse of the weighted sum. Throws DomainError outside [0, 255].
BitPattern decode(int code);

// Sum of a[i] * 2^i.
int pattern_value(const BitPattern& bits) noexcept;

// Number of 0/1 changes around the circular sequence a[0..7].
int transitions(LbpCode code) noexcept;

bool is_uniform(LbpCode code) noexcept;

double uniform_fraction(std::span<const int> codes) noexcept;

}  // namespace lbpopt
