#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbpopt/lbp.hpp"
#include "lbpopt/rng.hpp"

namespace lbpopt {

// Decoded PGM payload before squaring/resampling.
struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

// P2 (ASCII) and P5 (binary) with maxval 255. Throws DataError otherwise.
PgmImage parse_pgm(std::string_view bytes, const std::string& origin = "<memory>");
PgmImage read_pgm(const std::filesystem::path& path);

std::string encode_pgm(const GrayImage& image, bool binary = true);
void write_pgm(const std::filesystem::path& path, const GrayImage& image, bool binary = true);

// Center-crops to the largest square whose side is a multiple of n, then
// block-averages down to n x n with round-half-up. Throws DataError if the
// image is smaller than n.
GrayImage resample_to_square(const PgmImage& image, int n);

struct CorpusImage {
  std::string path;
  GrayImage image;
};

// Class order is lexicographic by name; images keep their load order. Paths
// are "<class>/<file>.pgm", relative to the corpus root.
struct Corpus {
  int side = 0;
  std::vector<std::string> classes;
  std::vector<std::vector<CorpusImage>> images;

  std::size_t size() const noexcept;
  // Class-major flattening used everywhere a corpus becomes a sample list.
  std::vector<GrayImage> flat_images() const;
  std::vector<int> flat_labels() const;
  std::vector<std::string> flat_paths() const;
};

// root/<class_name>/*.pgm
Corpus load_corpus(const std::filesystem::path& root, int n);

enum class Recipe { horizontal_edges, vertical_edges, flat_noise, checker };

std::string_view to_string(Recipe recipe);
Recipe parse_recipe(std::string_view name);  // throws ConfigError
std::vector<Recipe> parse_recipes(std::string_view comma_separated);

// Interior codes of a noise-free instance of the recipe (under the frozen
// neighbor order). Empty when the recipe has no small dominant set.
std::vector<int> dominant_codes(Recipe recipe);

GrayImage synthesize(Recipe recipe, int n, Rng& rng);

// Class names are the recipe names; images are named "<class>/<class>_NNNN.pgm".
Corpus generate_synthetic(std::span<const Recipe> recipes, int count_per_class, int n,
                          std::uint64_t seed);

void write_corpus(const Corpus& corpus, const std::filesystem::path& root);

}  // namespace lbpopt
