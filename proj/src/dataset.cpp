#include "lbpopt/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "lbpopt/error.hpp"

namespace fs = std::filesystem;

namespace lbpopt {

namespace {

class PgmReader {
 public:
  PgmReader(std::string_view bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  [[noreturn]] void fail(const std::string& what) const { throw DataError(origin_ + ": " + what); }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) &&
           bytes_[pos_] != '#')
      ++pos_;
    if (start == pos_) fail("unexpected end of PGM header");
    return std::string(bytes_.substr(start, pos_ - start));
  }

  int integer(const char* what) {
    const std::string t = token();
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        t.size() > 9) {
      fail(std::string("invalid ") + what + " '" + t + "'");
    }
    return std::stoi(t);
  }

  // Exactly one whitespace byte separates maxval from a binary raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      fail("missing whitespace before binary raster");
    }
    ++pos_;
  }

  std::string_view rest() const { return bytes_.substr(pos_); }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::string_view bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

PgmImage parse_pgm(std::string_view bytes, const std::string& origin) {
  PgmReader in(bytes, origin);
  const std::string magic = in.token();
  if (magic == "P3" || magic == "P6") in.fail("color PPM is not supported; convert to grayscale PGM");
  if (magic != "P2" && magic != "P5") in.fail("not a PGM file (magic '" + magic + "')");
  PgmImage img;
  img.width = in.integer("width");
  img.height = in.integer("height");
  const int maxval = in.integer("maxval");
  if (img.width < 1 || img.height < 1) in.fail("image dimensions must be positive");
  if (maxval != 255) in.fail("maxval " + std::to_string(maxval) + " is not 255 (8-bit grayscale required)");
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
  img.pixels.resize(count);
  if (magic == "P5") {
    in.single_space();
    const std::string_view raster = in.rest();
    if (raster.size() < count) {
      in.fail("raster truncated: " + std::to_string(raster.size()) + " of " + std::to_string(count) + " bytes");
    }
    std::copy_n(reinterpret_cast<const std::uint8_t*>(raster.data()), count, img.pixels.begin());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const int v = in.integer("pixel value");
      if (v > 255) in.fail("pixel value " + std::to_string(v) + " exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

PgmImage read_pgm(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw DataError(path.string() + ": cannot open file");
  const std::string bytes{std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
  if (file.bad()) throw DataError(path.string() + ": read error");
  return parse_pgm(bytes, path.string());
}

std::string encode_pgm(const GrayImage& image, bool binary) {
  std::ostringstream out;
  const int n = image.side();
  out << (binary ? "P5" : "P2") << '\n' << n << ' ' << n << '\n' << 255 << '\n';
  if (binary) {
    out.write(reinterpret_cast<const char*>(image.pixels().data()),
              static_cast<std::streamsize>(image.pixel_count()));
  } else {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) out << (c ? " " : "") << static_cast<int>(image(r, c));
      out << '\n';
    }
  }
  return out.str();
}

void write_pgm(const fs::path& path, const GrayImage& image, bool binary) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError(path.string() + ": cannot create file");
  const std::string bytes = encode_pgm(image, binary);
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw DataError(path.string() + ": write error");
}

GrayImage resample_to_square(const PgmImage& image, int n) {
  if (n < 1) throw ConfigError("target side must be positive");
  const int shortest = std::min(image.width, image.height);
  if (shortest < n) {
    throw DataError("image " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                    " is smaller than the target side " + std::to_string(n));
  }
  const int factor = shortest / n;
  const int side = factor * n;
  const int top = (image.height - side) / 2;
  const int left = (image.width - side) / 2;
  const int area = factor * factor;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      int sum = 0;
      for (int dr = 0; dr < factor; ++dr) {
        const std::uint8_t* src =
            image.pixels.data() + static_cast<std::size_t>(top + r * factor + dr) * image.width + left + c * factor;
        for (int dc = 0; dc < factor; ++dc) sum += src[dc];
      }
      out[r * n + c] = static_cast<std::uint8_t>((sum + area / 2) / area);
    }
  }
  return GrayImage(n, std::move(out));
}

std::size_t Corpus::size() const noexcept {
  std::size_t total = 0;
  for (const auto& cls : images) total += cls.size();
  return total;
}

std::vector<GrayImage> Corpus::flat_images() const {
  std::vector<GrayImage> out;
  out.reserve(size());
  for (const auto& cls : images)
    for (const auto& item : cls) out.push_back(item.image);
  return out;
}

std::vector<int> Corpus::flat_labels() const {
  std::vector<int> out;
  out.reserve(size());
  for (std::size_t k = 0; k < images.size(); ++k) out.insert(out.end(), images[k].size(), static_cast<int>(k));
  return out;
}

std::vector<std::string> Corpus::flat_paths() const {
  std::vector<std::string> out;
  out.reserve(size());
  for (const auto& cls : images)
    for (const auto& item : cls) out.push_back(item.path);
  return out;
}

Corpus load_corpus(const fs::path& root, int n) {
  if (n < 3) throw ConfigError("target side n must be at least 3, got " + std::to_string(n));
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError(root.string() + ": corpus root is not a directory");

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (class_dirs.empty()) throw DataError(root.string() + ": no class subdirectories");

  Corpus corpus;
  corpus.side = n;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError(dir.string() + ": class directory contains no .pgm images");
    std::vector<CorpusImage> loaded;
    loaded.reserve(files.size());
    for (const auto& file : files) {
      const PgmImage raw = read_pgm(file);
      try {
        const fs::path relative = fs::path(dir.filename()) / file.filename();
        loaded.push_back({relative.generic_string(), resample_to_square(raw, n)});
      } catch (const DataError& e) {
        throw DataError(file.string() + ": " + e.what());
      }
    }
    corpus.classes.push_back(dir.filename().string());
    corpus.images.push_back(std::move(loaded));
  }
  return corpus;
}

std::string_view to_string(Recipe recipe) {
  switch (recipe) {
    case Recipe::horizontal_edges: return "horizontal-edges";
    case Recipe::vertical_edges: return "vertical-edges";
    case Recipe::flat_noise: return "flat-noise";
    case Recipe::checker: return "checker";
  }
  return "unknown";
}

Recipe parse_recipe(std::string_view name) {
  for (Recipe r : {Recipe::horizontal_edges, Recipe::vertical_edges, Recipe::flat_noise, Recipe::checker}) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError("unknown recipe '" + std::string(name) +
                    "' (expected horizontal-edges, vertical-edges, flat-noise or checker)");
}

std::vector<Recipe> parse_recipes(std::string_view comma_separated) {
  std::vector<Recipe> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const std::size_t end = std::min(comma_separated.find(',', start), comma_separated.size());
    out.push_back(parse_recipe(comma_separated.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::vector<int> dominant_codes(Recipe recipe) {
  switch (recipe) {
    // Flat rows tie everywhere (255). Above a downward step the bottom
    // neighbors p5..p7 fail (255-16-32-64); below an upward step the top
    // neighbors p1..p3 fail (255-1-2-4).
    case Recipe::horizontal_edges: return {143, 248, 255};
    // Left of a falling column edge p3..p5 fail; right of a rising one p1, p7, p8.
    case Recipe::vertical_edges: return {62, 227, 255};
    case Recipe::flat_noise:
    case Recipe::checker: return {};
  }
  return {};
}

namespace {

// Two intensity levels at least 32 apart, randomly ordered.
std::pair<std::uint8_t, std::uint8_t> two_levels(Rng& rng) {
  const auto lo = static_cast<int>(uniform_below(rng, 192));
  const auto hi = lo + 32 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(224 - lo)));
  if (uniform_below(rng, 2) == 0) return {static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi)};
  return {static_cast<std::uint8_t>(hi), static_cast<std::uint8_t>(lo)};
}

GrayImage stripes(int n, Rng& rng, bool horizontal) {
  const int period = 4 + static_cast<int>(uniform_below(rng, 5));
  const int phase = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(period)));
  const auto [first, second] = two_levels(rng);
  GrayImage img = GrayImage::filled(n, 0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int along = horizontal ? r : c;
      img(r, c) = ((along + phase) % period) < period / 2 ? first : second;
    }
  return img;
}

}  // namespace

GrayImage synthesize(Recipe recipe, int n, Rng& rng) {
  if (n < 3) throw ConfigError("synthetic images need n >= 3");
  switch (recipe) {
    case Recipe::horizontal_edges: return stripes(n, rng, true);
    case Recipe::vertical_edges: return stripes(n, rng, false);
    case Recipe::flat_noise: {
      std::vector<std::uint8_t> px(static_cast<std::size_t>(n) * n);
      for (auto& p : px) p = static_cast<std::uint8_t>(uniform_below(rng, 256));
      return GrayImage(n, std::move(px));
    }
    case Recipe::checker: {
      const int cell = 2 + static_cast<int>(uniform_below(rng, 4));
      const int phase_r = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cell)));
      const int phase_c = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(cell)));
      const auto [first, second] = two_levels(rng);
      GrayImage img = GrayImage::filled(n, 0);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          img(r, c) = (((r + phase_r) / cell + (c + phase_c) / cell) % 2) == 0 ? first : second;
      return img;
    }
  }
  throw ConfigError("unknown recipe");
}

Corpus generate_synthetic(std::span<const Recipe> recipes, int count_per_class, int n, std::uint64_t seed) {
  if (recipes.empty()) throw ConfigError("synthetic corpus needs at least one recipe");
  if (count_per_class < 1) throw ConfigError("synthetic corpus needs at least one image per class");
  std::vector<Recipe> ordered(recipes.begin(), recipes.end());
  std::sort(ordered.begin(), ordered.end(), [](Recipe a, Recipe b) { return to_string(a) < to_string(b); });
  if (std::adjacent_find(ordered.begin(), ordered.end()) != ordered.end()) {
    throw ConfigError("synthetic recipes must be distinct");
  }
  Corpus corpus;
  corpus.side = n;
  Rng rng(seed);
  for (Recipe recipe : ordered) {
    const std::string name(to_string(recipe));
    std::vector<CorpusImage> items;
    items.reserve(count_per_class);
    for (int i = 0; i < count_per_class; ++i) {
      std::ostringstream path;
      path << name << '/' << name << '_';
      path.width(4);
      path.fill('0');
      path << i << ".pgm";
      items.push_back({path.str(), synthesize(recipe, n, rng)});
    }
    corpus.classes.push_back(name);
    corpus.images.push_back(std::move(items));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& root) {
  for (std::size_t k = 0; k < corpus.classes.size(); ++k) {
    const fs::path dir = root / corpus.classes[k];
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError(dir.string() + ": " + ec.message());
    for (const auto& item : corpus.images[k]) {
      write_pgm(root / fs::path(item.path), item.image);
    }
  }
}

}  // namespace lbpopt
