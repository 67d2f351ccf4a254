#include "meatcut/scene.hpp"

#include <cctype>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "meatcut/error.hpp"

namespace meatcut::vision {

Scene::Scene(int w, int h, Rgb fill, PixelRect board_region)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill),
      board(board_region) {}

void Scene::validate() const {
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidArgument, "scene dimensions must be positive");
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(Errc::InvalidArgument, "scene pixel count does not match width*height");
  }
  if (board.empty() || board.x < 0 || board.y < 0 || board.x + board.width > width ||
      board.y + board.height > height) {
    throw Error(Errc::InvalidArgument, "board region must be non-empty and inside the image");
  }
}

void write_ppm(std::ostream& out, const Scene& scene) {
  out << "P6\n# board " << scene.board.x << ' ' << scene.board.y << ' ' << scene.board.width << ' '
      << scene.board.height << '\n'
      << scene.width << ' ' << scene.height << "\n255\n";
  for (const Rgb& p : scene.pixels) {
    const char bytes[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(bytes, 3);
  }
}

namespace {

// Reads the next whitespace-delimited header token, collecting comments.
std::string next_token(std::istream& in, std::optional<PixelRect>& board) {
  std::string token;
  int c = 0;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      std::istringstream words(comment);
      std::string tag;
      PixelRect rect;
      if (words >> tag && tag == "board" && words >> rect.x >> rect.y >> rect.width >> rect.height) {
        board = rect;
      }
      if (!token.empty()) return token;
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int to_int(const std::string& token, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::Parse, std::string("PPM header: bad ") + what + " '" + token + "'");
  }
}

}  // namespace

Scene read_ppm(std::istream& in) {
  std::optional<PixelRect> board;
  if (next_token(in, board) != "P6") throw Error(Errc::Parse, "not a binary PPM (P6) raster");
  const int width = to_int(next_token(in, board), "width");
  const int height = to_int(next_token(in, board), "height");
  const int maxval = to_int(next_token(in, board), "maxval");
  if (maxval != 255) throw Error(Errc::Parse, "only 8-bit PPM rasters are supported");
  if (width <= 0 || height <= 0) throw Error(Errc::Parse, "PPM dimensions must be positive");

  Scene scene(width, height, Rgb{}, board.value_or(PixelRect{0, 0, width, height}));
  std::vector<char> raw(scene.pixels.size() * 3);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw Error(Errc::Parse, "PPM pixel data truncated");
  for (std::size_t i = 0; i < scene.pixels.size(); ++i) {
    scene.pixels[i] = {static_cast<std::uint8_t>(raw[3 * i]), static_cast<std::uint8_t>(raw[3 * i + 1]),
                       static_cast<std::uint8_t>(raw[3 * i + 2])};
  }
  scene.validate();
  return scene;
}

}  // namespace meatcut::vision
