#include "vericode/util/assets.hpp"

#include <string>

#include "vericode/util/error.hpp"

namespace vericode {

std::string_view embedded_asset(std::string_view path) {
  for (const auto& asset : detail::embedded_assets()) {
    if (asset.path == path) return asset.content;
  }
  throw Error("no embedded asset named '" + std::string(path) + "'");
}

}  // namespace vericode
