#pragma once

#include <span>
#include <string_view>

namespace vericode {

namespace detail {
struct EmbeddedAsset {
  std::string_view path;
  std::string_view content;
};
std::span<const EmbeddedAsset> embedded_assets();
}  // namespace detail

/// Returns the content of a build-time embedded asset (path relative to core/assets).
/// Throws vericode::Error if no such asset exists.
std::string_view embedded_asset(std::string_view path);

}  // namespace vericode
