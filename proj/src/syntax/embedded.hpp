#pragma once

#include <optional>
#include <string_view>

namespace trellis::detail {

// Files under data/, compiled into the library. Keys are paths relative to data/.
std::optional<std::string_view> embedded_file(std::string_view path);

}  // namespace trellis::detail
