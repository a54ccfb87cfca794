#pragma once

#include <string>
#include <string_view>

namespace skg {

// Porter suffix stripping. Lowercases its input, leaves words of length <= 2
// and words with non-ASCII-letter characters alone. The result is a fixed
// point: stem(stem(w)) == stem(w).
std::string stem(std::string_view word);

}  // namespace skg
