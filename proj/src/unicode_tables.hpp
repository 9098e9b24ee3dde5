#pragma once

#include <cstdint>
#include <span>

namespace topicdrift::detail {

struct CodepointPair {
  char32_t from;
  char32_t to;
};

// Both tables are sorted by `from`.
std::span<const CodepointPair> lowercase_table();
// Precomposed letter -> base letter after canonical decomposition with
// combining marks removed.
std::span<const CodepointPair> base_letter_table();

}  // namespace topicdrift::detail
