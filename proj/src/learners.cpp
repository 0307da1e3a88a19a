#include "dtap/learners.hpp"

#include <algorithm>
#include <cctype>

namespace dtap {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kWpl:
      return "wpl";
    case Algorithm::kGigaWolf:
      return "giga-wolf";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "wpl") return Algorithm::kWpl;
  if (lower == "giga-wolf" || lower == "gigawolf" || lower == "giga_wolf") {
    return Algorithm::kGigaWolf;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected wpl or giga-wolf)");
}

}  // namespace dtap
