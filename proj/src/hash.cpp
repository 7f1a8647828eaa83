#include "bwc/hash.hpp"

#include <fmt/format.h>

namespace bwc {

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

}  // namespace bwc
