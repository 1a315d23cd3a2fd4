#include "streamcode/rng.hpp"

namespace streamcode::rng {

static_assert(splitmix64(0) == 0xE220A8397B1DCDAFULL, "splitmix64 reference value");

} // namespace streamcode::rng
