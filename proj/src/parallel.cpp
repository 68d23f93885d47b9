#include "ogsnet/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace ogsnet {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OGSNET_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return int(std::clamp(hw, 1u, 16u));
}

}  // namespace ogsnet
