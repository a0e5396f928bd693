#include "segkit/parallel.hpp"

#include <cstdlib>
#include <string>

namespace segkit {

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (char const* env = std::getenv("SEGKIT_THREADS")) {
        try {
            int const n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (std::exception const&) {
            // unparsable value: fall through to the hardware default
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace segkit
