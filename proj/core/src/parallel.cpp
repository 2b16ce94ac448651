#include "tracekit/parallel.hpp"

#include <atomic>

namespace tracekit::parallel {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_threads(unsigned count) noexcept { g_threads.store(count == 0 ? 1 : count); }

unsigned threads() noexcept { return g_threads.load(); }

}  // namespace tracekit::parallel
