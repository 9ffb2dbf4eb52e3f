#pragma once

#include <chrono>

#include <time.h>

#include "qvfuse/traversal.hpp"

namespace qvfuse {

inline std::chrono::nanoseconds thread_cpu_now(bool& is_wall) {
#if defined(CLOCK_THREAD_CPUTIME_ID)
    struct timespec ts;
    if (clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts) == 0) {
        is_wall = false;
        return std::chrono::seconds(ts.tv_sec) + std::chrono::nanoseconds(ts.tv_nsec);
    }
#endif
    is_wall = true;
    return std::chrono::steady_clock::now().time_since_epoch();
}

/// Fills in elapsed wall time and per-thread processor time on destruction.
/// cpu_is_wall flags platforms without a thread CPU clock.
class stats_timer {
  public:
    explicit stats_timer(traversal_stats& stats)
        : stats_(stats), wall_start_(std::chrono::steady_clock::now()) {
        cpu_start_ = thread_cpu_now(stats_.cpu_is_wall);
    }

    stats_timer(const stats_timer&) = delete;
    stats_timer& operator=(const stats_timer&) = delete;

    ~stats_timer() {
        bool is_wall = false;
        stats_.cpu = thread_cpu_now(is_wall) - cpu_start_;
        stats_.elapsed = std::chrono::steady_clock::now() - wall_start_;
        stats_.cpu_is_wall = stats_.cpu_is_wall || is_wall;
    }

  private:
    traversal_stats& stats_;
    std::chrono::steady_clock::time_point wall_start_;
    std::chrono::nanoseconds cpu_start_;
};

}  // namespace qvfuse
