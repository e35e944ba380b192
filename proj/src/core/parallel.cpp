#include "core/parallel.hpp"

#include <tbb/global_control.h>

namespace erdiff::parallel {

ThreadLimit::ThreadLimit(std::size_t threads) {
  if (threads > 0) {
    control_ = std::make_unique<tbb::global_control>(
        tbb::global_control::max_allowed_parallelism, threads);
  }
}

ThreadLimit::~ThreadLimit() = default;

}  // namespace erdiff::parallel
