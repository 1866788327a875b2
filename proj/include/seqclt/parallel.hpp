#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace seqclt {

/// Runs task(chunk) for every chunk in [0, chunks) on up to `threads`
/// workers. Tasks write into per-chunk slots and the caller reduces in chunk
/// order, so output is independent of the worker count. The first exception
/// thrown by any task is rethrown after all workers stop.
void parallel_chunks(std::size_t chunks, unsigned threads,
                     const std::function<void(std::size_t)>& task);

/// Pairwise summation over a fixed binary tree.
double pairwise_sum(std::span<const double> values);

}  // namespace seqclt
