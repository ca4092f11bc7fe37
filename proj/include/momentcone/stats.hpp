#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace momentcone {

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Fixed-shape pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> xs);

// Delete-1 jackknife for the sample mean.
Estimate jackknife_mean(std::span<const double> xs);

// Delete-1 jackknife for a statistic of several column means. Each column
// holds one value per sample.
Estimate jackknife(const std::vector<std::span<const double>>& columns,
                   const std::function<double(std::span<const double>)>& statistic);

// Runs body(begin, end) over [0, count) split into contiguous chunks on at
// most `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace momentcone
