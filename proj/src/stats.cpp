#include "momentcone/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace momentcone {

double pairwise_sum(std::span<const double> xs)
{
    if (xs.size() <= 16) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

Estimate jackknife_mean(std::span<const double> xs)
{
    const std::size_t S = xs.size();
    if (S == 0) throw std::invalid_argument("no samples");
    const double mean = pairwise_sum(xs) / static_cast<double>(S);
    if (S == 1) return {mean, 0.0};
    // Leave-one-out means are (S*mean - x_i)/(S-1); their spread reduces to
    // the usual standard error of the mean.
    std::vector<double> sq(S);
    for (std::size_t i = 0; i < S; ++i) {
        double d = xs[i] - mean;
        sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / static_cast<double>(S - 1);
    return {mean, std::sqrt(var / static_cast<double>(S))};
}

Estimate jackknife(const std::vector<std::span<const double>>& columns,
                   const std::function<double(std::span<const double>)>& statistic)
{
    if (columns.empty()) throw std::invalid_argument("no columns");
    const std::size_t S = columns.front().size();
    if (S == 0) throw std::invalid_argument("no samples");
    for (const auto& c : columns)
        if (c.size() != S) throw std::invalid_argument("columns differ in length");

    const std::size_t m = columns.size();
    std::vector<double> totals(m), means(m);
    for (std::size_t c = 0; c < m; ++c) {
        totals[c] = pairwise_sum(columns[c]);
        means[c] = totals[c] / static_cast<double>(S);
    }
    const double full = statistic(means);
    if (S == 1) return {full, 0.0};

    std::vector<double> loo(S), buf(m);
    for (std::size_t i = 0; i < S; ++i) {
        for (std::size_t c = 0; c < m; ++c) buf[c] = (totals[c] - columns[c][i]) / static_cast<double>(S - 1);
        loo[i] = statistic(buf);
    }
    const double loo_mean = pairwise_sum(loo) / static_cast<double>(S);
    for (auto& v : loo) v = (v - loo_mean) * (v - loo_mean);
    const double var = static_cast<double>(S - 1) / static_cast<double>(S) * pairwise_sum(loo);
    return {full, std::sqrt(var)};
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t, std::size_t)>& body)
{
    if (count == 0) return;
    std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
    workers = std::min(workers, count);
    if (workers == 1) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t b = w * chunk, e = std::min(count, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, w, b, e] {
            try {
                body(b, e);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace momentcone
