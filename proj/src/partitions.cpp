#include "momentcone/partitions.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace momentcone {

int Partition::n() const
{
    int total = 0;
    for (const auto& b : blocks) total += static_cast<int>(b.size());
    return total;
}

std::vector<int> Partition::block_sizes() const
{
    std::vector<int> sizes;
    sizes.reserve(blocks.size());
    for (const auto& b : blocks) sizes.push_back(static_cast<int>(b.size()));
    return sizes;
}

std::vector<Partition> enumerate_partitions(int n)
{
    if (n < 0 || n > max_enumerated_partition_size)
        throw std::out_of_range("partition size must be in 0.." +
                                std::to_string(max_enumerated_partition_size));
    if (n == 0) return {Partition{}};

    // Restricted growth strings: a[0] = 0, a[j] <= 1 + max(a[0..j-1]).
    std::vector<Partition> out;
    std::vector<int> a(n, 0), mx(n, 0);
    while (true) {
        Partition p;
        p.blocks.resize(mx[n - 1] + 1);
        for (int j = 0; j < n; ++j) p.blocks[a[j]].push_back(j);
        out.push_back(std::move(p));

        int j = n - 1;
        while (j > 0 && a[j] == mx[j - 1] + 1) --j;
        if (j == 0) break;
        ++a[j];
        mx[j] = std::max(mx[j - 1], a[j]);
        for (int k = j + 1; k < n; ++k) {
            a[k] = 0;
            mx[k] = mx[j];
        }
    }
    return out;
}

BigInt factorial(int n)
{
    if (n < 0) throw std::domain_error("factorial of a negative number");
    BigInt f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

BigInt binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    BigInt c = 1;
    for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    return c;
}

BigInt bell_number(int n)
{
    if (n < 0) throw std::domain_error("Bell number of a negative order");
    std::vector<BigInt> b{1};
    for (int k = 0; k < n; ++k) {
        BigInt next = 0;
        for (int j = 0; j <= k; ++j) next += binomial(k, j) * b[j];
        b.push_back(next);
    }
    return b[n];
}

BigInt count_partitions_with_block_sizes(std::span<const int> sizes)
{
    int total = 0;
    std::map<int, int> multiplicity;
    BigInt denom = 1;
    for (int i : sizes) {
        if (i < 1) throw std::invalid_argument("block sizes must be positive");
        total += i;
        denom *= factorial(i);
        ++multiplicity[i];
    }
    for (const auto& [size, r] : multiplicity) denom *= factorial(r);
    return factorial(total) / denom;
}

std::vector<Pairing> enumerate_pairings(int m, int n)
{
    if (m < 0 || n < 0 || m > 6 || n > 6) throw std::out_of_range("pairings need 0 <= m, n <= 6");

    std::vector<Pairing> out;
    // partner[b] for beta index b in 0..n-1: 0 means unpaired, else alpha.
    std::vector<int> partner(n, 0);
    std::vector<bool> used(m + 1, false);
    auto rec = [&](auto&& self, int b) -> void {
        if (b == n) {
            Pairing p{m, n, {}};
            for (int j = 0; j < n; ++j)
                if (partner[j] != 0) p.pairs.emplace_back(partner[j], m + 1 + j);
            out.push_back(std::move(p));
            return;
        }
        partner[b] = 0;
        self(self, b + 1);
        for (int a = 1; a <= m; ++a) {
            if (used[a]) continue;
            used[a] = true;
            partner[b] = a;
            self(self, b + 1);
            used[a] = false;
        }
        partner[b] = 0;
    };
    rec(rec, 0);
    return out;
}

BigInt pairing_count(int m, int n, int k)
{
    if (k < 0 || k > std::min(m, n)) return 0;
    return factorial(m) * factorial(n) / (factorial(m - k) * factorial(n - k) * factorial(k));
}

BigInt ordered_three_partition_count(int m, int n, int k)
{
    if (k < 0 || k > std::min(m, n)) return 0;
    return factorial(m + n - k) / (factorial(m - k) * factorial(n - k) * factorial(k));
}

const std::vector<MaskedPartition>& masked_partitions(int n)
{
    static std::array<std::vector<MaskedPartition>, max_enumerated_partition_size + 1> cache;
    static std::array<std::once_flag, max_enumerated_partition_size + 1> flags;
    if (n < 1 || n > max_enumerated_partition_size)
        throw std::out_of_range("partition size out of range");

    std::call_once(flags[n], [n] {
        for (const auto& p : enumerate_partitions(n)) {
            MaskedPartition mp;
            for (const auto& b : p.blocks) {
                unsigned mask = 0;
                for (int j : b) mask |= 1u << j;
                mp.blocks.push_back(mask);
                double c = (b.size() % 2 == 1) ? 1.0 : -1.0;
                for (std::size_t k = 2; k < b.size(); ++k) c *= static_cast<double>(k);
                mp.mobius *= c;
            }
            cache[n].push_back(std::move(mp));
        }
    });
    return cache[n];
}

}  // namespace momentcone
