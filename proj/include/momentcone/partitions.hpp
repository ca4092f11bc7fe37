#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <span>
#include <utility>
#include <vector>

namespace momentcone {

using BigInt = boost::multiprecision::cpp_int;

// Set partition of {0..n-1}; blocks sorted internally and ordered by their
// minimal element.
struct Partition {
    std::vector<std::vector<int>> blocks;

    int n() const;
    std::vector<int> block_sizes() const;
    bool operator==(const Partition&) const = default;
};

constexpr int max_enumerated_partition_size = 12;

std::vector<Partition> enumerate_partitions(int n);

BigInt factorial(int n);
BigInt binomial(int n, int k);
// Bell numbers through B_{k+1} = sum_j C(k, j) B_j.
BigInt bell_number(int n);

// Number of partitions of {1..I}, I = sum i_j, whose block-size multiset is
// {i_1..i_n}: I! / (prod i_j! * prod r_l!) with r_l the multiplicities.
BigInt count_partitions_with_block_sizes(std::span<const int> sizes);

// Set of pairs (alpha, beta), alpha in 1..m, beta in m+1..m+n, with all
// alphas distinct and all betas distinct. Pairs are kept sorted by beta.
struct Pairing {
    int m = 0;
    int n = 0;
    std::vector<std::pair<int, int>> pairs;

    int size() const { return static_cast<int>(pairs.size()); }
};

std::vector<Pairing> enumerate_pairings(int m, int n);

// m! n! / ((m-k)! (n-k)! k!)
BigInt pairing_count(int m, int n, int k);

// (m+n-k)! / ((m-k)! (n-k)! k!): ordered splits of an (m+n-k)-set into
// pieces of sizes m-k, k, n-k.
BigInt ordered_three_partition_count(int m, int n, int k);

// Partitions as block bitmasks with their Moebius coefficient
// mu(0, pi) = prod_B (-1)^{|B|-1} (|B|-1)!. Cached per n.
struct MaskedPartition {
    std::vector<unsigned> blocks;
    double mobius = 1.0;
};

const std::vector<MaskedPartition>& masked_partitions(int n);

}  // namespace momentcone
