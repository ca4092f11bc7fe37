#pragma once

#include "momentcone/measures.hpp"
#include "momentcone/partitions.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace momentcone {

// Functional on finite configurations of Y: a scalar at order 0 and one
// table per order 1..N, each a function of an n-tuple of Y-points with
// distinct x. Orders above N vanish; an empty table is identically zero.
template <class T>
class BasicConfigFunctional {
public:
    using Table = std::function<T(std::span<const WeightedAtom>)>;

    BasicConfigFunctional() = default;
    BasicConfigFunctional(T order0, std::vector<Table> tables, bool symmetric = true)
        : order0_(std::move(order0)), tables_(std::move(tables)), symmetric_(symmetric)
    {
    }

    int max_order() const { return static_cast<int>(tables_.size()); }
    const T& order0() const { return order0_; }
    bool symmetric() const { return symmetric_; }
    // Table of order k >= 1; may be empty.
    const Table& table(int k) const { return tables_.at(k - 1); }

    T operator()(std::span<const WeightedAtom> lambda) const
    {
        const int k = static_cast<int>(lambda.size());
        if (k == 0) return order0_;
        if (k > max_order() || !tables_[k - 1]) return T(0);
        return tables_[k - 1](lambda);
    }

    // Average of the order-|lambda| table over all orderings of lambda.
    T symmetrized(std::span<const WeightedAtom> lambda) const
    {
        if (symmetric_ || lambda.size() <= 1) return (*this)(lambda);
        std::vector<int> perm(lambda.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<WeightedAtom> buf(lambda.size());
        T sum(0);
        long count = 0;
        do {
            for (std::size_t j = 0; j < perm.size(); ++j) buf[j] = lambda[perm[j]];
            sum += (*this)(buf);
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return sum / T(count);
    }

private:
    T order0_{0};
    std::vector<Table> tables_;
    bool symmetric_ = true;
};

using ConfigFunctional = BasicConfigFunctional<double>;

constexpr int max_star_configuration = 12;

// (G1 * G2)(lambda) = sum over lambda_1 u lambda_2 = lambda of
// G1(lambda_1) G2(lambda_2); every point goes to lambda_1 only, lambda_2
// only, or both.
template <class T>
T star_product(const BasicConfigFunctional<T>& g1, const BasicConfigFunctional<T>& g2,
               std::span<const WeightedAtom> lambda)
{
    const int k = static_cast<int>(lambda.size());
    if (k > max_star_configuration) throw std::out_of_range("star product limited to 12 points");
    std::vector<int> code(k, 0);
    std::vector<WeightedAtom> l1, l2;
    l1.reserve(k);
    l2.reserve(k);
    T sum(0);
    while (true) {
        l1.clear();
        l2.clear();
        for (int j = 0; j < k; ++j) {
            if (code[j] != 1) l1.push_back(lambda[j]);
            if (code[j] != 0) l2.push_back(lambda[j]);
        }
        sum += g1(l1) * g2(l2);
        int j = 0;
        while (j < k && ++code[j] == 3) code[j++] = 0;
        if (j == k) break;
    }
    return sum;
}

// (KG)(gamma) = sum of G over all finite sub-configurations, empty included.
template <class T>
T k_transform(const BasicConfigFunctional<T>& g, std::span<const WeightedAtom> gamma)
{
    const int k = static_cast<int>(gamma.size());
    if (k > max_star_configuration) throw std::out_of_range("K-transform limited to 12 points");
    std::vector<WeightedAtom> sub;
    T sum(0);
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        sub.clear();
        for (int j = 0; j < k; ++j)
            if (mask & (1u << j)) sub.push_back(gamma[j]);
        sum += g(sub);
    }
    return sum;
}

template <class T>
T k_transform(const BasicConfigFunctional<T>& g, const DiscreteMeasure& gamma)
{
    return k_transform(g, std::span<const WeightedAtom>(gamma.atoms()));
}

// Positions in y = (y_1..y_{m+n-|p|}) feeding G2's arguments under the
// contraction p: z_beta = y_alpha for paired beta, and the unpaired betas,
// in increasing order, take y_{m+1}, y_{m+2}, ... (0-based indices).
std::vector<int> contraction_indices(const Pairing& p);

// (G1^(m) (x) G2^(n))_p as a function of m+n-|p| points.
ConfigFunctional::Table contracted_tensor(const ConfigFunctional::Table& g1, const ConfigFunctional::Table& g2,
                                          const Pairing& p);

// G1 <> G2 = sum_{m,n} sum_p (m+n-|p|)!/(m! n!) (G1^(m) (x) G2^(n))_p. The
// order-0 parts multiply through, so G1^(0) <> G2 = G1^(0) G2.
ConfigFunctional diamond_product(const ConfigFunctional& g1, const ConfigFunctional& g2);

// R_{i_1..i_n} g on X^I: g at the first coordinate of each consecutive block
// of sizes i_1..i_n, times the indicator that coordinates agree within blocks.
TupleFunction r_lift(TupleFunction g, std::vector<int> powers);

using TestFunction = std::function<double(const Point&)>;

// <:omega^{(x)n}:, phi_1 (x) ... (x) phi_n> by the recursion
// n = 1: <omega, phi>;
// n >= 2: n^{-2} [ sum_i <omega, phi_i> W(phi without i)
//                  - 2 sum_{i<j} <omega, phi_i> W(phi with phi_j phi_i at i, j removed) ].
double wick_pairing(const DiscreteMeasure& omega, std::span<const TestFunction> phis);

// Term coef * Sym_n(chi_{B_1} (x) ... (x) chi_{B_n}) of a functional in the
// indicator class.
struct IndicatorTerm {
    double coef = 1.0;
    std::vector<YBox> boxes;
};

ConfigFunctional indicator_functional(double order0, std::vector<IndicatorTerm> terms);

}  // namespace momentcone
