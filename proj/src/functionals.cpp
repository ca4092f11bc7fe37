#include "momentcone/functionals.hpp"

#include <cmath>

namespace momentcone {

std::vector<int> contraction_indices(const Pairing& p)
{
    std::vector<int> idx(p.n, -1);
    for (const auto& [alpha, beta] : p.pairs) idx[beta - p.m - 1] = alpha - 1;
    int next = p.m;
    for (int b = 0; b < p.n; ++b)
        if (idx[b] < 0) idx[b] = next++;
    return idx;
}

ConfigFunctional::Table contracted_tensor(const ConfigFunctional::Table& g1, const ConfigFunctional::Table& g2,
                                          const Pairing& p)
{
    const int m = p.m, width = p.m + p.n - p.size();
    auto idx = contraction_indices(p);
    return [g1, g2, m, width, idx](std::span<const WeightedAtom> y) {
        if (static_cast<int>(y.size()) != width) throw std::invalid_argument("contracted tensor arity mismatch");
        std::vector<WeightedAtom> z(idx.size());
        for (std::size_t b = 0; b < idx.size(); ++b) z[b] = y[idx[b]];
        return g1(y.first(m)) * g2(z);
    };
}

ConfigFunctional diamond_product(const ConfigFunctional& g1, const ConfigFunctional& g2)
{
    if (g1.max_order() > 6 || g2.max_order() > 6) throw std::out_of_range("diamond product limited to order 6");

    auto table_of = [](const ConfigFunctional& g, int k) -> ConfigFunctional::Table {
        if (k == 0) {
            double c = g.order0();
            return [c](std::span<const WeightedAtom>) { return c; };
        }
        return g.table(k);
    };

    struct Term {
        double weight;
        ConfigFunctional::Table f;
    };
    const int top = g1.max_order() + g2.max_order();
    std::vector<std::vector<Term>> by_order(top + 1);
    for (int m = 0; m <= g1.max_order(); ++m) {
        if (m > 0 && !g1.table(m)) continue;
        for (int n = 0; n <= g2.max_order(); ++n) {
            if (n > 0 && !g2.table(n)) continue;
            if (m == 0 && n == 0) continue;
            auto t1 = table_of(g1, m), t2 = table_of(g2, n);
            for (const auto& p : enumerate_pairings(m, n)) {
                const int order = m + n - p.size();
                double w = static_cast<double>(factorial(order)) /
                           (static_cast<double>(factorial(m)) * static_cast<double>(factorial(n)));
                by_order[order].push_back({w, contracted_tensor(t1, t2, p)});
            }
        }
    }

    std::vector<ConfigFunctional::Table> tables(top);
    for (int k = 1; k <= top; ++k) {
        if (by_order[k].empty()) continue;
        tables[k - 1] = [terms = std::move(by_order[k])](std::span<const WeightedAtom> y) {
            double sum = 0.0;
            for (const auto& t : terms) sum += t.weight * t.f(y);
            return sum;
        };
    }
    return ConfigFunctional(g1.order0() * g2.order0(), std::move(tables), false);
}

TupleFunction r_lift(TupleFunction g, std::vector<int> powers)
{
    int total = 0;
    for (int i : powers) {
        if (i < 1) throw std::invalid_argument("r_lift powers must be >= 1");
        total += i;
    }
    return [g = std::move(g), powers = std::move(powers), total](std::span<const Point> x) {
        if (static_cast<int>(x.size()) != total) throw std::invalid_argument("r_lift arity mismatch");
        std::vector<Point> reps;
        reps.reserve(powers.size());
        int start = 0;
        for (int i : powers) {
            for (int k = start + 1; k < start + i; ++k)
                if (!(x[k] == x[start])) return 0.0;
            reps.push_back(x[start]);
            start += i;
        }
        return g(reps);
    };
}

namespace {

double pairing_with(const DiscreteMeasure& omega, const std::vector<double>& v)
{
    double sum = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) sum += omega.atoms()[a].s * v[a];
    return sum;
}

double wick_values(const DiscreteMeasure& omega, const std::vector<std::vector<double>>& phis)
{
    const std::size_t n = phis.size();
    if (n == 1) return pairing_with(omega, phis[0]);

    double first = 0.0, second = 0.0;
    std::vector<std::vector<double>> rest;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = pairing_with(omega, phis[i]);
        if (wi == 0.0) continue;
        rest.clear();
        for (std::size_t k = 0; k < n; ++k)
            if (k != i) rest.push_back(phis[k]);
        first += wi * wick_values(omega, rest);

        for (std::size_t j = i + 1; j < n; ++j) {
            rest.clear();
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j) continue;
                if (k == i) {
                    std::vector<double> prod(phis[i].size());
                    for (std::size_t a = 0; a < prod.size(); ++a) prod[a] = phis[j][a] * phis[i][a];
                    rest.push_back(std::move(prod));
                } else {
                    rest.push_back(phis[k]);
                }
            }
            second += wi * wick_values(omega, rest);
        }
    }
    return (first - 2.0 * second) / static_cast<double>(n * n);
}

}  // namespace

double wick_pairing(const DiscreteMeasure& omega, std::span<const TestFunction> phis)
{
    if (phis.empty() || phis.size() > 6) throw std::out_of_range("Wick pairing needs 1 <= n <= 6");
    std::vector<std::vector<double>> values(phis.size(), std::vector<double>(omega.size()));
    for (std::size_t f = 0; f < phis.size(); ++f)
        for (std::size_t a = 0; a < omega.size(); ++a) values[f][a] = phis[f](omega.atoms()[a].x);
    if (omega.empty()) return 0.0;
    return wick_values(omega, values);
}

ConfigFunctional indicator_functional(double order0, std::vector<IndicatorTerm> terms)
{
    int top = 0;
    for (const auto& t : terms) top = std::max(top, static_cast<int>(t.boxes.size()));
    std::vector<std::vector<IndicatorTerm>> by_order(top + 1);
    for (auto& t : terms) {
        if (t.boxes.empty()) {
            order0 += t.coef;
            continue;
        }
        by_order[t.boxes.size()].push_back(std::move(t));
    }
    std::vector<ConfigFunctional::Table> tables(top);
    for (int n = 1; n <= top; ++n) {
        if (by_order[n].empty()) continue;
        tables[n - 1] = [ts = std::move(by_order[n]), n](std::span<const WeightedAtom> y) {
            // Sym_n averages over the n! assignments of points to boxes.
            std::vector<int> perm(n);
            double total = 0.0;
            long count = 0;
            for (const auto& t : ts) {
                std::iota(perm.begin(), perm.end(), 0);
                double hits = 0.0;
                count = 0;
                do {
                    bool in = true;
                    for (int j = 0; j < n && in; ++j) in = t.boxes[j].contains(y[perm[j]]);
                    if (in) hits += 1.0;
                    ++count;
                } while (std::next_permutation(perm.begin(), perm.end()));
                total += t.coef * hits / static_cast<double>(count);
            }
            return total;
        };
    }
    return ConfigFunctional(order0, std::move(tables), true);
}

}  // namespace momentcone
