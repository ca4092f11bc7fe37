#include "commands.hpp"

#include "momentcone/partitions.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>

namespace momentcone::cli {

namespace {

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

bool bell_numbers()
{
    const long expected[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
    for (int n = 0; n <= 10; ++n) {
        if (bell_number(n) != expected[n]) return false;
        if (n <= 8 && static_cast<long>(enumerate_partitions(n).size()) != expected[n]) return false;
    }
    return true;
}

bool gamma_full_moments()
{
    auto src = MomentSource::analytic(gamma_model(1.0), 1);
    const Window w({0.0}, {1.0});
    double rising = 1.0;
    for (int n = 1; n <= 5; ++n) {
        rising *= (1.0 + n - 1);
        if (!close(full_moment(src, n, w).value, rising, 1e-12)) return false;
    }
    return true;
}

bool laguerre_quadrature()
{
    std::vector<double> r;
    for (int i = 0; i <= 6; ++i) r.push_back(std::tgamma(i + 1.0));
    auto q = quadrature_from_moments(r);
    const double nodes[] = {0.41577455678347908, 2.2942803602790417, 6.2899450829374792};
    const double weights[] = {0.71109300992917302, 0.27851773356924085, 0.010389256501586136};
    if (q.nodes.size() != 3) return false;
    for (int j = 0; j < 3; ++j)
        if (!close(q.nodes[j], nodes[j], 1e-8) || !close(q.weights[j], weights[j], 1e-8)) return false;
    return true;
}

bool random_quadrature_roundtrip()
{
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> node(0.0, 5.0), weight(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 4;
        std::vector<double> t(m), w(m);
        for (int j = 0; j < m; ++j) t[j] = node(gen), w[j] = weight(gen);
        std::vector<double> r(2 * m + 3, 0.0);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (int j = 0; j < m; ++j) r[i] += w[j] * std::pow(t[j], static_cast<double>(i));
        auto q = quadrature_from_moments(r);
        for (int i = 0; i < 2 * static_cast<int>(q.nodes.size()); ++i)
            if (std::abs(q.moment(i) - r[i]) > 1e-9 * std::max(1.0, r[i])) return false;
    }
    return true;
}

bool diffuse_atom_at_zero()
{
    std::vector<double> r = {1.0, 0, 0, 0, 0, 0, 0};
    return atom_at_zero_series(r, 3).no_atom_at_zero == Check::Fail;
}

bool exponential_series_diverges()
{
    std::vector<double> r;
    for (int i = 0; i <= 12; ++i) r.push_back(std::tgamma(i + 1.0));
    auto rep = atom_at_zero_series(r, 6);
    return rep.trend == Trend::Diverging && rep.no_atom_at_zero == Check::Pass;
}

bool star_is_product_under_k()
{
    auto g = indicator_functional(0.5, {{1.0, {YBox{Window({0.0}, {0.5}), 0.0, 2.0}}},
                                         {-0.7, {YBox{Window({0.2}, {1.0}), 0.5, 3.0}, YBox{Window({0.0}, {1.0}), 0.0, 1.0}}}});
    std::vector<WeightedAtom> gamma = {{Point{0.1}, 0.7}, {Point{0.3}, 1.5}, {Point{0.6}, 0.9}, {Point{0.8}, 2.5}};
    const double lhs = k_transform(g, std::span<const WeightedAtom>(gamma));
    ConfigFunctional::Table sq = [&g](std::span<const WeightedAtom> l) { return star_product(g, g, l); };
    std::vector<ConfigFunctional::Table> tables(8, sq);
    ConfigFunctional gg(g.order0() * g.order0(), tables, true);
    return close(k_transform(gg, std::span<const WeightedAtom>(gamma)), lhs * lhs, 1e-12);
}

bool poisson_flat_and_discrete()
{
    auto src = MomentSource::analytic(poisson_model(1.0), 1);
    return point_process_verdict(src).outcome == Outcome::PointProcess;
}

bool gamma_discrete()
{
    auto src = MomentSource::analytic(gamma_model(1.0), 1);
    return point_process_verdict(src).outcome == Outcome::Discrete;
}

bool diffuse_not_discrete()
{
    auto src = MomentSource::analytic(diffuse_model(1.0), 1);
    return discreteness_verdict(src).outcome == Outcome::NotDiscrete;
}

bool deterministic_sampling()
{
    auto a = sample_many(gamma_model(1.0), Window({0.0}, {1.0}), 42, 10);
    auto b = sample_many(gamma_model(1.0), Window({0.0}, {1.0}), 42, 10);
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s].size() != b[s].size()) return false;
        for (std::size_t k = 0; k < a[s].size(); ++k)
            if (!(a[s].atoms()[k].x == b[s].atoms()[k].x) || a[s].atoms()[k].s != b[s].atoms()[k].s) return false;
    }
    return true;
}

}  // namespace

int run_selftest(std::ostream& out)
{
    const std::pair<const char*, std::function<bool()>> checks[] = {
        {"bell numbers and partition enumeration", bell_numbers},
        {"gamma full moments are rising factorials", gamma_full_moments},
        {"three-node Gauss-Laguerre rule from factorial moments", laguerre_quadrature},
        {"quadrature reproduces moments of random atomic measures", random_quadrature_roundtrip},
        {"Lebesgue moment sequence has an atom at zero", diffuse_atom_at_zero},
        {"exponential moment series diverges", exponential_series_diverges},
        {"K-transform turns the star product into a product", star_is_product_under_k},
        {"Poisson process is a point process", poisson_flat_and_discrete},
        {"gamma measure is discrete", gamma_discrete},
        {"Lebesgue measure is not discrete", diffuse_not_discrete},
        {"sampling is bit-identical across runs", deterministic_sampling},
    };
    int failed = 0;
    for (const auto& [name, fn] : checks) {
        bool ok = false;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            out << "error: " << e.what() << '\n';
        }
        out << (ok ? "PASS " : "FAIL ") << name << '\n';
        failed += ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}

}  // namespace momentcone::cli
