#include "momentcone/moments.hpp"
#include "momentcone/partitions.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace momentcone;

namespace {

std::vector<DiscreteMeasure> tiny_samples(std::uint64_t seed, int count, const Window& w)
{
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> atoms(0, 5);
    std::uniform_real_distribution<double> x(w.lower()[0], w.upper()[0]), s(0.1, 2.0);
    std::vector<DiscreteMeasure> out;
    for (int k = 0; k < count; ++k) {
        std::vector<WeightedAtom> v;
        for (int a = atoms(gen); a > 0; --a) v.push_back({Point{x(gen)}, s(gen)});
        out.emplace_back(v);
    }
    return out;
}

double rising(double v, int n)
{
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= v + k;
    return r;
}

}  // namespace

TEST_CASE("moment sources")
{
    CHECK_THROWS(MomentSource::analytic(gamma_model(), 0));
    CHECK_THROWS(MomentSource::empirical({}, Window({0.0}, {1.0})));
    auto e = MomentSource::empirical(tiny_samples(1, 4, Window({0.0}, {1.0})), Window({0.0}, {1.0}));
    CHECK_FALSE(e.is_analytic());
    CHECK(e.sample_count() == 4);
    CHECK_THROWS(e.model());
    // sets reaching outside the sampled window are refused
    std::vector<int> one = {1};
    CHECK_THROWS(moment(e, one, OffDiagonalBox::off_diagonal(Window({0.0}, {2.0}), 1)));
    std::vector<int> pair = {1, 1};
    CHECK_THROWS(moment(MomentSource::analytic(diffuse_model(1.0), 1), pair,
                        OffDiagonalBox::off_diagonal(Window({0.0}, {1.0}), 2, 0.5)));
}

TEST_CASE("multi-indices are graded")
{
    for (int n = 1; n <= 4; ++n)
        for (int deg = 0; deg <= 6; ++deg) {
            auto idx = multi_indices(n, deg);
            long expected = 1;
            for (int k = 1; k <= n; ++k) expected = expected * (deg + k) / k;
            CHECK(static_cast<long>(idx.size()) == expected);
            int prev = 0;
            for (const auto& i : idx) {
                int total = 0;
                for (int v : i) total += v;
                CHECK(total >= prev);
                prev = total;
            }
        }
    CHECK(multi_indices(2, 1) == std::vector<std::vector<int>>{{0, 0}, {1, 0}, {0, 1}});
}

TEST_CASE("analytic full moments")
{
    auto g = MomentSource::analytic(gamma_model(1.0), 1);
    for (double v : {0.5, 1.0, 3.0})
        for (int n = 1; n <= 6; ++n)
            CHECK(full_moment(g, n, Window({0.0}, {v})).value == doctest::Approx(rising(v, n)).epsilon(1e-12));

    // Poisson with mean 2: Touchard polynomials
    auto p = MomentSource::analytic(poisson_model(1.0), 1);
    const double touchard[] = {1, 2, 6, 22, 94, 454};
    for (int n = 1; n <= 5; ++n)
        CHECK(full_moment(p, n, Window({0.0}, {2.0})).value == doctest::Approx(touchard[n]).epsilon(1e-12));
}

TEST_CASE("empirical full moments split over partitions")
{
    const Window w({0.0}, {1.0});
    auto samples = tiny_samples(7, 60, w);
    auto src = MomentSource::empirical(samples, w);
    for (int n = 1; n <= 3; ++n) {
        double by_partition = 0.0;
        for (const auto& p : enumerate_partitions(n)) {
            auto sizes = p.block_sizes();
            by_partition += moment(src, sizes, OffDiagonalBox::off_diagonal(w, static_cast<int>(sizes.size()))).value;
        }
        double direct = 0.0;
        for (const auto& m : samples) direct += std::pow(local_mass(m, w), n);
        direct /= samples.size();
        CHECK(full_moment(src, n, w).value == doctest::Approx(direct).epsilon(1e-12));
        CHECK(by_partition == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("gamma off-diagonal moments obey the factorial growth bound")
{
    auto g = MomentSource::analytic(gamma_model(1.0), 1);
    for (double v : {0.5, 1.0, 2.0, 4.0}) {
        const Window w({0.0}, {v});
        // C: smallest constant with M(L^n) <= C^n n!, from the exact rising factorials
        double c = 1.0;
        for (int n = 1; n <= 200; ++n) {
            double log_ratio = 0.0;
            for (int k = 0; k < n; ++k) log_ratio += std::log((v + k) / (k + 1.0));
            c = std::max(c, std::exp(log_ratio / n));
        }
        for (int n = 1; n <= 3; ++n) {
            auto delta = OffDiagonalBox::off_diagonal(w, n);
            for (auto i : multi_indices(n, 8 - n)) {
                int total = 0;
                double fact = 1.0;
                for (auto& v2 : i) {
                    v2 += 1;
                    total += v2;
                    fact *= std::tgamma(v2 + 1.0);
                }
                const double lhs = moment(g, i, delta).value / std::tgamma(n + 1.0);
                CHECK(lhs <= fact * std::pow(c, total) * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("empirical moments of a deterministic measure are exact")
{
    auto model = fixed_atoms_model({{Point{0.2}, WeightLaw::deterministic(1.5)},
                                    {Point{0.5}, WeightLaw::deterministic(0.5)},
                                    {Point{0.9}, WeightLaw::deterministic(2.0)}});
    const Window w({0.0}, {1.0});
    auto src = MomentSource::empirical(sample_many(model, w, 3, 25), w);
    auto exact = MomentSource::analytic(model, 1);
    for (int n = 1; n <= 3; ++n) {
        auto delta = OffDiagonalBox::off_diagonal(w, n);
        for (auto i : multi_indices(n, 4)) {
            for (auto& v : i) v += 1;
            auto e = moment(src, i, delta);
            CHECK(e.value == doctest::Approx(moment(exact, i, delta).value).epsilon(1e-12));
            CHECK(e.std_error == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("xi sequences are symmetric for symmetric sets")
{
    const Window w({0.0}, {2.0});
    auto g = MomentSource::analytic(gamma_model(1.0), 1);
    auto delta = OffDiagonalBox::off_diagonal(w, 3);
    auto seq = xi_sequence(g, delta, 5);
    for (const auto& [i, e] : seq.values) {
        auto perm = i;
        std::sort(perm.begin(), perm.end());
        do CHECK(seq.at(perm).value == e.value);
        while (std::next_permutation(perm.begin(), perm.end()));
        // xi_i = M_{i+1} / n!
        auto p = i;
        for (auto& v : p) v += 1;
        CHECK(e.value == doctest::Approx(moment(g, p, delta).value / 6.0).epsilon(1e-14));
    }

    auto samples = sample_many(gamma_model(1.0), w, 5, 300);
    auto emp = xi_sequence(MomentSource::empirical(samples, w), OffDiagonalBox::off_diagonal(w, 2), 4);
    for (const auto& [i, e] : emp.values) {
        const auto& t = emp.at({i[1], i[0]});
        CHECK(std::abs(t.value - e.value) <= 1e-12 * std::abs(e.value) + 3.0 * e.std_error);
    }
    CHECK(emp.marginal(1).size() == 5);
    CHECK(emp.marginal(0)[2] == emp.at({2, 0}).value);
}

TEST_CASE("Poisson sequences do not depend on the index")
{
    const Window w({0.0}, {1.5});
    auto seq = xi_sequence(MomentSource::analytic(poisson_model(2.0), 1), OffDiagonalBox::off_diagonal(w, 2), 6);
    for (const auto& [i, d] : seq.deviation_from_base) CHECK(d.value == 0.0);
    CHECK(seq.at({0, 0}).value == doctest::Approx(9.0 / 2.0));
}

TEST_CASE("growth constants along a shrinking ladder")
{
    auto g = MomentSource::analytic(gamma_model(1.0), 1);
    auto rep = growth_constants(g, {Window::cube(1.0, 1), Window::cube(0.5, 1), Window::cube(0.25, 1),
                                    Window::cube(0.125, 1)}, 6);
    REQUIRE(rep.shrink_chain.size() == 4);
    CHECK(rep.c_prime_non_increasing);
    // C' = vol for gamma; C stays near 1 as the window shrinks
    CHECK(rep.rows[0].c_prime.value == doctest::Approx(2.0));
    CHECK(rep.rows[3].c_prime.value == doctest::Approx(0.25));
    CHECK(rep.rows[3].c.value >= 0.5);
    CHECK(rep.c_lags_c_prime);
}

TEST_CASE("moment CSV format")
{
    std::ostringstream out;
    write_moment_csv(out, {{0, {}, "empty", {1.0, 0.0}}, {2, {1, 2}, "box1", {0.1, 0.25}}});
    CHECK(out.str() == "n,i_1,i_2,delta_id,value,stderr\n0,,,empty,1,0\n2,1,2,box1,0.10000000000000001,0.25\n");
}

TEST_CASE("statistics helpers")
{
    std::vector<double> xs = {1.0, 2.0, 4.0, 7.0};
    auto e = jackknife_mean(xs);
    CHECK(e.value == 3.5);
    // the jackknife error of a mean is the usual sd / sqrt(n)
    const double sd = std::sqrt((6.25 + 2.25 + 0.25 + 12.25) / 3.0);
    CHECK(e.std_error == doctest::Approx(sd / 2.0));
    CHECK(pairwise_sum(xs) == 14.0);

    std::vector<double> a = {1.0, 2.0, 3.0}, b = {2.0, 2.0, 5.0};
    auto ratio = jackknife({a, b}, [](std::span<const double> m) { return m[0] / m[1]; });
    CHECK(ratio.value == doctest::Approx(2.0 / 3.0));

    std::vector<int> hit(1000, 0);
    parallel_for(hit.size(), 4, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) ++hit[k];
    });
    CHECK(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
}
