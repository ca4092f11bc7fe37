#include "momentcone/momentproblem.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace momentcone;

namespace {

std::vector<double> moments_of(const std::vector<double>& t, const std::vector<double>& w, int count)
{
    std::vector<double> r(count, 0.0);
    for (int i = 0; i < count; ++i)
        for (std::size_t j = 0; j < t.size(); ++j) r[i] += w[j] * std::pow(t[j], static_cast<double>(i));
    return r;
}

std::vector<double> factorials(int count, double atom_at_zero = 0.0)
{
    std::vector<double> r;
    for (int i = 0; i < count; ++i) r.push_back(std::tgamma(i + 1.0));
    r[0] += atom_at_zero;
    return r;
}

}  // namespace

TEST_CASE("Hankel positivity")
{
    auto r = factorials(9);
    CHECK(hankel_psd(r, 4).pass);
    CHECK(stieltjes_shifted_psd(r, 3).pass);
    CHECK_THROWS(hankel_psd(r, 5));

    // r_2 < r_1^2 / r_0 is not a moment sequence
    std::vector<double> bad = {1.0, 1.0, 0.5};
    auto rep = hankel_psd(bad, 1);
    CHECK_FALSE(rep.pass);
    CHECK(rep.min_eigenvalue < 0.0);
    // a large enough standard error hides the violation
    std::vector<double> err = {0.0, 0.0, 1.0};
    CHECK(hankel_psd(bad, 1, {}, err).pass);
}

TEST_CASE("shifted positivity separates measures on the half-line")
{
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> pos(0.0, 3.0), neg(-2.0, -0.2), weight(0.1, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 3;
        std::vector<double> t, w;
        for (int j = 0; j < m; ++j) t.push_back(pos(gen)), w.push_back(weight(gen));
        CHECK(stieltjes_shifted_psd(moments_of(t, w, 2 * m + 2), m).pass);
        t.push_back(neg(gen));
        w.push_back(weight(gen));
        CHECK_FALSE(stieltjes_shifted_psd(moments_of(t, w, 2 * m + 4), m + 1).pass);
        CHECK(hankel_psd(moments_of(t, w, 2 * m + 3), m + 1).pass);
    }
}

TEST_CASE("Gauss-Laguerre rule from factorial moments matches the three-term recurrence")
{
    // Laguerre recurrence: alpha_j = 2j + 1, beta_j = j^2
    const int K = 5;
    Eigen::VectorXd diag(K), off(K - 1);
    for (int j = 0; j < K; ++j) diag(j) = 2.0 * j + 1.0;
    for (int j = 0; j + 1 < K; ++j) off(j) = j + 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);

    auto q = quadrature_from_moments(factorials(2 * K + 1));
    REQUIRE(q.nodes.size() == K);
    for (int j = 0; j < K; ++j) {
        CHECK(q.nodes[j] == doctest::Approx(es.eigenvalues()(j)).epsilon(1e-9));
        const double v = es.eigenvectors()(0, j);
        CHECK(q.weights[j] == doctest::Approx(v * v).epsilon(1e-8));
    }
}

TEST_CASE("quadrature invariants on random atomic measures")
{
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> node(0.0, 5.0), weight(0.05, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 1 + trial % 5;
        std::vector<double> t, w;
        for (int j = 0; j < m; ++j) t.push_back(node(gen)), w.push_back(weight(gen));
        auto r = moments_of(t, w, 2 * m + 3);
        auto q = quadrature_from_moments(r);
        // close nodes may merge at numerical rank; the moments must still match
        CHECK(q.nodes.size() <= static_cast<std::size_t>(m));
        for (std::size_t j = 0; j < q.nodes.size(); ++j) {
            CHECK(q.weights[j] > 0.0);
            if (j > 0) CHECK(q.nodes[j] > q.nodes[j - 1]);
        }
        CHECK(std::abs(q.total() - r[0]) <= 1e-10 * r[0]);
        for (int i = 0; i < 2 * m; ++i) CHECK(std::abs(q.moment(i) - r[i]) <= 1e-9 * std::max(1.0, r[i]));
    }
    CHECK_THROWS(quadrature_from_moments(std::vector<double>{0.0, 1.0, 1.0}));
    CHECK_THROWS(quadrature_from_moments(std::vector<double>{1.0, 1.0, 0.5}));
}

TEST_CASE("atom-at-zero series")
{
    SUBCASE("exponential law: summands stay at one")
    {
        auto rep = atom_at_zero_series(factorials(17), 8);
        REQUIRE(rep.summands.size() == 8);
        for (double t : rep.summands) CHECK(t == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.trend == Trend::Diverging);
        CHECK(rep.no_atom_at_zero == Check::Pass);
        CHECK(rep.christoffel_bound == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
    }
    SUBCASE("exponential law plus an atom at zero")
    {
        const double m0 = 1.0;
        auto rep = atom_at_zero_series(factorials(17, m0), 8);
        CHECK(rep.trend == Trend::Converging);
        // not decidable from a converging trend alone
        CHECK(rep.no_atom_at_zero == Check::Inconclusive);
        // lambda_K(0) = m0 + 1/(K+1) for this family
        CHECK(rep.christoffel_bound == doctest::Approx(m0 + 1.0 / 9.0).epsilon(1e-9));
        CHECK(rep.christoffel_bound >= m0);
    }
    SUBCASE("partial sums grow and determinants stay positive")
    {
        auto rep = atom_at_zero_series(factorials(13, 0.3), 6);
        for (std::size_t k = 1; k < rep.partial_sums.size(); ++k) CHECK(rep.partial_sums[k] >= rep.partial_sums[k - 1]);
        for (double d : rep.determinants) CHECK(d > 0.0);
        for (double e : rep.shifted_determinants) CHECK(e > 0.0);
        CHECK(rep.min_eigenvalue > 0.0);
    }
    SUBCASE("finite-rank sequences switch to the node test")
    {
        auto with = atom_at_zero_series(moments_of({0.0, 1.0, 2.5}, {0.4, 1.0, 0.3}, 13), 6);
        REQUIRE(with.degeneracy_rank);
        CHECK(*with.degeneracy_rank == 3);
        CHECK(with.no_atom_at_zero == Check::Fail);
        CHECK(with.zero_node_weight == doctest::Approx(0.4).epsilon(1e-8));
        auto without = atom_at_zero_series(moments_of({0.05, 1.0, 2.5}, {0.4, 1.0, 0.3}, 13), 6);
        CHECK(without.no_atom_at_zero == Check::Pass);
    }
    SUBCASE("support below zero fails")
    {
        auto rep = atom_at_zero_series(moments_of({-0.5, 1.0}, {0.5, 1.0}, 9), 4);
        CHECK_FALSE(rep.stieltjes_pass);
        CHECK(rep.no_atom_at_zero == Check::Fail);
    }
    CHECK_THROWS(atom_at_zero_series(factorials(5), 3));
}

TEST_CASE("trend classification")
{
    const MomentTolerances tol;
    std::vector<double> flat(8, 1.0), geometric, harmonic, squares;
    for (int k = 1; k <= 8; ++k) {
        geometric.push_back(std::pow(0.5, k));
        harmonic.push_back(1.0 / k);
        squares.push_back(1.0 / (k * k));
    }
    CHECK(classify_by_ratio(flat, tol) == Trend::Diverging);
    CHECK(classify_by_ratio(geometric, tol) == Trend::Converging);
    CHECK(classify_by_ratio(std::vector<double>{1.0, 1.0}, tol) == Trend::Inconclusive);
    CHECK(classify_by_exponent(harmonic, tol) == Trend::Diverging);
    CHECK(classify_by_exponent(squares, tol) == Trend::Converging);

    auto carleman = carleman_check(factorials(17), 8);
    CHECK(carleman.trend == Trend::Diverging);
    REQUIRE(carleman.terms.size() == 8);
    CHECK(carleman.terms[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("reports serialize every determinant and partial sum")
{
    auto rep = atom_at_zero_series(factorials(9), 4);
    auto j = to_json(rep);
    CHECK(j.at("determinants").size() == 5);
    CHECK(j.at("partial_sums").size() == rep.partial_sums.size());
    CHECK(j.at("trend") == "diverging");
    CHECK(to_json(MomentTolerances{}).at("psd") == 1e-8);
}
