#include "momentcone/momentproblem.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace momentcone {

using mp = boost::multiprecision::cpp_bin_float_50;

std::string to_string(Check c)
{
    switch (c) {
    case Check::Pass: return "pass";
    case Check::Fail: return "fail";
    default: return "inconclusive";
    }
}

std::string to_string(Trend t)
{
    switch (t) {
    case Trend::Diverging: return "diverging";
    case Trend::Converging: return "converging";
    default: return "inconclusive";
    }
}

namespace {

PsdReport psd_of(const Eigen::MatrixXd& h, const Eigen::MatrixXd& err, const MomentTolerances& tol)
{
    PsdReport rep;
    rep.size = static_cast<int>(h.rows());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    rep.min_eigenvalue = ev.minCoeff();
    rep.spectral_norm = ev.cwiseAbs().maxCoeff();
    rep.tolerance = tol.psd * (1.0 + rep.spectral_norm);
    rep.noise_floor = err.size() ? tol.noise_multiplier * err.norm() : 0.0;
    rep.pass = rep.min_eigenvalue >= -(rep.tolerance + rep.noise_floor);
    return rep;
}

PsdReport hankel_with_offset(std::span<const double> r, int N, int offset, const MomentTolerances& tol,
                             std::span<const double> errors)
{
    if (N < 0) throw std::invalid_argument("matrix order must be >= 0");
    if (static_cast<int>(r.size()) < 2 * N + 1 + offset)
        throw std::invalid_argument("insufficient moments: need " + std::to_string(2 * N + 1 + offset) + ", have " +
                                    std::to_string(r.size()));
    if (!errors.empty() && errors.size() < r.size()) throw std::invalid_argument("one standard error per moment expected");
    Eigen::MatrixXd h(N + 1, N + 1), e;
    if (!errors.empty()) e.resize(N + 1, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j <= N; ++j) {
            h(i, j) = r[i + j + offset];
            if (!errors.empty()) e(i, j) = errors[i + j + offset];
        }
    return psd_of(h, e, tol);
}

// LDL^T of [r_{i+j+offset}] without pivoting; stops before the first column
// whose pivot `stop` rejects.
struct Ldl {
    std::vector<mp> pivots;
    std::vector<std::vector<mp>> lower;  // lower[i][j], j < i
};

template <class Stop>
Ldl hankel_ldl(std::span<const double> r, int size, int offset, Stop stop)
{
    Ldl f;
    f.lower.assign(size, std::vector<mp>(size, mp(0)));
    for (int j = 0; j < size; ++j) {
        mp d = r[2 * j + offset];
        for (int k = 0; k < j; ++k) d -= f.lower[j][k] * f.lower[j][k] * f.pivots[k];
        f.pivots.push_back(d);
        if (stop(j, d)) break;
        for (int i = j + 1; i < size; ++i) {
            mp a = r[i + j + offset];
            for (int k = 0; k < j; ++k) a -= f.lower[i][k] * f.lower[j][k] * f.pivots[k];
            f.lower[i][j] = a / d;
        }
    }
    return f;
}

double degeneracy_threshold(std::span<const double> r, std::span<const double> errors, int k,
                            const MomentTolerances& tol)
{
    double thr = tol.degeneracy * std::abs(r[2 * k]);
    if (!errors.empty()) thr += tol.noise_multiplier * errors[2 * k];
    return thr;
}

}  // namespace

PsdReport hankel_psd(std::span<const double> r, int N, const MomentTolerances& tol, std::span<const double> errors)
{
    return hankel_with_offset(r, N, 0, tol, errors);
}

PsdReport stieltjes_shifted_psd(std::span<const double> r, int N, const MomentTolerances& tol,
                                std::span<const double> errors)
{
    return hankel_with_offset(r, N, 1, tol, errors);
}

PsdReport multiindex_psd(const MultiIndexSequence& seq, int N, const MomentTolerances& tol)
{
    const int n = seq.n;
    if (N < 0) throw std::invalid_argument("matrix order must be >= 0");
    if (seq.max_total_degree < 2 * N * n)
        throw std::invalid_argument("insufficient degree: need " + std::to_string(2 * N * n) + ", have " +
                                    std::to_string(seq.max_total_degree));
    std::vector<std::vector<int>> idx;
    std::vector<int> cur(n, 0);
    while (true) {
        idx.push_back(cur);
        int j = n - 1;
        while (j >= 0 && cur[j] == N) cur[j--] = 0;
        if (j < 0) break;
        ++cur[j];
    }
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd h(m, m), e(m, m);
    bool any_error = false;
    std::vector<int> sum(n);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            for (int j = 0; j < n; ++j) sum[j] = idx[a][j] + idx[b][j];
            const Estimate& x = seq.at(sum);
            h(a, b) = x.value;
            e(a, b) = x.std_error;
            any_error = any_error || x.std_error > 0.0;
        }
    return psd_of(h, any_error ? e : Eigen::MatrixXd(), tol);
}

double QuadratureMeasure::total() const
{
    double t = 0.0;
    for (double w : weights) t += w;
    return t;
}

double QuadratureMeasure::moment(int i) const
{
    double t = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) t += weights[j] * std::pow(nodes[j], i);
    return t;
}

QuadratureMeasure quadrature_from_moments(std::span<const double> r, const MomentTolerances& tol,
                                          std::span<const double> errors)
{
    if (r.empty() || !(r[0] > 0.0)) throw std::domain_error("quadrature needs r_0 > 0");
    const int K = static_cast<int>((r.size() - 1) / 2);
    int rank = K;
    bool indefinite = false;
    auto f = hankel_ldl(r, K + 1, 0, [&](int j, const mp& d) {
        if (j == 0) return false;
        const double thr = degeneracy_threshold(r, errors, j, tol);
        if (d <= thr) {
            rank = j;
            indefinite = d < -thr;
            return true;
        }
        return false;
    });
    if (indefinite) throw std::domain_error("Hankel matrix is indefinite at order " + std::to_string(rank));
    if (rank == 0) return {};

    // Jacobi matrix of the orthogonal-polynomial recurrence.
    Eigen::VectorXd diag(rank), off(std::max(rank - 1, 0));
    for (int j = 0; j < rank; ++j) {
        mp a = f.lower[j + 1][j];
        if (j > 0) a -= f.lower[j][j - 1];
        diag(j) = static_cast<double>(a);
        if (j + 1 < rank) off(j) = static_cast<double>(sqrt(f.pivots[j + 1] / f.pivots[j]));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    QuadratureMeasure q;
    for (int j = 0; j < rank; ++j) {
        const double v = es.eigenvectors()(0, j);
        q.nodes.push_back(es.eigenvalues()(j));
        q.weights.push_back(r[0] * v * v);
    }
    return q;
}

Trend classify_by_ratio(std::span<const double> terms, const MomentTolerances& tol)
{
    const int n = static_cast<int>(terms.size());
    if (n < 3) return Trend::Inconclusive;
    // geometric mean of the successive ratios over the last half
    const int steps = std::max(2, n / 2);
    const double last = terms[n - 1], first = terms[n - 1 - steps];
    if (!(first > 0.0)) return last > 0.0 ? Trend::Diverging : Trend::Inconclusive;
    const double q = std::pow(last / first, 1.0 / steps);
    if (q >= tol.diverging_ratio) return Trend::Diverging;
    if (q <= tol.converging_ratio) return Trend::Converging;
    return Trend::Inconclusive;
}

Trend classify_by_exponent(std::span<const double> terms, const MomentTolerances& tol)
{
    const int n = static_cast<int>(terms.size());
    if (n < 3) return Trend::Inconclusive;
    bool diverging = true, converging = true;
    for (int k = n - 2; k < n; ++k) {
        // terms[k] is the (k+1)-th term
        const double prev = terms[k - 1], cur = terms[k];
        double p;
        if (!(cur > 0.0)) {
            p = INFINITY;
        } else if (!(prev > 0.0)) {
            p = -INFINITY;
        } else {
            p = std::log(prev / cur) / std::log((k + 1.0) / k);
        }
        diverging = diverging && p <= tol.diverging_exponent;
        converging = converging && p >= tol.converging_exponent;
    }
    if (diverging) return Trend::Diverging;
    if (converging) return Trend::Converging;
    return Trend::Inconclusive;
}

HankelReport atom_at_zero_series(std::span<const double> r, int K, const MomentTolerances& tol,
                                 std::span<const double> errors)
{
    if (K < 1) throw std::invalid_argument("series order must be >= 1");
    if (static_cast<int>(r.size()) < 2 * K + 1)
        throw std::invalid_argument("insufficient moments: need " + std::to_string(2 * K + 1) + ", have " +
                                    std::to_string(r.size()));
    if (!(r[0] > 0.0)) throw std::invalid_argument("r_0 must be > 0");
    r = r.first(2 * K + 1);
    if (!errors.empty()) errors = errors.first(2 * K + 1);

    HankelReport rep;
    rep.order = K;
    const auto h = hankel_psd(r, K, tol, errors);
    const auto s = stieltjes_shifted_psd(r, K - 1, tol, errors);
    rep.min_eigenvalue = h.min_eigenvalue;
    rep.min_shifted_eigenvalue = s.min_eigenvalue;
    rep.stieltjes_pass = s.pass;

    std::optional<int> rank;
    auto f = hankel_ldl(r, K + 1, 0, [&](int j, const mp& d) {
        if (j > 0 && !rank && d <= degeneracy_threshold(r, errors, j, tol)) rank = j;
        return d == 0;
    });
    auto g = hankel_ldl(r, K, 1, [](int, const mp& d) { return d == 0; });
    rep.degeneracy_rank = rank;

    std::vector<mp> D, E;
    mp acc = 1;
    for (const auto& d : f.pivots) D.push_back(acc *= d);
    acc = 1;
    for (const auto& d : g.pivots) E.push_back(acc *= d);
    D.resize(K + 1, mp(0));
    E.resize(K, mp(0));
    for (const auto& d : D) rep.determinants.push_back(static_cast<double>(d));
    for (const auto& e : E) rep.shifted_determinants.push_back(static_cast<double>(e));

    const int last = rank ? *rank - 1 : K;
    mp sum = 0;
    for (int k = 1; k <= last; ++k) {
        mp t = E[k - 1] * E[k - 1] / (D[k - 1] * D[k]);
        sum += t;
        rep.summands.push_back(static_cast<double>(t));
        rep.partial_sums.push_back(static_cast<double>(sum));
    }
    rep.christoffel_bound = static_cast<double>(1 / (1 / mp(r[0]) + sum));
    rep.trend = classify_by_ratio(rep.summands, tol);

    if (!h.pass || !s.pass) {
        rep.no_atom_at_zero = Check::Fail;
        return rep;
    }
    if (rank) {
        rep.quadrature = quadrature_from_moments(r, tol, errors);
        const auto& q = *rep.quadrature;
        double scale = 1.0;
        for (double t : q.nodes) scale = std::max(scale, std::abs(t));
        for (std::size_t j = 0; j < q.nodes.size(); ++j)
            if (std::abs(q.nodes[j]) <= tol.zero_node * scale) rep.zero_node_weight += q.weights[j];
        rep.no_atom_at_zero = rep.zero_node_weight > tol.zero_weight * r[0] ? Check::Fail : Check::Pass;
        return rep;
    }
    rep.no_atom_at_zero = rep.trend == Trend::Diverging ? Check::Pass : Check::Inconclusive;
    return rep;
}

CarlemanReport carleman_check(std::span<const double> r, int K, const MomentTolerances& tol)
{
    if (K < 1) throw std::invalid_argument("Carleman order must be >= 1");
    if (static_cast<int>(r.size()) < 2 * K + 1)
        throw std::invalid_argument("insufficient moments: need " + std::to_string(2 * K + 1));
    CarlemanReport rep;
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
        if (!(r[2 * k] > 0.0)) throw std::domain_error("nonpositive even moment r_" + std::to_string(2 * k));
        const double t = std::exp(-std::log(r[2 * k]) / (2.0 * k));
        rep.terms.push_back(t);
        rep.partial_sums.push_back(sum += t);
    }
    rep.trend = classify_by_exponent(rep.terms, tol);
    return rep;
}

nlohmann::json to_json(const PsdReport& r)
{
    return {{"size", r.size},           {"min_eigenvalue", r.min_eigenvalue}, {"spectral_norm", r.spectral_norm},
            {"tolerance", r.tolerance}, {"noise_floor", r.noise_floor},       {"pass", r.pass}};
}

nlohmann::json to_json(const QuadratureMeasure& q) { return {{"nodes", q.nodes}, {"weights", q.weights}}; }

nlohmann::json to_json(const HankelReport& r)
{
    nlohmann::json j = {{"order", r.order},
                        {"min_eigenvalue", r.min_eigenvalue},
                        {"min_shifted_eigenvalue", r.min_shifted_eigenvalue},
                        {"determinants", r.determinants},
                        {"shifted_determinants", r.shifted_determinants},
                        {"summands", r.summands},
                        {"partial_sums", r.partial_sums},
                        {"degeneracy_rank", nullptr},
                        {"trend", to_string(r.trend)},
                        {"christoffel_bound", r.christoffel_bound},
                        {"quadrature", nullptr},
                        {"zero_node_weight", r.zero_node_weight},
                        {"stieltjes_pass", r.stieltjes_pass},
                        {"no_atom_at_zero", to_string(r.no_atom_at_zero)}};
    if (r.degeneracy_rank) j["degeneracy_rank"] = *r.degeneracy_rank;
    if (r.quadrature) j["quadrature"] = to_json(*r.quadrature);
    return j;
}

nlohmann::json to_json(const CarlemanReport& r)
{
    return {{"terms", r.terms}, {"partial_sums", r.partial_sums}, {"trend", to_string(r.trend)}};
}

nlohmann::json to_json(const MomentTolerances& t)
{
    return {{"psd", t.psd},
            {"degeneracy", t.degeneracy},
            {"noise_multiplier", t.noise_multiplier},
            {"zero_node", t.zero_node},
            {"zero_weight", t.zero_weight},
            {"diverging_ratio", t.diverging_ratio},
            {"converging_ratio", t.converging_ratio},
            {"diverging_exponent", t.diverging_exponent},
            {"converging_exponent", t.converging_exponent}};
}

}  // namespace momentcone
