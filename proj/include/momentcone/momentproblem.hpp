#pragma once

#include "momentcone/moments.hpp"

#include <json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace momentcone {

struct MomentTolerances {
    // min eigenvalue >= -psd * (1 + spectral norm)
    double psd = 1e-8;
    // pivot D_k / D_{k-1} <= degeneracy * r_{2k} marks finite rank k
    double degeneracy = 1e-10;
    // empirical sequences: multiple of the jackknife standard error added to
    // every tolerance
    double noise_multiplier = 3.0;
    double zero_node = 1e-6;
    double zero_weight = 1e-8;
    // atom-at-zero series: geometric mean ratio of successive summands
    double diverging_ratio = 0.95;
    double converging_ratio = 0.85;
    // Carleman series: local exponent p in t_k ~ k^{-p}
    double diverging_exponent = 1.1;
    double converging_exponent = 1.5;
};

enum class Check { Pass, Fail, Inconclusive };
enum class Trend { Diverging, Converging, Inconclusive };

std::string to_string(Check c);
std::string to_string(Trend t);

struct PsdReport {
    int size = 0;
    double min_eigenvalue = 0.0;
    double spectral_norm = 0.0;
    double tolerance = 0.0;
    double noise_floor = 0.0;
    bool pass = false;
};

// [r_{i+j}], 0 <= i, j <= N. `errors`, when given, holds one standard error
// per entry of r.
PsdReport hankel_psd(std::span<const double> r, int N, const MomentTolerances& tol = {},
                     std::span<const double> errors = {});
// [r_{i+j+1}], 0 <= i, j <= N; needs 2N+2 entries.
PsdReport stieltjes_shifted_psd(std::span<const double> r, int N, const MomentTolerances& tol = {},
                                std::span<const double> errors = {});
// [xi_{i+j}] over multi-indices with every coordinate <= N; needs total
// degree 2Nn.
PsdReport multiindex_psd(const MultiIndexSequence& seq, int N, const MomentTolerances& tol = {});

struct QuadratureMeasure {
    std::vector<double> nodes;
    std::vector<double> weights;

    double total() const;
    double moment(int i) const;
};

// At most K = (r.size()-1)/2 nodes matching r_0..r_{2K-1}; fewer when the
// Hankel matrix has lower numerical rank. Throws std::domain_error on an
// indefinite Hankel matrix.
QuadratureMeasure quadrature_from_moments(std::span<const double> r, const MomentTolerances& tol = {},
                                          std::span<const double> errors = {});

struct HankelReport {
    int order = 0;
    double min_eigenvalue = 0.0;
    double min_shifted_eigenvalue = 0.0;
    std::vector<double> determinants;          // D_0..D_K
    std::vector<double> shifted_determinants;  // det[r_{i+j+1}]_{k x k}, k = 1..K
    std::vector<double> summands;              // k = 1..min(K, rank-1)
    std::vector<double> partial_sums;
    std::optional<int> degeneracy_rank;
    Trend trend = Trend::Inconclusive;
    // 1/(1/r_0 + S_K), an upper bound on the mass at 0
    double christoffel_bound = 0.0;
    std::optional<QuadratureMeasure> quadrature;
    double zero_node_weight = 0.0;
    bool stieltjes_pass = false;
    // Pass: no atom at 0; Fail: atom at 0 or support off [0, inf)
    Check no_atom_at_zero = Check::Inconclusive;
};

HankelReport atom_at_zero_series(std::span<const double> r, int K, const MomentTolerances& tol = {},
                                 std::span<const double> errors = {});

struct CarlemanReport {
    std::vector<double> terms;  // r_{2k}^{-1/(2k)}, k = 1..K
    std::vector<double> partial_sums;
    Trend trend = Trend::Inconclusive;
};

CarlemanReport carleman_check(std::span<const double> r, int K, const MomentTolerances& tol = {});

// Divergence trend of a positive series from the mean term ratio over its
// last half.
Trend classify_by_ratio(std::span<const double> terms, const MomentTolerances& tol);
// Same from the local power-law exponents of the last two terms, for series
// compared against the harmonic one.
Trend classify_by_exponent(std::span<const double> terms, const MomentTolerances& tol);

nlohmann::json to_json(const PsdReport& r);
nlohmann::json to_json(const QuadratureMeasure& q);
nlohmann::json to_json(const HankelReport& r);
nlohmann::json to_json(const CarlemanReport& r);
nlohmann::json to_json(const MomentTolerances& t);

}  // namespace momentcone
