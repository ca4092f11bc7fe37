#pragma once

#include "momentcone/functionals.hpp"
#include "momentcone/momentproblem.hpp"
#include "momentcone/moments.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace momentcone {

constexpr std::size_t no_sample = std::numeric_limits<std::size_t>::max();

// One unordered n-subset of a lifted configuration, stored in a fixed order.
struct RhoAtom {
    std::vector<WeightedAtom> y;
    double weight = 0.0;
    std::size_t sample = no_sample;
};

// rho^(n) as a measure on ordered n-tuples of Y-points with distinct x:
// integral of f = E sum over n-subsets of Sym f. Atomic estimates come from
// samples; Functional ones evaluate product-box integrals from the model.
class CorrelationEstimate {
public:
    enum class Kind { Atomic, Functional };

    static CorrelationEstimate atomic(int n, std::vector<RhoAtom> atoms, std::size_t sample_count);
    static CorrelationEstimate functional(int n, MeasureModel model);

    int n() const { return n_; }
    Kind kind() const { return kind_; }
    const std::vector<RhoAtom>& atoms() const { return atoms_; }
    std::size_t sample_count() const { return sample_count_; }

    // Integral of f over ordered tuples; Atomic only.
    Estimate integrate(const std::function<double(std::span<const WeightedAtom>)>& f) const;
    // Integral of a symmetric f, skipping the symmetrization.
    Estimate integrate_symmetric(const std::function<double(std::span<const WeightedAtom>)>& f) const;
    // Integral of prod_j 1_{B_j}(y_j) s_j^{k_j}; powers default to zero.
    Estimate box_integral(std::span<const YBox> boxes, std::span<const int> powers = {}) const;

private:
    int n_ = 0;
    Kind kind_ = Kind::Atomic;
    std::vector<RhoAtom> atoms_;
    std::size_t sample_count_ = 0;
    std::shared_ptr<const MeasureModel> model_;
};

// E sum over ordered tuples of distinct atoms of prod_j 1_{B_j}(y_j) s_j^{k_j};
// nullopt for diffuse components.
std::optional<double> analytic_box_moment(const MeasureModel& model, std::span<const YBox> boxes,
                                          std::span<const int> powers);

// (1/n!) E sum over ordered distinct tuples, counted straight from the
// samples.
Estimate direct_correlation(const std::vector<DiscreteMeasure>& samples, std::span<const YBox> boxes,
                            std::span<const int> powers = {}, int threads = 1);

// Ordered tuple of s-values with its xi-weight.
struct XiAtom {
    std::vector<WeightedAtom> y;
    double weight = 0.0;
    std::size_t sample = no_sample;
};

struct XiDeltaEstimate {
    MultiIndexSequence sequence;
    // One quadrature per coordinate, from xi_{k e_j}.
    std::vector<QuadratureMeasure> marginals;
    // Empirical sources: xi^(n)_delta read off the samples as ordered tuples.
    std::optional<std::vector<XiAtom>> joint;
    double consistency = 0.0;  // max |joint moment - xi_i| / max(1, |xi_i|)
    bool consistent = true;
};

XiDeltaEstimate recover_xi_delta(const MomentSource& source, const OffDiagonalBox& delta, int max_degree,
                                 const MomentTolerances& tol = {});

// Empirical: Atomic rho^(n) on (window x R_+)^n built from the joint xi
// estimate with weights divided by s_1...s_n. Analytic: Functional.
CorrelationEstimate recover_rho(const MomentSource& source, int n, const Window& window, int max_degree,
                                const MomentTolerances& tol = {});

enum class Outcome { Discrete, NotDiscrete, PointProcess, Inconclusive };
std::string to_string(Outcome o);

struct VerdictOptions {
    std::vector<Window> ladder;         // empty: [-l, l)^d, l = 1..4
    std::vector<Window> shrink_ladder;  // empty: [-2^-j, 2^-j)^d, j = 0..4
    std::vector<OffDiagonalBox> extra_boxes;
    int n_max = 2;
    int degree_cap = default_degree_cap;
    // Exact sequences run the atom-at-zero series to this degree instead.
    int analytic_series_degree = max_degree_cap;
    int growth_order = 6;
    MomentTolerances tol;
    double flatness_multiplier = 3.0;
    // No underlying random measure is assumed: the full-moment Hankel
    // matrices must be positive semidefinite as well.
    bool no_prior_measure = false;
};

struct PsdCell {
    int n = 0;
    std::string delta_id;
    bool empty = false;
    PsdReport report;
};

struct SeriesCell {
    int n = 0;
    int l = 0;
    bool empty = false;
    HankelReport series;
    std::optional<CarlemanReport> carleman;
    Check outcome = Check::Inconclusive;
};

struct FlatnessCell {
    int n = 0;
    std::string delta_id;
    double statistic = 0.0;  // max_i |xi_i - xi_0|
    double worst_ratio = 0.0;  // max_i |xi_i - xi_0| / tolerance_i
    bool flat = false;
};

struct Verdict {
    Outcome outcome = Outcome::Inconclusive;
    Check growth_check = Check::Inconclusive;
    GrowthReport growth;
    std::vector<PsdCell> condition_i;
    std::vector<SeriesCell> condition_ii;
    std::vector<FlatnessCell> flatness;
    std::vector<PsdCell> full_moment_hankel;
    std::vector<std::string> notes;
    VerdictOptions options;
};

Verdict discreteness_verdict(const MomentSource& source, VerdictOptions options = {});
// PointProcess when every tested xi sequence is flat and the discreteness
// verdict is Discrete; otherwise the discreteness outcome.
Verdict point_process_verdict(const MomentSource& source, VerdictOptions options = {});

nlohmann::json to_json(const Verdict& v);

// rho^(0..max_order) of samples restricted to a Y-region; order 0 is the
// unit mass on the empty configuration.
struct CorrelationFamily {
    std::vector<CorrelationEstimate> orders;
    YBox region;
};

CorrelationFamily lift_correlation_family(const std::vector<DiscreteMeasure>& samples, const YBox& region,
                                          int max_order);

struct PdReport {
    double value = 0.0;
    bool pass = false;
};

// Integral of G*G against the family; G must vanish off the family's region.
PdReport pd_check(const CorrelationFamily& rho, const ConfigFunctional& g, double tol = 1e-8);

// Mean over samples of (KG)^2 on the region.
Estimate mean_squared_k_transform(const std::vector<DiscreteMeasure>& samples, const YBox& region,
                                  const ConfigFunctional& g);

struct LbRow {
    Window window;
    std::vector<Estimate> masses;  // rho^(n)((window x A)^n), n = 1..max_order
    Estimate constant;             // max_n mass^{1/n}
};

struct LbReport {
    std::vector<LbRow> rows;
    double s_lo = 0.0, s_hi = 0.0;
    bool shrinks = true;  // constants non-increasing along the ladder within noise
};

// Ladder ordered largest window first.
LbReport lb_check(const MomentSource& source, const std::vector<Window>& ladder, double s_lo, double s_hi,
                  int max_order = 4, double noise_multiplier = 3.0);

struct WickComparison {
    Estimate lhs;  // E <:omega^n:, phi_1 (x) ... (x) phi_n>
    Estimate rhs;  // integral of prod phi_j(x_j) s_j d rho^(n)
};

WickComparison generalized_correlation(const MomentSource& source, std::span<const TestFunction> phis);

std::vector<Window> default_ladder(int d);
std::vector<Window> default_shrink_ladder(int d);

}  // namespace momentcone
