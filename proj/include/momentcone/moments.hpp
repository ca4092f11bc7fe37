#pragma once

#include "momentcone/measures.hpp"
#include "momentcone/models.hpp"
#include "momentcone/stats.hpp"

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace momentcone {

// The model has no closed form for the requested moment.
struct Unavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MomentSource {
public:
    static MomentSource analytic(MeasureModel model, int d);
    // Samples drawn on `window`, each carrying weight 1/S.
    static MomentSource empirical(std::vector<DiscreteMeasure> samples, Window window);

    bool is_analytic() const { return model_ != nullptr; }
    int dim() const { return d_; }
    const MeasureModel& model() const;
    const std::vector<DiscreteMeasure>& samples() const;
    const Window& window() const;
    std::size_t sample_count() const { return samples_ ? samples_->size() : 0; }

    int threads() const { return threads_; }
    MomentSource& with_threads(int t);

private:
    MomentSource() = default;
    std::shared_ptr<const MeasureModel> model_;
    std::shared_ptr<const std::vector<DiscreteMeasure>> samples_;
    std::optional<Window> window_;
    int d_ = 0;
    int threads_ = 1;
};

// M_{i_1..i_n}(delta). Empirical: mean of distinct_tuple_sum with jackknife
// standard error.
Estimate moment(const MomentSource& source, std::span<const int> powers, const OffDiagonalBox& delta);
std::vector<Estimate> moments(const MomentSource& source, std::span<const std::vector<int>> powers,
                              const OffDiagonalBox& delta);

// E[eta(window)^n]; analytic sources sum the diagonal restrictions over
// block-size multisets.
Estimate full_moment(const MomentSource& source, int n, const Window& window);

// All multi-indices in Z_+^n of total degree <= max_total_degree, in
// graded lexicographic order.
std::vector<std::vector<int>> multi_indices(int n, int max_total_degree);

struct MultiIndexSequence {
    int n = 0;
    std::optional<OffDiagonalBox> delta;
    int max_total_degree = 0;
    // xi_i = M_{i+1}(delta) / n!
    std::map<std::vector<int>, Estimate> values;
    // xi_i - xi_{0..0}, jackknifed jointly for empirical sources.
    std::map<std::vector<int>, Estimate> deviation_from_base;

    const Estimate& at(const std::vector<int>& i) const;
    bool contains(const std::vector<int>& i) const { return values.count(i) != 0; }
    // r_k = xi_{k e_coord}, k = 0..max_total_degree
    std::vector<double> marginal(int coord = 0) const;
    std::vector<double> marginal_errors(int coord = 0) const;
};

constexpr int default_degree_cap = 10;
constexpr int max_degree_cap = 16;

MultiIndexSequence xi_sequence(const MomentSource& source, const OffDiagonalBox& delta, int max_total_degree);

struct GrowthRow {
    Window window;
    Estimate c;        // max_n (M^(n)(L^n)/n!)^{1/n}
    Estimate c_prime;  // max_n (M^(n)(L^(n)_0)/n!)^{1/n}
};

struct GrowthReport {
    std::vector<GrowthRow> rows;
    int max_order = 0;
    // Indices into rows of the longest chain of nested windows, largest first.
    std::vector<int> shrink_chain;
    bool c_prime_non_increasing = true;
    double c_prime_shrink_ratio = 1.0;
    double c_shrink_ratio = 1.0;
    // C decays markedly slower than C' along the chain (the full moments
    // carry the diagonal, which does not vanish with the window).
    bool c_lags_c_prime = false;
};

GrowthReport growth_constants(const MomentSource& source, const std::vector<Window>& ladder, int max_order,
                              double noise_multiplier = 3.0);

struct MomentRow {
    int n = 0;
    std::vector<int> indices;
    std::string delta_id;
    Estimate estimate;
};

// Columns n,i_1..i_K,delta_id,value,stderr with K the largest order present;
// unused index cells stay empty.
void write_moment_csv(std::ostream& out, const std::vector<MomentRow>& rows);

}  // namespace momentcone
