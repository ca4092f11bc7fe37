#pragma once

#include "momentcone/measures.hpp"
#include "momentcone/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace momentcone {

// Intensity of atom locations per unit volume.
class SpatialIntensity {
public:
    static SpatialIntensity constant(double rate);
    // Inhomogeneous density; sampled by thinning against upper_bound and
    // integrated by tensor Gauss-Legendre (d <= 3).
    static SpatialIntensity function(std::function<double(const Point&)> density, double upper_bound);

    bool is_constant() const { return !density_; }
    double rate() const { return rate_; }
    double bound() const { return is_constant() ? rate_ : bound_; }
    double density(const Point& x) const;
    double integral(const Window& w) const;

private:
    double rate_ = 0.0;
    double bound_ = 0.0;
    std::function<double(const Point&)> density_;
};

// Weight part of a Levy intensity: a density on (0, inf), possibly
// non-integrable at 0, with finite tail mass above every eps > 0.
class WeightDensity {
public:
    // scale * s^{-1} e^{-beta s}
    static WeightDensity gamma_levy(double scale = 1.0, double beta = 1.0);
    // scale * s^{-1-alpha} e^{-beta s}, 0 < alpha < 1
    static WeightDensity tempered_stable(double scale, double alpha, double beta);
    // total * Exp(mean) density; finite activity
    static WeightDensity exponential(double total, double mean);
    // Arbitrary density, integrated numerically.
    static WeightDensity custom(std::function<double(double)> density, bool finite_activity);

    const std::string& family() const { return family_; }
    const std::vector<double>& parameters() const { return params_; }
    bool finite_activity() const { return finite_activity_; }

    double density(double s) const { return density_(s); }
    // int_eps^inf w(s) ds
    double tail(double eps) const;
    // int_a^b s^k w(s) ds, b may be +inf
    double integral(double a, double b, int k) const;
    // int_0^inf s^k w(s) ds for k >= 1
    double moment(int k) const;
    // s >= eps with tail(s) = u * tail(eps), 0 < u < 1.
    double inverse_tail(double eps, double u) const;

private:
    std::string family_;
    std::vector<double> params_;
    bool finite_activity_ = false;
    std::function<double(double)> density_;
    std::function<double(double)> tail_;
    std::function<double(double, double, int)> integral_;
};

struct LevyIntensity {
    SpatialIntensity spatial;
    WeightDensity weights;
};

// Law of the weight of a fixed atom; zero draws remove the atom.
class WeightLaw {
public:
    enum class Kind { deterministic, gamma, uniform, discrete };

    static WeightLaw deterministic(double value);
    static WeightLaw gamma(double shape, double scale);
    static WeightLaw uniform(double low, double high);
    static WeightLaw discrete(std::vector<double> values, std::vector<double> probs);

    Kind kind() const { return kind_; }
    const std::vector<double>& parameters() const { return params_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probs() const { return probs_; }

    // E[a^k]
    double moment(int k) const;
    // E[a^k; lo <= a < hi]
    double partial_moment(int k, double lo, double hi) const;
    double sample(Stream& rng) const;
    bool always_unit() const;

private:
    Kind kind_ = Kind::deterministic;
    std::vector<double> params_;
    std::vector<double> values_;
    std::vector<double> probs_;
};

struct FixedAtom {
    Point x;
    WeightLaw weight;
};

// rate * dx * s^{-1} e^{-s} ds
struct GammaModel {
    double rate = 1.0;
};

struct CrmModel {
    LevyIntensity intensity;
};

// Unit weights.
struct PoissonModel {
    SpatialIntensity intensity;
};

struct DiffuseModel {
    SpatialIntensity density;
};

struct FixedAtomsModel {
    std::vector<FixedAtom> atoms;
};

class MeasureModel;

// Sum of independent components.
struct MixtureModel {
    std::vector<MeasureModel> components;
};

class MeasureModel {
public:
    using Variant = std::variant<GammaModel, CrmModel, PoissonModel, DiffuseModel, FixedAtomsModel, MixtureModel>;

    MeasureModel(Variant v);

    const Variant& variant() const { return v_; }
    std::string name() const;
    // True when no realization carries a diffuse part.
    bool is_atomic() const;
    // True when every atom has weight 1.
    bool unit_weights() const;

private:
    Variant v_;
};

MeasureModel gamma_model(double rate = 1.0);
MeasureModel poisson_model(double rate);
MeasureModel diffuse_model(double rate);
MeasureModel fixed_atoms_model(std::vector<FixedAtom> atoms);
MeasureModel mixture_model(std::vector<MeasureModel> components);
MeasureModel crm_model(LevyIntensity intensity);

// Realization with a diffuse component: the diffuse mass inside the window
// plus whatever atoms were drawn.
struct DiffuseMarker {
    double diffuse_mass = 0.0;
    DiscreteMeasure atomic_part;
};

using SampleResult = std::variant<DiscreteMeasure, DiffuseMarker>;

constexpr double default_trunc_eps = 1e-6;

// Realization restricted to the window, drawn from stream (seed, index).
SampleResult sample(const MeasureModel& model, const Window& window, std::uint64_t seed,
                    std::uint64_t index = 0, double trunc_eps = default_trunc_eps);

// Samples indices 0..count-1; throws if the model has a diffuse part.
std::vector<DiscreteMeasure> sample_many(const MeasureModel& model, const Window& window, std::uint64_t seed,
                                         std::size_t count, double trunc_eps = default_trunc_eps,
                                         int threads = 1);

// Exact M_{i_1..i_n}(delta), or nullopt when no closed form applies (a
// positive exclusion radius with continuous components, non-finite weight
// moments, or inhomogeneous densities in d > 3).
std::optional<double> analytic_moment(const MeasureModel& model, std::span<const int> powers,
                                      const OffDiagonalBox& delta);

// E sum over atoms in window with lo <= s < hi of s^k, i.e. the rho^(1)
// integral of s^k over window x [lo, hi). nullopt for diffuse parts.
std::optional<double> mark_intensity(const MeasureModel& model, const Window& window, double lo, double hi, int k);

}  // namespace momentcone
