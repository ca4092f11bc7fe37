#include "momentcone/models.hpp"

#include "momentcone/stats.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace momentcone {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double gauss_legendre_box(const std::function<double(const Point&)>& f, const Window& w)
{
    const int d = w.dim();
    if (d > 3) throw std::domain_error("inhomogeneous densities are integrated only for d <= 3");
    using GL = boost::math::quadrature::gauss<double, 20>;
    Point x(std::vector<double>(d, 0.0));
    std::function<double(int)> level = [&](int j) -> double {
        if (j == d) return f(x);
        return GL::integrate(
            [&, j](double t) {
                x.coords[j] = t;
                return level(j + 1);
            },
            w.lower()[j], w.upper()[j]);
    };
    return level(0);
}

// Upper incomplete gamma Gamma(a, x) for any a > -1 (a != 0), x >= 0.
double upper_gamma(double a, double x)
{
    if (a > 0.0) return x == 0.0 ? std::tgamma(a) : boost::math::tgamma(a, x);
    if (a == 0.0) return boost::math::expint(1, x);
    // Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a
    if (x == 0.0) return inf;
    return (boost::math::tgamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

double numeric_integral(const std::function<double(double)>& f, double a, double b)
{
    if (a >= b) return 0.0;
    if (std::isinf(b)) {
        boost::math::quadrature::exp_sinh<double> es;
        if (a == 0.0) {
            boost::math::quadrature::tanh_sinh<double> ts;
            return ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, inf);
        }
        return es.integrate(f, a, inf);
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b);
}

}  // namespace

SpatialIntensity SpatialIntensity::constant(double rate)
{
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("spatial rate must be finite and >= 0");
    SpatialIntensity s;
    s.rate_ = rate;
    return s;
}

SpatialIntensity SpatialIntensity::function(std::function<double(const Point&)> density, double upper_bound)
{
    if (!density) throw std::invalid_argument("spatial density function is empty");
    if (!(upper_bound > 0.0) || !std::isfinite(upper_bound))
        throw std::invalid_argument("spatial density bound must be finite and > 0");
    SpatialIntensity s;
    s.bound_ = upper_bound;
    s.density_ = std::move(density);
    return s;
}

double SpatialIntensity::density(const Point& x) const
{
    if (is_constant()) return rate_;
    double v = density_(x);
    if (!(v >= 0.0) || v > bound_) throw std::domain_error("spatial density outside [0, bound]");
    return v;
}

double SpatialIntensity::integral(const Window& w) const
{
    if (is_constant()) return rate_ * w.volume();
    return gauss_legendre_box([this](const Point& x) { return density(x); }, w);
}

WeightDensity WeightDensity::gamma_levy(double scale, double beta)
{
    if (!(scale > 0.0) || !(beta > 0.0)) throw std::invalid_argument("gamma Levy density needs scale, beta > 0");
    WeightDensity w;
    w.family_ = "gamma";
    w.params_ = {scale, beta};
    w.density_ = [scale, beta](double s) { return s > 0.0 ? scale * std::exp(-beta * s) / s : 0.0; };
    w.tail_ = [scale, beta](double eps) { return scale * boost::math::expint(1, beta * eps); };
    w.integral_ = [scale, beta](double a, double b, int k) {
        double hi = std::isinf(b) ? 0.0 : upper_gamma(k, beta * b);
        return scale * std::pow(beta, -k) * (upper_gamma(k, beta * a) - hi);
    };
    return w;
}

WeightDensity WeightDensity::tempered_stable(double scale, double alpha, double beta)
{
    if (!(scale > 0.0) || !(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0))
        throw std::invalid_argument("tempered stable density needs scale > 0, 0 < alpha < 1, beta > 0");
    WeightDensity w;
    w.family_ = "tempered_stable";
    w.params_ = {scale, alpha, beta};
    w.density_ = [=](double s) { return s > 0.0 ? scale * std::pow(s, -1.0 - alpha) * std::exp(-beta * s) : 0.0; };
    w.tail_ = [=](double eps) { return scale * std::pow(beta, alpha) * upper_gamma(-alpha, beta * eps); };
    w.integral_ = [=](double a, double b, int k) {
        double hi = std::isinf(b) ? 0.0 : upper_gamma(k - alpha, beta * b);
        return scale * std::pow(beta, alpha - k) * (upper_gamma(k - alpha, beta * a) - hi);
    };
    return w;
}

WeightDensity WeightDensity::exponential(double total, double mean)
{
    if (!(total > 0.0) || !(mean > 0.0)) throw std::invalid_argument("exponential weights need total, mean > 0");
    WeightDensity w;
    w.family_ = "exponential";
    w.params_ = {total, mean};
    w.finite_activity_ = true;
    w.density_ = [=](double s) { return s >= 0.0 ? total / mean * std::exp(-s / mean) : 0.0; };
    w.tail_ = [=](double eps) { return total * std::exp(-std::max(eps, 0.0) / mean); };
    w.integral_ = [=](double a, double b, int k) {
        double hi = std::isinf(b) ? 0.0 : upper_gamma(k + 1, b / mean);
        return total * std::pow(mean, k) * (upper_gamma(k + 1, a / mean) - hi);
    };
    return w;
}

WeightDensity WeightDensity::custom(std::function<double(double)> density, bool finite_activity)
{
    if (!density) throw std::invalid_argument("weight density function is empty");
    WeightDensity w;
    w.family_ = "custom";
    w.finite_activity_ = finite_activity;
    w.density_ = density;
    w.tail_ = [density](double eps) { return numeric_integral(density, eps, inf); };
    w.integral_ = [density](double a, double b, int k) {
        return numeric_integral([&](double s) { return std::pow(s, k) * density(s); }, a, b);
    };
    return w;
}

double WeightDensity::tail(double eps) const
{
    if (eps < 0.0) throw std::invalid_argument("tail threshold must be >= 0");
    return tail_(eps);
}

double WeightDensity::integral(double a, double b, int k) const
{
    if (k < 0 || a < 0.0) throw std::invalid_argument("weight integral needs k >= 0, a >= 0");
    if (!(a < b)) return 0.0;
    return integral_(a, b, k);
}

double WeightDensity::moment(int k) const
{
    if (k < 1) throw std::invalid_argument("weight moments are defined for k >= 1");
    return integral_(0.0, inf, k);
}

double WeightDensity::inverse_tail(double eps, double u) const
{
    const double total = tail(eps);
    const double target = u * total;
    // f(s) = tail(s) - target is decreasing with f' = -w(s).
    double lo = eps, hi = std::max(1.0, 2.0 * eps);
    while (tail(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::domain_error("weight tail does not decay");
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = tail(s) - target;
        if (f > 0.0) lo = s;
        else hi = s;
        double w = density_(s);
        double next = (w > 0.0) ? s + f / w : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        double step = std::abs(next - s);
        s = next;
        if (step <= 1e-12 || hi - lo <= 1e-12) break;
    }
    return s;
}

WeightLaw WeightLaw::deterministic(double value)
{
    if (!(value >= 0.0) || !std::isfinite(value)) throw std::invalid_argument("deterministic weight must be finite and >= 0");
    WeightLaw w;
    w.kind_ = Kind::deterministic;
    w.params_ = {value};
    return w;
}

WeightLaw WeightLaw::gamma(double shape, double scale)
{
    if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("gamma weight law needs shape, scale > 0");
    WeightLaw w;
    w.kind_ = Kind::gamma;
    w.params_ = {shape, scale};
    return w;
}

WeightLaw WeightLaw::uniform(double low, double high)
{
    if (!(low >= 0.0) || !(low < high) || !std::isfinite(high))
        throw std::invalid_argument("uniform weight law needs 0 <= low < high");
    WeightLaw w;
    w.kind_ = Kind::uniform;
    w.params_ = {low, high};
    return w;
}

WeightLaw WeightLaw::discrete(std::vector<double> values, std::vector<double> probs)
{
    if (values.empty() || values.size() != probs.size())
        throw std::invalid_argument("discrete weight law needs matching nonempty values and probs");
    double total = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(values[k] >= 0.0) || !std::isfinite(values[k])) throw std::invalid_argument("discrete weights must be >= 0");
        if (!(probs[k] >= 0.0)) throw std::invalid_argument("probabilities must be >= 0");
        total += probs[k];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("probabilities must sum to 1");
    WeightLaw w;
    w.kind_ = Kind::discrete;
    w.values_ = std::move(values);
    w.probs_ = std::move(probs);
    return w;
}

double WeightLaw::moment(int k) const
{
    return partial_moment(k, 0.0, inf);
}

double WeightLaw::partial_moment(int k, double lo, double hi) const
{
    if (k < 0) throw std::invalid_argument("weight moment order must be >= 0");
    auto in = [&](double a) { return a > 0.0 && a >= lo && a < hi; };
    switch (kind_) {
    case Kind::deterministic:
        return in(params_[0]) ? std::pow(params_[0], k) : 0.0;
    case Kind::discrete: {
        double m = 0.0;
        for (std::size_t j = 0; j < values_.size(); ++j)
            if (in(values_[j])) m += probs_[j] * std::pow(values_[j], k);
        return m;
    }
    case Kind::uniform: {
        double a = std::max(lo, params_[0]), b = std::min(hi, params_[1]);
        if (!(a < b)) return 0.0;
        return (std::pow(b, k + 1) - std::pow(a, k + 1)) / ((k + 1) * (params_[1] - params_[0]));
    }
    case Kind::gamma: {
        const double shape = params_[0], scale = params_[1];
        double a = std::max(lo, 0.0) / scale;
        double p_hi = std::isinf(hi) ? 1.0 : boost::math::gamma_p(shape + k, hi / scale);
        double p_lo = boost::math::gamma_p(shape + k, a);
        return std::pow(scale, k) * std::exp(std::lgamma(shape + k) - std::lgamma(shape)) * (p_hi - p_lo);
    }
    }
    return 0.0;
}

double WeightLaw::sample(Stream& rng) const
{
    switch (kind_) {
    case Kind::deterministic:
        return params_[0];
    case Kind::gamma:
        return params_[1] * rng.gamma(params_[0]);
    case Kind::uniform:
        return params_[0] + (params_[1] - params_[0]) * rng.uniform();
    case Kind::discrete: {
        double u = rng.uniform(), cdf = 0.0;
        for (std::size_t j = 0; j < values_.size(); ++j) {
            cdf += probs_[j];
            if (u < cdf) return values_[j];
        }
        return values_.back();
    }
    }
    return 0.0;
}

bool WeightLaw::always_unit() const
{
    if (kind_ == Kind::deterministic) return params_[0] == 1.0;
    if (kind_ == Kind::discrete) {
        for (std::size_t j = 0; j < values_.size(); ++j)
            if (probs_[j] > 0.0 && values_[j] != 0.0 && values_[j] != 1.0) return false;
        return true;
    }
    return false;
}

namespace {

void collect_fixed(const MeasureModel& m, std::vector<const FixedAtom*>& out)
{
    if (auto* f = std::get_if<FixedAtomsModel>(&m.variant())) {
        for (const auto& a : f->atoms) out.push_back(&a);
    } else if (auto* mix = std::get_if<MixtureModel>(&m.variant())) {
        for (const auto& c : mix->components) collect_fixed(c, out);
    }
}

void validate(const MeasureModel::Variant& v)
{
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GammaModel>) {
                if (!(m.rate > 0.0) || !std::isfinite(m.rate)) throw std::invalid_argument("gamma rate must be > 0");
            } else if constexpr (std::is_same_v<T, PoissonModel>) {
                if (m.intensity.is_constant() && !(m.intensity.rate() > 0.0))
                    throw std::invalid_argument("Poisson rate must be > 0");
            } else if constexpr (std::is_same_v<T, DiffuseModel>) {
                if (m.density.is_constant() && !(m.density.rate() > 0.0))
                    throw std::invalid_argument("diffuse density rate must be > 0");
            } else if constexpr (std::is_same_v<T, CrmModel>) {
                if (m.intensity.spatial.is_constant() && !(m.intensity.spatial.rate() > 0.0))
                    throw std::invalid_argument("CRM spatial rate must be > 0");
            } else if constexpr (std::is_same_v<T, FixedAtomsModel>) {
                std::vector<Point> xs;
                for (const auto& a : m.atoms) {
                    if (!xs.empty() && a.x.dim() != xs.front().dim())
                        throw std::invalid_argument("fixed atoms must share a dimension");
                    xs.push_back(a.x);
                }
                std::sort(xs.begin(), xs.end());
                if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
                    throw std::invalid_argument("fixed atom locations must be distinct");
            }
        },
        v);
}

}  // namespace

MeasureModel::MeasureModel(Variant v) : v_(std::move(v))
{
    validate(v_);
    if (std::holds_alternative<MixtureModel>(v_)) {
        std::vector<const FixedAtom*> fixed;
        collect_fixed(*this, fixed);
        std::vector<Point> xs;
        for (auto* a : fixed) xs.push_back(a->x);
        std::sort(xs.begin(), xs.end());
        if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
            throw std::invalid_argument("fixed atom locations must be distinct across mixture components");
    }
}

std::string MeasureModel::name() const
{
    static const char* names[] = {"gamma", "crm", "poisson", "diffuse", "fixed_atoms", "mixture"};
    return names[v_.index()];
}

bool MeasureModel::is_atomic() const
{
    if (std::holds_alternative<DiffuseModel>(v_)) return false;
    if (auto* mix = std::get_if<MixtureModel>(&v_))
        return std::all_of(mix->components.begin(), mix->components.end(),
                           [](const MeasureModel& c) { return c.is_atomic(); });
    return true;
}

bool MeasureModel::unit_weights() const
{
    if (std::holds_alternative<PoissonModel>(v_)) return true;
    if (auto* f = std::get_if<FixedAtomsModel>(&v_))
        return std::all_of(f->atoms.begin(), f->atoms.end(), [](const FixedAtom& a) { return a.weight.always_unit(); });
    if (auto* mix = std::get_if<MixtureModel>(&v_))
        return std::all_of(mix->components.begin(), mix->components.end(),
                           [](const MeasureModel& c) { return c.unit_weights(); });
    return false;
}

MeasureModel gamma_model(double rate) { return MeasureModel(GammaModel{rate}); }
MeasureModel poisson_model(double rate) { return MeasureModel(PoissonModel{SpatialIntensity::constant(rate)}); }
MeasureModel diffuse_model(double rate) { return MeasureModel(DiffuseModel{SpatialIntensity::constant(rate)}); }
MeasureModel fixed_atoms_model(std::vector<FixedAtom> atoms) { return MeasureModel(FixedAtomsModel{std::move(atoms)}); }
MeasureModel mixture_model(std::vector<MeasureModel> components) { return MeasureModel(MixtureModel{std::move(components)}); }
MeasureModel crm_model(LevyIntensity intensity) { return MeasureModel(CrmModel{std::move(intensity)}); }

namespace {

LevyIntensity as_levy(const GammaModel& g)
{
    return {SpatialIntensity::constant(g.rate), WeightDensity::gamma_levy(1.0, 1.0)};
}

Point uniform_point(const Window& w, Stream& rng)
{
    std::vector<double> c(w.dim());
    for (int j = 0; j < w.dim(); ++j) {
        c[j] = w.lower()[j] + (w.upper()[j] - w.lower()[j]) * rng.uniform();
        if (c[j] >= w.upper()[j]) c[j] = std::nextafter(w.upper()[j], w.lower()[j]);
    }
    return Point(std::move(c));
}

// Poisson points in the window; each accepted location gets mark().
template <class Mark>
void sample_poisson(const SpatialIntensity& sp, double mark_mass, const Window& w, Stream& rng, Mark mark,
                    std::vector<WeightedAtom>& out)
{
    const std::uint64_t count = rng.poisson(sp.bound() * w.volume() * mark_mass);
    for (std::uint64_t k = 0; k < count; ++k) {
        Point x = uniform_point(w, rng);
        if (!sp.is_constant() && rng.uniform() * sp.bound() >= sp.density(x)) continue;
        out.push_back({std::move(x), mark(rng)});
    }
}

void sample_levy(const LevyIntensity& L, const Window& w, Stream& rng, double trunc_eps,
                 std::vector<WeightedAtom>& out)
{
    double eps = 0.0;
    if (!L.weights.finite_activity()) {
        if (!(trunc_eps > 0.0)) throw std::invalid_argument("trunc_eps must be > 0 for infinite-activity intensities");
        eps = trunc_eps;
    }
    const double mass = L.weights.tail(eps);
    if (!std::isfinite(mass)) throw std::domain_error("weight density has a non-integrable tail");
    sample_poisson(L.spatial, mass, w, rng, [&](Stream& r) { return L.weights.inverse_tail(eps, r.uniform()); }, out);
}

void sample_into(const MeasureModel& model, const Window& w, Stream& rng, double trunc_eps,
                 std::vector<WeightedAtom>& atoms, double& diffuse, bool& has_diffuse)
{
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GammaModel>) {
                sample_levy(as_levy(m), w, rng, trunc_eps, atoms);
            } else if constexpr (std::is_same_v<T, CrmModel>) {
                sample_levy(m.intensity, w, rng, trunc_eps, atoms);
            } else if constexpr (std::is_same_v<T, PoissonModel>) {
                sample_poisson(m.intensity, 1.0, w, rng, [](Stream&) { return 1.0; }, atoms);
            } else if constexpr (std::is_same_v<T, DiffuseModel>) {
                diffuse += m.density.integral(w);
                has_diffuse = true;
            } else if constexpr (std::is_same_v<T, FixedAtomsModel>) {
                for (const auto& a : m.atoms) {
                    double s = a.weight.sample(rng);
                    if (s > 0.0 && w.contains(a.x)) atoms.push_back({a.x, s});
                }
            } else {
                for (const auto& c : m.components) sample_into(c, w, rng, trunc_eps, atoms, diffuse, has_diffuse);
            }
        },
        model.variant());
}

}  // namespace

SampleResult sample(const MeasureModel& model, const Window& window, std::uint64_t seed, std::uint64_t index,
                    double trunc_eps)
{
    Stream rng(seed, index);
    std::vector<WeightedAtom> atoms;
    double diffuse = 0.0;
    bool has_diffuse = false;
    sample_into(model, window, rng, trunc_eps, atoms, diffuse, has_diffuse);
    auto eta = DiscreteMeasure::from_sampler(std::move(atoms));
    if (has_diffuse) return DiffuseMarker{diffuse, std::move(eta)};
    return eta;
}

std::vector<DiscreteMeasure> sample_many(const MeasureModel& model, const Window& window, std::uint64_t seed,
                                         std::size_t count, double trunc_eps, int threads)
{
    if (!model.is_atomic()) throw std::invalid_argument("model has a diffuse part; it cannot be sampled as atoms");
    std::vector<DiscreteMeasure> out(count);
    parallel_for(count, threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            out[i] = std::get<DiscreteMeasure>(sample(model, window, seed, i, trunc_eps));
    });
    return out;
}

namespace {

// Per-position intensity of the Poisson-type and diffuse parts: the
// factorial moment measures of these parts are products of
// spatial integral * weight moment, and their superposition adds.
struct Flattened {
    std::vector<std::function<double(const Window&, int)>> continuous;
    std::vector<const FixedAtom*> fixed;
};

void flatten(const MeasureModel& model, Flattened& out)
{
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GammaModel>) {
                const double rate = m.rate;
                out.continuous.push_back([rate](const Window& b, int k) { return rate * b.volume() * std::tgamma(k); });
            } else if constexpr (std::is_same_v<T, CrmModel>) {
                const LevyIntensity* L = &m.intensity;
                out.continuous.push_back(
                    [L](const Window& b, int k) { return L->spatial.integral(b) * L->weights.moment(k); });
            } else if constexpr (std::is_same_v<T, PoissonModel>) {
                const SpatialIntensity* sp = &m.intensity;
                out.continuous.push_back([sp](const Window& b, int) { return sp->integral(b); });
            } else if constexpr (std::is_same_v<T, DiffuseModel>) {
                const SpatialIntensity* sp = &m.density;
                out.continuous.push_back([sp](const Window& b, int k) { return k == 1 ? sp->integral(b) : 0.0; });
            } else if constexpr (std::is_same_v<T, FixedAtomsModel>) {
                for (const auto& a : m.atoms) out.fixed.push_back(&a);
            } else {
                for (const auto& c : m.components) flatten(c, out);
            }
        },
        model.variant());
}

}  // namespace

std::optional<double> analytic_moment(const MeasureModel& model, std::span<const int> powers,
                                      const OffDiagonalBox& delta)
{
    const int n = delta.n();
    if (static_cast<int>(powers.size()) != n) throw std::invalid_argument("power vector length differs from box order");
    for (int i : powers)
        if (i < 1) throw std::invalid_argument("powers must be >= 1");

    Flattened flat;
    flatten(model, flat);
    if (delta.exclusion_radius() > 0.0 && n >= 2 && !flat.continuous.empty()) return std::nullopt;

    std::vector<double> q(n, 0.0);
    try {
        for (int j = 0; j < n; ++j)
            for (const auto& c : flat.continuous) q[j] += c(delta.box(j), powers[j]);
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
    for (double v : q)
        if (!std::isfinite(v)) return std::nullopt;

    std::vector<std::vector<double>> fixed_moment(flat.fixed.size(), std::vector<double>(n));
    for (std::size_t a = 0; a < flat.fixed.size(); ++a)
        for (int j = 0; j < n; ++j)
            fixed_moment[a][j] = delta.box(j).contains(flat.fixed[a]->x) ? flat.fixed[a]->weight.moment(powers[j]) : 0.0;

    // Each position is taken either by the continuous part or by a fixed
    // atom not used elsewhere; independence makes every term a product.
    std::vector<int> chosen;
    std::vector<bool> used(flat.fixed.size(), false);
    auto rec = [&](auto&& self, int j) -> double {
        if (j == n) return 1.0;
        double sum = 0.0;
        if (q[j] != 0.0) sum += q[j] * self(self, j + 1);
        for (std::size_t a = 0; a < flat.fixed.size(); ++a) {
            if (used[a] || fixed_moment[a][j] == 0.0) continue;
            bool ok = true;
            if (delta.exclusion_radius() > 0.0)
                for (int b : chosen)
                    if (!(distance(flat.fixed[a]->x, flat.fixed[b]->x) > delta.exclusion_radius())) ok = false;
            if (!ok) continue;
            used[a] = true;
            chosen.push_back(static_cast<int>(a));
            sum += fixed_moment[a][j] * self(self, j + 1);
            chosen.pop_back();
            used[a] = false;
        }
        return sum;
    };
    return rec(rec, 0);
}

std::optional<double> mark_intensity(const MeasureModel& model, const Window& window, double lo, double hi, int k)
{
    return std::visit(
        [&](const auto& m) -> std::optional<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, GammaModel>) {
                return m.rate * window.volume() * WeightDensity::gamma_levy().integral(std::max(lo, 0.0), hi, k);
            } else if constexpr (std::is_same_v<T, CrmModel>) {
                return m.intensity.spatial.integral(window) * m.intensity.weights.integral(std::max(lo, 0.0), hi, k);
            } else if constexpr (std::is_same_v<T, PoissonModel>) {
                return (lo <= 1.0 && 1.0 < hi) ? m.intensity.integral(window) : 0.0;
            } else if constexpr (std::is_same_v<T, DiffuseModel>) {
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, FixedAtomsModel>) {
                double sum = 0.0;
                for (const auto& a : m.atoms)
                    if (window.contains(a.x)) sum += a.weight.partial_moment(k, lo, hi);
                return sum;
            } else {
                double sum = 0.0;
                for (const auto& c : m.components) {
                    auto v = mark_intensity(c, window, lo, hi, k);
                    if (!v) return std::nullopt;
                    sum += *v;
                }
                return sum;
            }
        },
        model.variant());
}

}  // namespace momentcone
