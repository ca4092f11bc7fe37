#include "momentcone/correlation.hpp"

#include "momentcone/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace momentcone {

namespace {

double factorial_d(int n) { return std::tgamma(n + 1.0); }

double ipow(double s, int k)
{
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= s;
    return r;
}

double sym(const std::function<double(std::span<const WeightedAtom>)>& f, std::span<const WeightedAtom> y)
{
    if (y.size() <= 1) return f(y);
    std::vector<int> perm(y.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<WeightedAtom> buf(y.size());
    double sum = 0.0;
    long count = 0;
    do {
        for (std::size_t j = 0; j < perm.size(); ++j) buf[j] = y[perm[j]];
        sum += f(buf);
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sum / static_cast<double>(count);
}

std::function<double(std::span<const WeightedAtom>)> box_function(std::span<const YBox> boxes,
                                                                  std::span<const int> powers)
{
    std::vector<YBox> b(boxes.begin(), boxes.end());
    std::vector<int> k(boxes.size(), 0);
    if (!powers.empty()) {
        if (powers.size() != boxes.size()) throw std::invalid_argument("one power per box expected");
        std::copy(powers.begin(), powers.end(), k.begin());
    }
    return [b, k](std::span<const WeightedAtom> y) {
        double v = 1.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!b[j].contains(y[j])) return 0.0;
            v *= ipow(y[j].s, k[j]);
        }
        return v;
    };
}

// Calls visit(tuple) for every ordered tuple of distinct atoms with atom j
// accepted by accept(j, atom).
template <class Accept, class Visit>
void ordered_tuples(const std::vector<WeightedAtom>& atoms, int n, Accept accept, Visit visit)
{
    std::vector<int> used(atoms.size(), 0);
    std::vector<WeightedAtom> cur(n);
    auto rec = [&](auto&& self, int j) -> void {
        if (j == n) {
            visit(std::span<const WeightedAtom>(cur));
            return;
        }
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            if (used[a] || !accept(j, atoms[a])) continue;
            used[a] = 1;
            cur[j] = atoms[a];
            self(self, j + 1);
            used[a] = 0;
        }
    };
    rec(rec, 0);
}

template <class Visit>
void subsets(const std::vector<WeightedAtom>& atoms, int n, Visit visit)
{
    std::vector<WeightedAtom> cur(n);
    auto rec = [&](auto&& self, int j, std::size_t start) -> void {
        if (j == n) {
            visit(std::span<const WeightedAtom>(cur));
            return;
        }
        for (std::size_t a = start; a + (n - j) <= atoms.size(); ++a) {
            cur[j] = atoms[a];
            self(self, j + 1, a + 1);
        }
    };
    rec(rec, 0, 0);
}

void collect_parts(const MeasureModel& m, std::vector<const MeasureModel*>& continuous, std::vector<FixedAtom>& fixed,
                   bool& diffuse)
{
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiffuseModel>) {
                diffuse = true;
            } else if constexpr (std::is_same_v<T, FixedAtomsModel>) {
                fixed.insert(fixed.end(), v.atoms.begin(), v.atoms.end());
            } else if constexpr (std::is_same_v<T, MixtureModel>) {
                for (const auto& c : v.components) collect_parts(c, continuous, fixed, diffuse);
            } else {
                continuous.push_back(&m);
            }
        },
        m.variant());
}

std::vector<Window> inside(const std::vector<Window>& ladder, const MomentSource& source)
{
    if (source.is_analytic()) return ladder;
    std::vector<Window> out;
    for (const auto& w : ladder)
        if (source.window().contains(w)) out.push_back(w);
    if (out.empty()) out.push_back(source.window());
    return out;
}

}  // namespace

CorrelationEstimate CorrelationEstimate::atomic(int n, std::vector<RhoAtom> atoms, std::size_t sample_count)
{
    for (const auto& a : atoms) {
        if (static_cast<int>(a.y.size()) != n) throw std::invalid_argument("rho atom of the wrong order");
        if (!(a.weight > 0.0)) throw std::invalid_argument("rho atom weights must be > 0");
        if (sample_count && a.sample >= sample_count) throw std::invalid_argument("rho atom sample index out of range");
    }
    CorrelationEstimate e;
    e.n_ = n;
    e.kind_ = Kind::Atomic;
    e.atoms_ = std::move(atoms);
    e.sample_count_ = sample_count;
    return e;
}

CorrelationEstimate CorrelationEstimate::functional(int n, MeasureModel model)
{
    CorrelationEstimate e;
    e.n_ = n;
    e.kind_ = Kind::Functional;
    e.model_ = std::make_shared<const MeasureModel>(std::move(model));
    return e;
}

Estimate CorrelationEstimate::integrate_symmetric(const std::function<double(std::span<const WeightedAtom>)>& f) const
{
    if (kind_ != Kind::Atomic) throw std::logic_error("integration of arbitrary functions needs an atomic estimate");
    if (sample_count_ == 0) {
        double sum = 0.0;
        for (const auto& a : atoms_) sum += a.weight * f(a.y);
        return {sum, 0.0};
    }
    std::vector<double> per(sample_count_, 0.0);
    const double S = static_cast<double>(sample_count_);
    for (const auto& a : atoms_) per[a.sample] += a.weight * S * f(a.y);
    return jackknife_mean(per);
}

Estimate CorrelationEstimate::integrate(const std::function<double(std::span<const WeightedAtom>)>& f) const
{
    return integrate_symmetric([&f](std::span<const WeightedAtom> y) { return sym(f, y); });
}

Estimate CorrelationEstimate::box_integral(std::span<const YBox> boxes, std::span<const int> powers) const
{
    if (static_cast<int>(boxes.size()) != n_) throw std::invalid_argument("one box per coordinate expected");
    if (kind_ == Kind::Functional) {
        std::vector<int> k(boxes.size(), 0);
        if (!powers.empty()) std::copy(powers.begin(), powers.end(), k.begin());
        auto v = analytic_box_moment(*model_, boxes, k);
        if (!v) throw Unavailable("no closed form for this correlation integral of model \"" + model_->name() + "\"");
        return {*v / factorial_d(n_), 0.0};
    }
    return integrate(box_function(boxes, powers));
}

std::optional<double> analytic_box_moment(const MeasureModel& model, std::span<const YBox> boxes,
                                          std::span<const int> powers)
{
    const int n = static_cast<int>(boxes.size());
    if (static_cast<int>(powers.size()) != n) throw std::invalid_argument("one power per box expected");
    std::vector<const MeasureModel*> continuous;
    std::vector<FixedAtom> fixed;
    bool diffuse = false;
    collect_parts(model, continuous, fixed, diffuse);
    if (diffuse) return std::nullopt;

    std::vector<double> q(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (const auto* c : continuous) {
            auto v = mark_intensity(*c, boxes[j].x, boxes[j].s_lo, boxes[j].s_hi, powers[j]);
            if (!v) return std::nullopt;
            q[j] += *v;
        }

    // Each position takes the Poisson part or a distinct fixed atom; the
    // parts are independent, and Mecke's formula factorizes the Poisson part.
    std::vector<int> used(fixed.size(), 0);
    auto rec = [&](auto&& self, int j) -> double {
        if (j == n) return 1.0;
        double total = 0.0;
        if (q[j] != 0.0) total += q[j] * self(self, j + 1);
        for (std::size_t a = 0; a < fixed.size(); ++a) {
            if (used[a] || !boxes[j].x.contains(fixed[a].x)) continue;
            const double m = fixed[a].weight.partial_moment(powers[j], boxes[j].s_lo, boxes[j].s_hi);
            if (m == 0.0) continue;
            used[a] = 1;
            total += m * self(self, j + 1);
            used[a] = 0;
        }
        return total;
    };
    return rec(rec, 0);
}

Estimate direct_correlation(const std::vector<DiscreteMeasure>& samples, std::span<const YBox> boxes,
                            std::span<const int> powers, int threads)
{
    if (samples.empty()) throw std::invalid_argument("no samples");
    const int n = static_cast<int>(boxes.size());
    auto f = box_function(boxes, powers);
    std::vector<YBox> b(boxes.begin(), boxes.end());
    const double nfact = factorial_d(n);
    std::vector<double> per(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) {
            double sum = 0.0;
            ordered_tuples(
                samples[s].atoms(), n, [&](int j, const WeightedAtom& a) { return b[j].contains(a); },
                [&](std::span<const WeightedAtom> y) { sum += f(y); });
            per[s] = sum / nfact;
        }
    });
    return jackknife_mean(per);
}

XiDeltaEstimate recover_xi_delta(const MomentSource& source, const OffDiagonalBox& delta, int max_degree,
                                 const MomentTolerances& tol)
{
    XiDeltaEstimate est;
    est.sequence = xi_sequence(source, delta, max_degree);
    const int n = delta.n();
    for (int j = 0; j < n; ++j) {
        auto r = est.sequence.marginal(j);
        auto e = est.sequence.marginal_errors(j);
        if (!(r[0] > 0.0)) {
            est.marginals.emplace_back();
            continue;
        }
        bool noisy = std::any_of(e.begin(), e.end(), [](double x) { return x > 0.0; });
        est.marginals.push_back(quadrature_from_moments(r, tol, noisy ? std::span<const double>(e) : std::span<const double>()));
    }
    if (source.is_analytic()) return est;

    const auto& samples = source.samples();
    const double S = static_cast<double>(samples.size());
    const double nfact = factorial_d(n);
    std::vector<XiAtom> joint;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        std::vector<WeightedAtom> local;
        for (const auto& a : samples[s].atoms())
            for (const auto& w : delta.boxes())
                if (w.contains(a.x)) {
                    local.push_back(a);
                    break;
                }
        std::vector<const Point*> xs(n);
        ordered_tuples(
            local, n, [&](int j, const WeightedAtom& a) { return delta.box(j).contains(a.x); },
            [&](std::span<const WeightedAtom> y) {
                for (int j = 0; j < n; ++j) xs[j] = &y[j].x;
                if (!delta.contains(xs)) return;
                double w = 1.0;
                for (const auto& a : y) w *= a.s;
                joint.push_back({std::vector<WeightedAtom>(y.begin(), y.end()), w / (nfact * S), s});
            });
    }

    double worst = 0.0;
    for (const auto& [idx, value] : est.sequence.values) {
        double m = 0.0;
        for (const auto& a : joint) {
            double t = a.weight;
            for (int j = 0; j < n; ++j) t *= ipow(a.y[j].s, idx[j]);
            m += t;
        }
        const double scale = std::max(std::abs(value.value), std::numeric_limits<double>::min());
        if (m != value.value) worst = std::max(worst, std::abs(m - value.value) / scale);
    }
    est.consistency = worst;
    est.consistent = worst <= 1e-8;
    est.joint = std::move(joint);
    return est;
}

CorrelationEstimate recover_rho(const MomentSource& source, int n, const Window& window, int max_degree,
                                const MomentTolerances& tol)
{
    if (n < 1 || n > 4) throw std::out_of_range("correlation measures are recovered for 1 <= n <= 4");
    if (source.is_analytic()) return CorrelationEstimate::functional(n, source.model());

    auto xd = recover_xi_delta(source, OffDiagonalBox::off_diagonal(window, n), max_degree, tol);
    if (!xd.consistent)
        throw std::runtime_error("joint xi estimate does not reproduce the moment sequence (relative deviation " +
                                 std::to_string(xd.consistency) + ")");
    const double nfact = factorial_d(n);
    std::vector<RhoAtom> atoms;
    for (const auto& a : *xd.joint) {
        bool canonical = true;
        for (int j = 1; j < n && canonical; ++j) canonical = a.y[j - 1].x < a.y[j].x;
        if (!canonical) continue;
        double prod = 1.0;
        for (const auto& y : a.y) prod *= y.s;
        atoms.push_back({a.y, nfact * a.weight / prod, a.sample});
    }
    return CorrelationEstimate::atomic(n, std::move(atoms), source.sample_count());
}

std::string to_string(Outcome o)
{
    switch (o) {
    case Outcome::Discrete: return "Discrete";
    case Outcome::NotDiscrete: return "NotDiscrete";
    case Outcome::PointProcess: return "PointProcess";
    default: return "Inconclusive";
    }
}

std::vector<Window> default_ladder(int d)
{
    std::vector<Window> out;
    for (int l = 1; l <= 4; ++l) out.push_back(Window::cube(l, d));
    return out;
}

std::vector<Window> default_shrink_ladder(int d)
{
    std::vector<Window> out;
    for (int j = 0; j <= 4; ++j) out.push_back(Window::cube(std::ldexp(1.0, -j), d));
    return out;
}

namespace {

FlatnessCell flatness_of(const MultiIndexSequence& seq, const std::string& id, double multiplier)
{
    FlatnessCell c;
    c.n = seq.n;
    c.delta_id = id;
    c.flat = true;
    const double base = std::abs(seq.values.begin()->second.value);
    for (const auto& [idx, dev] : seq.deviation_from_base) {
        const double t = multiplier * dev.std_error + 1e-12 * base;
        const double a = std::abs(dev.value);
        c.statistic = std::max(c.statistic, a);
        if (a > 0.0) c.worst_ratio = std::max(c.worst_ratio, t > 0.0 ? a / t : INFINITY);
        if (a > t) c.flat = false;
    }
    return c;
}

}  // namespace

Verdict discreteness_verdict(const MomentSource& source, VerdictOptions opt)
{
    const int d = source.dim();
    if (opt.ladder.empty()) opt.ladder = inside(default_ladder(d), source);
    if (opt.shrink_ladder.empty()) opt.shrink_ladder = inside(default_shrink_ladder(d), source);
    if (opt.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (opt.degree_cap < 2 || opt.degree_cap > max_degree_cap)
        throw std::invalid_argument("degree cap must be within 2.." + std::to_string(max_degree_cap));

    Verdict v;
    v.options = opt;
    const auto& tol = opt.tol;
    bool unavailable = false;

    try {
        v.growth = growth_constants(source, opt.shrink_ladder, opt.growth_order, tol.noise_multiplier);
        v.growth_check = v.growth.c_prime_non_increasing ? Check::Pass : Check::Inconclusive;
        if (!v.growth.c_prime_non_increasing) v.notes.push_back("C' does not decrease along the shrink ladder");
    } catch (const Unavailable& e) {
        v.notes.push_back(std::string("growth constants: ") + e.what());
        v.growth_check = Check::Inconclusive;
    }

    auto psd_cell = [&](const MultiIndexSequence& seq, const std::string& id) {
        PsdCell c;
        c.n = seq.n;
        c.delta_id = id;
        const int N = opt.degree_cap / (2 * seq.n);
        c.empty = !(seq.values.begin()->second.value > 0.0);
        if (N >= 1) c.report = multiindex_psd(seq, N, tol);
        if (c.empty || N < 1) c.report.pass = true;
        v.condition_i.push_back(c);
    };

    for (int n = 1; n <= opt.n_max; ++n) {
        for (std::size_t l = 0; l < opt.ladder.size(); ++l) {
            const std::string id = "ladder" + std::to_string(l + 1) + ":n" + std::to_string(n);
            MultiIndexSequence seq;
            try {
                seq = xi_sequence(source, OffDiagonalBox::off_diagonal(opt.ladder[l], n), opt.degree_cap);
            } catch (const Unavailable& e) {
                v.notes.push_back(id + ": " + e.what());
                unavailable = true;
                continue;
            }
            psd_cell(seq, id);
            v.flatness.push_back(flatness_of(seq, id, opt.flatness_multiplier));

            SeriesCell sc;
            sc.n = n;
            sc.l = static_cast<int>(l) + 1;
            auto r = seq.marginal(0);
            auto e = seq.marginal_errors(0);
            int K = opt.degree_cap / 2;
            if (source.is_analytic() && opt.analytic_series_degree > opt.degree_cap) {
                K = opt.analytic_series_degree / 2;
                std::vector<std::vector<int>> powers;
                for (int i = r.size(); i <= 2 * K; ++i) {
                    std::vector<int> p(n, 1);
                    p[0] += i;
                    powers.push_back(p);
                }
                const double nf = std::tgamma(n + 1.0);
                for (const auto& m : moments(source, powers, OffDiagonalBox::off_diagonal(opt.ladder[l], n))) {
                    r.push_back(m.value / nf);
                    e.push_back(0.0);
                }
            }
            bool noisy = std::any_of(e.begin(), e.end(), [](double x) { return x > 0.0; });
            if (!(r[0] > 0.0)) {
                sc.empty = true;
                sc.outcome = Check::Pass;
            } else {
                sc.series = atom_at_zero_series(r, K, tol, noisy ? std::span<const double>(e) : std::span<const double>());
                sc.outcome = sc.series.no_atom_at_zero;
                bool positive = true;
                for (int k = 1; k <= K; ++k) positive = positive && r[2 * k] > 0.0;
                if (positive) sc.carleman = carleman_check(r, K, tol);
            }
            v.condition_ii.push_back(sc);
        }
    }

    for (std::size_t b = 0; b < opt.extra_boxes.size(); ++b) {
        const std::string id = "box" + std::to_string(b + 1);
        try {
            auto seq = xi_sequence(source, opt.extra_boxes[b], opt.degree_cap);
            psd_cell(seq, id);
            v.flatness.push_back(flatness_of(seq, id, opt.flatness_multiplier));
        } catch (const Unavailable& e) {
            v.notes.push_back(id + ": " + e.what());
            unavailable = true;
        }
    }

    if (opt.no_prior_measure) {
        for (std::size_t l = 0; l < opt.ladder.size(); ++l) {
            PsdCell c;
            c.delta_id = "full:ladder" + std::to_string(l + 1);
            std::vector<double> m, err;
            try {
                for (int k = 0; k <= 8; ++k) {
                    auto x = full_moment(source, k, opt.ladder[l]);
                    m.push_back(x.value);
                    err.push_back(x.std_error);
                }
            } catch (const Unavailable& e) {
                v.notes.push_back(c.delta_id + ": " + e.what());
                unavailable = true;
                continue;
            }
            bool noisy = std::any_of(err.begin(), err.end(), [](double x) { return x > 0.0; });
            c.report = hankel_psd(m, 4, tol, noisy ? std::span<const double>(err) : std::span<const double>());
            v.full_moment_hankel.push_back(c);
        }
    }

    bool fail = false, all_pass = !unavailable && v.growth_check == Check::Pass;
    for (const auto& c : v.condition_i) {
        fail = fail || !c.report.pass;
        all_pass = all_pass && c.report.pass;
    }
    for (const auto& c : v.full_moment_hankel) {
        fail = fail || !c.report.pass;
        all_pass = all_pass && c.report.pass;
    }
    for (const auto& c : v.condition_ii) {
        fail = fail || c.outcome == Check::Fail;
        all_pass = all_pass && c.outcome == Check::Pass;
    }
    v.outcome = fail ? Outcome::NotDiscrete : all_pass ? Outcome::Discrete : Outcome::Inconclusive;
    return v;
}

Verdict point_process_verdict(const MomentSource& source, VerdictOptions options)
{
    Verdict v = discreteness_verdict(source, std::move(options));
    if (v.outcome != Outcome::Discrete) return v;
    bool flat = !v.flatness.empty();
    for (const auto& c : v.flatness) flat = flat && c.flat;
    if (flat) v.outcome = Outcome::PointProcess;
    return v;
}

nlohmann::json to_json(const Verdict& v)
{
    using nlohmann::json;
    json growth_rows = json::array();
    for (const auto& r : v.growth.rows)
        growth_rows.push_back({{"window", window_to_json(r.window)},
                               {"c", r.c.value},
                               {"c_stderr", r.c.std_error},
                               {"c_prime", r.c_prime.value},
                               {"c_prime_stderr", r.c_prime.std_error}});
    json psd = json::array();
    for (const auto& c : v.condition_i)
        psd.push_back({{"n", c.n}, {"delta", c.delta_id}, {"empty", c.empty}, {"report", to_json(c.report)}});
    json series = json::array();
    for (const auto& c : v.condition_ii) {
        json j = {{"n", c.n}, {"l", c.l}, {"empty", c.empty}, {"outcome", to_string(c.outcome)}};
        if (!c.empty) j["series"] = to_json(c.series);
        if (c.carleman) j["carleman"] = to_json(*c.carleman);
        series.push_back(j);
    }
    json flat = json::array();
    for (const auto& c : v.flatness)
        flat.push_back({{"n", c.n},
                        {"delta", c.delta_id},
                        {"statistic", c.statistic},
                        {"worst_ratio", std::isfinite(c.worst_ratio) ? json(c.worst_ratio) : json("inf")},
                        {"flat", c.flat}});
    json full = json::array();
    for (const auto& c : v.full_moment_hankel) full.push_back({{"delta", c.delta_id}, {"report", to_json(c.report)}});
    json ladder = json::array(), shrink = json::array(), boxes = json::array();
    for (const auto& w : v.options.ladder) ladder.push_back(window_to_json(w));
    for (const auto& w : v.options.shrink_ladder) shrink.push_back(window_to_json(w));
    for (const auto& b : v.options.extra_boxes) boxes.push_back(box_to_json(b));
    return {{"outcome", to_string(v.outcome)},
            {"growth",
             {{"check", to_string(v.growth_check)},
              {"max_order", v.growth.max_order},
              {"rows", growth_rows},
              {"shrink_chain", v.growth.shrink_chain},
              {"c_prime_non_increasing", v.growth.c_prime_non_increasing},
              {"c_prime_shrink_ratio", v.growth.c_prime_shrink_ratio},
              {"c_shrink_ratio", v.growth.c_shrink_ratio},
              {"c_lags_c_prime", v.growth.c_lags_c_prime}}},
            {"condition_i", psd},
            {"condition_ii", series},
            {"flatness", flat},
            {"full_moment_hankel", full},
            {"notes", v.notes},
            {"options",
             {{"ladder", ladder},
              {"shrink_ladder", shrink},
              {"extra_boxes", boxes},
              {"n_max", v.options.n_max},
              {"degree_cap", v.options.degree_cap},
              {"analytic_series_degree", v.options.analytic_series_degree},
              {"growth_order", v.options.growth_order},
              {"flatness_multiplier", v.options.flatness_multiplier},
              {"no_prior_measure", v.options.no_prior_measure},
              {"tolerances", to_json(v.options.tol)}}}};
}

CorrelationFamily lift_correlation_family(const std::vector<DiscreteMeasure>& samples, const YBox& region,
                                          int max_order)
{
    if (samples.empty()) throw std::invalid_argument("no samples");
    if (max_order < 0 || max_order > max_star_configuration)
        throw std::out_of_range("family order must be within 0..12");
    CorrelationFamily fam{{}, region};
    fam.orders.push_back(CorrelationEstimate::atomic(0, {RhoAtom{{}, 1.0, no_sample}}, 0));
    const double w = 1.0 / static_cast<double>(samples.size());
    std::vector<std::vector<RhoAtom>> by_order(max_order + 1);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        std::vector<WeightedAtom> local;
        for (const auto& a : samples[s].atoms())
            if (region.contains(a)) local.push_back(a);
        for (int n = 1; n <= max_order; ++n)
            subsets(local, n, [&](std::span<const WeightedAtom> y) {
                by_order[n].push_back({std::vector<WeightedAtom>(y.begin(), y.end()), w, s});
            });
    }
    for (int n = 1; n <= max_order; ++n)
        fam.orders.push_back(CorrelationEstimate::atomic(n, std::move(by_order[n]), samples.size()));
    return fam;
}

PdReport pd_check(const CorrelationFamily& rho, const ConfigFunctional& g, double tol)
{
    if (static_cast<int>(rho.orders.size()) <= 2 * g.max_order())
        throw std::invalid_argument("correlation family must reach twice the order of G");
    PdReport rep;
    for (const auto& est : rho.orders)
        rep.value +=
            est.integrate_symmetric([&](std::span<const WeightedAtom> l) { return star_product(g, g, l); }).value;
    rep.pass = rep.value >= -tol;
    return rep;
}

Estimate mean_squared_k_transform(const std::vector<DiscreteMeasure>& samples, const YBox& region,
                                  const ConfigFunctional& g)
{
    std::vector<double> per(samples.size());
    std::vector<WeightedAtom> local;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        local.clear();
        for (const auto& a : samples[s].atoms())
            if (region.contains(a)) local.push_back(a);
        const double k = k_transform(g, std::span<const WeightedAtom>(local));
        per[s] = k * k;
    }
    return jackknife_mean(per);
}

LbReport lb_check(const MomentSource& source, const std::vector<Window>& ladder, double s_lo, double s_hi,
                  int max_order, double noise_multiplier)
{
    if (ladder.empty()) throw std::invalid_argument("window ladder is empty");
    if (max_order < 1 || max_order > 8) throw std::out_of_range("LB orders must be within 1..8");
    LbReport rep;
    rep.s_lo = s_lo;
    rep.s_hi = s_hi;
    for (const auto& w : ladder) {
        LbRow row{w, {}, {0.0, 0.0}};
        const YBox box{w, s_lo, s_hi};
        std::vector<double> counts;
        if (!source.is_analytic()) {
            if (!source.window().contains(w)) throw std::invalid_argument("LB window lies outside the sampled window");
            for (const auto& m : source.samples()) {
                double c = 0.0;
                for (const auto& a : m.atoms()) c += box.contains(a) ? 1.0 : 0.0;
                counts.push_back(c);
            }
        }
        for (int n = 1; n <= max_order; ++n) {
            Estimate mass;
            if (source.is_analytic()) {
                std::vector<YBox> boxes(n, box);
                std::vector<int> zeros(n, 0);
                auto v = analytic_box_moment(source.model(), boxes, zeros);
                if (!v) throw Unavailable("no closed form for the LB masses of model \"" + source.model().name() + "\"");
                mass = {*v / factorial_d(n), 0.0};
            } else {
                std::vector<double> per(counts.size());
                for (std::size_t s = 0; s < counts.size(); ++s) {
                    // C(N, n)
                    double c = 1.0;
                    for (int k = 0; k < n; ++k) c *= (counts[s] - k) / (k + 1.0);
                    per[s] = counts[s] >= n ? c : 0.0;
                }
                mass = jackknife_mean(per);
            }
            row.masses.push_back(mass);
            if (mass.value > 0.0) {
                const double c = std::pow(mass.value, 1.0 / n);
                if (c > row.constant.value) row.constant = {c, c * mass.std_error / (n * mass.value)};
            }
        }
        rep.rows.push_back(row);
    }
    for (std::size_t k = 1; k < rep.rows.size(); ++k) {
        const auto& a = rep.rows[k - 1].constant;
        const auto& b = rep.rows[k].constant;
        if (b.value > a.value + noise_multiplier * (a.std_error + b.std_error) + 1e-12 * a.value) rep.shrinks = false;
    }
    return rep;
}

WickComparison generalized_correlation(const MomentSource& source, std::span<const TestFunction> phis)
{
    if (source.is_analytic()) throw std::invalid_argument("generalized correlations need an empirical source");
    const int n = static_cast<int>(phis.size());
    if (n < 1 || n > 4) throw std::out_of_range("generalized correlations for 1 <= n <= 4");
    const auto& samples = source.samples();
    std::vector<double> lhs(samples.size());
    parallel_for(samples.size(), source.threads(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t s = lo; s < hi; ++s) lhs[s] = wick_pairing(samples[s], phis);
    });
    WickComparison out;
    out.lhs = jackknife_mean(lhs);
    auto rho = recover_rho(source, n, source.window(), 2);
    std::vector<TestFunction> f(phis.begin(), phis.end());
    out.rhs = rho.integrate([&f](std::span<const WeightedAtom> y) {
        double v = 1.0;
        for (std::size_t j = 0; j < f.size(); ++j) v *= f[j](y[j].x) * y[j].s;
        return v;
    });
    return out;
}

}  // namespace momentcone
