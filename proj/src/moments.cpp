#include "momentcone/moments.hpp"

#include "momentcone/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace momentcone {

MomentSource MomentSource::analytic(MeasureModel model, int d)
{
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    MomentSource s;
    s.model_ = std::make_shared<const MeasureModel>(std::move(model));
    s.d_ = d;
    return s;
}

MomentSource MomentSource::empirical(std::vector<DiscreteMeasure> samples, Window window)
{
    if (samples.empty()) throw std::invalid_argument("empirical source needs at least one sample");
    for (const auto& m : samples)
        if (!m.empty() && m.dim() != window.dim()) throw std::invalid_argument("sample and window dimensions differ");
    MomentSource s;
    s.d_ = window.dim();
    s.samples_ = std::make_shared<const std::vector<DiscreteMeasure>>(std::move(samples));
    s.window_ = std::move(window);
    return s;
}

const MeasureModel& MomentSource::model() const
{
    if (!model_) throw std::logic_error("source is empirical");
    return *model_;
}

const std::vector<DiscreteMeasure>& MomentSource::samples() const
{
    if (!samples_) throw std::logic_error("source is analytic");
    return *samples_;
}

const Window& MomentSource::window() const
{
    if (!window_) throw std::logic_error("source is analytic");
    return *window_;
}

MomentSource& MomentSource::with_threads(int t)
{
    threads_ = std::max(1, t);
    return *this;
}

namespace {

void check_inside(const MomentSource& source, const Window& w)
{
    if (w.dim() != source.dim()) throw std::invalid_argument("window dimension differs from the source");
    if (!source.is_analytic() && !source.window().contains(w))
        throw std::invalid_argument("requested set lies outside the sampled window");
}

// Per-sample values, one column per power vector.
std::vector<std::vector<double>> per_sample_sums(const MomentSource& source, std::span<const std::vector<int>> powers,
                                                 const OffDiagonalBox& delta)
{
    const auto& samples = source.samples();
    std::vector<std::vector<double>> cols(powers.size(), std::vector<double>(samples.size()));
    parallel_for(samples.size(), source.threads(), [&](std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
            auto v = distinct_tuple_sums(samples[s], delta, powers);
            for (std::size_t p = 0; p < powers.size(); ++p) cols[p][s] = v[p];
        }
    });
    return cols;
}

double analytic_or_throw(const MeasureModel& model, std::span<const int> powers, const OffDiagonalBox& delta)
{
    auto v = analytic_moment(model, powers, delta);
    if (!v) throw Unavailable("no closed form for this moment of model \"" + model.name() + "\"");
    return *v;
}

void integer_partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int p = std::min(n, max_part); p >= 1; --p) {
        cur.push_back(p);
        integer_partitions(n - p, p, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Estimate> moments(const MomentSource& source, std::span<const std::vector<int>> powers,
                              const OffDiagonalBox& delta)
{
    for (const auto& w : delta.boxes()) check_inside(source, w);
    std::vector<Estimate> out(powers.size());
    if (source.is_analytic()) {
        for (std::size_t p = 0; p < powers.size(); ++p) out[p] = {analytic_or_throw(source.model(), powers[p], delta), 0.0};
        return out;
    }
    auto cols = per_sample_sums(source, powers, delta);
    for (std::size_t p = 0; p < powers.size(); ++p) out[p] = jackknife_mean(cols[p]);
    return out;
}

Estimate moment(const MomentSource& source, std::span<const int> powers, const OffDiagonalBox& delta)
{
    std::vector<std::vector<int>> one{std::vector<int>(powers.begin(), powers.end())};
    return moments(source, one, delta).front();
}

Estimate full_moment(const MomentSource& source, int n, const Window& window)
{
    if (n < 0 || n > 8) throw std::out_of_range("full moments are computed for 0 <= n <= 8");
    check_inside(source, window);
    if (n == 0) return {1.0, 0.0};
    if (source.is_analytic()) {
        std::vector<std::vector<int>> shapes;
        std::vector<int> cur;
        integer_partitions(n, n, cur, shapes);
        double total = 0.0;
        for (const auto& sizes : shapes) {
            double count = static_cast<double>(count_partitions_with_block_sizes(sizes));
            auto delta = OffDiagonalBox::off_diagonal(window, static_cast<int>(sizes.size()));
            total += count * analytic_or_throw(source.model(), sizes, delta);
        }
        return {total, 0.0};
    }
    const auto& samples = source.samples();
    std::vector<double> vals(samples.size());
    parallel_for(samples.size(), source.threads(), [&](std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) vals[s] = std::pow(local_mass(samples[s], window), n);
    });
    return jackknife_mean(vals);
}

std::vector<std::vector<int>> multi_indices(int n, int max_total_degree)
{
    if (n < 1 || max_total_degree < 0) throw std::invalid_argument("multi-indices need n >= 1 and degree >= 0");
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 0);
    for (int total = 0; total <= max_total_degree; ++total) {
        // compositions of `total` into n parts, lexicographically descending
        auto rec = [&](auto&& self, int j, int left) -> void {
            if (j == n - 1) {
                cur[j] = left;
                out.push_back(cur);
                return;
            }
            for (int v = left; v >= 0; --v) {
                cur[j] = v;
                self(self, j + 1, left - v);
            }
        };
        rec(rec, 0, total);
    }
    return out;
}

const Estimate& MultiIndexSequence::at(const std::vector<int>& i) const
{
    auto it = values.find(i);
    if (it == values.end()) throw std::out_of_range("multi-index beyond the computed degree");
    return it->second;
}

std::vector<double> MultiIndexSequence::marginal(int coord) const
{
    std::vector<double> r;
    std::vector<int> idx(n, 0);
    for (int k = 0; k <= max_total_degree; ++k) {
        idx[coord] = k;
        r.push_back(at(idx).value);
    }
    return r;
}

std::vector<double> MultiIndexSequence::marginal_errors(int coord) const
{
    std::vector<double> r;
    std::vector<int> idx(n, 0);
    for (int k = 0; k <= max_total_degree; ++k) {
        idx[coord] = k;
        r.push_back(at(idx).std_error);
    }
    return r;
}

MultiIndexSequence xi_sequence(const MomentSource& source, const OffDiagonalBox& delta, int max_total_degree)
{
    if (max_total_degree < 0 || max_total_degree > max_degree_cap)
        throw std::out_of_range("max total degree must be within 0.." + std::to_string(max_degree_cap));
    for (const auto& w : delta.boxes()) check_inside(source, w);

    const int n = delta.n();
    const double nfact = std::tgamma(n + 1.0);
    auto idx = multi_indices(n, max_total_degree);
    std::vector<std::vector<int>> powers = idx;
    for (auto& p : powers)
        for (auto& v : p) v += 1;

    MultiIndexSequence seq;
    seq.n = n;
    seq.delta = delta;
    seq.max_total_degree = max_total_degree;

    if (source.is_analytic()) {
        std::vector<double> vals(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) vals[k] = analytic_or_throw(source.model(), powers[k], delta) / nfact;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            seq.values[idx[k]] = {vals[k], 0.0};
            seq.deviation_from_base[idx[k]] = {vals[k] - vals[0], 0.0};
        }
        return seq;
    }

    auto cols = per_sample_sums(source, powers, delta);
    std::vector<double> diff(source.sample_count());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        Estimate e = jackknife_mean(cols[k]);
        seq.values[idx[k]] = {e.value / nfact, e.std_error / nfact};
        for (std::size_t s = 0; s < diff.size(); ++s) diff[s] = cols[k][s] - cols[0][s];
        Estimate d = jackknife_mean(diff);
        seq.deviation_from_base[idx[k]] = {d.value / nfact, d.std_error / nfact};
    }
    return seq;
}

GrowthReport growth_constants(const MomentSource& source, const std::vector<Window>& ladder, int max_order,
                              double noise_multiplier)
{
    if (ladder.empty()) throw std::invalid_argument("window ladder is empty");
    if (max_order < 1 || max_order > 8) throw std::out_of_range("growth constants use orders 1..8");

    GrowthReport rep;
    rep.max_order = max_order;
    for (const auto& w : ladder) {
        GrowthRow row{w, {0.0, 0.0}, {0.0, 0.0}};
        for (int n = 1; n <= max_order; ++n) {
            const double nfact = std::tgamma(n + 1.0);
            Estimate full = full_moment(source, n, w);
            std::vector<int> ones(n, 1);
            Estimate off = moment(source, ones, OffDiagonalBox::off_diagonal(w, n));
            auto root = [&](const Estimate& e) -> Estimate {
                if (!(e.value > 0.0)) return {0.0, 0.0};
                double c = std::pow(e.value / nfact, 1.0 / n);
                return {c, c * e.std_error / (n * e.value)};
            };
            Estimate c = root(full), cp = root(off);
            if (c.value > row.c.value) row.c = c;
            if (cp.value > row.c_prime.value) row.c_prime = cp;
        }
        rep.rows.push_back(row);
    }

    std::vector<int> order(ladder.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ladder[a].volume() > ladder[b].volume(); });
    rep.shrink_chain.push_back(order.front());
    for (std::size_t k = 1; k < order.size(); ++k) {
        const Window& last = ladder[rep.shrink_chain.back()];
        const Window& cand = ladder[order[k]];
        if (cand.volume() < last.volume() && last.contains(cand)) rep.shrink_chain.push_back(order[k]);
    }

    for (std::size_t k = 1; k < rep.shrink_chain.size(); ++k) {
        const auto& prev = rep.rows[rep.shrink_chain[k - 1]].c_prime;
        const auto& next = rep.rows[rep.shrink_chain[k]].c_prime;
        double slack = noise_multiplier * (prev.std_error + next.std_error) + 1e-12 * prev.value;
        if (next.value > prev.value + slack) rep.c_prime_non_increasing = false;
    }
    const auto& first = rep.rows[rep.shrink_chain.front()];
    const auto& last = rep.rows[rep.shrink_chain.back()];
    if (first.c_prime.value > 0.0) rep.c_prime_shrink_ratio = last.c_prime.value / first.c_prime.value;
    if (first.c.value > 0.0) rep.c_shrink_ratio = last.c.value / first.c.value;
    rep.c_lags_c_prime = rep.shrink_chain.size() > 1 && rep.c_shrink_ratio > 2.0 * rep.c_prime_shrink_ratio;
    return rep;
}

void write_moment_csv(std::ostream& out, const std::vector<MomentRow>& rows)
{
    int width = 0;
    for (const auto& r : rows) width = std::max(width, static_cast<int>(r.indices.size()));
    out << "n";
    for (int j = 1; j <= width; ++j) out << ",i_" << j;
    out << ",delta_id,value,stderr\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.n;
        for (int j = 0; j < width; ++j) {
            out << ',';
            if (j < static_cast<int>(r.indices.size())) out << r.indices[j];
        }
        out << ',' << r.delta_id;
        std::snprintf(buf, sizeof buf, ",%.17g", r.estimate.value);
        out << buf;
        std::snprintf(buf, sizeof buf, ",%.17g\n", r.estimate.std_error);
        out << buf;
    }
}

}  // namespace momentcone
