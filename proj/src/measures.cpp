#include "momentcone/measures.hpp"

#include "momentcone/partitions.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace momentcone {

namespace {

void require_finite(const std::vector<double>& v, const char* what)
{
    for (double c : v)
        if (!std::isfinite(c)) throw std::invalid_argument(std::string(what) + " has a non-finite coordinate");
}

}  // namespace

Point::Point(std::vector<double> c) : coords(std::move(c))
{
    require_finite(coords, "point");
}

Point::Point(std::initializer_list<double> c) : coords(c)
{
    require_finite(coords, "point");
}

double distance(const Point& a, const Point& b)
{
    double sum = 0.0;
    for (int j = 0; j < a.dim(); ++j) {
        double d = a[j] - b[j];
        sum += d * d;
    }
    return std::sqrt(sum);
}

Window::Window(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper))
{
    if (lower_.empty() || lower_.size() != upper_.size())
        throw std::invalid_argument("window bounds must be nonempty and of equal dimension");
    require_finite(lower_, "window");
    require_finite(upper_, "window");
    for (std::size_t j = 0; j < lower_.size(); ++j)
        if (!(lower_[j] < upper_[j])) throw std::invalid_argument("window needs lower < upper in every coordinate");
}

Window Window::cube(double half_width, int d)
{
    return Window(std::vector<double>(d, -half_width), std::vector<double>(d, half_width));
}

double Window::volume() const
{
    double v = 1.0;
    for (std::size_t j = 0; j < lower_.size(); ++j) v *= upper_[j] - lower_[j];
    return v;
}

bool Window::contains(const Point& x) const
{
    if (x.dim() != dim()) throw std::invalid_argument("point and window dimensions differ");
    for (int j = 0; j < dim(); ++j)
        if (x[j] < lower_[j] || x[j] >= upper_[j]) return false;
    return true;
}

bool Window::contains(const Window& inner) const
{
    for (int j = 0; j < dim(); ++j)
        if (inner.lower_[j] < lower_[j] || inner.upper_[j] > upper_[j]) return false;
    return true;
}

std::optional<Window> Window::intersect(const Window& other) const
{
    std::vector<double> lo(dim()), hi(dim());
    for (int j = 0; j < dim(); ++j) {
        lo[j] = std::max(lower_[j], other.lower_[j]);
        hi[j] = std::min(upper_[j], other.upper_[j]);
        if (!(lo[j] < hi[j])) return std::nullopt;
    }
    return Window(std::move(lo), std::move(hi));
}

DiscreteMeasure::DiscreteMeasure(std::vector<WeightedAtom> atoms) : atoms_(std::move(atoms))
{
    if (atoms_.empty()) return;
    const int d = atoms_.front().x.dim();
    for (const auto& a : atoms_) {
        if (a.x.dim() != d || d == 0) throw std::invalid_argument("atoms must share a positive dimension");
        require_finite(a.x.coords, "atom location");
        if (!(a.s > 0.0) || !std::isfinite(a.s)) throw std::invalid_argument("atom weights must be finite and > 0");
    }
    std::vector<const Point*> locs;
    locs.reserve(atoms_.size());
    for (const auto& a : atoms_) locs.push_back(&a.x);
    std::sort(locs.begin(), locs.end(), [](const Point* a, const Point* b) { return *a < *b; });
    for (std::size_t k = 1; k < locs.size(); ++k)
        if (*locs[k] == *locs[k - 1]) throw std::invalid_argument("atom locations must be pairwise distinct");
}

DiscreteMeasure DiscreteMeasure::from_sampler(std::vector<WeightedAtom> atoms)
{
#ifndef NDEBUG
    return DiscreteMeasure(std::move(atoms));
#else
    DiscreteMeasure m;
    m.atoms_ = std::move(atoms);
    return m;
#endif
}

double DiscreteMeasure::total_mass() const
{
    double sum = 0.0;
    for (const auto& a : atoms_) sum += a.s;
    return sum;
}

DiscreteMeasure DiscreteMeasure::restricted(const Window& w) const
{
    DiscreteMeasure m;
    for (const auto& a : atoms_)
        if (w.contains(a.x)) m.atoms_.push_back(a);
    return m;
}

OffDiagonalBox::OffDiagonalBox(std::vector<Window> boxes, double exclusion_radius)
    : boxes_(std::move(boxes)), exclusion_radius_(exclusion_radius)
{
    if (boxes_.empty()) throw std::invalid_argument("off-diagonal box needs order n >= 1");
    if (boxes_.size() > 31) throw std::invalid_argument("off-diagonal box order too large");
    for (const auto& b : boxes_)
        if (b.dim() != boxes_.front().dim()) throw std::invalid_argument("boxes must share a dimension");
    if (!(exclusion_radius_ >= 0.0) || !std::isfinite(exclusion_radius_))
        throw std::invalid_argument("exclusion radius must be finite and >= 0");
}

OffDiagonalBox OffDiagonalBox::off_diagonal(const Window& w, int n, double exclusion_radius)
{
    if (n < 1) throw std::invalid_argument("off-diagonal box needs order n >= 1");
    return OffDiagonalBox(std::vector<Window>(n, w), exclusion_radius);
}

bool OffDiagonalBox::symmetric() const
{
    return std::all_of(boxes_.begin(), boxes_.end(), [&](const Window& b) { return b == boxes_.front(); });
}

bool OffDiagonalBox::contains(std::span<const Point* const> xs) const
{
    if (static_cast<int>(xs.size()) != n()) throw std::invalid_argument("tuple length differs from box order");
    for (int j = 0; j < n(); ++j)
        if (!boxes_[j].contains(*xs[j])) return false;
    for (int i = 0; i < n(); ++i)
        for (int j = i + 1; j < n(); ++j) {
            if (exclusion_radius_ == 0.0) {
                if (*xs[i] == *xs[j]) return false;
            } else if (!(distance(*xs[i], *xs[j]) > exclusion_radius_)) {
                return false;
            }
        }
    return true;
}

Window OffDiagonalBox::hull() const
{
    std::vector<double> lo = boxes_.front().lower(), hi = boxes_.front().upper();
    for (const auto& b : boxes_)
        for (int j = 0; j < dim(); ++j) {
            lo[j] = std::min(lo[j], b.lower()[j]);
            hi[j] = std::max(hi[j], b.upper()[j]);
        }
    return Window(lo, hi);
}

double tensor_pairing(const DiscreteMeasure& eta, const TupleFunction& f, int n)
{
    if (n < 1) throw std::invalid_argument("tensor pairing needs n >= 1");
    const auto& atoms = eta.atoms();
    const std::size_t k = atoms.size();
    if (k == 0) return 0.0;

    std::vector<std::size_t> idx(n, 0);
    std::vector<Point> tuple(n);
    double sum = 0.0;
    while (true) {
        double w = 1.0;
        for (int j = 0; j < n; ++j) {
            tuple[j] = atoms[idx[j]].x;
            w *= atoms[idx[j]].s;
        }
        double v = f(tuple);
        if (!std::isfinite(v)) throw std::domain_error("test function returned a non-finite value");
        sum += v * w;

        int j = n - 1;
        while (j >= 0 && ++idx[j] == k) idx[j--] = 0;
        if (j < 0) break;
    }
    return sum;
}

double local_mass(const DiscreteMeasure& gamma, const Window& window)
{
    double sum = 0.0;
    for (const auto& a : gamma.atoms())
        if (window.contains(a.x)) sum += a.s;
    return sum;
}

namespace {

// Direct enumeration of ordered distinct tuples; used when the exclusion
// radius couples coordinates.
std::vector<double> enumerate_tuple_sums(const DiscreteMeasure& eta, const OffDiagonalBox& delta,
                                         std::span<const std::vector<int>> powers)
{
    const int n = delta.n();
    const auto& atoms = eta.atoms();
    std::vector<double> out(powers.size(), 0.0);
    std::vector<std::size_t> idx(n);
    std::vector<const Point*> xs(n);
    std::vector<bool> used(atoms.size(), false);

    auto rec = [&](auto&& self, int j) -> void {
        if (j == n) {
            if (!delta.contains(xs)) return;
            for (std::size_t p = 0; p < powers.size(); ++p) {
                double prod = 1.0;
                for (int q = 0; q < n; ++q) prod *= std::pow(atoms[idx[q]].s, powers[p][q]);
                out[p] += prod;
            }
            return;
        }
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            if (used[a] || !delta.box(j).contains(atoms[a].x)) continue;
            used[a] = true;
            idx[j] = a;
            xs[j] = &atoms[a].x;
            self(self, j + 1);
            used[a] = false;
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace

std::vector<double> distinct_tuple_sums(const DiscreteMeasure& eta, const OffDiagonalBox& delta,
                                        std::span<const std::vector<int>> powers)
{
    const int n = delta.n();
    int max_power = 0;
    for (const auto& p : powers) {
        if (static_cast<int>(p.size()) != n) throw std::invalid_argument("power vector length differs from box order");
        int total = 0;
        for (int i : p) {
            if (i < 1) throw std::invalid_argument("powers must be >= 1");
            total += i;
        }
        max_power = std::max(max_power, total);
    }
    if (eta.empty() || powers.empty()) return std::vector<double>(powers.size(), 0.0);
    if (eta.dim() != delta.dim()) throw std::invalid_argument("measure and box dimensions differ");
    if (delta.exclusion_radius() > 0.0 || n > 8) return enumerate_tuple_sums(eta, delta, powers);

    // Inclusion-exclusion over set partitions: the sum over injective maps
    // equals sum_pi mu(0, pi) prod_{B in pi} P_B(sum_{j in B} i_j), where
    // P_B(k) sums s^k over atoms lying in every box indexed by B.
    const unsigned full = (1u << n) - 1;
    std::vector<double> table(static_cast<std::size_t>(full + 1) * (max_power + 1), 0.0);
    auto P = [&](unsigned mask, int k) -> double& { return table[mask * (max_power + 1) + k]; };
    std::vector<double> spow(max_power + 1);
    for (const auto& a : eta.atoms()) {
        unsigned in = 0;
        for (int j = 0; j < n; ++j)
            if (delta.box(j).contains(a.x)) in |= 1u << j;
        if (in == 0) continue;
        spow[0] = 1.0;
        for (int k = 1; k <= max_power; ++k) spow[k] = spow[k - 1] * a.s;
        for (unsigned sub = in; sub != 0; sub = (sub - 1) & in)
            for (int k = 1; k <= max_power; ++k) P(sub, k) += spow[k];
    }

    const auto& parts = masked_partitions(n);
    std::vector<double> out(powers.size(), 0.0);
    for (std::size_t p = 0; p < powers.size(); ++p) {
        double sum = 0.0;
        for (const auto& part : parts) {
            double prod = part.mobius;
            for (unsigned b : part.blocks) {
                int k = 0;
                for (int j = 0; j < n; ++j)
                    if (b & (1u << j)) k += powers[p][j];
                prod *= P(b, k);
                if (prod == 0.0) break;
            }
            sum += prod;
        }
        out[p] = sum;
    }
    return out;
}

double distinct_tuple_sum(const DiscreteMeasure& eta, const OffDiagonalBox& delta, std::span<const int> powers)
{
    std::vector<std::vector<int>> one{std::vector<int>(powers.begin(), powers.end())};
    return distinct_tuple_sums(eta, delta, one).front();
}

}  // namespace momentcone
