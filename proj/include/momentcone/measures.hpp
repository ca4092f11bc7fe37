#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace momentcone {

// A point of X = R^d.
struct Point {
    std::vector<double> coords;

    Point() = default;
    explicit Point(std::vector<double> c);
    Point(std::initializer_list<double> c);

    int dim() const { return static_cast<int>(coords.size()); }
    double operator[](int j) const { return coords[j]; }
    bool operator==(const Point&) const = default;
    auto operator<=>(const Point&) const = default;
};

double distance(const Point& a, const Point& b);

// Axis-aligned box [lower, upper). Half-open so that adjacent windows tile.
class Window {
public:
    Window(std::vector<double> lower, std::vector<double> upper);

    // [-h, h)^d
    static Window cube(double half_width, int d);

    int dim() const { return static_cast<int>(lower_.size()); }
    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& upper() const { return upper_; }
    double volume() const;
    bool contains(const Point& x) const;
    bool contains(const class Window& inner) const;
    std::optional<Window> intersect(const Window& other) const;
    bool operator==(const Window&) const = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

// Point of Y = X x R_+; also an atom s*delta_x of a discrete measure.
struct WeightedAtom {
    Point x;
    double s = 0.0;
};

// Box Lambda x [s_lo, s_hi) in Y.
struct YBox {
    Window x;
    double s_lo = 0.0;
    double s_hi = 0.0;

    bool contains(const WeightedAtom& y) const { return y.s >= s_lo && y.s < s_hi && x.contains(y.x); }
};

// Finite list of weighted atoms with pairwise distinct locations.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;
    // Checks finiteness, s > 0, dimension agreement and distinctness.
    explicit DiscreteMeasure(std::vector<WeightedAtom> atoms);
    // For samplers drawing locations from continuous laws; distinctness is
    // only asserted in debug builds.
    static DiscreteMeasure from_sampler(std::vector<WeightedAtom> atoms);

    const std::vector<WeightedAtom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    int dim() const { return atoms_.empty() ? 0 : atoms_.front().x.dim(); }
    double total_mass() const;
    DiscreteMeasure restricted(const Window& w) const;

private:
    std::vector<WeightedAtom> atoms_;
};

// Delta in X^(n)_0: tuples with x_j in boxes[j] and pairwise distance
// strictly greater than the exclusion radius.
class OffDiagonalBox {
public:
    OffDiagonalBox(std::vector<Window> boxes, double exclusion_radius = 0.0);

    // Lambda^(n)_0
    static OffDiagonalBox off_diagonal(const Window& w, int n, double exclusion_radius = 0.0);

    int n() const { return static_cast<int>(boxes_.size()); }
    int dim() const { return boxes_.front().dim(); }
    const std::vector<Window>& boxes() const { return boxes_; }
    const Window& box(int j) const { return boxes_[j]; }
    double exclusion_radius() const { return exclusion_radius_; }
    // All boxes equal, so Delta is invariant under coordinate permutations.
    bool symmetric() const;
    bool contains(std::span<const Point* const> xs) const;
    // Smallest window containing every box.
    Window hull() const;

private:
    std::vector<Window> boxes_;
    double exclusion_radius_;
};

using TupleFunction = std::function<double(std::span<const Point>)>;

// <eta^{(x)n}, f>: sum over all ordered n-tuples of atoms, repeats allowed.
double tensor_pairing(const DiscreteMeasure& eta, const TupleFunction& f, int n);

double local_mass(const DiscreteMeasure& gamma, const Window& window);

// Sum over ordered n-tuples of pairwise-distinct atoms lying in delta of
// prod_j s_j^{i_j}.
double distinct_tuple_sum(const DiscreteMeasure& eta, const OffDiagonalBox& delta,
                          std::span<const int> powers);

// Same sum for many power vectors at once; every vector has length delta.n().
std::vector<double> distinct_tuple_sums(const DiscreteMeasure& eta, const OffDiagonalBox& delta,
                                        std::span<const std::vector<int>> powers);

}  // namespace momentcone
