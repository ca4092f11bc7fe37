#include "momentcone/json_io.hpp"

#include <stdexcept>
#include <string>

namespace momentcone {

namespace {

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::vector<double> numbers(const json& j, const char* what)
{
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + " must be an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw std::invalid_argument(std::string(what) + " must be an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

}  // namespace

json point_to_json(const Point& x) { return x.coords; }

Point point_from_json(const json& j) { return Point(numbers(j, "point")); }

json window_to_json(const Window& w) { return {{"lower", w.lower()}, {"upper", w.upper()}}; }

Window window_from_json(const json& j)
{
    return Window(numbers(field(j, "lower"), "lower"), numbers(field(j, "upper"), "upper"));
}

json measure_to_json(const DiscreteMeasure& m)
{
    json atoms = json::array();
    for (const auto& a : m.atoms()) atoms.push_back({{"x", a.x.coords}, {"s", a.s}});
    return {{"atoms", atoms}};
}

DiscreteMeasure measure_from_json(const json& j)
{
    const json& arr = field(j, "atoms");
    if (!arr.is_array()) throw std::invalid_argument("\"atoms\" must be an array");
    std::vector<WeightedAtom> atoms;
    atoms.reserve(arr.size());
    for (const auto& a : arr) {
        const json& s = field(a, "s");
        if (!s.is_number()) throw std::invalid_argument("atom weight \"s\" must be a number");
        atoms.push_back({point_from_json(field(a, "x")), s.get<double>()});
    }
    return DiscreteMeasure(std::move(atoms));
}

json box_to_json(const OffDiagonalBox& b)
{
    json boxes = json::array();
    for (const auto& w : b.boxes()) boxes.push_back(window_to_json(w));
    return {{"boxes", boxes}, {"exclusion_radius", b.exclusion_radius()}};
}

OffDiagonalBox box_from_json(const json& j)
{
    std::vector<Window> boxes;
    for (const auto& w : field(j, "boxes")) boxes.push_back(window_from_json(w));
    return OffDiagonalBox(std::move(boxes), j.value("exclusion_radius", 0.0));
}

}  // namespace momentcone
