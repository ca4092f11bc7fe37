#include "momentcone/json_io.hpp"

#include <stdexcept>
#include <string>

namespace momentcone {

namespace {

double number(const json& j, const char* key)
{
    if (!j.contains(key)) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
    const json& v = j.at(key);
    if (!v.is_number()) throw std::invalid_argument(std::string("field \"") + key + "\" must be a number");
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback)
{
    return j.contains(key) ? number(j, key) : fallback;
}

double constant_rate(const SpatialIntensity& s)
{
    if (!s.is_constant()) throw std::invalid_argument("inhomogeneous densities have no JSON form");
    return s.rate();
}

json law_to_json(const WeightLaw& w)
{
    switch (w.kind()) {
    case WeightLaw::Kind::deterministic:
        return {{"law", "deterministic"}, {"value", w.parameters()[0]}};
    case WeightLaw::Kind::gamma:
        return {{"law", "gamma"}, {"shape", w.parameters()[0]}, {"scale", w.parameters()[1]}};
    case WeightLaw::Kind::uniform:
        return {{"law", "uniform"}, {"low", w.parameters()[0]}, {"high", w.parameters()[1]}};
    case WeightLaw::Kind::discrete:
        return {{"law", "discrete"}, {"values", w.values()}, {"probs", w.probs()}};
    }
    return {};
}

WeightLaw law_from_json(const json& j)
{
    if (j.is_number()) return WeightLaw::deterministic(j.get<double>());
    if (!j.is_object() || !j.contains("law")) throw std::invalid_argument("weight law needs a \"law\" field");
    const std::string law = j.at("law").get<std::string>();
    if (law == "deterministic") return WeightLaw::deterministic(number(j, "value"));
    if (law == "gamma") return WeightLaw::gamma(number(j, "shape"), number_or(j, "scale", 1.0));
    if (law == "uniform") return WeightLaw::uniform(number(j, "low"), number(j, "high"));
    if (law == "discrete") {
        if (!j.contains("values") || !j.contains("probs"))
            throw std::invalid_argument("discrete weight law needs \"values\" and \"probs\"");
        return WeightLaw::discrete(j.at("values").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown weight law \"" + law + "\"");
}

json weights_to_json(const WeightDensity& w)
{
    const auto& p = w.parameters();
    if (w.family() == "gamma") return {{"family", "gamma"}, {"scale", p[0]}, {"beta", p[1]}};
    if (w.family() == "tempered_stable")
        return {{"family", "tempered_stable"}, {"scale", p[0]}, {"alpha", p[1]}, {"beta", p[2]}};
    if (w.family() == "exponential") return {{"family", "exponential"}, {"total", p[0]}, {"mean", p[1]}};
    throw std::invalid_argument("custom weight densities have no JSON form");
}

WeightDensity weights_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("family")) throw std::invalid_argument("weights need a \"family\" field");
    const std::string family = j.at("family").get<std::string>();
    if (family == "gamma") return WeightDensity::gamma_levy(number_or(j, "scale", 1.0), number_or(j, "beta", 1.0));
    if (family == "tempered_stable")
        return WeightDensity::tempered_stable(number_or(j, "scale", 1.0), number(j, "alpha"), number_or(j, "beta", 1.0));
    if (family == "exponential") return WeightDensity::exponential(number(j, "total"), number_or(j, "mean", 1.0));
    throw std::invalid_argument("unknown weight family \"" + family + "\"");
}

}  // namespace

json model_to_json(const MeasureModel& m)
{
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GammaModel>) {
                return {{"variant", "gamma"}, {"rate", v.rate}};
            } else if constexpr (std::is_same_v<T, CrmModel>) {
                return {{"variant", "crm"},
                        {"rate", constant_rate(v.intensity.spatial)},
                        {"weights", weights_to_json(v.intensity.weights)}};
            } else if constexpr (std::is_same_v<T, PoissonModel>) {
                return {{"variant", "poisson"}, {"rate", constant_rate(v.intensity)}};
            } else if constexpr (std::is_same_v<T, DiffuseModel>) {
                return {{"variant", "diffuse"}, {"rate", constant_rate(v.density)}};
            } else if constexpr (std::is_same_v<T, FixedAtomsModel>) {
                json atoms = json::array();
                for (const auto& a : v.atoms) atoms.push_back({{"x", a.x.coords}, {"weight", law_to_json(a.weight)}});
                return {{"variant", "fixed_atoms"}, {"atoms", atoms}};
            } else {
                json comps = json::array();
                for (const auto& c : v.components) comps.push_back(model_to_json(c));
                return {{"variant", "mixture"}, {"components", comps}};
            }
        },
        m.variant());
}

MeasureModel model_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_string())
        throw std::invalid_argument("model needs a string \"variant\" field");
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "gamma") return gamma_model(number_or(j, "rate", 1.0));
    if (variant == "crm") {
        if (!j.contains("weights")) throw std::invalid_argument("crm model needs \"weights\"");
        return crm_model({SpatialIntensity::constant(number_or(j, "rate", 1.0)), weights_from_json(j.at("weights"))});
    }
    if (variant == "poisson") return poisson_model(number_or(j, "rate", 1.0));
    if (variant == "diffuse") return diffuse_model(number_or(j, "rate", 1.0));
    if (variant == "fixed_atoms") {
        if (!j.contains("atoms") || !j.at("atoms").is_array()) throw std::invalid_argument("fixed_atoms needs an \"atoms\" array");
        std::vector<FixedAtom> atoms;
        for (const auto& a : j.at("atoms")) {
            if (!a.contains("x") || !a.contains("weight")) throw std::invalid_argument("fixed atom needs \"x\" and \"weight\"");
            atoms.push_back({point_from_json(a.at("x")), law_from_json(a.at("weight"))});
        }
        return fixed_atoms_model(std::move(atoms));
    }
    if (variant == "mixture") {
        if (!j.contains("components") || !j.at("components").is_array())
            throw std::invalid_argument("mixture needs a \"components\" array");
        std::vector<MeasureModel> comps;
        for (const auto& c : j.at("components")) comps.push_back(model_from_json(c));
        return mixture_model(std::move(comps));
    }
    throw std::invalid_argument("unknown model variant \"" + variant + "\"");
}

}  // namespace momentcone
