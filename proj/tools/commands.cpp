#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace momentcone::cli {

namespace {

const std::set<std::string> known_keys = {"model",     "dimension",  "window",        "samples",   "seed",
                                          "trunc_eps", "degree_cap", "n_max",         "ladder",    "shrink_ladder",
                                          "boxes",     "tolerances", "max_total_degree", "growth_order", "analytic_series_degree",
                                          "no_prior_measure"};

const std::set<std::string> tolerance_keys = {"psd",       "degeneracy",          "noise_multiplier",
                                              "zero_node", "zero_weight",         "diverging_exponent",
                                              "converging_exponent", "diverging_ratio",
                                              "converging_ratio",    "flatness_multiplier"};

double positive(const json& j, const char* what)
{
    if (!j.is_number() || !(j.get<double>() > 0.0)) throw UsageError(std::string(what) + " must be a number > 0");
    return j.get<double>();
}

long integer(const json& j, const char* what)
{
    if (!j.is_number_integer()) throw UsageError(std::string(what) + " must be an integer");
    return j.get<long>();
}

std::vector<Window> windows(const json& j, const char* what)
{
    if (!j.is_array() || j.empty()) throw UsageError(std::string(what) + " must be a nonempty array of windows");
    std::vector<Window> out;
    for (const auto& w : j) out.push_back(window_from_json(w));
    return out;
}

int env_threads()
{
    const char* t = std::getenv("MOMENTCONE_THREADS");
    if (!t || !*t) return 1;
    try {
        int v = std::stoi(t);
        if (v < 1) throw UsageError("MOMENTCONE_THREADS must be >= 1");
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("MOMENTCONE_THREADS must be a positive integer");
    }
}

MomentSource make_source(const RunConfig& cfg, const std::optional<std::string>& sample_path, json& info)
{
    if (sample_path) {
        auto file = read_sample_file(*sample_path);
        info = {{"mode", "empirical"}, {"sample_count", file.samples.size()}, {"manifest", file.manifest}};
        auto src = MomentSource::empirical(std::move(file.samples), file.window);
        src.with_threads(cfg.threads);
        return src;
    }
    if (!cfg.model) throw UsageError("no model in the config and no sample file given");
    info = {{"mode", "analytic"}, {"model", model_to_json(*cfg.model)}, {"dimension", cfg.dimension}};
    return MomentSource::analytic(*cfg.model, cfg.dimension);
}

std::string fmt_hash(std::uint64_t h)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

void apply_override(json& j, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw UsageError("empty key segment in override: " + assignment);
        if (!node->is_object()) {
            if (!node->is_null()) throw UsageError("override path crosses a non-object: " + key);
            *node = json::object();
        }
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
}

std::uint64_t config_hash(const json& j)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig parse_config(const json& j)
{
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!known_keys.count(k)) throw UsageError("unknown config key \"" + k + "\"");

    RunConfig cfg;
    cfg.raw = j;
    cfg.hash = config_hash(j);
    try {
        if (j.contains("dimension")) {
            cfg.dimension = static_cast<int>(integer(j["dimension"], "dimension"));
            if (cfg.dimension < 1 || cfg.dimension > 3) throw UsageError("dimension must be within 1..3");
        }
        if (j.contains("model")) cfg.model = model_from_json(j["model"]);
        cfg.window = j.contains("window") ? window_from_json(j["window"]) : Window::cube(4.0, cfg.dimension);
        if (cfg.window.dim() != cfg.dimension) throw UsageError("window dimension differs from \"dimension\"");
        if (j.contains("samples")) {
            const json& s = j["samples"];
            if (!s.is_number_integer() || s.get<long long>() < 1) throw UsageError("sample count must be ≥ 1");
            cfg.samples = s.get<std::size_t>();
        }
        if (j.contains("seed")) {
            const json& s = j["seed"];
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) throw UsageError("seed must be a nonnegative integer");
            cfg.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("trunc_eps")) cfg.trunc_eps = positive(j["trunc_eps"], "trunc_eps");
        if (j.contains("degree_cap")) {
            cfg.verdict.degree_cap = static_cast<int>(integer(j["degree_cap"], "degree_cap"));
            if (cfg.verdict.degree_cap < 2 || cfg.verdict.degree_cap > max_degree_cap)
                throw UsageError("degree_cap must be within 2.." + std::to_string(max_degree_cap));
        }
        if (j.contains("n_max")) {
            cfg.verdict.n_max = static_cast<int>(integer(j["n_max"], "n_max"));
            if (cfg.verdict.n_max < 1 || cfg.verdict.n_max > 4) throw UsageError("n_max must be within 1..4");
        }
        if (j.contains("analytic_series_degree")) {
            auto& d = cfg.verdict.analytic_series_degree;
            d = static_cast<int>(integer(j["analytic_series_degree"], "analytic_series_degree"));
            if (d < 2 || d > max_degree_cap)
                throw UsageError("analytic_series_degree must be within 2.." + std::to_string(max_degree_cap));
        }
        if (j.contains("growth_order")) {
            cfg.verdict.growth_order = static_cast<int>(integer(j["growth_order"], "growth_order"));
            if (cfg.verdict.growth_order < 1 || cfg.verdict.growth_order > 8)
                throw UsageError("growth_order must be within 1..8");
        }
        if (j.contains("max_total_degree")) {
            cfg.max_total_degree = static_cast<int>(integer(j["max_total_degree"], "max_total_degree"));
            if (cfg.max_total_degree < 0 || cfg.max_total_degree > max_degree_cap)
                throw UsageError("max_total_degree must be within 0.." + std::to_string(max_degree_cap));
        }
        if (j.contains("ladder")) cfg.verdict.ladder = windows(j["ladder"], "ladder");
        if (j.contains("shrink_ladder")) cfg.verdict.shrink_ladder = windows(j["shrink_ladder"], "shrink_ladder");
        if (j.contains("boxes")) {
            if (!j["boxes"].is_array()) throw UsageError("boxes must be an array");
            for (const auto& b : j["boxes"]) cfg.boxes.push_back(box_from_json(b));
            cfg.verdict.extra_boxes = cfg.boxes;
        }
        if (j.contains("no_prior_measure")) {
            if (!j["no_prior_measure"].is_boolean()) throw UsageError("no_prior_measure must be true or false");
            cfg.verdict.no_prior_measure = j["no_prior_measure"].get<bool>();
        }
        if (j.contains("tolerances")) {
            const json& t = j["tolerances"];
            if (!t.is_object()) throw UsageError("tolerances must be an object");
            for (const auto& [k, v] : t.items()) {
                if (!tolerance_keys.count(k)) throw UsageError("unknown tolerance \"" + k + "\"");
                const double x = positive(v, ("tolerances." + k).c_str());
                auto& tol = cfg.verdict.tol;
                if (k == "psd") tol.psd = x;
                else if (k == "degeneracy") tol.degeneracy = x;
                else if (k == "noise_multiplier") tol.noise_multiplier = x;
                else if (k == "zero_node") tol.zero_node = x;
                else if (k == "zero_weight") tol.zero_weight = x;
                else if (k == "diverging_exponent") tol.diverging_exponent = x;
                else if (k == "converging_exponent") tol.converging_exponent = x;
                else if (k == "diverging_ratio") tol.diverging_ratio = x;
                else if (k == "converging_ratio") tol.converging_ratio = x;
                else cfg.verdict.flatness_multiplier = x;
            }
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(std::string("invalid config: ") + e.what());
    }
    for (const auto& w : cfg.verdict.ladder)
        if (w.dim() != cfg.dimension) throw UsageError("ladder window dimension differs from \"dimension\"");
    for (const auto& b : cfg.boxes)
        if (b.dim() != cfg.dimension) throw UsageError("box dimension differs from \"dimension\"");
    cfg.threads = env_threads();
    return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open config file " + path);
        j = json::parse(in, nullptr, false);
        if (j.is_discarded()) throw UsageError("config file " + path + " is not valid JSON");
    }
    for (const auto& o : overrides) apply_override(j, o);
    return parse_config(j);
}

void write_sample_file(std::ostream& out, const RunConfig& cfg, const std::vector<DiscreteMeasure>& samples)
{
    json manifest = {{"format", "momentcone-samples/1"},
                     {"seed", cfg.seed},
                     {"model", model_to_json(*cfg.model)},
                     {"window", window_to_json(cfg.window)},
                     {"samples", samples.size()},
                     {"trunc_eps", cfg.trunc_eps},
                     {"config", cfg.raw},
                     {"config_hash", fmt_hash(cfg.hash)}};
    out << json{{"manifest", manifest}}.dump() << '\n';
    for (const auto& m : samples) out << measure_to_json(m).dump() << '\n';
}

SampleFile read_sample_file(std::istream& in)
{
    SampleFile f;
    std::string line;
    std::size_t lineno = 0;
    bool have_manifest = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw UsageError("sample file line " + std::to_string(lineno) + " is not valid JSON");
        try {
            if (!have_manifest) {
                if (!j.contains("manifest")) throw UsageError("sample file must start with a manifest line");
                f.manifest = j["manifest"];
                if (f.manifest.value("format", "") != "momentcone-samples/1")
                    throw UsageError("unsupported sample file format");
                f.window = window_from_json(f.manifest.at("window"));
                have_manifest = true;
                continue;
            }
            auto m = measure_from_json(j);
            if (!m.empty() && m.dim() != f.window.dim())
                throw UsageError("sample dimension differs from the manifest window");
            f.samples.push_back(std::move(m));
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError("sample file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!have_manifest) throw UsageError("sample file is empty");
    if (f.samples.empty()) throw UsageError("sample file contains no samples");
    return f;
}

SampleFile read_sample_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open sample file " + path);
    return read_sample_file(in);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
    if (!cfg.model) throw UsageError("simulate needs a model");
    if (!cfg.model->is_atomic())
        throw UsageError("model \"" + cfg.model->name() + "\" has a diffuse part; use the analytic mode instead");
    auto samples = sample_many(*cfg.model, cfg.window, cfg.seed, cfg.samples, cfg.trunc_eps, cfg.threads);
    write_sample_file(out, cfg, samples);
    return exit_decided;
}

int cmd_moments(const RunConfig& cfg, const std::optional<std::string>& sample_path, std::ostream& out)
{
    json info;
    auto source = make_source(cfg, sample_path, info);
    const Window base = source.is_analytic() ? cfg.window : source.window();

    std::vector<std::pair<std::string, OffDiagonalBox>> deltas;
    for (int n = 1; n <= cfg.verdict.n_max; ++n) deltas.push_back({"window:n" + std::to_string(n), OffDiagonalBox::off_diagonal(base, n)});
    for (std::size_t b = 0; b < cfg.boxes.size(); ++b) deltas.push_back({"box" + std::to_string(b + 1), cfg.boxes[b]});

    std::vector<MomentRow> rows;
    rows.push_back({0, {}, "empty", {1.0, 0.0}});
    for (const auto& [id, delta] : deltas) {
        auto idx = multi_indices(delta.n(), cfg.max_total_degree);
        for (auto& p : idx)
            for (auto& v : p) v += 1;
        std::vector<Estimate> est;
        try {
            est = moments(source, idx, delta);
        } catch (const Unavailable& e) {
            std::cerr << "momentcone: skipping " << id << ": " << e.what() << '\n';
            continue;
        }
        for (std::size_t k = 0; k < idx.size(); ++k) rows.push_back({delta.n(), idx[k], id, est[k]});
    }
    write_moment_csv(out, rows);
    return exit_decided;
}

int cmd_verdict(const RunConfig& cfg, const std::optional<std::string>& sample_path, std::ostream& out)
{
    json info;
    auto source = make_source(cfg, sample_path, info);
    Verdict v = point_process_verdict(source, cfg.verdict);
    json report = to_json(v);
    report["source"] = info;
    report["config_hash"] = fmt_hash(cfg.hash);
    out << report.dump(2) << '\n';
    return v.outcome == Outcome::Inconclusive ? exit_inconclusive : exit_decided;
}

int cmd_recover_rho(const RunConfig& cfg, const std::optional<std::string>& sample_path, int n, std::ostream& out)
{
    if (n < 1 || n > 4) throw UsageError("--order must be within 1..4");
    json info;
    auto source = make_source(cfg, sample_path, info);
    const Window w = source.is_analytic() ? cfg.window : source.window();
    const int degree = std::min(cfg.max_total_degree, 2 * (cfg.verdict.degree_cap / 2));

    json report = {{"source", info}, {"n", n}, {"window", window_to_json(w)}};
    auto xd = recover_xi_delta(source, OffDiagonalBox::off_diagonal(w, n), std::max(degree, 2), cfg.verdict.tol);
    json marg = json::array();
    for (const auto& q : xd.marginals) marg.push_back(to_json(q));
    report["xi_marginals"] = marg;
    if (xd.joint) report["joint_consistency"] = xd.consistency;

    auto rho = recover_rho(source, n, w, std::max(degree, 2), cfg.verdict.tol);
    std::vector<YBox> all(n, YBox{w, 0.0, INFINITY});
    std::vector<int> ones(n, 1);
    auto total = rho.box_integral(all, ones);
    report["weighted_mass"] = {{"value", total.value}, {"stderr", total.std_error}};
    if (rho.kind() == CorrelationEstimate::Kind::Atomic) {
        report["kind"] = "atomic";
        json atoms = json::array();
        for (const auto& a : rho.atoms()) {
            json ys = json::array();
            for (const auto& y : a.y) ys.push_back({{"x", y.x.coords}, {"s", y.s}});
            atoms.push_back({{"y", ys}, {"weight", a.weight}, {"sample", a.sample}});
        }
        report["atoms"] = atoms;
    } else {
        report["kind"] = "functional";
    }
    out << report.dump(2) << '\n';
    return exit_decided;
}

}  // namespace momentcone::cli
