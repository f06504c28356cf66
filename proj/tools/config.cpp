/*
 * Copyright 2026 The photonlab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <cmath>
#include <fstream>

#include "photonlab/numeric.hpp"
#include "photonlab_cli.hpp"

namespace photonlab::cli {

using nlohmann::ordered_json;

namespace {

void expect_keys(const ordered_json& obj, std::initializer_list<const char*> allowed,
                 const std::string& ctx) {
    if (!obj.is_object()) throw ConfigError(ctx + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(ctx + ": unknown key '" + key + "'");
    }
}

double num(const ordered_json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key)) throw ConfigError(ctx + ": missing '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(ctx + ": '" + key + "' must be a number");
    return obj[key].get<double>();
}

double q_value(const ordered_json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key)) throw ConfigError(ctx + ": missing '" + key + "'");
    if (obj[key].is_string()) return Rational::parse(obj[key].get<std::string>()).value();
    if (obj[key].is_number()) return obj[key].get<double>();
    throw ConfigError(ctx + ": '" + key + "' must be a number or a rational string");
}

NumberDistribution parse_distribution(const ordered_json& obj, const std::string& ctx) {
    expect_keys(obj, {"offset", "probs"}, ctx);
    const int offset = static_cast<int>(num(obj, "offset", ctx));
    if (!obj.contains("probs") || !obj["probs"].is_array())
        throw ConfigError(ctx + ": 'probs' must be an array");
    std::vector<double> probs = obj["probs"].get<std::vector<double>>();
    double sum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        sum += probs[i];
        mean += probs[i] * (offset + static_cast<double>(i));
    }
    double var = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double d = offset + static_cast<double>(i) - mean;
        var += probs[i] * d * d;
    }
    return NumberDistribution(offset, std::move(probs), mean, var, std::max(0.0, 1.0 - sum));
}

SourceSpec parse_source(const ordered_json& obj, const std::string& ctx) {
    if (!obj.is_object() || !obj.contains("family"))
        throw ConfigError(ctx + ": source needs a 'family'");
    const std::string family = obj["family"].get<std::string>();
    if (family == "poissonian") {
        expect_keys(obj, {"family", "mean"}, ctx);
        return SourceSpec::poissonian(num(obj, "mean", ctx));
    }
    if (family == "number") {
        expect_keys(obj, {"family", "n"}, ctx);
        return SourceSpec::number_state(static_cast<long long>(num(obj, "n", ctx)));
    }
    if (family == "binomial") {
        expect_keys(obj, {"family", "q", "mean"}, ctx);
        return SourceSpec::binomial(q_value(obj, "q", ctx), num(obj, "mean", ctx));
    }
    if (family == "super_poissonian") {
        expect_keys(obj, {"family", "Q", "mean"}, ctx);
        return SourceSpec::super_poissonian(num(obj, "Q", ctx), num(obj, "mean", ctx));
    }
    if (family == "thermal") {
        expect_keys(obj, {"family", "mean"}, ctx);
        return SourceSpec::thermal(num(obj, "mean", ctx));
    }
    if (family == "two_number_mixture") {
        expect_keys(obj, {"family", "mean", "dn"}, ctx);
        return SourceSpec::two_number_mixture(num(obj, "mean", ctx), num(obj, "dn", ctx));
    }
    if (family == "custom_diagonal") {
        expect_keys(obj, {"family", "offset", "probs"}, ctx);
        ordered_json inner = obj;
        inner.erase("family");
        return SourceSpec::custom_diagonal(parse_distribution(inner, ctx));
    }
    if (family == "custom_radial") {
        expect_keys(obj, {"family", "nodes_u", "weights"}, ctx);
        return SourceSpec::custom_radial(RadialDensity::tabulated(
            obj["nodes_u"].get<std::vector<double>>(), obj["weights"].get<std::vector<double>>()));
    }
    throw ConfigError(ctx + ": unknown source family '" + family + "'");
}

SourcePair parse_sources(const ordered_json& obj) {
    if (!obj.is_object() || !obj.contains("type"))
        throw ConfigError("sources: needs a 'type'");
    const std::string type = obj["type"].get<std::string>();
    if (type == "independent") {
        expect_keys(obj, {"type", "a", "b"}, "sources");
        return SourcePair::independent(parse_source(obj["a"], "sources.a"),
                                       parse_source(obj["b"], "sources.b"));
    }
    if (type == "common_number") {
        expect_keys(obj, {"type", "n", "c2", "delta"}, "sources");
        const double c2 = num(obj, "c2", "sources");
        if (c2 < 0.0 || c2 > 1.0) throw ConfigError("sources: c2 must lie in [0, 1]");
        return SourcePair::common_number(static_cast<long long>(num(obj, "n", "sources")),
                                         std::sqrt(c2), std::sqrt(1.0 - c2), num(obj, "delta", "sources"));
    }
    if (type == "common_diagonal") {
        expect_keys(obj, {"type", "p", "c2", "delta"}, "sources");
        const double c2 = num(obj, "c2", "sources");
        if (c2 < 0.0 || c2 > 1.0) throw ConfigError("sources: c2 must lie in [0, 1]");
        const SourceSpec p = parse_source(obj["p"], "sources.p");
        return SourcePair::common_diagonal(p.number_distribution(), std::sqrt(c2),
                                           std::sqrt(1.0 - c2), num(obj, "delta", "sources"));
    }
    if (type == "referenced_phase") {
        expect_keys(obj, {"type", "a", "b", "delta"}, "sources");
        return SourcePair::referenced_phase(parse_source(obj["a"], "sources.a"),
                                            parse_source(obj["b"], "sources.b"),
                                            num(obj, "delta", "sources"));
    }
    throw ConfigError("sources: unknown type '" + type + "'");
}

DetectorSpec parse_detector(const ordered_json& obj, const std::string& ctx) {
    if (obj.contains("matrix")) {
        expect_keys(obj, {"matrix"}, ctx);
        const auto& m = obj["matrix"];
        expect_keys(m, {"aa", "bb", "ab_re", "ab_im"}, ctx + ".matrix");
        const cd ab(num(m, "ab_re", ctx), num(m, "ab_im", ctx));
        return DetectorSpec::from_matrix({cd(num(m, "aa", ctx)), ab, std::conj(ab), cd(num(m, "bb", ctx))});
    }
    expect_keys(obj, {"r_aa", "r_bb", "xi", "theta", "theta_pi"}, ctx);
    if (obj.contains("theta") && obj.contains("theta_pi"))
        throw ConfigError(ctx + ": give either 'theta' or 'theta_pi', not both");
    double theta = 0.0;
    if (obj.contains("theta")) theta = num(obj, "theta", ctx);
    if (obj.contains("theta_pi")) theta = num(obj, "theta_pi", ctx) * kPi;
    return DetectorSpec(num(obj, "r_aa", ctx), num(obj, "r_bb", ctx), num(obj, "xi", ctx), theta);
}

} // namespace

RunConfig parse_config(const ordered_json& doc) {
    expect_keys(doc, {"sources", "detectors", "engine", "grid", "delta", "seed"}, "config");
    RunConfig cfg;
    if (!doc.contains("sources")) throw ConfigError("config: missing 'sources'");
    if (!doc.contains("detectors")) throw ConfigError("config: missing 'detectors'");
    try {
        cfg.sources = parse_sources(doc["sources"]);
        if (!doc["detectors"].is_array() || doc["detectors"].empty())
            throw ConfigError("config: 'detectors' must be a non-empty array");
        std::vector<DetectorSpec> specs;
        for (std::size_t i = 0; i < doc["detectors"].size(); ++i)
            specs.push_back(parse_detector(doc["detectors"][i],
                                           "detectors[" + std::to_string(i) + "]"));
        cfg.detectors = DetectorArray(std::move(specs));
    } catch (const DomainError& e) {
        // Physical invariants of referenced types are re-checked on load.
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (doc.contains("engine")) {
        const auto& eng = doc["engine"];
        expect_keys(eng,
                    {"name", "delta_nodes_init", "delta_nodes_max", "delta_tol", "fixed_delta_nodes",
                     "radial_nodes", "radial_refine", "mixture_weight_floor", "threads"},
                    "engine");
        if (eng.contains("name")) cfg.engine = engine_from_name(eng["name"].get<std::string>());
        if (eng.contains("delta_nodes_init")) cfg.opts.delta_nodes_init = eng["delta_nodes_init"].get<int>();
        if (eng.contains("delta_nodes_max")) cfg.opts.delta_nodes_max = eng["delta_nodes_max"].get<int>();
        if (eng.contains("delta_tol")) cfg.opts.delta_tol = eng["delta_tol"].get<double>();
        if (eng.contains("fixed_delta_nodes")) cfg.opts.fixed_delta_nodes = eng["fixed_delta_nodes"].get<int>();
        if (eng.contains("radial_nodes")) cfg.opts.radial_nodes = eng["radial_nodes"].get<int>();
        if (eng.contains("radial_refine")) cfg.opts.radial_refine = eng["radial_refine"].get<bool>();
        if (eng.contains("mixture_weight_floor"))
            cfg.opts.mixture_weight_floor = eng["mixture_weight_floor"].get<double>();
        if (eng.contains("threads")) cfg.opts.threads = eng["threads"].get<int>();
    }
    if (doc.contains("grid")) {
        expect_keys(doc["grid"], {"max"}, "grid");
        if (doc["grid"].contains("max")) {
            cfg.grid_max = doc["grid"]["max"].get<std::vector<int>>();
            if (cfg.grid_max.size() != static_cast<std::size_t>(cfg.detectors->size()))
                throw ConfigError("grid.max: one entry per detector required");
        }
    }
    if (doc.contains("delta")) cfg.delta = doc["delta"].get<double>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc);
}

std::vector<int> parse_axes(const std::string& text, int detector_count) {
    std::vector<int> axes;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.size() < 2 || tok[0] != 'n')
            throw ConfigError("axes: expected labels like n1,n2, got '" + tok + "'");
        const int idx = std::stoi(tok.substr(1)) - 1;
        if (idx < 0 || idx >= detector_count)
            throw ConfigError("axes: detector " + tok + " out of range");
        axes.push_back(idx);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (axes.empty()) throw ConfigError("axes: empty list");
    for (std::size_t i = 1; i < axes.size(); ++i)
        if (axes[i] <= axes[i - 1]) throw ConfigError("axes: must be strictly increasing");
    return axes;
}

std::vector<std::pair<int, int>> parse_fixed(const std::string& text, int detector_count) {
    std::vector<std::pair<int, int>> fixed;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const auto eq = tok.find('=');
        if (eq == std::string::npos || tok.size() < 4 || tok[0] != 'n')
            throw ConfigError("fix: expected assignments like n1=106, got '" + tok + "'");
        const int idx = std::stoi(tok.substr(1, eq - 1)) - 1;
        const int value = std::stoi(tok.substr(eq + 1));
        if (idx < 0 || idx >= detector_count)
            throw ConfigError("fix: detector n" + std::to_string(idx + 1) + " out of range");
        if (value < 0) throw ConfigError("fix: negative count");
        fixed.emplace_back(idx, value);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (fixed.empty()) throw ConfigError("fix: empty list");
    return fixed;
}

} // namespace photonlab::cli
