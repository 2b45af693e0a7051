#include "gkflow_cli/scenario_file.hpp"

#include "gkflow/errors.hpp"
#include "gkflow/scenarios.hpp"
#include "gkflow_cli/app.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace gkflow::cli {

namespace {

using nlohmann::json;

class Diagnostics {
public:
    Diagnostics(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        std::ostringstream out;
        out << origin_ << ":" << line_of(key) << ": key '" << key << "': " << message;
        throw InputError(out.str());
    }

    [[nodiscard]] std::size_t line_at(std::size_t byte) const {
        const std::size_t end = std::min(byte, text_.size());
        return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
    }

    [[nodiscard]] const std::string& origin() const { return origin_; }

private:
    /// Line of the first occurrence of the last path component as a quoted key.
    [[nodiscard]] std::size_t line_of(const std::string& key) const {
        const std::string leaf = key.substr(key.find_last_of('.') + 1);
        const std::size_t at = text_.find("\"" + leaf + "\"");
        return at == std::string::npos ? 1 : line_at(at);
    }

    std::string text_;
    std::string origin_;
};

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& prefix,
                    const Diagnostics& diag) {
    for (const auto& [key, value] : object.items())
        if (!allowed.count(key)) diag.fail(prefix + key, "unknown key");
}

double number(const json& value, const std::string& key, const Diagnostics& diag) {
    if (!value.is_number()) diag.fail(key, "expected a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) diag.fail(key, "expected a finite number");
    return v;
}

double positive(const json& value, const std::string& key, const Diagnostics& diag) {
    const double v = number(value, key, diag);
    if (v <= 0.0) diag.fail(key, "expected a positive number");
    return v;
}

std::string text(const json& value, const std::string& key, const Diagnostics& diag) {
    if (!value.is_string()) diag.fail(key, "expected a string");
    return value.get<std::string>();
}

Vec vector4(const json& value, const std::string& key, const Diagnostics& diag) {
    if (!value.is_array() || value.size() != 4) diag.fail(key, "expected an array of 4 numbers");
    Vec out(4);
    for (int k = 0; k < 4; ++k) out(k) = number(value[k], key, diag);
    return out;
}

void apply_tolerances(const json& value, flow::Tolerances& tol, const Diagnostics& diag) {
    if (!value.is_object()) diag.fail("tolerances", "expected an object");
    reject_unknown(value, {"nijenhuis", "torsion", "dh", "flow_identity", "lie", "pullback", "compatibility", "collar"},
                   "tolerances.", diag);
    auto set = [&](const char* key, double& field) {
        if (value.contains(key)) field = number(value[key], std::string("tolerances.") + key, diag);
        if (field < 0.0) diag.fail(std::string("tolerances.") + key, "must be nonnegative");
    };
    set("nijenhuis", tol.nijenhuis);
    set("torsion", tol.torsion);
    set("dh", tol.dh);
    set("flow_identity", tol.flow_identity);
    set("lie", tol.lie);
    set("pullback", tol.pullback);
    set("compatibility", tol.compatibility);
    set("collar", tol.collar);
}

void apply_grid(const json& value, std::vector<int>& counts, double& inset, int dim, const Diagnostics& diag) {
    if (value.is_number_integer()) {
        const int n = value.get<int>();
        if (n < 2) diag.fail("grid", "expected at least 2 points per axis");
        counts.assign(dim, n);
        return;
    }
    if (!value.is_object()) diag.fail("grid", "expected an integer or {counts, inset}");
    reject_unknown(value, {"counts", "inset"}, "grid.", diag);
    if (value.contains("counts")) {
        const json& c = value["counts"];
        if (!c.is_array() || static_cast<int>(c.size()) != dim) diag.fail("grid.counts", "expected one count per axis");
        counts.clear();
        for (const auto& e : c) {
            if (!e.is_number_integer() || e.get<int>() < 1) diag.fail("grid.counts", "expected positive integers");
            counts.push_back(e.get<int>());
        }
    }
    if (value.contains("inset")) {
        inset = number(value["inset"], "grid.inset", diag);
        if (inset < 0.0) diag.fail("grid.inset", "must be nonnegative");
    }
}

void apply_numerics(const json& value, flow::Numerics& num, const Diagnostics& diag) {
    if (!value.is_object()) diag.fail("numerics", "expected an object");
    reject_unknown(value, {"h", "dt", "panels"}, "numerics.", diag);
    if (value.contains("h")) num.h = positive(value["h"], "numerics.h", diag);
    if (value.contains("dt")) num.dt = positive(value["dt"], "numerics.dt", diag);
    if (value.contains("panels")) {
        if (!value["panels"].is_number_integer() || value["panels"].get<int>() < 2)
            diag.fail("numerics.panels", "expected an even integer >= 2");
        num.panels = value["panels"].get<int>();
        if (num.panels % 2 != 0) diag.fail("numerics.panels", "Simpson quadrature needs an even panel count");
    }
}

std::vector<double> schedule(const json& value, const Diagnostics& diag) {
    if (!value.is_array() || value.empty()) diag.fail("t_schedule", "expected a nonempty array of times");
    std::vector<double> out;
    for (const auto& e : value) {
        const double t = number(e, "t_schedule", diag);
        if (t < 0.0) diag.fail("t_schedule", "times must be nonnegative");
        out.push_back(t);
    }
    return out;
}

}  // namespace

ScenarioFile parse_scenario_json(std::string_view text_view, std::string_view origin) {
    const Diagnostics diag(text_view, origin);
    json doc;
    try {
        doc = json::parse(text_view.begin(), text_view.end());
    } catch (const json::parse_error& e) {
        std::ostringstream out;
        out << diag.origin() << ":" << diag.line_at(e.byte) << ": malformed JSON: " << e.what();
        throw InputError(out.str());
    }
    if (!doc.is_object()) throw InputError(std::string(origin) + ":1: scenario document must be a JSON object");
    reject_unknown(doc, {"name", "builtin", "domain", "fields", "potential", "tolerances", "grid", "numerics", "t_schedule"},
                   "", diag);

    std::optional<flow::Scenario> scenario;
    if (doc.contains("builtin")) {
        const std::string name = text(doc["builtin"], "builtin", diag);
        for (const char* key : {"domain", "fields", "potential"})
            if (doc.contains(key)) diag.fail(key, "not allowed together with 'builtin'");
        try {
            scenario = scenarios::make_scenario(name);
        } catch (const InvalidStructureError& e) {
            diag.fail("builtin", e.what());
        }
    } else {
        if (!doc.contains("domain")) diag.fail("domain", "required unless 'builtin' is given");
        const json& domain = doc["domain"];
        if (!domain.is_object()) diag.fail("domain", "expected {lower, upper}");
        reject_unknown(domain, {"lower", "upper"}, "domain.", diag);
        if (!domain.contains("lower") || !domain.contains("upper")) diag.fail("domain", "needs both lower and upper");
        scenarios::ExpressionSpec spec;
        spec.lower = vector4(domain["lower"], "domain.lower", diag);
        spec.upper = vector4(domain["upper"], "domain.upper", diag);
        if (((spec.upper - spec.lower).array() <= 0.0).any()) diag.fail("domain.upper", "must exceed lower on every axis");
        if (doc.contains("name")) spec.name = text(doc["name"], "name", diag);
        if (doc.contains("fields")) {
            const json& fields = doc["fields"];
            if (!fields.is_object()) diag.fail("fields", "expected an object");
            reject_unknown(fields, {"metric", "poisson"}, "fields.", diag);
            if (fields.contains("metric")) spec.metric = text(fields["metric"], "fields.metric", diag);
            if (fields.contains("poisson")) spec.poisson = text(fields["poisson"], "fields.poisson", diag);
        }
        if (doc.contains("potential")) {
            const json& potential = doc["potential"];
            if (potential.is_string()) {
                spec.potential = potential.get<std::string>();
            } else {
                if (!potential.is_object()) diag.fail("potential", "expected a string or {f}");
                reject_unknown(potential, {"f"}, "potential.", diag);
                if (potential.contains("f")) spec.potential = text(potential["f"], "potential.f", diag);
            }
        }
        try {
            scenario = scenarios::expression_scenario(spec);
        } catch (const ParseError& e) {
            diag.fail("fields", e.what());
        } catch (const Error& e) {
            diag.fail("fields", e.what());
        }
        // Parse errors in the potential surface only when evaluated; probe once at the box centre.
        try {
            (void)scenario->potential.f(0.5 * (spec.lower + spec.upper));
            (void)scenario->g(0.5 * (spec.lower + spec.upper));
        } catch (const Error& e) {
            diag.fail("potential", e.what());
        }
    }
    if (doc.contains("name") && doc.contains("builtin")) scenario->name = text(doc["name"], "name", diag);
    if (doc.contains("tolerances")) apply_tolerances(doc["tolerances"], scenario->tolerances, diag);
    if (doc.contains("grid"))
        apply_grid(doc["grid"], scenario->grid, scenario->grid_inset, scenario->domain.dim(), diag);
    if (doc.contains("numerics")) apply_numerics(doc["numerics"], scenario->numerics, diag);
    std::vector<double> times = doc.contains("t_schedule") ? schedule(doc["t_schedule"], diag)
                                                           : std::vector<double>{scenario->default_t};
    return {std::move(*scenario), std::move(times)};
}

ScenarioFile load_scenario(const std::string& name_or_path) {
    for (const auto& entry : scenarios::scenario_library())
        if (entry.name == name_or_path) {
            flow::Scenario s = entry.make();
            const double t = s.default_t;
            return {std::move(s), {t}};
        }
    const std::filesystem::path path(name_or_path);
    if (!std::filesystem::is_regular_file(path))
        throw InputError("'" + name_or_path + "' is neither a built-in scenario nor a readable file");
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + name_or_path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_json(buffer.str(), name_or_path);
}

}  // namespace gkflow::cli
