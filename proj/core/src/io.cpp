#include "isodyn/io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "isodyn/expression.hpp"
#include "isodyn/isochrony.hpp"

namespace isodyn::io {

using nlohmann::json;

namespace {

double need_param(const ModelSpec& spec, const std::string& key) {
    auto it = spec.params.find(key);
    if (it == spec.params.end())
        throw ValidationError("model spec '" + spec.family + "': missing parameter '" + key +
                              "'");
    return it->second;
}

double param_or(const ModelSpec& spec, const std::string& key, double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
}

std::optional<Interval> interval_from(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 2)
        throw ValidationError(std::string("spec: '") + key + "' must be [lo, hi]");
    return Interval{arr[0].get<double>(), arr[1].get<double>()};
}

ModelSpec model_spec_from(const json& j) {
    ModelSpec spec;
    spec.family = j.at("family").get<std::string>();
    if (j.contains("params"))
        for (const auto& [k, v] : j.at("params").items()) spec.params[k] = v.get<double>();
    spec.domain = interval_from(j, "domain");
    if (j.contains("source")) spec.source = j.at("source").get<std::string>();
    if (j.contains("coeffs"))
        for (const auto& v : j.at("coeffs")) spec.coeffs.push_back(v.get<double>());
    return spec;
}

} // namespace

ModelSpec model_spec_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("model spec: " + std::string(e.what()), e.byte, "valid JSON");
    }
    return model_spec_from(j);
}

ModelSpec model_spec_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model spec file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return model_spec_from_json(text.str());
}

std::string model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["family"] = spec.family;
    json params = json::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    j["params"] = params;
    if (spec.domain) j["domain"] = {spec.domain->lo, spec.domain->hi};
    if (!spec.source.empty()) j["source"] = spec.source;
    if (!spec.coeffs.empty()) j["coeffs"] = spec.coeffs;
    return j.dump(2);
}

ForceModel build_model(const ModelSpec& spec) {
    const auto& f = spec.family;
    if (f == "harmonic") return make_harmonic(param_or(spec, "omega", 1.0), spec.domain);
    if (f == "pendulum") return make_pendulum(spec.domain);
    if (f == "cubic")
        return make_cubic(need_param(spec, "alpha"), param_or(spec, "beta", 0.0),
                          param_or(spec, "gamma", 0.0), spec.domain);
    if (f == "sqrt_iso")
        return make_sqrt_isochrone(param_or(spec, "omega", 1.0), need_param(spec, "lambda"),
                                   spec.domain);
    if (f == "quartic_iso")
        return make_quartic_isochrone(param_or(spec, "omega", 1.0),
                                      need_param(spec, "lambda"), spec.domain);
    if (f == "generic_super")
        return make_generic_superintegrable(param_or(spec, "omega", 1.0),
                                            need_param(spec, "b1"), need_param(spec, "c1"),
                                            spec.domain);
    if (f == "expression") {
        if (spec.source.empty())
            throw ValidationError("model spec 'expression': missing 'source'");
        if (!spec.domain)
            throw ValidationError("model spec 'expression': missing 'domain'");
        return model_from_expression(spec.source, *spec.domain);
    }
    if (f == "designed_involution") {
        if (spec.source.empty() || !spec.domain)
            throw ValidationError("model spec 'designed_involution': needs 'source' and "
                                  "'domain'");
        const Expression h = Expression::parse(spec.source);
        InvolutionPayload payload;
        payload.h = [h](double x) { return h(x); };
        return design_from_involution(payload, param_or(spec, "omega", 1.0), *spec.domain);
    }
    if (f == "designed_even") {
        if (spec.source.empty() || !spec.domain)
            throw ValidationError("model spec 'designed_even': needs 'source' and 'domain' "
                                  "(the t range)");
        const Expression fe = Expression::parse(spec.source);
        return design_from_even([fe](double t) { return fe(t); }, *spec.domain,
                                param_or(spec, "omega", 1.0));
    }
    if (f == "designed_period") {
        if (spec.coeffs.empty())
            throw ValidationError("model spec 'designed_period': missing 'coeffs'");
        return design_from_period(spec.coeffs, param_or(spec, "omega", 1.0),
                                  need_param(spec, "y_range"))
            .model;
    }
    throw ValidationError("unknown model family: " + f);
}

DesignRequest design_request_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError("design spec: " + std::string(e.what()), e.byte, "valid JSON");
    }
    DesignRequest r;
    r.kind = j.at("kind").get<std::string>();
    if (j.contains("omega")) r.omega = j.at("omega").get<double>();
    if (j.contains("coeffs"))
        for (const auto& v : j.at("coeffs")) r.coeffs.push_back(v.get<double>());
    if (j.contains("y_range")) r.y_range = j.at("y_range").get<double>();
    if (j.contains("h_source")) r.h_source = j.at("h_source").get<std::string>();
    if (j.contains("f_source")) r.f_source = j.at("f_source").get<std::string>();
    r.domain = interval_from(j, "domain");
    r.t_range = interval_from(j, "t_range");
    return r;
}

DesignOutcome run_design(const DesignRequest& request) {
    DesignOutcome out;
    if (request.kind == "from_period_polynomial") {
        if (request.coeffs.empty())
            throw ValidationError("design: from_period_polynomial needs 'coeffs'");
        if (!(request.y_range > 0.0))
            throw ValidationError("design: from_period_polynomial needs 'y_range' > 0");
        PeriodDesign design =
            design_from_period(request.coeffs, request.omega, request.y_range);
        out.u_inverse_coeffs = design.u_inverse_coeffs;
        out.spec.family = "designed_period";
        out.spec.params["omega"] = request.omega;
        out.spec.params["y_range"] = request.y_range;
        out.spec.coeffs = request.coeffs;
        return out;
    }
    if (request.kind == "from_involution") {
        if (request.h_source.empty() || !request.domain)
            throw ValidationError("design: from_involution needs 'h_source' and 'domain'");
        const Expression h = Expression::parse(request.h_source);
        InvolutionPayload payload;
        payload.h = [h](double x) { return h(x); };
        design_from_involution(payload, request.omega, *request.domain); // validates
        out.spec.family = "designed_involution";
        out.spec.params["omega"] = request.omega;
        out.spec.domain = request.domain;
        out.spec.source = request.h_source;
        return out;
    }
    if (request.kind == "from_even_function") {
        if (request.f_source.empty() || !request.t_range)
            throw ValidationError("design: from_even_function needs 'f_source' and "
                                  "'t_range'");
        const Expression fe = Expression::parse(request.f_source);
        design_from_even([fe](double t) { return fe(t); }, *request.t_range,
                         request.omega); // validates
        out.spec.family = "designed_even";
        out.spec.params["omega"] = request.omega;
        out.spec.domain = request.t_range;
        out.spec.source = request.f_source;
        return out;
    }
    throw ValidationError("design: unknown kind '" + request.kind + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw ValidationError("cannot open output file: " + path);
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::header(std::span<const std::string> names) {
    for (std::size_t i = 0; i < names.size(); ++i)
        out_ << (i ? "," : "") << names[i];
    out_ << "\n";
}

void CsvWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_double(values[i]);
    out_ << "\n";
}

void CsvWriter::row_with_tag(std::span<const double> values, const std::string& tag) {
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format_double(values[i]);
    out_ << (values.empty() ? "" : ",") << tag << "\n";
}

} // namespace isodyn::io
