#ifndef ISODYN_IO_HPP
#define ISODYN_IO_HPP

#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isodyn/force_model.hpp"

namespace isodyn::io {

/// JSON-carried model specification. Families: harmonic, pendulum, cubic,
/// sqrt_iso, quartic_iso, generic_super, expression, and the design outputs
/// designed_involution, designed_even, designed_period.
struct ModelSpec {
    std::string family;
    std::map<std::string, double> params;
    std::optional<Interval> domain;
    std::string source;          // expression families: g(x), h(x) or f(t)
    std::vector<double> coeffs;  // designed_period: period coefficients t_k
};

ModelSpec model_spec_from_json(const std::string& json_text);
ModelSpec model_spec_from_file(const std::string& path);
std::string model_spec_to_json(const ModelSpec& spec);

ForceModel build_model(const ModelSpec& spec);

/// Design request, JSON form:
///   {"kind": "from_period_polynomial", "omega": 1.0,
///    "coeffs": [1.0, -1.0, 1.0], "y_range": 0.9}
///   {"kind": "from_involution", "omega": 1.0, "h_source": "-x/(1+x)",
///    "domain": [-0.5, 1.0]}
///   {"kind": "from_even_function", "omega": 1.0, "f_source": "x^2",
///    "t_range": [-0.4, 0.4]}
struct DesignRequest {
    std::string kind;
    double omega = 1.0;
    std::vector<double> coeffs;
    double y_range = 0.0;
    std::string h_source;
    std::string f_source;
    std::optional<Interval> domain;
    std::optional<Interval> t_range;
};

DesignRequest design_request_from_json(const std::string& json_text);

struct DesignOutcome {
    ModelSpec spec;                       // round-trippable model spec
    std::vector<double> u_inverse_coeffs; // from_period only
};

/// Execute a design request; the returned spec rebuilds the same model.
DesignOutcome run_design(const DesignRequest& request);

/// 17-significant-digit decimal form ('.' decimal point, no separators).
std::string format_double(double v);

/// CSV file with '#' comment lines, a header row, and format_double reals.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void comment(const std::string& line);
    void header(std::span<const std::string> names);
    void row(std::span<const double> values);
    void row_with_tag(std::span<const double> values, const std::string& tag);

private:
    std::ofstream out_;
};

} // namespace isodyn::io

#endif
