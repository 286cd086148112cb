#include "harbor/est/transforms.hpp"

#include "harbor/util/errors.hpp"

#include <cmath>

namespace harbor::est {

Transform transform_from_name(const std::string& name) {
    if (name == "identity") return Transform::Identity;
    if (name == "log") return Transform::Log;
    if (name == "log1p") return Transform::Log1p;
    if (name == "arcsinh" || name == "asinh") return Transform::Arcsinh;
    if (name == "extensive") return Transform::Extensive;
    if (name == "intensive") return Transform::Intensive;
    throw ConfigError("unknown outcome transform '" + name + "'");
}

std::string transform_name(Transform t) {
    switch (t) {
        case Transform::Identity: return "identity";
        case Transform::Log: return "log";
        case Transform::Log1p: return "log1p";
        case Transform::Arcsinh: return "arcsinh";
        case Transform::Extensive: return "extensive";
        case Transform::Intensive: return "intensive";
    }
    return "identity";
}

TransformedOutcome transform_outcome(std::span<const double> values, Transform kind) {
    TransformedOutcome out;
    out.values.reserve(values.size());
    out.include.assign(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double y = values[i];
        if (y < 0.0 && kind != Transform::Identity) {
            throw NumericError("transform_outcome: negative value under a log-family transform");
        }
        switch (kind) {
            case Transform::Identity:
                out.values.push_back(y);
                break;
            case Transform::Log:
                if (y <= 0.0) {
                    throw NumericError(
                        "transform_outcome: log of a non-positive value; use intensive, "
                        "log1p or arcsinh for outcomes with zeros");
                }
                out.values.push_back(std::log(y));
                break;
            case Transform::Log1p:
                out.values.push_back(std::log1p(y));
                break;
            case Transform::Arcsinh:
                out.values.push_back(std::asinh(y));
                break;
            case Transform::Extensive:
                out.values.push_back(y > 0.0 ? 1.0 : 0.0);
                break;
            case Transform::Intensive:
                if (y > 0.0) {
                    out.values.push_back(std::log(y));
                } else {
                    out.values.push_back(0.0);
                    out.include[i] = 0;
                }
                break;
        }
    }
    return out;
}

} // namespace harbor::est
