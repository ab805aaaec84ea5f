#include "svi/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "svi/errors.hpp"

namespace svi {

namespace {

using nlohmann::json;

SetFunctionProps measureProps(bool pointwiseNonAtomic) {
    SetFunctionProps p;
    p.finitelyAdditive = true;
    p.countablyAdditive = true;
    p.monotone = true;
    p.nullAdditive = true;
    p.nullNullAdditive = true;
    p.sigmaNullNullAdditive = true;
    p.continuousFromBelow = true;
    p.pointwiseNonAtomic = pointwiseNonAtomic;
    return p;
}

// monotone distortion of an additive mass: only the empty set is null, so the
// null-family flags hold vacuously, but additivity is gone
SetFunctionProps distortionProps(bool pointwiseNonAtomic) {
    SetFunctionProps p;
    p.monotone = true;
    p.nullAdditive = true;
    p.nullNullAdditive = true;
    p.sigmaNullNullAdditive = true;
    p.continuousFromBelow = true;
    p.pointwiseNonAtomic = pointwiseNonAtomic;
    return p;
}

// mass of the deepest cell the classifier probes for point atoms
double probeCellMass(const SpaceModel& s, double exponent) {
    int probe = std::min(16, s.maxDepth);
    return std::pow(std::ldexp(1.0, -probe), exponent);
}

// c1*l + c2*l^2 + ..., powers accumulated by multiplication so small dyadic
// masses come out exact
double polyOfLebesgue(const std::vector<double>& coeffs, double l) {
    double acc = 0.0;
    double pw = 1.0;
    for (double c : coeffs) {
        pw *= l;
        acc += c * pw;
    }
    return acc;
}

SetFunction makePoly(const SpaceModel& s, std::vector<double> coeffs, std::string id) {
    for (double c : coeffs)
        if (c < 0.0) throw CatalogError("catalog: poly coefficients must be nonnegative");
    double probeMass = 0.0;
    {
        int probe = std::min(16, s.maxDepth);
        probeMass = polyOfLebesgue(coeffs, std::ldexp(1.0, -probe));
    }
    bool additive = true;
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        if (coeffs[k] != 0.0) additive = false;
    SetFunctionProps props =
        additive ? measureProps(probeMass < 1e-3) : distortionProps(probeMass < 1e-3);
    return SetFunction{s,
                       [coeffs = std::move(coeffs)](const MeasurableSet& a) {
                           return polyOfLebesgue(coeffs, a.lebesgue());
                       },
                       props, std::move(id)};
}

SetFunction makePower(const SpaceModel& s, double exponent, std::string id) {
    if (!(exponent > 0.0)) throw CatalogError("catalog: power exponent must be positive");
    std::function<double(const MeasurableSet&)> ev;
    if (exponent == 2.0)
        ev = [](const MeasurableSet& a) {
            double l = a.lebesgue();
            return l * l;
        };
    else if (exponent == 0.5)
        ev = [](const MeasurableSet& a) { return std::sqrt(a.lebesgue()); };
    else
        ev = [exponent](const MeasurableSet& a) { return std::pow(a.lebesgue(), exponent); };
    SetFunctionProps props = exponent == 1.0 ? measureProps(probeCellMass(s, 1.0) < 1e-3)
                                             : distortionProps(probeCellMass(s, exponent) < 1e-3);
    return SetFunction{s, std::move(ev), props, std::move(id)};
}

SetFunction makeDirac(const SpaceModel& s, std::int64_t num, std::int64_t den, double mass,
                      std::string id) {
    if (den <= 0 || num < 0 || num > den) throw CatalogError("catalog: dirac point must be in [0,1]");
    if (!(mass > 0.0)) throw CatalogError("catalog: dirac mass must be positive");
    return SetFunction{s,
                       [num, den, mass](const MeasurableSet& a) {
                           return a.containsRational(num, den) ? mass : 0.0;
                       },
                       measureProps(mass < 1e-3), std::move(id)};
}

SetFunction makeWeighted(std::vector<double> weights, std::string id) {
    if (weights.empty() || weights.size() > 64)
        throw CatalogError("catalog: weighted needs 1..64 weights");
    for (double w : weights)
        if (w < 0.0) throw CatalogError("catalog: weights must be nonnegative");
    double top = *std::max_element(weights.begin(), weights.end());
    SpaceModel s = SpaceModel::finite(static_cast<int>(weights.size()));
    return SetFunction{s,
                       [weights = std::move(weights)](const MeasurableSet& a) {
                           double m = 0.0;
                           for (std::size_t i = 0; i < weights.size(); ++i)
                               if (a.mask() & (1ull << i)) m += weights[i];
                           return m;
                       },
                       measureProps(top == 0.0), std::move(id)};
}

SetFunction makeCounting(int points, std::string id) {
    if (points < 1 || points > 64) throw CatalogError("catalog: counting needs 1..64 points");
    SpaceModel s = SpaceModel::finite(points);
    return SetFunction{s,
                       [](const MeasurableSet& a) { return static_cast<double>(a.elementCount()); },
                       measureProps(false), std::move(id)};
}

SetFunction makeThreshold(int points, int threshold, std::string id) {
    if (points < 2 || points > 64) throw CatalogError("catalog: threshold needs 2..64 points");
    if (threshold < 2 || threshold > points)
        throw CatalogError("catalog: threshold level must be in 2..points");
    SpaceModel s = SpaceModel::finite(points);
    SetFunctionProps props; // jumping at the threshold kills every additivity flavor
    props.monotone = true;
    props.continuousFromBelow = true;
    props.pointwiseNonAtomic = true; // singletons sit below the threshold
    return SetFunction{s,
                       [threshold](const MeasurableSet& a) {
                           return a.elementCount() >= threshold ? 1.0 : 0.0;
                       },
                       props, std::move(id)};
}

SetFunction buildBuiltinMu(const std::string& id, const SpaceModel& dyadic) {
    if (id == "lebesgue")
        return SetFunction{dyadic, [](const MeasurableSet& a) { return a.lebesgue(); },
                           measureProps(true), "lebesgue"};
    if (id == "dirac-third") return makeDirac(dyadic, 1, 3, 2.0, "dirac-third");
    if (id == "lebesgue-squared")
        return SetFunction{dyadic,
                           [](const MeasurableSet& a) {
                               double l = a.lebesgue();
                               return l * l;
                           },
                           distortionProps(true), "lebesgue-squared"};
    if (id == "lebesgue-plus-squared")
        return SetFunction{dyadic,
                           [](const MeasurableSet& a) {
                               double l = a.lebesgue();
                               return l + l * l;
                           },
                           distortionProps(true), "lebesgue-plus-squared"};
    if (id == "sqrt-lebesgue")
        return SetFunction{dyadic,
                           [](const MeasurableSet& a) { return std::sqrt(a.lebesgue()); },
                           distortionProps(probeCellMass(dyadic, 0.5) < 1e-3), "sqrt-lebesgue"};
    if (id == "finite-counting") return makeCounting(6, "finite-counting");
    if (id == "finite-weighted-null")
        return makeWeighted({0.5, 0.0, 0.25, 0.0, 0.25, 0.0}, "finite-weighted-null");
    if (id == "finite-threshold") return makeThreshold(6, 2, "finite-threshold");
    throw CatalogError("unknown set function id: " + id);
}

Box stepValue(double t, double at, const Box& left, const Box& right) {
    return t < at ? left : right;
}

Multifunction makeConstant(Box value, std::string id) {
    double m = norm(value);
    std::size_t d = value.dim();
    return Multifunction{[value = std::move(value)](double) { return value; }, m, d, true,
                         std::move(id), std::nullopt};
}

Multifunction makeStep(std::int64_t num, std::int64_t den, Box left, Box right, std::string id) {
    if (den <= 0 || num < 0 || num > den) throw CatalogError("catalog: step point must be in [0,1]");
    requireSameDim(left, right);
    double m = std::max(norm(left), norm(right));
    double at = static_cast<double>(num) / static_cast<double>(den);
    std::size_t d = left.dim();
    return Multifunction{[at, left = std::move(left), right = std::move(right)](double t) {
                             return stepValue(t, at, left, right);
                         },
                         m, d, false, std::move(id), std::nullopt};
}

Multifunction buildBuiltinF(const std::string& id) {
    if (id == "box-constant") return makeConstant(Box::interval(-1.0, 2.0), "box-constant");
    if (id == "singleton-one") return makeConstant(Box::point({1.0}), "singleton-one");
    if (id == "box-linear")
        return Multifunction{[](double t) { return Box::interval(0.0, t); }, 1.0, 1, true,
                             "box-linear", std::nullopt};
    if (id == "box-width")
        return Multifunction{[](double t) { return Box::interval(-t, t); }, 1.0, 1, true,
                             "box-width", std::nullopt};
    if (id == "singleton-linear")
        return Multifunction{[](double t) { return Box::point({t}); }, 1.0, 1, true,
                             "singleton-linear", std::nullopt};
    if (id == "box-sine")
        return Multifunction{[](double t) {
                                 double s = std::sin(2.0 * std::numbers::pi * t);
                                 return Box::interval(std::min(0.0, s), std::max(0.0, s));
                             },
                             1.0, 1, true, "box-sine", std::nullopt};
    if (id == "box-step")
        return makeStep(1, 2, Box::interval(0.0, 1.0), Box::interval(1.0, 2.0), "box-step");
    if (id == "box-step-third")
        return makeStep(1, 3, Box::interval(0.0, 1.0), Box::interval(2.0, 3.0), "box-step-third");
    if (id == "box-2d")
        return Multifunction{[](double t) { return Box({0.0, -t}, {t, 1.0}); }, 1.0, 2, true,
                             "box-2d", std::nullopt};
    throw CatalogError("unknown multifunction id: " + id);
}

double requireNumber(const json& e, const char* key) {
    if (!e.contains(key) || !e[key].is_number())
        throw CatalogError(std::string("catalog manifest: missing numeric field '") + key + "'");
    return e[key].get<double>();
}

std::string requireString(const json& e, const char* key) {
    if (!e.contains(key) || !e[key].is_string())
        throw CatalogError(std::string("catalog manifest: missing string field '") + key + "'");
    return e[key].get<std::string>();
}

std::vector<double> requireNumbers(const json& e, const char* key) {
    if (!e.contains(key) || !e[key].is_array())
        throw CatalogError(std::string("catalog manifest: missing array field '") + key + "'");
    std::vector<double> v;
    for (const auto& x : e[key]) {
        if (!x.is_number())
            throw CatalogError(std::string("catalog manifest: non-numeric entry in '") + key + "'");
        v.push_back(x.get<double>());
    }
    return v;
}

void applyPropsOverride(SetFunctionProps& props, const json& e) {
    if (!e.contains("props")) return;
    const json& o = e["props"];
    if (!o.is_object()) throw CatalogError("catalog manifest: props must be an object");
    const std::pair<const char*, bool SetFunctionProps::*> flags[] = {
        {"finitelyAdditive", &SetFunctionProps::finitelyAdditive},
        {"countablyAdditive", &SetFunctionProps::countablyAdditive},
        {"monotone", &SetFunctionProps::monotone},
        {"nullAdditive", &SetFunctionProps::nullAdditive},
        {"nullNullAdditive", &SetFunctionProps::nullNullAdditive},
        {"sigmaNullNullAdditive", &SetFunctionProps::sigmaNullNullAdditive},
        {"continuousFromBelow", &SetFunctionProps::continuousFromBelow},
        {"pointwiseNonAtomic", &SetFunctionProps::pointwiseNonAtomic},
    };
    for (auto it = o.begin(); it != o.end(); ++it) {
        bool known = false;
        for (const auto& [name, member] : flags)
            if (it.key() == name) {
                if (!it.value().is_boolean())
                    throw CatalogError("catalog manifest: props." + it.key() + " must be boolean");
                props.*member = it.value().get<bool>();
                known = true;
            }
        if (!known) throw CatalogError("catalog manifest: unknown props flag " + it.key());
    }
}

SetFunction buildManifestMu(const json& e, const SpaceModel& dyadic) {
    std::string id = requireString(e, "id");
    std::string kind = requireString(e, "kind");
    SetFunction mu = [&]() -> SetFunction {
        if (kind == "lebesgue") return buildBuiltinMu("lebesgue", dyadic);
        if (kind == "dirac")
            return makeDirac(dyadic, static_cast<std::int64_t>(requireNumber(e, "num")),
                             static_cast<std::int64_t>(requireNumber(e, "den")),
                             requireNumber(e, "mass"), id);
        if (kind == "power") return makePower(dyadic, requireNumber(e, "exponent"), id);
        if (kind == "poly") return makePoly(dyadic, requireNumbers(e, "coeffs"), id);
        if (kind == "counting")
            return makeCounting(static_cast<int>(requireNumber(e, "points")), id);
        if (kind == "weighted") return makeWeighted(requireNumbers(e, "weights"), id);
        if (kind == "threshold")
            return makeThreshold(static_cast<int>(requireNumber(e, "points")),
                                 static_cast<int>(requireNumber(e, "threshold")), id);
        throw CatalogError("catalog manifest: unknown set function kind " + kind);
    }();
    mu.catalogId = id;
    applyPropsOverride(mu.declaredProps, e);
    return mu;
}

Multifunction buildManifestF(const json& e) {
    std::string id = requireString(e, "id");
    std::string kind = requireString(e, "kind");
    if (kind == "constant") {
        Box b(requireNumbers(e, "lo"), requireNumbers(e, "hi"));
        Multifunction f = makeConstant(std::move(b), id);
        return f;
    }
    if (kind == "step") {
        Box left(requireNumbers(e, "leftLo"), requireNumbers(e, "leftHi"));
        Box right(requireNumbers(e, "rightLo"), requireNumbers(e, "rightHi"));
        return makeStep(static_cast<std::int64_t>(requireNumber(e, "num")),
                        static_cast<std::int64_t>(requireNumber(e, "den")), std::move(left),
                        std::move(right), id);
    }
    const char* aliases[] = {"linear",           "box-linear", "width",   "box-width",
                             "singleton-linear", "sine",       "box-sine", "planar",
                             "box-2d"};
    for (const char* a : aliases)
        if (kind == a) {
            std::string builtin = kind;
            if (kind == "linear") builtin = "box-linear";
            if (kind == "width") builtin = "box-width";
            if (kind == "sine") builtin = "box-sine";
            if (kind == "planar") builtin = "box-2d";
            Multifunction f = buildBuiltinF(builtin);
            f.catalogId = id;
            return f;
        }
    throw CatalogError("catalog manifest: unknown multifunction kind " + kind);
}

} // namespace

Catalog::Catalog(SpaceModel dyadicSpace) : dyadic_(dyadicSpace) {
    if (!dyadic_.isDyadic()) throw CatalogError("catalog: the ambient space must be dyadic");
}

const std::vector<std::string>& Catalog::builtinSetFunctionIds() {
    static const std::vector<std::string> ids = {
        "lebesgue",       "dirac-third",          "lebesgue-squared", "lebesgue-plus-squared",
        "sqrt-lebesgue",  "finite-counting",      "finite-weighted-null", "finite-threshold"};
    return ids;
}

const std::vector<std::string>& Catalog::builtinMultifunctionIds() {
    static const std::vector<std::string> ids = {
        "box-constant", "singleton-one",    "box-linear", "box-width", "singleton-linear",
        "box-sine",     "box-step",         "box-step-third", "box-2d"};
    return ids;
}

void Catalog::loadManifestFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError("catalog manifest not readable: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    loadManifestText(ss.str());
}

void Catalog::loadManifestText(const std::string& jsonText) {
    json j;
    try {
        j = json::parse(jsonText);
    } catch (const json::parse_error& e) {
        throw CatalogError(std::string("catalog manifest: ") + e.what());
    }
    if (!j.is_object()) throw CatalogError("catalog manifest: top level must be an object");
    for (const auto& e : j.value("setFunctions", json::array())) {
        SetFunction mu = buildManifestMu(e, dyadic_);
        loadedMus_.emplace_back(mu.catalogId, std::move(mu));
    }
    for (const auto& e : j.value("multifunctions", json::array())) {
        Multifunction f = buildManifestF(e);
        loadedFs_.emplace_back(f.catalogId, std::move(f));
    }
    for (const auto& e : j.value("instances", json::array())) {
        InstanceSpec spec;
        spec.id = requireString(e, "id");
        spec.f = requireString(e, "F");
        spec.mu = requireString(e, "mu");
        if (e.contains("method")) spec.method = requireString(e, "method");
        if (spec.method != "gould" && spec.method != "birkhoff-simple" && spec.method != "mcshane")
            throw CatalogError("catalog manifest: unknown method " + spec.method);
        instances_.push_back(std::move(spec));
    }
}

SetFunction Catalog::setFunction(const std::string& id) const {
    for (const auto& [key, mu] : loadedMus_)
        if (key == id) return mu;
    return buildBuiltinMu(id, dyadic_);
}

Multifunction Catalog::multifunction(const std::string& id) const {
    for (const auto& [key, f] : loadedFs_)
        if (key == id) return f;
    return buildBuiltinF(id);
}

InstanceSpec Catalog::instance(const std::string& id) const {
    for (const auto& spec : instances_)
        if (spec.id == id) return spec;
    throw CatalogError("unknown instance id: " + id);
}

std::vector<std::string> Catalog::setFunctionIds() const {
    std::vector<std::string> ids;
    for (const auto& [key, mu] : loadedMus_) ids.push_back(key);
    for (const auto& id : builtinSetFunctionIds())
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    return ids;
}

std::vector<std::string> Catalog::multifunctionIds() const {
    std::vector<std::string> ids;
    for (const auto& [key, f] : loadedFs_) ids.push_back(key);
    for (const auto& id : builtinMultifunctionIds())
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
    return ids;
}

} // namespace svi
