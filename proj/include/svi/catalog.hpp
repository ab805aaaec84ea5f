#pragma once

#include <string>
#include <utility>
#include <vector>

#include "svi/multifunction.hpp"
#include "svi/set_function.hpp"
#include "svi/space.hpp"

namespace svi {

// named (F, mu, method) bundle resolvable from a manifest
struct InstanceSpec {
    std::string id;
    std::string f;
    std::string mu;
    std::string method = "gould";
};

// Named set functions and multifunctions with their structural properties
// filled in, plus optional instance bundles. The built-ins span every
// hypothesis combination the verification suites lean on: an additive
// baseline, a point mass, monotone distortions with and without a refinement
// limit, and finite weighted measures including one with null points. A JSON
// manifest can add parameterized entries; loaded entries shadow built-ins of
// the same id.
class Catalog {
public:
    explicit Catalog(SpaceModel dyadicSpace = SpaceModel::dyadic(16));

    static const std::vector<std::string>& builtinSetFunctionIds();
    static const std::vector<std::string>& builtinMultifunctionIds();

    // manifest: {"setFunctions": [{id, kind, params...}], "multifunctions":
    // [...], "instances": [{id, F, mu, method}]}; throws CatalogError
    void loadManifestFile(const std::string& path);
    void loadManifestText(const std::string& jsonText);

    SetFunction setFunction(const std::string& id) const; // throws CatalogError
    Multifunction multifunction(const std::string& id) const;
    InstanceSpec instance(const std::string& id) const;

    std::vector<std::string> setFunctionIds() const; // loaded first, then built-ins
    std::vector<std::string> multifunctionIds() const;
    const std::vector<InstanceSpec>& instances() const { return instances_; }

    const SpaceModel& dyadicSpace() const { return dyadic_; }

private:
    SpaceModel dyadic_;
    std::vector<std::pair<std::string, SetFunction>> loadedMus_;
    std::vector<std::pair<std::string, Multifunction>> loadedFs_;
    std::vector<InstanceSpec> instances_;
};

} // namespace svi
