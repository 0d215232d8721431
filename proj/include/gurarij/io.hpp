#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gurarij/aells.hpp"
#include "gurarij/katetov.hpp"
#include "gurarij/space.hpp"
#include "gurarij/tower.hpp"
#include "gurarij/universal.hpp"

// JSON file formats. Every double is written with 12 significant digits.
namespace gurarij::io {

using json = nlohmann::json;
using space::SpacePtr;

inline constexpr const char* kVersion = "0.1.0";

/// Recursively rounds every floating-point number to 12 significant digits.
json round12(json j);

json read_json(const std::filesystem::path& path);             ///< throws io_error
void write_json(const std::filesystem::path& path, const json& j);  ///< rounds, throws io_error
std::string dump(const json& j);                                ///< rounds, 2-space indent

Vector vector_from_json(const json& j);
std::vector<Vector> vectors_from_json(const json& j);
/// "3,-4" -> {3, -4}; "1,0;0,1" -> two vectors.
Vector parse_vector(const std::string& text);
std::vector<Vector> parse_vectors(const std::string& text);

// Space file {"label", "dim", "dual_generators", "symmetric_closure"}.
json space_to_json(const space::PolyNormedSpace& s);
/// Explicit spaces as space files; oracle spaces as summaries with their
/// provenance (not loadable on their own).
json space_summary(const space::NormedSpace& s);
/// A space reference: inline shorthand "l1:d" / "linf:d" or a space file
/// object. Anything else goes through `lookup` (e.g. a tower label).
using SpaceLookup = std::function<SpacePtr(const std::string&)>;
SpacePtr space_from_json(const json& j, const SpaceLookup& lookup = {});

// Katetov file {"space", "support", "values", "canonical"}.
json katetov_to_json(const katetov::ConvexKatetovEnvelope& ck, const json& space_ref);
json katetov_to_json(const katetov::FiniteKatetov& fk, const json& space_ref);
katetov::FiniteKatetov katetov_from_json(const json& j, const SpaceLookup& lookup = {});
/// Loads an envelope; a non-canonical file is convexified first.
katetov::ConvexKatetovEnvelope envelope_from_json(const json& j, const SpaceLookup& lookup = {});

// Metric {"labels", "distances", "base"}; molecule file {"metric", "entries"}.
json metric_to_json(const aells::PointedFiniteMetric& m);
aells::PointedFiniteMetric metric_from_json(const json& j);
struct MoleculeFile {
  aells::PointedFiniteMetric metric;
  aells::Molecule molecule;
};
json molecule_to_json(const MoleculeFile& mf);
MoleculeFile molecule_from_json(const json& j);

// Relative-space file {"base_space", "adjoined": [katetov files]}.
json relative_to_json(const aells::RelativeSpaceOverE& rs, const json& base_ref);
aells::RelativeSpaceOverE relative_from_json(const json& j);

// Group file {"elements", "table", "identity", "generators"}; the table
// holds element labels.
json group_to_json(const universal::FiniteGroupPresentation& g);
universal::FiniteGroupPresentation group_from_json(const json& j);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

// Build manifest {"seed", "params", "start_space", "symmetry", "rounds",
// "spaces", "adjoined"}. No wall-clock data, so equal seeds give equal bytes.
json manifest_to_json(const tower::BuildState& state, const tower::BuildParams& params);
struct LoadedManifest {
  tower::BuildParams params;
  tower::BuildState state;
};
/// Rebuilds the chain from the logged envelopes.
LoadedManifest manifest_from_json(const json& j);

}  // namespace gurarij::io
