#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include <envydiv/complexes.hpp>
#include <envydiv/homology.hpp>
#include <envydiv/preferences.hpp>
#include <envydiv/solver.hpp>

namespace envydiv {

using nlohmann::json;

json to_json(const ComplexVariant &variant);
json to_json(const SimplicialComplex &complex);
/// Throws InputError on malformed input or facets outside the variant.
SimplicialComplex complex_from_json(const json &j);

/// Torsion coefficients are written as numbers when they fit in 64 bits.
json to_json(const HomologyReport &report);

json to_json(const Cut &cut);
json to_json(const ConfigPoint &point);
ConfigPoint config_point_from_json(const json &j);

json to_json(const StochasticMatrix &m);
json to_json(const EnvyFreeDivision &division);
json to_json(const ValidationReport &report);
json to_json(const BruteForceResult &result);

/// {"r", "kind": "old"|"new", "model", "params", "seed", "reduction", "epsilon", "tiles"}
struct PreferenceFile {
  int r = 0;
  PreferenceKind kind = PreferenceKind::old_style;
  std::string model;
  json params = json::object();
  std::optional<std::uint64_t> seed; ///< model seed; the CLI fills in --seed when absent
  std::optional<std::string> reduction; ///< psi, phi or lift
  std::optional<double> epsilon;
  std::optional<int> tiles;
};

/// Throws InputError.
PreferenceFile parse_preference_file(const json &j);
PreferenceFile load_preference_file(const std::string &path);

/// The old-style model the file names.
PreferencePtr source_preferences(const PreferenceFile &file);

/// Which reduction turns the file into new-style preferences on `space`:
/// the explicit one if given, else psi on C1, phi on C2 and lift on C3; new
/// kind files are always lifted.
std::string reduction_for(const PreferenceFile &file, const Space &space);

/// New-style preferences on `space`. Throws InputError for combinations that
/// do not fit (psi off C1, phi off C2, psi without epsilon for a model that
/// has no default).
PreferencePtr space_preferences(const PreferenceFile &file, const Space &space);

} // namespace envydiv
