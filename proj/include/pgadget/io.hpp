#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pgadget/gadget.hpp"
#include "pgadget/perturbation.hpp"

namespace pgadget {

using Json = nlohmann::ordered_json;

/// Malformed input document.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// { "sites": [...], "terms": [ { "name", "support", "coefficient",
///   "matrix": { "dim", "re", "im" } } ] }, matrices row-major.
TargetHamiltonian parse_target(const Json& j);
Json target_to_json(const TargetHamiltonian& t);

/// Parameter file: compile options, solved chains and the embedded target.
Json params_to_json(const GadgetArtifact& a, const CompileOptions& options);
GadgetArtifact artifact_from_params(const Json& j);
CompileOptions options_from_params(const Json& j);

Json report_to_json(const VerifyReport& r);
VerifyReport report_from_json(const Json& j);

/// Shortest round-trip decimal.
std::string format_double(double x);

Json read_json_file(const std::string& path);
/// Write via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace pgadget
