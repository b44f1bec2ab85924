#pragma once

// Scenario-driven sweeps: a JSON scenario names an operator pair, a list of
// schemes, n values, a vector h and metrics; run() evaluates every
// (scheme, metric, n) cell and emit() writes sorted CSV/JSON reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "katolab/product.hpp"
#include "katolab/schrodinger.hpp"

namespace katolab::harness {

inline constexpr int kSchemaVersion = 1;

struct RandomPsdSource {
  long long dim = 8;
  std::uint64_t seed = 0;
  double spectral_scale = 1;
  std::optional<long long> zeno_rank;  ///< coordinate projection for Zeno schemes

  bool operator==(const RandomPsdSource&) const = default;
};

/// JSON file {"a": [[...]], "b": [[...]], "p": [[...]] (optional)}; entries
/// are numbers or [re, im] pairs. Relative paths resolve against the
/// scenario's directory.
struct ExplicitSource {
  std::string path;

  bool operator==(const ExplicitSource&) const = default;
};

struct SchrodingerSource {
  int grid_points = 64;
  double box_half_width = 4;
  Potential potential;
  std::optional<long long> zeno_rank;

  bool operator==(const SchrodingerSource&) const = default;
};

using OperatorSource = std::variant<RandomPsdSource, ExplicitSource, SchrodingerSource>;

struct GridSpec {
  int panels = 8;
  int points = 16;

  bool operator==(const GridSpec&) const = default;
};

struct VectorSpec {
  enum class Kind { Basis, Random, Constant };
  Kind kind = Kind::Basis;
  long long index = 0;     ///< Basis
  std::uint64_t seed = 0;  ///< Random

  bool operator==(const VectorSpec&) const = default;
};

/// One requested metric. The resolvent metrics carry tau values, which must be
/// reciprocals of integers and strictly decreasing; they are reported at n = 1/tau.
struct MetricSpec {
  Metric metric;
  std::vector<double> taus;

  std::vector<long long> n_values(const std::vector<long long>& scenario_n) const;

  bool operator==(const MetricSpec&) const = default;
};

struct Scenario {
  OperatorSource source;
  std::vector<ProductScheme> schemes;
  std::vector<long long> n_values;
  double T = 1;
  GridSpec grid;
  VectorSpec h;
  std::vector<MetricSpec> metrics;
  std::string output;
  /// Directory used to resolve relative paths; not part of the scenario.
  std::filesystem::path base_dir;

  bool operator==(const Scenario& other) const;
};

/// Throws ConfigParse naming the offending field, SchemeRejected for Kato
/// descriptors that fail the axiom checks.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
/// Adds IoError for unreadable files and ConfigParse with line/column for
/// malformed JSON.
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json scenario_to_json(const Scenario& s);

nlohmann::json scheme_to_json(const ProductScheme& s);
ProductScheme scheme_from_json(const nlohmann::json& j, const std::string& where = "scheme");

OperatorPaird build_operator_pair(const Scenario& s);
ComplexVectord build_vector(const VectorSpec& spec, Eigen::Index dim);

/// 64-bit FNV-1a of the canonical scenario JSON, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

struct RunOptions {
  int threads = 1;
};

struct RunRecord {
  std::string scenario_hash;
  std::string timestamp;  ///< UTC, JSON output only
  /// "verification", or "demonstration" for Schroedinger sources and Zeno schemes.
  std::string label;
  nlohmann::json environment;
  /// Sorted by (scheme, variant_params, metric); entries by n.
  std::vector<ConvergenceReport> reports;
  std::vector<std::string> report_labels;  ///< parallel to reports

  /// Throws InvalidArgument unless every (scheme, metric, n) cell of the
  /// scenario appears exactly once.
  void check_complete(const Scenario& s) const;
};

RunRecord run(const Scenario& s, const RunOptions& options = {});

std::string to_csv(const RunRecord& record);
nlohmann::json to_json(const RunRecord& record);

enum class Format { Csv, Json };

/// Writes <prefix>.report.csv / .report.json. Existing files are replaced only
/// with force; otherwise IoError. Returns the written paths.
std::vector<std::filesystem::path> emit(const RunRecord& record, const std::string& prefix,
                                        const std::vector<Format>& formats, bool force);

}  // namespace katolab::harness
