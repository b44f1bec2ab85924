#include "katolab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "katolab/format.hpp"
#include "katolab/kato_json.hpp"
#include "katolab/log.hpp"
#include "katolab/random.hpp"

namespace katolab::harness {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(Errc::ConfigParse, where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      fail(where, "unknown field \"" + key + "\"");
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double real_of(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

long long integer_of(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long long>();
}

std::uint64_t seed_of(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  fail(where, "expected a non-negative integer seed");
}

std::string string_of(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::optional<long long> optional_rank(const json& j, const std::string& where) {
  if (!j.contains("zeno_rank") || j.at("zeno_rank").is_null()) return std::nullopt;
  const long long r = integer_of(j.at("zeno_rank"), where + ".zeno_rank");
  if (r < 1) fail(where + ".zeno_rank", "must be >= 1");
  return r;
}

// ---------------------------------------------------------------------------
// Operator sources

OperatorSource source_from_json(const json& j) {
  const std::string where = "operator_source";
  if (!j.is_object()) fail(where, "expected an object");
  const std::string kind = string_of(require(j, "kind", where), where + ".kind");
  if (kind == "random_psd") {
    allow_keys(j, where, {"kind", "dim", "seed", "spectral_scale", "zeno_rank"});
    RandomPsdSource s;
    s.dim = integer_of(require(j, "dim", where), where + ".dim");
    if (s.dim < 1) fail(where + ".dim", "must be >= 1");
    s.seed = seed_of(require(j, "seed", where), where + ".seed");
    if (j.contains("spectral_scale")) s.spectral_scale = real_of(j.at("spectral_scale"), where + ".spectral_scale");
    if (!(s.spectral_scale > 0)) fail(where + ".spectral_scale", "must be > 0");
    s.zeno_rank = optional_rank(j, where);
    if (s.zeno_rank && *s.zeno_rank > s.dim) fail(where + ".zeno_rank", "exceeds dim");
    return s;
  }
  if (kind == "explicit") {
    allow_keys(j, where, {"kind", "path"});
    return ExplicitSource{string_of(require(j, "path", where), where + ".path")};
  }
  if (kind == "schrodinger_1d") {
    allow_keys(j, where, {"kind", "grid_points", "box_half_width", "potential", "zeno_rank"});
    SchrodingerSource s;
    const long long d = integer_of(require(j, "grid_points", where), where + ".grid_points");
    if (d < 8 || d > 512 || (d & (d - 1)) != 0)
      fail(where + ".grid_points", "must be a power of two in [8, 512]");
    s.grid_points = static_cast<int>(d);
    s.box_half_width = real_of(require(j, "box_half_width", where), where + ".box_half_width");
    if (!(s.box_half_width > 0)) fail(where + ".box_half_width", "must be > 0");
    const json& pj = require(j, "potential", where);
    const std::string pw = where + ".potential";
    if (!pj.is_object()) fail(pw, "expected an object");
    s.potential.id = string_of(require(pj, "id", pw), pw + ".id");
    if (s.potential.id == "zero") {
      allow_keys(pj, pw, {"id"});
    } else if (s.potential.id == "quadratic") {
      allow_keys(pj, pw, {"id", "c"});
      if (pj.contains("c")) s.potential.c = real_of(pj.at("c"), pw + ".c");
    } else if (s.potential.id == "inverse_power") {
      allow_keys(pj, pw, {"id", "g", "p"});
      if (pj.contains("g")) s.potential.g = real_of(pj.at("g"), pw + ".g");
      s.potential.p = real_of(require(pj, "p", pw), pw + ".p");
    } else {
      fail(pw + ".id", "unknown potential \"" + s.potential.id + "\"");
    }
    s.zeno_rank = optional_rank(j, where);
    if (s.zeno_rank && *s.zeno_rank > s.grid_points) fail(where + ".zeno_rank", "exceeds grid_points");
    return s;
  }
  fail(where + ".kind", "unknown source \"" + kind + "\"");
}

json source_to_json(const OperatorSource& source) {
  return std::visit(
      [](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        json j;
        if constexpr (std::is_same_v<S, RandomPsdSource>) {
          j = {{"kind", "random_psd"}, {"dim", s.dim}, {"seed", s.seed}, {"spectral_scale", s.spectral_scale}};
          if (s.zeno_rank) j["zeno_rank"] = *s.zeno_rank;
        } else if constexpr (std::is_same_v<S, ExplicitSource>) {
          j = {{"kind", "explicit"}, {"path", s.path}};
        } else {
          json pj = {{"id", s.potential.id}};
          if (s.potential.id == "quadratic") pj["c"] = s.potential.c;
          if (s.potential.id == "inverse_power") {
            pj["g"] = s.potential.g;
            pj["p"] = s.potential.p;
          }
          j = {{"kind", "schrodinger_1d"},
               {"grid_points", s.grid_points},
               {"box_half_width", s.box_half_width},
               {"potential", pj}};
          if (s.zeno_rank) j["zeno_rank"] = *s.zeno_rank;
        }
        return j;
      },
      source);
}

ComplexMatrixd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  ComplexMatrixd m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) fail(rw, "rows must make a square matrix");
    for (Eigen::Index c = 0; c < rows; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      const std::string ew = rw + "[" + std::to_string(c) + "]";
      if (e.is_array()) {
        if (e.size() != 2) fail(ew, "complex entries are [re, im]");
        m(r, c) = {real_of(e[0], ew), real_of(e[1], ew)};
      } else {
        m(r, c) = real_of(e, ew);
      }
    }
  }
  return m;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigParse, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Metrics and vectors

MetricSpec metric_from_json(const json& j, const std::string& where) {
  const json obj = j.is_string() ? json{{"kind", j.get<std::string>()}} : j;
  if (!obj.is_object()) fail(where, "expected a metric name or object");
  const std::string kind = string_of(require(obj, "kind", where), where + ".kind");
  MetricSpec spec;
  auto taus = [&] {
    const json& ts = require(obj, "taus", where);
    if (!ts.is_array() || ts.empty()) fail(where + ".taus", "expected a non-empty array");
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const std::string tw = where + ".taus[" + std::to_string(i) + "]";
      const double tau = real_of(ts[i], tw);
      if (!(tau > 0 && tau <= 1)) fail(tw, "tau must lie in (0, 1]");
      const double n = std::round(1.0 / tau);
      if (std::abs(n * tau - 1.0) > 1e-12) fail(tw, "tau must be the reciprocal of an integer");
      if (i > 0 && !(tau < spec.taus.back())) fail(tw, "taus must be strictly decreasing");
      spec.taus.push_back(tau);
    }
  };
  if (kind == "l2") {
    allow_keys(obj, where, {"kind"});
    spec.metric.kind = MetricKind::L2Time;
  } else if (kind == "sup") {
    allow_keys(obj, where, {"kind"});
    spec.metric.kind = MetricKind::SupTime;
  } else if (kind == "operator_l2") {
    allow_keys(obj, where, {"kind"});
    spec.metric.kind = MetricKind::OperatorNormL2Time;
  } else if (kind == "measure") {
    allow_keys(obj, where, {"kind", "eta"});
    spec.metric.kind = MetricKind::MeasureExceedance;
    spec.metric.eta = real_of(require(obj, "eta", where), where + ".eta");
    if (!(spec.metric.eta > 0)) fail(where + ".eta", "must be > 0");
  } else if (kind == "chernoff") {
    allow_keys(obj, where, {"kind", "t", "taus"});
    spec.metric.kind = MetricKind::ChernoffResolvent;
    spec.metric.t = obj.contains("t") ? real_of(obj.at("t"), where + ".t") : 1.0;
    if (!(spec.metric.t > 0)) fail(where + ".t", "must be > 0");
    taus();
  } else if (kind == "boundary_resolvent") {
    allow_keys(obj, where, {"kind", "taus"});
    spec.metric.kind = MetricKind::BoundaryResolventL2;
    taus();
  } else {
    fail(where + ".kind", "unknown metric \"" + kind + "\"");
  }
  return spec;
}

json metric_to_json(const MetricSpec& m) {
  switch (m.metric.kind) {
    case MetricKind::L2Time: return {{"kind", "l2"}};
    case MetricKind::SupTime: return {{"kind", "sup"}};
    case MetricKind::OperatorNormL2Time: return {{"kind", "operator_l2"}};
    case MetricKind::MeasureExceedance: return {{"kind", "measure"}, {"eta", m.metric.eta}};
    case MetricKind::ChernoffResolvent: return {{"kind", "chernoff"}, {"t", m.metric.t}, {"taus", m.taus}};
    case MetricKind::BoundaryResolventL2: return {{"kind", "boundary_resolvent"}, {"taus", m.taus}};
  }
  return {};
}

bool uses_taus(const Metric& m) {
  return m.kind == MetricKind::ChernoffResolvent || m.kind == MetricKind::BoundaryResolventL2;
}

VectorSpec vector_from_json(const json& j) {
  const std::string where = "h";
  if (!j.is_object()) fail(where, "expected an object");
  const std::string kind = string_of(require(j, "kind", where), where + ".kind");
  VectorSpec v;
  if (kind == "basis") {
    allow_keys(j, where, {"kind", "index"});
    v.kind = VectorSpec::Kind::Basis;
    v.index = integer_of(require(j, "index", where), where + ".index");
    if (v.index < 0) fail(where + ".index", "must be >= 0");
  } else if (kind == "random") {
    allow_keys(j, where, {"kind", "seed"});
    v.kind = VectorSpec::Kind::Random;
    v.seed = seed_of(require(j, "seed", where), where + ".seed");
  } else if (kind == "constant") {
    allow_keys(j, where, {"kind"});
    v.kind = VectorSpec::Kind::Constant;
  } else {
    fail(where + ".kind", "unknown vector \"" + kind + "\"");
  }
  return v;
}

json vector_to_json(const VectorSpec& v) {
  switch (v.kind) {
    case VectorSpec::Kind::Basis: return {{"kind", "basis"}, {"index", v.index}};
    case VectorSpec::Kind::Random: return {{"kind", "random"}, {"seed", v.seed}};
    case VectorSpec::Kind::Constant: return {{"kind", "constant"}};
  }
  return {};
}

std::string vector_descriptor(const VectorSpec& v) {
  switch (v.kind) {
    case VectorSpec::Kind::Basis: return "basis(" + std::to_string(v.index) + ")";
    case VectorSpec::Kind::Random: return "random(" + std::to_string(v.seed) + ")";
    case VectorSpec::Kind::Constant: return "constant";
  }
  return "";
}

bool is_demonstration(const Scenario& s, const ProductScheme& scheme) {
  return scheme.is_zeno() || std::holds_alternative<SchrodingerSource>(s.source);
}

std::uint64_t source_seed(const Scenario& s) {
  if (const auto* r = std::get_if<RandomPsdSource>(&s.source)) return r->seed;
  return 0;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Schemes

json scheme_to_json(const ProductScheme& s) {
  return std::visit(
      [&](const auto& v) -> json {
        using V = std::decay_t<decltype(v)>;
        json j = {{"variant", s.name()}};
        if constexpr (std::is_same_v<V, scheme::KatoProduct> || std::is_same_v<V, scheme::KatoSymmetrized> ||
                      std::is_same_v<V, scheme::CachiaAverage>) {
          j["f"] = kato::to_json(v.f);
          j["g"] = kato::to_json(v.g);
        } else if constexpr (std::is_same_v<V, scheme::LapidusResolvent>) {
          j["k"] = v.k;
        }
        return j;
      },
      s.variant());
}

ProductScheme scheme_from_json(const json& j, const std::string& where) {
  const json obj = j.is_string() ? json{{"variant", j.get<std::string>()}} : j;
  if (!obj.is_object()) fail(where, "expected a scheme name or object");
  const std::string v = string_of(require(obj, "variant", where), where + ".variant");
  auto kato_pair = [&](auto factory) {
    allow_keys(obj, where, {"variant", "f", "g"});
    const kato::KatoFunction f = kato::kato_function_from_json(require(obj, "f", where), where + ".f");
    const kato::KatoFunction g = kato::kato_function_from_json(require(obj, "g", where), where + ".g");
    return factory(f, g);
  };
  if (v == "kato_product") return kato_pair(&ProductScheme::kato_product);
  if (v == "kato_symmetrized") return kato_pair(&ProductScheme::kato_symmetrized);
  if (v == "cachia_average") return kato_pair(&ProductScheme::cachia_average);
  if (v == "lapidus_resolvent") {
    allow_keys(obj, where, {"variant", "k"});
    const long long k = obj.contains("k") ? integer_of(obj.at("k"), where + ".k") : 1;
    if (k < 1 || k > 1000000) fail(where + ".k", "must be in [1, 1e6]");
    return ProductScheme::lapidus_resolvent(static_cast<int>(k));
  }
  allow_keys(obj, where, {"variant"});
  if (v == "trotter_plain") return ProductScheme::trotter_plain();
  if (v == "trotter_symmetrized") return ProductScheme::trotter_symmetrized();
  if (v == "zeno") return ProductScheme::zeno();
  if (v == "real_time_plain") return ProductScheme::real_time_plain();
  if (v == "real_time_symmetrized") return ProductScheme::real_time_symmetrized();
  if (v == "exact") return ProductScheme::exact();
  fail(where + ".variant", "unknown scheme \"" + v + "\"");
}

// ---------------------------------------------------------------------------
// Scenario

std::vector<long long> MetricSpec::n_values(const std::vector<long long>& scenario_n) const {
  if (!uses_taus(metric)) return scenario_n;
  std::vector<long long> ns;
  for (double tau : taus) ns.push_back(std::llround(1.0 / tau));
  return ns;
}

bool Scenario::operator==(const Scenario& o) const {
  return source == o.source && schemes == o.schemes && n_values == o.n_values && T == o.T && grid == o.grid &&
         h == o.h && metrics == o.metrics && output == o.output;
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  const std::string where = "scenario";
  if (!j.is_object()) fail(where, "expected an object");
  allow_keys(j, where, {"schema", "operator_source", "schemes", "n_values", "T", "grid", "h", "metrics", "output"});
  if (!j.contains("schema") || !j.at("schema").is_number_integer() || j.at("schema").get<int>() != kSchemaVersion)
    fail("schema", "must be " + std::to_string(kSchemaVersion));

  Scenario s;
  s.base_dir = base_dir;
  s.source = source_from_json(require(j, "operator_source", where));

  const json& schemes = require(j, "schemes", where);
  if (!schemes.is_array()) fail("schemes", "expected an array");
  if (schemes.empty()) fail("schemes", "schemes must be non-empty");
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    const std::string sw = "schemes[" + std::to_string(i) + "]";
    ProductScheme scheme = scheme_from_json(schemes[i], sw);
    if (!seen.insert({scheme.name(), scheme.params()}).second) fail(sw, "duplicate scheme");
    s.schemes.push_back(std::move(scheme));
  }

  const json& metrics = require(j, "metrics", where);
  if (!metrics.is_array() || metrics.empty()) fail("metrics", "metrics must be a non-empty array");
  std::set<std::string> labels;
  bool needs_n = false;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const std::string mw = "metrics[" + std::to_string(i) + "]";
    MetricSpec m = metric_from_json(metrics[i], mw);
    if (!labels.insert(m.metric.label()).second) fail(mw, "duplicate metric");
    needs_n = needs_n || !uses_taus(m.metric);
    if (m.metric.kind == MetricKind::SupTime)
      for (const auto& scheme : s.schemes)
        if (!scheme.is_real_time()) fail(mw, "sup metric needs real-time schemes, got " + scheme.name());
    s.metrics.push_back(std::move(m));
  }

  if (j.contains("n_values")) {
    const json& ns = j.at("n_values");
    if (!ns.is_array()) fail("n_values", "expected an array");
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const std::string nw = "n_values[" + std::to_string(i) + "]";
      const long long n = integer_of(ns[i], nw);
      if (n < 1) fail(nw, "n must be >= 1");
      if (!s.n_values.empty() && n <= s.n_values.back()) fail(nw, "n_values must be strictly increasing");
      s.n_values.push_back(n);
    }
  }
  if (needs_n && s.n_values.empty()) fail("n_values", "n_values must be non-empty");

  if (j.contains("T")) s.T = real_of(j.at("T"), "T");
  if (!(s.T > 0)) fail("T", "must be > 0");

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) fail("grid", "expected an object");
    allow_keys(g, "grid", {"panels", "points"});
    if (g.contains("panels")) s.grid.panels = static_cast<int>(integer_of(g.at("panels"), "grid.panels"));
    if (g.contains("points")) s.grid.points = static_cast<int>(integer_of(g.at("points"), "grid.points"));
    if (s.grid.panels < 1 || s.grid.points < 1 || s.grid.points > 256)
      fail("grid", "needs panels >= 1 and 1 <= points <= 256");
  }

  if (j.contains("h")) s.h = vector_from_json(j.at("h"));
  if (const auto* r = std::get_if<RandomPsdSource>(&s.source);
      r && s.h.kind == VectorSpec::Kind::Basis && s.h.index >= r->dim)
    fail("h.index", "exceeds dim");

  s.output = j.contains("output") ? string_of(j.at("output"), "output") : "report";
  if (s.output.empty()) fail("output", "must be a non-empty prefix");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

json scenario_to_json(const Scenario& s) {
  json schemes = json::array();
  for (const auto& scheme : s.schemes) schemes.push_back(scheme_to_json(scheme));
  json metrics = json::array();
  for (const auto& m : s.metrics) metrics.push_back(metric_to_json(m));
  return {{"schema", kSchemaVersion},
          {"operator_source", source_to_json(s.source)},
          {"schemes", schemes},
          {"n_values", s.n_values},
          {"T", s.T},
          {"grid", {{"panels", s.grid.panels}, {"points", s.grid.points}}},
          {"h", vector_to_json(s.h)},
          {"metrics", metrics},
          {"output", s.output}};
}

std::string scenario_hash(const Scenario& s) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : scenario_to_json(s).dump()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

// ---------------------------------------------------------------------------
// Operators and vectors

OperatorPaird build_operator_pair(const Scenario& s) {
  return std::visit(
      [&](const auto& src) -> OperatorPaird {
        using S = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<S, RandomPsdSource>) {
          const ComplexMatrixd a = random_psd_matrix<double>(src.dim, derive_seed(src.seed, 1), src.spectral_scale);
          const ComplexMatrixd b = random_psd_matrix<double>(src.dim, derive_seed(src.seed, 2), src.spectral_scale);
          std::optional<ComplexMatrixd> p;
          if (src.zeno_rank) p = coordinate_projection<double>(src.dim, *src.zeno_rank);
          return make_operator_pair<double>(a, b, p);
        } else if constexpr (std::is_same_v<S, ExplicitSource>) {
          std::filesystem::path path(src.path);
          if (path.is_relative()) path = s.base_dir / path;
          const json j = read_json_file(path);
          const std::string where = path.string();
          if (!j.is_object()) fail(where, "expected {\"a\": ..., \"b\": ...}");
          allow_keys(j, where, {"a", "b", "p"});
          const ComplexMatrixd a = matrix_from_json(require(j, "a", where), where + ".a");
          const ComplexMatrixd b = matrix_from_json(require(j, "b", where), where + ".b");
          std::optional<ComplexMatrixd> p;
          if (j.contains("p") && !j.at("p").is_null()) p = matrix_from_json(j.at("p"), where + ".p");
          return make_operator_pair<double>(a, b, p);
        } else {
          std::optional<ComplexMatrixd> p;
          if (src.zeno_rank) p = coordinate_projection<double>(src.grid_points, *src.zeno_rank);
          return assemble_schrodinger(src.grid_points, src.box_half_width, src.potential, p);
        }
      },
      s.source);
}

ComplexVectord build_vector(const VectorSpec& spec, Eigen::Index dim) {
  switch (spec.kind) {
    case VectorSpec::Kind::Basis: {
      if (spec.index < 0 || spec.index >= dim) throw Error(Errc::InvalidArgument, "basis index outside [0, dim)");
      ComplexVectord h = ComplexVectord::Zero(dim);
      h(spec.index) = 1;
      return h;
    }
    case VectorSpec::Kind::Random: {
      SplitMix64 rng(spec.seed);
      ComplexVectord h(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = rng.uniform(-1, 1);
        const double im = rng.uniform(-1, 1);
        h(i) = {re, im};
      }
      return h / h.norm();
    }
    case VectorSpec::Kind::Constant:
      return ComplexVectord::Constant(dim, std::complex<double>(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
  }
  throw Error(Errc::InvalidArgument, "unknown vector kind");
}

// ---------------------------------------------------------------------------
// Running

void RunRecord::check_complete(const Scenario& s) const {
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<long long>> found;
  for (const auto& r : reports) {
    auto& ns = found[{r.scheme, r.variant_params, r.metric.label()}];
    for (const auto& e : r.entries) ns.push_back(e.n);
  }
  std::size_t expected_reports = 0;
  for (const auto& scheme : s.schemes) {
    for (const auto& m : s.metrics) {
      ++expected_reports;
      const auto it = found.find({scheme.name(), scheme.params(), m.metric.label()});
      if (it == found.end() || it->second != m.n_values(s.n_values))
        throw Error(Errc::InvalidArgument,
                    "run record is missing cells for " + scheme.name() + " / " + m.metric.label());
    }
  }
  if (found.size() != expected_reports || reports.size() != expected_reports)
    throw Error(Errc::InvalidArgument, "run record has unrequested or duplicate reports");
}

RunRecord run(const Scenario& s, const RunOptions& options) {
  const OperatorPaird pair = build_operator_pair(s);
  const ComplexVectord h = build_vector(s.h, pair.dim());
  const auto grid = QuadratureGrid<double>::gauss_legendre(s.T, s.grid.panels, s.grid.points);

  // Zeno cells see P h directly, so the projection warning is logged once here.
  std::optional<ComplexVectord> h_zeno;
  for (const auto& scheme : s.schemes) {
    if (scheme.is_zeno() && !h_zeno) h_zeno = detail::prepare_vector(pair, scheme, h);
  }

  struct Cell {
    std::size_t report;
    std::size_t entry;
    long long n;
  };
  RunRecord record;
  std::vector<Cell> cells;
  std::vector<std::pair<std::size_t, std::size_t>> report_keys;  // (scheme, metric)
  for (std::size_t si = 0; si < s.schemes.size(); ++si) {
    for (std::size_t mi = 0; mi < s.metrics.size(); ++mi) {
      const ProductScheme& scheme = s.schemes[si];
      ConvergenceReport r;
      r.scheme = scheme.name();
      r.variant_params = scheme.params();
      r.metric = s.metrics[mi].metric;
      r.T = s.T;
      r.grid = grid.description();
      r.dim = pair.dim();
      r.seed = source_seed(s);
      r.vector_descriptor = vector_descriptor(s.h);
      const auto ns = s.metrics[mi].n_values(s.n_values);
      r.entries.resize(ns.size());
      for (std::size_t k = 0; k < ns.size(); ++k) {
        r.entries[k].n = ns[k];
        cells.push_back({record.reports.size(), k, ns[k]});
      }
      record.reports.push_back(std::move(r));
      report_keys.emplace_back(si, mi);
    }
  }

  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const Cell& cell = cells[c];
      const auto [si, mi] = report_keys[cell.report];
      const ProductScheme& scheme = s.schemes[si];
      const Metric& metric = s.metrics[mi].metric;
      const ComplexVectord& v = scheme.is_zeno() ? *h_zeno : h;
      try {
        const double e = metric_error(pair, scheme, metric, cell.n, v, grid);
        auto& entry = record.reports[cell.report].entries[cell.entry];
        entry.error = e;
        entry.error_normalized = normalize_error(metric, e, v.norm(), s.T);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(options.threads, 1, 256);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<std::size_t> order(record.reports.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto key = [&](std::size_t i) {
    const auto& r = record.reports[i];
    return std::make_tuple(r.scheme, r.variant_params, r.metric.label());
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<ConvergenceReport> sorted;
  bool demonstration = false;
  for (std::size_t i : order) {
    const bool demo = is_demonstration(s, s.schemes[report_keys[i].first]);
    demonstration = demonstration || demo;
    record.report_labels.push_back(demo ? "demonstration" : "verification");
    sorted.push_back(std::move(record.reports[i]));
  }
  record.reports = std::move(sorted);
  record.label = demonstration ? "demonstration" : "verification";
  record.scenario_hash = scenario_hash(s);
  record.timestamp = utc_timestamp();
  record.environment = {
      {"hermitian_tolerance", tolerances::kHermitian},
      {"psd_tolerance", tolerances::kPsd},
      {"singular_resolvent_tolerance", tolerances::kSingularResolvent},
      {"projection_tolerance", tolerances::kProjection},
      {"kato_budget_tolerance", kato::tolerances::kBudget},
      {"kato_pole_tolerance", kato::tolerances::kPole},
      {"grid", grid.description()},
  };
  record.check_complete(s);
  return record;
}

// ---------------------------------------------------------------------------
// Output

std::string to_csv(const RunRecord& record) {
  std::string out = "scheme,variant_params,metric,n,T,dim,seed,error,error_normalized\n";
  for (const auto& r : record.reports) {
    for (const auto& e : r.entries) {
      out += r.scheme + "," + r.variant_params + "," + r.metric.label() + "," + std::to_string(e.n) + "," + g17(r.T) +
             "," + std::to_string(r.dim) + "," + std::to_string(r.seed) + "," + g17(e.error) + "," +
             g17(e.error_normalized) + "\n";
    }
  }
  return out;
}

json to_json(const RunRecord& record) {
  json reports = json::array();
  for (std::size_t i = 0; i < record.reports.size(); ++i) {
    const auto& r = record.reports[i];
    json entries = json::array();
    for (const auto& e : r.entries)
      entries.push_back({{"n", e.n}, {"error", e.error}, {"error_normalized", e.error_normalized}});
    reports.push_back({{"scheme", r.scheme},
                       {"variant_params", r.variant_params},
                       {"metric", r.metric.label()},
                       {"label", record.report_labels.at(i)},
                       {"T", r.T},
                       {"grid", r.grid},
                       {"dim", r.dim},
                       {"seed", r.seed},
                       {"vector", r.vector_descriptor},
                       {"entries", entries}});
  }
  return {{"schema", kSchemaVersion},
          {"scenario_hash", record.scenario_hash},
          {"timestamp", record.timestamp},
          {"label", record.label},
          {"environment", record.environment},
          {"reports", reports}};
}

std::vector<std::filesystem::path> emit(const RunRecord& record, const std::string& prefix,
                                        const std::vector<Format>& formats, bool force) {
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (Format f : formats) {
    if (f == Format::Csv) files.emplace_back(prefix + ".report.csv", to_csv(record));
    if (f == Format::Json) files.emplace_back(prefix + ".report.json", to_json(record).dump(2) + "\n");
  }
  if (!force)
    for (const auto& [path, text] : files)
      if (std::filesystem::exists(path))
        throw Error(Errc::IoError, path.string() + " exists (use --force to overwrite)");
  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
      if (ec) throw Error(Errc::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    out << text;
    out.close();
    if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace katolab::harness
