#include "katolab/kato_json.hpp"

#include "katolab/error.hpp"

namespace katolab::kato {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(Errc::ConfigParse, (where.empty() ? "" : where + ": ") + what);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
  return number(j.at(key), where + "." + key);
}

int int_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

// Plain argument errors inside a descriptor become configuration errors; the
// Kato-specific codes (KappaExceedsOne, BudgetExceeded, ...) pass through.
template <typename F>
auto guarded(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() != Errc::InvalidArgument) throw;
    const std::string msg = (where.empty() ? "" : where + ": ") + e.what();
    if (e.value()) throw Error(Errc::ConfigParse, msg, *e.value());
    throw Error(Errc::ConfigParse, msg);
  }
}

}  // namespace

CanonicalInput parse_canonical_input(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  std::vector<Zero> zeros;
  if (j.contains("zeros")) {
    const json& zs = j.at("zeros");
    if (!zs.is_array()) fail(where + ".zeros", "expected an array of [re, im, mult]");
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const std::string w = where + ".zeros[" + std::to_string(i) + "]";
      const json& z = zs[i];
      if (!z.is_array() || z.size() < 2 || z.size() > 3) fail(w, "expected [re, im] or [re, im, mult]");
      int mult = 1;
      if (z.size() == 3) {
        if (!z[2].is_number_integer()) fail(w, "multiplicity must be an integer");
        mult = z[2].get<int>();
      }
      zeros.push_back({cplx(number(z[0], w), number(z[1], w)), mult});
    }
  }
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const json& as = j.at("atoms");
    if (!as.is_array()) fail(where + ".atoms", "expected an array of [s, w]");
    for (std::size_t i = 0; i < as.size(); ++i) {
      const std::string w = where + ".atoms[" + std::to_string(i) + "]";
      const json& a = as[i];
      if (!a.is_array() || a.size() != 2) fail(w, "expected [s, w]");
      atoms.push_back({number(a[0], w), number(a[1], w)});
    }
  }
  std::optional<AcWeight> weight;
  if (j.contains("ac_weight") && !j.at("ac_weight").is_null()) {
    const json& aw = j.at("ac_weight");
    const std::string w = where + ".ac_weight";
    if (!aw.is_object() || !aw.contains("id") || !aw.at("id").is_string()) fail(w, "expected {\"id\": ...}");
    const std::string id = aw.at("id").get<std::string>();
    if (id != "log_resolvent") fail(w, "unknown weight id \"" + id + "\"");
    const double k = field(aw, "k", w);
    const double scale = aw.contains("scale") ? number(aw.at("scale"), w + ".scale") : 1.0;
    weight = guarded(w, [&] { return AcWeight::log_resolvent(k, scale); });
  }
  CanonicalInput input;
  input.zeros = guarded(where + ".zeros", [&] { return ZeroSet(std::move(zeros)); });
  input.measure = guarded(where, [&] { return KatoMeasure(std::move(atoms), std::move(weight)); });
  if (j.contains("alpha")) input.forced_alpha = number(j.at("alpha"), where + ".alpha");
  return input;
}

KatoFunction kato_function_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("variant") || !j.at("variant").is_string())
    fail(where, "expected {\"variant\": ...}");
  const std::string v = j.at("variant").get<std::string>();
  if (v == "exp") return KatoFunction::exp();
  if (v == "resolvent_power") {
    const int k = int_field(j, "k", where);
    return guarded(where, [&] { return KatoFunction::resolvent_power(k); });
  }
  if (v == "single_pair") {
    const double eta = field(j, "eta", where);
    const double alpha = j.contains("alpha") ? number(j.at("alpha"), where + ".alpha") : 0.0;
    return guarded(where, [&] { return KatoFunction::single_pair(eta, alpha); });
  }
  if (v == "atomic_exp") {
    const double s = field(j, "s", where);
    const double alpha = j.contains("alpha") ? number(j.at("alpha"), where + ".alpha") : 0.0;
    return guarded(where, [&] { return KatoFunction::atomic_exp(s, alpha); });
  }
  if (v == "canonical") {
    CanonicalInput in = parse_canonical_input(j, where);
    return guarded(where, [&] {
      if (in.forced_alpha)
        return KatoFunction::canonical(CanonicalKato::with_forced_alpha(in.zeros, in.measure, *in.forced_alpha));
      return KatoFunction::canonical(build_canonical(in.zeros, in.measure));
    });
  }
  fail(where + ".variant", "unknown variant \"" + v + "\"");
}

json to_json(const CanonicalKato& c) {
  json j;
  j["variant"] = "canonical";
  json zeros = json::array();
  for (const Zero& z : c.zeros().zeros()) zeros.push_back({z.xi.real(), z.xi.imag(), z.multiplicity});
  j["zeros"] = zeros;
  json atoms = json::array();
  for (const Atom& a : c.measure().atoms()) atoms.push_back({a.s, a.w});
  j["atoms"] = atoms;
  if (const auto& w = c.measure().ac_weight()) {
    if (w->id() != "log_resolvent")
      throw Error(Errc::InvalidArgument, "weight \"" + w->id() + "\" has no JSON descriptor");
    j["ac_weight"] = {{"id", w->id()}, {"k", w->k()}, {"scale", w->scale()}};
  } else {
    j["ac_weight"] = nullptr;
  }
  if (c.alpha_forced()) j["alpha"] = c.alpha();
  return j;
}

json to_json(const KatoFunction& f) {
  return std::visit(
      [](const auto& v) -> json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ExpFunction>) {
          return {{"variant", "exp"}};
        } else if constexpr (std::is_same_v<V, ResolventPower>) {
          return {{"variant", "resolvent_power"}, {"k", v.k}};
        } else if constexpr (std::is_same_v<V, SinglePair>) {
          return {{"variant", "single_pair"}, {"eta", v.eta}, {"alpha", v.alpha}};
        } else if constexpr (std::is_same_v<V, AtomicExp>) {
          return {{"variant", "atomic_exp"}, {"s", v.s}, {"alpha", v.alpha}};
        } else {
          return to_json(v);
        }
      },
      f.variant());
}

}  // namespace katolab::kato
