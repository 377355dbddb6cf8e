#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <string>

#include "kksketch/experiments.hpp"

namespace kksketch {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key())) fail("unknown key '" + item.key() + "' in " + where);
  }
}

double number_or_inf(const json& v, const std::string& what) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return kInf;
  if (!v.is_number()) fail(what + " must be a number or \"inf\"");
  return v.get<double>();
}

json inf_or_number(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return v;
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(std::string("invalid value for '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::vector<Vector> vectors_from_json(const json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array of vectors");
  try {
    return v.get<std::vector<Vector>>();
  } catch (const json::exception&) {
    fail(what + " must be an array of numeric arrays");
  }
}

}  // namespace

nlohmann::json to_json(const MeasureSpec& measure) {
  json out = {{"family", std::string(to_string(measure.family()))},
              {"dim", measure.dim()},
              {"scale", measure.scale()}};
  if (measure.family() == MeasureFamily::uniform_polytope) {
    out["facets"] = measure.facets();
    out["burn_in"] = measure.burn_in();
    out["thinning"] = measure.thinning();
  }
  return out;
}

MeasureSpec measure_from_json(const nlohmann::json& doc, std::size_t dim) {
  reject_unknown_keys(doc, {"family", "dim", "scale", "facets", "burn_in", "thinning"}, "measure");
  if (!doc.contains("family") || !doc.at("family").is_string()) fail("measure.family is required");
  if (doc.contains("dim") && get_count(doc, "dim", 0) != dim) fail("measure.dim does not match n");
  const double scale = get_or<double>(doc, "scale", 1.0);
  try {
    const auto family = parse_measure_family(doc.at("family").get<std::string>());
    if (family != MeasureFamily::uniform_polytope) {
      if (doc.contains("facets")) fail("measure.facets only applies to uniform_polytope");
      return MeasureSpec(family, dim, scale);
    }
    const HitAndRunConfig walk{get_count(doc, "burn_in", 0), get_count(doc, "thinning", 0)};
    if (!doc.contains("facets")) fail("uniform_polytope requires measure.facets");
    const auto& facets = doc.at("facets");
    if (facets.is_string() && facets == "cube") return MeasureSpec::cube_as_polytope(dim, scale, walk);
    auto fs = vectors_from_json(facets, "measure.facets");
    for (const auto& f : fs) {
      if (f.size() != dim) fail("measure.facets vectors must have n entries");
    }
    return MeasureSpec::polytope(std::move(fs), scale, walk);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(std::string("measure: ") + e.what());
  }
}

nlohmann::json to_json(const NormOracle& norm) {
  switch (norm.kind()) {
    case NormKind::lp:
      return {{"kind", "lp"}, {"p", inf_or_number(norm.p())}};
    case NormKind::weighted_lp:
      return {{"kind", "weighted_lp"}, {"p", inf_or_number(norm.p())}, {"weights", norm.weights()}};
    case NormKind::polytope_gauge:
      return {{"kind", "polytope_gauge"}, {"facets", norm.facets()}};
  }
  return {};
}

NormOracle norm_from_json(const nlohmann::json& doc, std::size_t dim) {
  reject_unknown_keys(doc, {"kind", "p", "weights", "facets"}, "norm");
  const auto kind = get_or<std::string>(doc, "kind", "lp");
  try {
    if (kind == "lp") {
      return NormOracle::lp(dim, doc.contains("p") ? number_or_inf(doc.at("p"), "norm.p") : 2.0);
    }
    if (kind == "weighted_lp") {
      if (!doc.contains("weights")) fail("weighted_lp requires norm.weights");
      auto w = get_or<Vector>(doc, "weights", {});
      if (w.size() != dim) fail("norm.weights must have one entry per ambient coordinate");
      return NormOracle::weighted_lp(doc.contains("p") ? number_or_inf(doc.at("p"), "norm.p") : 2.0,
                                     std::move(w));
    }
    if (kind == "polytope_gauge") {
      if (!doc.contains("facets")) fail("polytope_gauge requires norm.facets");
      auto fs = vectors_from_json(doc.at("facets"), "norm.facets");
      for (const auto& f : fs) {
        if (f.size() != dim) fail("norm.facets vectors must have one entry per ambient coordinate");
      }
      return NormOracle::polytope_gauge(std::move(fs));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(std::string("norm: ") + e.what());
  }
  fail("unknown norm kind '" + kind + "'");
}

Frame ExperimentConfig::build_frame() const {
  switch (frame.kind) {
    case FrameSpec::Kind::standard_basis:
      return Frame::standard_basis(n, norm);
    case FrameSpec::Kind::random:
      return Frame::random(n, norm, frame.seed);
    case FrameSpec::Kind::explicit_vectors:
      return Frame(frame.vectors, norm);
  }
  fail("unknown frame kind");
}

void ExperimentConfig::validate() const {
  if (n == 0) fail("n must be positive");
  if (measure.dim() != n) fail("measure dimension must equal n");
  const std::size_t m = frame.ambient_dim == 0 ? n : frame.ambient_dim;
  if (norm.dim() != m) fail("norm dimension must equal the frame's ambient dimension");
  if (frame.kind == FrameSpec::Kind::standard_basis && m != n) {
    fail("standard_basis frame requires ambient dimension n");
  }
  if (frame.kind == FrameSpec::Kind::explicit_vectors) {
    if (frame.vectors.size() != n) fail("explicit frame must list n vectors");
    for (const auto& v : frame.vectors) {
      if (v.size() != m) fail("explicit frame vectors must have m entries");
    }
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) fail("delta must be positive and finite");
  if (trials == 0) fail("trials must be at least 1");
  if (probes == 0) fail("probes must be at least 1");
  if (thresholds.empty()) fail("at least one threshold pair is required");
  for (const auto& t : thresholds) {
    if (std::isnan(t.c_low) || std::isnan(t.C_high) || t.c_low > t.C_high) {
      fail("threshold pairs must satisfy c_low <= C_high");
    }
  }
  if (adversarial.enabled && (adversarial.restarts == 0 || adversarial.steps == 0)) {
    fail("adversarial search needs restarts >= 1 and steps >= 1");
  }
  if (reference.mode == ReferenceSpec::Mode::mc && reference.mc_samples < 2) {
    fail("reference mode 'mc' needs mc_samples >= 2");
  }
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  reject_unknown_keys(doc,
                      {"measure", "norm", "frame", "n", "delta", "trials", "probes", "adversarial",
                       "reference", "seed", "thresholds", "constants", "output"},
                      "config");
  for (const char* key : {"measure", "norm", "n", "delta"}) {
    if (!doc.contains(key)) fail(std::string("config is missing required key '") + key + "'");
  }
  ExperimentConfig c;
  c.n = get_count(doc, "n", 0);
  if (c.n == 0) fail("n must be positive");
  if (!doc.at("delta").is_number()) fail("delta must be a number");
  c.delta = doc.at("delta").get<double>();

  if (doc.contains("frame")) {
    const auto& f = doc.at("frame");
    reject_unknown_keys(f, {"kind", "m", "seed", "vectors"}, "frame");
    const auto kind = get_or<std::string>(f, "kind", "standard_basis");
    c.frame.ambient_dim = get_count(f, "m", 0);
    c.frame.seed = get_or<std::uint64_t>(f, "seed", 0);
    if (kind == "standard_basis") {
      c.frame.kind = FrameSpec::Kind::standard_basis;
    } else if (kind == "random") {
      c.frame.kind = FrameSpec::Kind::random;
    } else if (kind == "explicit") {
      c.frame.kind = FrameSpec::Kind::explicit_vectors;
      if (!f.contains("vectors")) fail("explicit frame requires frame.vectors");
      c.frame.vectors = vectors_from_json(f.at("vectors"), "frame.vectors");
      if (c.frame.ambient_dim == 0 && !c.frame.vectors.empty()) {
        c.frame.ambient_dim = c.frame.vectors.front().size();
      }
    } else {
      fail("unknown frame kind '" + kind + "'");
    }
  }
  const std::size_t m = c.frame.ambient_dim == 0 ? c.n : c.frame.ambient_dim;

  c.measure = measure_from_json(doc.at("measure"), c.n);
  c.norm = norm_from_json(doc.at("norm"), m);
  c.trials = get_count(doc, "trials", 1);
  c.probes = get_count(doc, "probes", 32);
  c.seed = get_or<std::uint64_t>(doc, "seed", 0);
  c.output = get_or<std::string>(doc, "output", "");

  if (doc.contains("adversarial")) {
    const auto& a = doc.at("adversarial");
    reject_unknown_keys(a, {"enabled", "restarts", "steps"}, "adversarial");
    c.adversarial.enabled = get_or<bool>(a, "enabled", false);
    c.adversarial.restarts = get_count(a, "restarts", c.adversarial.restarts);
    c.adversarial.steps = get_count(a, "steps", c.adversarial.steps);
  }
  if (doc.contains("reference")) {
    const auto& r = doc.at("reference");
    reject_unknown_keys(r, {"mode", "mc_samples"}, "reference");
    const auto mode = get_or<std::string>(r, "mode", "auto");
    if (mode == "auto") {
      c.reference.mode = ReferenceSpec::Mode::automatic;
    } else if (mode == "closed") {
      c.reference.mode = ReferenceSpec::Mode::closed;
    } else if (mode == "mc") {
      c.reference.mode = ReferenceSpec::Mode::mc;
    } else {
      fail("unknown reference mode '" + mode + "'");
    }
    c.reference.mc_samples = get_count(r, "mc_samples", c.reference.mc_samples);
  }
  if (doc.contains("thresholds")) {
    const auto& ts = doc.at("thresholds");
    if (!ts.is_array()) fail("thresholds must be an array of [c_low, C_high] pairs");
    c.thresholds.clear();
    for (const auto& t : ts) {
      if (!t.is_array() || t.size() != 2) fail("thresholds must be an array of [c_low, C_high] pairs");
      c.thresholds.push_back({number_or_inf(t[0], "c_low"), number_or_inf(t[1], "C_high")});
    }
  }
  if (doc.contains("constants")) {
    const auto& k = doc.at("constants");
    reject_unknown_keys(k, {"c_bernstein", "b_psi1", "c2", "c3", "c_prime", "c_b"}, "constants");
    auto& pc = c.constants;
    pc.c_bernstein = get_or<double>(k, "c_bernstein", pc.c_bernstein);
    pc.b_psi1 = get_or<double>(k, "b_psi1", pc.b_psi1);
    pc.c2 = get_or<double>(k, "c2", pc.c2);
    pc.c3 = get_or<double>(k, "c3", pc.c3);
    pc.c_prime = get_or<double>(k, "c_prime", pc.c_prime);
    pc.c_b = get_or<double>(k, "c_b", pc.c_b);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json frame;
  switch (c.frame.kind) {
    case FrameSpec::Kind::standard_basis: frame = {{"kind", "standard_basis"}}; break;
    case FrameSpec::Kind::random: frame = {{"kind", "random"}, {"seed", c.frame.seed}}; break;
    case FrameSpec::Kind::explicit_vectors: frame = {{"kind", "explicit"}, {"vectors", c.frame.vectors}}; break;
  }
  if (c.frame.ambient_dim != 0) frame["m"] = c.frame.ambient_dim;
  json thresholds = json::array();
  for (const auto& t : c.thresholds) thresholds.push_back({inf_or_number(t.c_low), inf_or_number(t.C_high)});
  const char* mode = c.reference.mode == ReferenceSpec::Mode::automatic ? "auto"
                     : c.reference.mode == ReferenceSpec::Mode::closed  ? "closed"
                                                                        : "mc";
  return {{"measure", to_json(c.measure)},
          {"norm", to_json(c.norm)},
          {"frame", frame},
          {"n", c.n},
          {"delta", c.delta},
          {"trials", c.trials},
          {"probes", c.probes},
          {"adversarial",
           {{"enabled", c.adversarial.enabled},
            {"restarts", c.adversarial.restarts},
            {"steps", c.adversarial.steps}}},
          {"reference", {{"mode", mode}, {"mc_samples", c.reference.mc_samples}}},
          {"seed", c.seed},
          {"thresholds", thresholds},
          {"constants",
           {{"c_bernstein", c.constants.c_bernstein},
            {"b_psi1", c.constants.b_psi1},
            {"c2", c.constants.c2},
            {"c3", c.constants.c3},
            {"c_prime", c.constants.c_prime},
            {"c_b", c.constants.c_b}}}};
}

}  // namespace kksketch
