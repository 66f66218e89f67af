#include "pframe/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pframe/errors.hpp"

namespace pframe {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw InputError(where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

const json& required(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing '") + key + "'");
  return *it;
}

double real(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "non-finite number");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<long long>();
  if (v < -1000000 || v > 1000000) fail(where, "integer out of range");
  return static_cast<int>(v);
}

std::vector<double> reals(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(real(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Vector coordinates(const json& j, int dimension, const std::string& where) {
  const std::vector<double> v = reals(j, where);
  if (static_cast<int>(v.size()) != dimension) {
    fail(where, "expected " + std::to_string(dimension) + " coordinates, got " + std::to_string(v.size()));
  }
  return Eigen::Map<const Vector>(v.data(), dimension);
}

Family family(const json& j, int dimension, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of coordinate arrays");
  Family out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(coordinates(j[i], dimension, where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<Family> families(const json& j, int dimension, std::size_t members, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of families");
  std::vector<Family> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    out.push_back(family(j[k], dimension, at));
    if (out.back().size() != members) fail(at, "family cardinality differs from 'functionals'");
  }
  return out;
}

SpaceData space_data(const json& j, const std::string& where) {
  SpaceData s;
  s.dimension = integer(required(j, where, "dimension"), where + ".dimension");
  s.order = integer(required(j, where, "order"), where + ".order");
  if (s.dimension < 2) fail(where, "dimension must be at least 2");
  if (s.order < 2 || s.order > s.dimension) fail(where, "order must satisfy 2 <= order <= dimension");
  const json& anchors = required(j, where, "anchors");
  if (!anchors.is_array() || static_cast<int>(anchors.size()) != s.order - 1) {
    fail(where + ".anchors", "expected order - 1 anchors");
  }
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    s.anchors.push_back(coordinates(anchors[i], s.dimension, where + ".anchors[" + std::to_string(i) + "]"));
  }
  return s;
}

double exponent(const json& j, const std::string& where) {
  const double p = real(j, where);
  if (!(p > 1.0)) fail(where, "p must exceed 1");
  return p;
}

OptimizerConfig optimizer_block(const json& j) {
  const std::string where = "optimizer";
  allow_keys(j, where, {"starts", "max_iters", "tol", "grid_res"});
  OptimizerConfig c;
  if (j.contains("starts")) c.starts = integer(j["starts"], where + ".starts");
  if (j.contains("max_iters")) c.max_iters = integer(j["max_iters"], where + ".max_iters");
  if (j.contains("tol")) c.tol = real(j["tol"], where + ".tol");
  if (j.contains("grid_res")) c.grid_resolution = real(j["grid_res"], where + ".grid_res");
  try {
    c.validate();
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  return c;
}

PerturbationBlock perturbation_block(const json& j, const Instance& inst) {
  const std::string where = "perturbation";
  if (!j.is_object() || j.size() != 1) fail(where, "expected exactly one block");
  const auto& [kind, b] = *j.items().begin();
  const std::string at = where + "." + kind;
  const int d = inst.space.dimension;
  const std::size_t m = inst.functionals.size();
  if (kind == "rank_one") {
    allow_keys(b, at, {"c", "R"});
    RankOneBlock r{reals(required(b, at, "c"), at + ".c"), coordinates(required(b, at, "R"), d, at + ".R")};
    if (r.c.size() != m) fail(at + ".c", "length must equal the number of functionals");
    return r;
  }
  if (kind == "confined") {
    allow_keys(b, at, {"alpha", "beta", "lambda", "mu"});
    ConfinedBlock c{reals(required(b, at, "alpha"), at + ".alpha"), reals(required(b, at, "beta"), at + ".beta"),
                    real(required(b, at, "lambda"), at + ".lambda"), real(required(b, at, "mu"), at + ".mu")};
    if (c.alpha.size() != m || c.beta.size() != m) fail(at, "alpha and beta must have one entry per functional");
    return c;
  }
  if (kind == "stability") {
    allow_keys(b, at, {"alpha", "beta"});
    StabilityBlock s;
    if (b.contains("alpha")) s.alpha = real(b["alpha"], at + ".alpha");
    s.beta = real(required(b, at, "beta"), at + ".beta");
    return s;
  }
  if (kind == "equivalence") {
    allow_keys(b, at, {"M", "combiner"});
    EquivalenceBlock e;
    e.M = real(required(b, at, "M"), at + ".M");
    if (b.contains("combiner")) {
      const json& c = b["combiner"];
      if (c == "sound_max") {
        e.combiner = Combiner::sound_max;
      } else if (c == "paper_min") {
        e.combiner = Combiner::paper_min;
      } else {
        fail(at + ".combiner", "expected \"sound_max\" or \"paper_min\"");
      }
    }
    return e;
  }
  if (kind == "finite_sum") {
    allow_keys(b, at, {"coefficients", "m", "beta", "extra_families"});
    FiniteSumBlock f;
    f.coefficients = reals(required(b, at, "coefficients"), at + ".coefficients");
    f.m = integer(required(b, at, "m"), at + ".m");
    f.beta = real(required(b, at, "beta"), at + ".beta");
    if (b.contains("extra_families")) f.extra_families = families(b["extra_families"], d, m, at + ".extra_families");
    if (f.coefficients.size() != f.extra_families.size() + 1) fail(at, "one coefficient per family is required");
    return f;
  }
  if (kind == "operator_sum") {
    allow_keys(b, at, {"Q", "lambda", "m", "base_families", "extra_families"});
    OperatorSumBlock o;
    const json& q = required(b, at, "Q");
    if (!q.is_array() || q.size() != m) fail(at + ".Q", "expected an m x m array");
    o.Q.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      const std::vector<double> row = reals(q[i], at + ".Q[" + std::to_string(i) + "]");
      if (row.size() != m) fail(at + ".Q", "expected an m x m array");
      for (std::size_t k = 0; k < m; ++k) o.Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
    }
    o.lambda = real(required(b, at, "lambda"), at + ".lambda");
    o.m = b.contains("m") ? integer(b["m"], at + ".m") : 1;
    o.base_families = families(required(b, at, "base_families"), d, m, at + ".base_families");
    if (b.contains("extra_families")) o.extra_families = families(b["extra_families"], d, m, at + ".extra_families");
    if (o.base_families.size() != o.extra_families.size() + 1) {
      fail(at, "base_families must match functionals plus extra_families");
    }
    return o;
  }
  fail(where, "unknown block '" + kind + "'");
}

json coordinates_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json family_json(const Family& f) {
  json a = json::array();
  for (const auto& v : f) a.push_back(coordinates_json(v));
  return a;
}

json families_json(const std::vector<Family>& fs) {
  json a = json::array();
  for (const auto& f : fs) a.push_back(family_json(f));
  return a;
}

void put_space(json& j, const SpaceData& s) {
  j["dimension"] = s.dimension;
  j["order"] = s.order;
  j["anchors"] = family_json(s.anchors);
}

json to_json(const Instance& inst) {
  json j;
  put_space(j, inst.space);
  j["p"] = inst.p;
  j["functionals"] = family_json(inst.functionals);
  if (inst.second_family) j["second_family"] = family_json(*inst.second_family);
  std::visit(
      [&](const auto& block) {
        using T = std::decay_t<decltype(block)>;
        if constexpr (std::is_same_v<T, RankOneBlock>) {
          j["perturbation"]["rank_one"] = {{"c", block.c}, {"R", coordinates_json(block.R)}};
        } else if constexpr (std::is_same_v<T, ConfinedBlock>) {
          j["perturbation"]["confined"] = {
              {"alpha", block.alpha}, {"beta", block.beta}, {"lambda", block.lambda}, {"mu", block.mu}};
        } else if constexpr (std::is_same_v<T, StabilityBlock>) {
          j["perturbation"]["stability"] = {{"alpha", block.alpha}, {"beta", block.beta}};
        } else if constexpr (std::is_same_v<T, EquivalenceBlock>) {
          j["perturbation"]["equivalence"] = {
              {"M", block.M}, {"combiner", block.combiner == Combiner::sound_max ? "sound_max" : "paper_min"}};
        } else if constexpr (std::is_same_v<T, FiniteSumBlock>) {
          j["perturbation"]["finite_sum"] = {{"coefficients", block.coefficients},
                                             {"m", block.m},
                                             {"beta", block.beta},
                                             {"extra_families", families_json(block.extra_families)}};
        } else if constexpr (std::is_same_v<T, OperatorSumBlock>) {
          json q = json::array();
          for (Eigen::Index i = 0; i < block.Q.rows(); ++i) q.push_back(coordinates_json(block.Q.row(i).transpose()));
          j["perturbation"]["operator_sum"] = {{"Q", q},
                                               {"lambda", block.lambda},
                                               {"m", block.m},
                                               {"base_families", families_json(block.base_families)},
                                               {"extra_families", families_json(block.extra_families)}};
        }
      },
      inst.perturbation);
  if (inst.product) {
    json p;
    put_space(p, inst.product->space);
    p["functionals"] = family_json(inst.product->functionals);
    j["product"] = p;
  }
  if (inst.policy == ConstructionPolicy::project) j["policy"] = "project";
  if (inst.seed) j["seed"] = *inst.seed;
  if (inst.optimizer) {
    j["optimizer"] = {{"starts", inst.optimizer->starts},
                      {"max_iters", inst.optimizer->max_iters},
                      {"tol", inst.optimizer->tol},
                      {"grid_res", inst.optimizer->grid_resolution}};
  }
  return j;
}

}  // namespace

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("instance: ") + e.what());
  }
  allow_keys(j, "instance", {"dimension", "order", "anchors", "p", "functionals", "second_family", "perturbation",
                             "product", "policy", "seed", "optimizer"});
  Instance inst;
  inst.space = space_data(j, "instance");
  inst.p = exponent(required(j, "instance", "p"), "p");
  inst.functionals = family(required(j, "instance", "functionals"), inst.space.dimension, "functionals");
  if (j.contains("second_family")) {
    inst.second_family = family(j["second_family"], inst.space.dimension, "second_family");
    if (inst.second_family->size() != inst.functionals.size()) {
      fail("second_family", "cardinality differs from 'functionals'");
    }
  }
  if (j.contains("perturbation")) inst.perturbation = perturbation_block(j["perturbation"], inst);
  if (j.contains("product")) {
    const json& p = j["product"];
    allow_keys(p, "product", {"dimension", "order", "anchors", "functionals"});
    ProductBlock block{space_data(p, "product"), {}};
    block.functionals = family(required(p, "product", "functionals"), block.space.dimension, "product.functionals");
    if (block.space.order != inst.space.order) fail("product", "order differs from the first space");
    if (block.functionals.size() != inst.functionals.size()) fail("product.functionals", "cardinality mismatch");
    inst.product = std::move(block);
  }
  if (j.contains("policy")) {
    if (j["policy"] == "strict") {
      inst.policy = ConstructionPolicy::strict;
    } else if (j["policy"] == "project") {
      inst.policy = ConstructionPolicy::project;
    } else {
      fail("policy", "expected \"strict\" or \"project\"");
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    inst.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("optimizer")) inst.optimizer = optimizer_block(j["optimizer"]);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string serialize_instance(const Instance& instance) { return to_json(instance).dump(2) + "\n"; }

std::string instance_digest(const Instance& instance) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(instance).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SpacePtr build_space(const SpaceData& data) {
  return std::make_shared<const NSpace>(data.dimension, data.anchors);
}

PFrameFamily build_family(const SpacePtr& space, const Family& coeffs, double p, ConstructionPolicy policy) {
  return PFrameFamily(space, coeffs, p, policy);
}

const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids = {"thm3.4", "thm3.8", "thm3.9",  "thm3.11", "thm4.1", "thm4.2",
                                               "thm5.1", "cor5.2", "thm5.3", "thm5.4",  "thm5.5"};
  return ids;
}

bool is_theorem_id(const std::string& id) {
  const auto& ids = theorem_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

namespace {

template <typename Block>
const Block& need(const Instance& inst, const std::string& id, const char* name) {
  if (const auto* b = std::get_if<Block>(&inst.perturbation)) return *b;
  throw InputError(id + " needs a perturbation." + name + " block");
}

const Family& need_second(const Instance& inst, const std::string& id) {
  if (!inst.second_family) throw InputError(id + " needs 'second_family'");
  return *inst.second_family;
}

}  // namespace

TheoremVerdict check_instance(const Instance& inst, const std::string& id, const OptimizerConfig& config) {
  if (!is_theorem_id(id)) throw InputError("unknown theorem id '" + id + "'");
  const SpacePtr space = build_space(inst.space);
  auto make = [&](const Family& f) { return build_family(space, f, inst.p, inst.policy); };
  const PFrameFamily f = make(inst.functionals);

  if (id == "thm3.4") return check_bessel_sum(f, make(need_second(inst, id)), config);
  if (id == "thm3.8") return check_duality(f, config);
  if (id == "thm3.9") return check_synthesis(f, config);
  if (id == "thm3.11") {
    if (!inst.product) throw InputError(id + " needs a 'product' block");
    const SpacePtr other = build_space(inst.product->space);
    return check_product(f, build_family(other, inst.product->functionals, inst.p, inst.policy), config);
  }
  if (id == "thm4.1") {
    const auto& b = need<RankOneBlock>(inst, id, "rank_one");
    return check_rank_one(f, {b.c, make_functional(space, b.R, inst.policy)}, config);
  }
  if (id == "thm4.2") {
    const auto& b = need<ConfinedBlock>(inst, id, "confined");
    return check_confined(f, make(need_second(inst, id)), {b.alpha, b.beta, b.lambda, b.mu}, config);
  }
  if (id == "thm5.1") {
    const auto& b = need<StabilityBlock>(inst, id, "stability");
    return check_stability(f, make(need_second(inst, id)), {b.alpha, b.beta}, config);
  }
  if (id == "cor5.2") {
    const auto& b = need<StabilityBlock>(inst, id, "stability");
    if (b.alpha != 0.0) throw InputError("cor5.2 needs stability.alpha = 0");
    return check_stability_simple(f, make(need_second(inst, id)), b.beta, config);
  }
  if (id == "thm5.3") {
    const auto& b = need<EquivalenceBlock>(inst, id, "equivalence");
    return check_equivalence(f, make(need_second(inst, id)), {b.M, b.combiner}, config);
  }
  if (id == "thm5.4") {
    const auto& b = need<FiniteSumBlock>(inst, id, "finite_sum");
    std::vector<PFrameFamily> all{f};
    for (const auto& extra : b.extra_families) all.push_back(make(extra));
    return check_finite_sum(all, {b.coefficients, b.m, b.beta}, config);
  }
  const auto& b = need<OperatorSumBlock>(inst, id, "operator_sum");
  std::vector<PFrameFamily> perturbed{f};
  for (const auto& extra : b.extra_families) perturbed.push_back(make(extra));
  std::vector<PFrameFamily> frames;
  for (const auto& base : b.base_families) frames.push_back(make(base));
  return check_operator_sum(perturbed, frames, {b.Q, b.lambda, b.m}, config);
}

}  // namespace pframe
