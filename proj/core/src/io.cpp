#include "hyperobs/io.hpp"

#include <fstream>

namespace hyperobs {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& where,
                       const std::string& what) {
  throw ParseError(origin + ": " + where + ": " + what);
}

Rat parse_weight(const json& j, const std::string& origin, const std::string& where) {
  if (j.is_string()) return rat_from_string(j.get<std::string>());
  if (j.is_number_integer()) return Rat(static_cast<long>(j.get<int64_t>()));
  fail(origin, where, "weight must be an exact \"p/q\" string or an integer");
}

SparseTensor parse_tensor(const json& j, int n, bool normalize, unsigned norm_shift,
                          const std::string& origin, const std::string& where) {
  if (!j.is_object()) fail(origin, where, "expected an object with order/entries");
  if (!j.contains("order") || !j["order"].is_number_integer())
    fail(origin, where, "missing integer field 'order'");
  const int order = j["order"].get<int>();
  if (order < 1) fail(origin, where, "order must be >= 1");
  SparseTensor t(order, n);
  if (!j.contains("entries") || !j["entries"].is_array())
    fail(origin, where, "missing array field 'entries'");
  // factorial normalization: (k-1)! for dynamics-like, k! for output-like
  Rat divisor(1);
  if (normalize) divisor = rat_factorial(static_cast<unsigned>(order) - norm_shift);
  size_t entry_no = 0;
  for (const auto& e : j["entries"]) {
    const std::string here = where + ".entries[" + std::to_string(entry_no++) + "]";
    if (!e.is_object() || !e.contains("idx") || !e.contains("w"))
      fail(origin, here, "expected {idx: [...], w: \"p/q\"}");
    Index idx;
    for (const auto& component : e["idx"]) {
      if (!component.is_number_integer()) fail(origin, here, "idx components must be integers");
      idx.push_back(component.get<int>());
    }
    if (static_cast<int>(idx.size()) != order)
      fail(origin, here, "idx length " + std::to_string(idx.size()) +
                             " does not match order " + std::to_string(order));
    for (int c : idx)
      if (c < 1 || c > n)
        fail(origin, here, "index " + std::to_string(c) + " out of range 1.." +
                               std::to_string(n));
    Rat w = parse_weight(e["w"], origin, here);
    // duplicate tuples accumulate
    t.add(idx, w / divisor);
  }
  return t;
}

std::vector<SparseTensor> parse_tensor_list(const json& j, int n, bool normalize,
                                            unsigned norm_shift, const std::string& origin,
                                            const std::string& where) {
  if (!j.is_array()) fail(origin, where, "expected an array of tensors");
  std::vector<SparseTensor> out;
  size_t k = 0;
  for (const auto& t : j)
    out.push_back(parse_tensor(t, n, normalize, norm_shift, origin,
                               where + "[" + std::to_string(k++) + "]"));
  return out;
}

nlohmann::ordered_json tensor_to_json(const SparseTensor& t) {
  nlohmann::ordered_json out;
  out["order"] = t.order();
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& [idx, w] : t.entries()) {
    nlohmann::ordered_json e;
    e["idx"] = idx;
    e["w"] = rat_to_string(w);
    entries.push_back(std::move(e));
  }
  out["entries"] = std::move(entries);
  return out;
}

}  // namespace

SystemFile parse_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  return parse_system_json(doc, path);
}

SystemFile parse_system_json(const json& doc, const std::string& origin) {
  if (!doc.is_object()) fail(origin, "$", "top level must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    fail(origin, "n", "missing integer state dimension");
  SystemFile file;
  HypergraphSystem& sys = file.system;
  sys.n = doc["n"].get<int>();
  if (sys.n < 1) fail(origin, "n", "state dimension must be >= 1");

  file.normalize_weights =
      doc.contains("normalize_weights") && doc["normalize_weights"].get<bool>();

  if (doc.contains("labels")) {
    for (const auto& l : doc["labels"]) sys.labels.push_back(l.get<std::string>());
    if (static_cast<int>(sys.labels.size()) != sys.n)
      fail(origin, "labels", "label count does not match n");
  }

  if (doc.contains("dynamics"))
    sys.dynamics =
        parse_tensor_list(doc["dynamics"], sys.n, file.normalize_weights, 1, origin, "dynamics");
  if (doc.contains("inputs")) {
    if (!doc["inputs"].is_array()) fail(origin, "inputs", "expected array per input");
    size_t j = 0;
    for (const auto& list : doc["inputs"])
      sys.inputs.push_back(parse_tensor_list(list, sys.n, file.normalize_weights, 1, origin,
                                             "inputs[" + std::to_string(j++) + "]"));
  }
  if (doc.contains("outputs")) {
    if (!doc["outputs"].is_array()) fail(origin, "outputs", "expected array per output");
    size_t i = 0;
    for (const auto& list : doc["outputs"])
      sys.outputs.push_back(parse_tensor_list(list, sys.n, file.normalize_weights, 0, origin,
                                              "outputs[" + std::to_string(i++) + "]"));
  }
  if (doc.contains("direct")) {
    if (!doc["direct"].is_array()) fail(origin, "direct", "expected array per output");
    size_t i = 0;
    for (const auto& per_output : doc["direct"]) {
      std::vector<std::vector<SparseTensor>> lists;
      size_t l = 0;
      for (const auto& list : per_output)
        lists.push_back(parse_tensor_list(list, sys.n, file.normalize_weights, 0, origin,
                                          "direct[" + std::to_string(i) + "][" +
                                              std::to_string(l++) + "]"));
      sys.direct.push_back(std::move(lists));
      ++i;
    }
  }

  int max_order = 1;
  auto bump = [&](const std::vector<SparseTensor>& list) {
    for (const auto& t : list) max_order = std::max(max_order, t.order());
  };
  bump(sys.dynamics);
  for (const auto& l : sys.inputs) bump(l);
  for (const auto& l : sys.outputs) bump(l);
  for (const auto& per_output : sys.direct)
    for (const auto& l : per_output) bump(l);
  sys.max_cardinality = doc.contains("max_cardinality")
                            ? doc["max_cardinality"].get<int>()
                            : max_order;

  if (doc.contains("sigma")) {
    std::vector<Rat> sigma;
    for (const auto& s : doc["sigma"]) sigma.push_back(parse_weight(s, origin, "sigma"));
    if (static_cast<int>(sigma.size()) != sys.n)
      fail(origin, "sigma", "sigma length does not match n");
    file.sigma = std::move(sigma);
  }

  if (doc.contains("design")) {
    const auto& d = doc["design"];
    DesignConfig cfg;
    if (d.contains("d_max")) cfg.d_max = d["d_max"].get<int>();
    if (d.contains("p")) cfg.p = d["p"].get<int>();
    if (d.contains("r_relax")) cfg.r_relax = d["r_relax"].get<int>();
    if (cfg.d_max < 1) fail(origin, "design.d_max", "must be >= 1");
    if (cfg.p < 1) fail(origin, "design.p", "must be >= 1");
    file.design = cfg;
  }

  try {
    sys.validate();
  } catch (const SystemError& e) {
    fail(origin, "$", e.what());
  }
  return file;
}

nlohmann::ordered_json system_to_json(const SystemFile& file) {
  nlohmann::ordered_json out;
  const HypergraphSystem& sys = file.system;
  out["n"] = sys.n;
  if (!sys.labels.empty()) out["labels"] = sys.labels;
  out["normalize_weights"] = false;  // stored tensors are already literal
  out["max_cardinality"] = sys.max_cardinality;
  nlohmann::ordered_json dynamics = nlohmann::ordered_json::array();
  for (const auto& t : sys.dynamics) dynamics.push_back(tensor_to_json(t));
  out["dynamics"] = std::move(dynamics);
  if (!sys.inputs.empty()) {
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& list : sys.inputs) {
      nlohmann::ordered_json one = nlohmann::ordered_json::array();
      for (const auto& t : list) one.push_back(tensor_to_json(t));
      inputs.push_back(std::move(one));
    }
    out["inputs"] = std::move(inputs);
  }
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
  for (const auto& list : sys.outputs) {
    nlohmann::ordered_json one = nlohmann::ordered_json::array();
    for (const auto& t : list) one.push_back(tensor_to_json(t));
    outputs.push_back(std::move(one));
  }
  out["outputs"] = std::move(outputs);
  if (!sys.direct.empty()) {
    nlohmann::ordered_json direct = nlohmann::ordered_json::array();
    for (const auto& per_output : sys.direct) {
      nlohmann::ordered_json per = nlohmann::ordered_json::array();
      for (const auto& list : per_output) {
        nlohmann::ordered_json one = nlohmann::ordered_json::array();
        for (const auto& t : list) one.push_back(tensor_to_json(t));
        per.push_back(std::move(one));
      }
      direct.push_back(std::move(per));
    }
    out["direct"] = std::move(direct);
  }
  if (file.sigma) {
    nlohmann::ordered_json sigma = nlohmann::ordered_json::array();
    for (const auto& s : *file.sigma) sigma.push_back(rat_to_string(s));
    out["sigma"] = std::move(sigma);
  }
  if (file.design) {
    nlohmann::ordered_json d;
    d["d_max"] = file.design->d_max;
    d["p"] = file.design->p;
    d["r_relax"] = file.design->r_relax;
    out["design"] = std::move(d);
  }
  return out;
}

}  // namespace hyperobs
