#include "cbqs/problem.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace cbqs {

namespace {

using Json = nlohmann::ordered_json;

std::int64_t int_field(const Json& j, const char* what) {
  if (!j.is_number_integer())
    throw std::runtime_error(std::string("instance: ") + what + " must be an integer");
  return j.get<std::int64_t>();
}

std::vector<Term> parse_terms(const Json& arr) {
  std::vector<Term> out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_array())
      throw std::runtime_error("instance: term must be [[indices...], coeff]");
    Term t;
    for (const auto& v : e[0]) t.vars.push_back(static_cast<std::int32_t>(int_field(v, "index")));
    t.coeff = int_field(e[1], "coefficient");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<ProductTerm> parse_products(const Json& arr) {
  std::vector<ProductTerm> out;
  for (const auto& e : arr) {
    ProductTerm p;
    p.alpha = static_cast<std::int32_t>(int_field(e.at("alpha"), "alpha"));
    for (const auto& b : e.at("bases")) {
      if (!b.is_array() || b.size() != 2 || !b[0].is_array())
        throw std::runtime_error("instance: base must be [[indices...], base]");
      ProductFactor f;
      for (const auto& v : b[0]) f.vars.push_back(static_cast<std::int32_t>(int_field(v, "index")));
      f.base = int_field(b[1], "base");
      p.bases.push_back(std::move(f));
    }
    out.push_back(std::move(p));
  }
  return out;
}

Json terms_to_json(const std::vector<Term>& terms) {
  Json arr = Json::array();
  for (const auto& t : terms) arr.push_back(Json::array({t.vars, t.coeff}));
  return arr;
}

Json products_to_json(const std::vector<ProductTerm>& products) {
  Json arr = Json::array();
  for (const auto& p : products) {
    Json bases = Json::array();
    for (const auto& b : p.bases) bases.push_back(Json::array({b.vars, b.base}));
    arr.push_back(Json{{"alpha", p.alpha}, {"bases", std::move(bases)}});
  }
  return arr;
}

}  // namespace

ProblemInstance instance_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("instance: invalid JSON: ") + e.what());
  }
  try {
    const auto n = static_cast<std::int32_t>(int_field(j.at("n"), "n"));

    Polynomial objective;
    objective.n = n;
    std::vector<ProductTerm> objective_products;
    if (j.contains("objective")) {
      const auto& obj = j.at("objective");
      if (obj.contains("terms")) objective.terms = parse_terms(obj.at("terms"));
      if (obj.contains("products")) objective_products = parse_products(obj.at("products"));
    }

    std::vector<Constraint> constraints;
    if (j.contains("constraints")) {
      for (const auto& cj : j.at("constraints")) {
        Polynomial poly;
        poly.n = n;
        if (cj.contains("terms")) poly.terms = parse_terms(cj.at("terms"));
        std::vector<ProductTerm> products;
        if (cj.contains("products")) products = parse_products(cj.at("products"));
        const std::string sense_str = cj.at("sense").get<std::string>();
        Sense sense;
        if (sense_str == "LE") {
          sense = Sense::LE;
        } else if (sense_str == "GE") {
          sense = Sense::GE;
        } else {
          throw std::runtime_error("instance: sense must be \"LE\" or \"GE\"");
        }
        constraints.push_back(make_constraint(std::move(poly), std::move(products),
                                              int_field(cj.at("cap"), "cap"), sense));
      }
    }

    ProblemInstance inst = make_instance(n, std::move(objective),
                                         std::move(objective_products),
                                         std::move(constraints));
    if (j.contains("meta")) {
      inst.meta_json = j.at("meta").dump();
      if (j.at("meta").contains("id")) inst.id = j.at("meta").at("id").get<std::string>();
    }
    return inst;
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("instance: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("instance: malformed document: ") + e.what());
  }
}

std::string instance_to_json(const ProblemInstance& inst) {
  Json j;
  j["n"] = inst.n;
  Json obj;
  obj["terms"] = terms_to_json(inst.objective.terms);
  if (!inst.objective_products.empty())
    obj["products"] = products_to_json(inst.objective_products);
  j["objective"] = std::move(obj);
  Json constraints = Json::array();
  for (const auto& c : inst.constraints) {
    Json cj;
    cj["terms"] = terms_to_json(c.poly.terms);
    if (!c.products.empty()) cj["products"] = products_to_json(c.products);
    cj["cap"] = c.cap;
    cj["sense"] = "LE";  // instances are stored normalized
    constraints.push_back(std::move(cj));
  }
  j["constraints"] = std::move(constraints);
  if (!inst.meta_json.empty()) j["meta"] = Json::parse(inst.meta_json);
  return j.dump(2) + "\n";
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    ProblemInstance inst = instance_from_json(ss.str());
    if (inst.id.empty()) {
      auto slash = path.find_last_of('/');
      auto name = slash == std::string::npos ? path : path.substr(slash + 1);
      if (name.size() > 5 && name.ends_with(".json")) name.resize(name.size() - 5);
      inst.id = name;
    }
    return inst;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(e.what()) + " (" + path + ")");
  }
}

void save_instance(const ProblemInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(inst);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cbqs
