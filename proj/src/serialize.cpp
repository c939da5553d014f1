#include <stdexcept>

#include "subavg/family.hpp"

namespace subavg {

namespace {

nlohmann::json pf_to_json(const PeriodicFunction& f) {
  nlohmann::json j;
  j["period"] = f.period();
  nlohmann::json table = nlohmann::json::array();
  for (const Rat& v : f.table()) table.push_back(rat_str(v));
  j["table"] = table;
  j["idx"] = f.indices();
  return j;
}

PeriodicFunction pf_from_json(const nlohmann::json& j) {
  const i64 period = j.at("period").get<i64>();
  std::vector<Rat> table;
  for (const auto& s : j.at("table")) table.push_back(parse_rat(s.get<std::string>()));
  std::vector<std::uint16_t> idx = j.at("idx").get<std::vector<std::uint16_t>>();
  if (static_cast<i64>(idx.size()) != period)
    throw std::invalid_argument("corrupt function: index size mismatch");
  std::vector<Rat> vals;
  vals.reserve(idx.size());
  for (std::uint16_t i : idx) {
    if (i >= table.size()) throw std::invalid_argument("corrupt function: index range");
    vals.push_back(table[i]);
  }
  return PeriodicFunction::from_values(vals);
}

nlohmann::json plan_to_json(const RearrangementPlan& plan) {
  nlohmann::json j;
  j["T"] = plan.T;
  j["p"] = plan.p;
  j["shifts"] = plan.shifts;
  return j;
}

RearrangementPlan plan_from_json(const nlohmann::json& j) {
  RearrangementPlan plan;
  plan.T = j.at("T").get<i64>();
  plan.p = j.at("p").get<i64>();
  plan.shifts = j.at("shifts").get<std::vector<i64>>();
  plan.validate();
  return plan;
}

nlohmann::json factor_to_json(const XFactor& f) {
  nlohmann::json j;
  nlohmann::json warps = nlohmann::json::array();
  for (const auto& w : f.warps) warps.push_back(plan_to_json(w));
  j["warps"] = warps;
  if (f.is_interval) {
    j["interval"] = {{"modulus", f.modulus}, {"bound", f.bound}};
  } else {
    j["set"] = {{"period", f.bitmap_period}, {"bits", f.bitmap}};
  }
  return j;
}

XFactor factor_from_json(const nlohmann::json& j) {
  XFactor f;
  for (const auto& w : j.at("warps")) f.warps.push_back(plan_from_json(w));
  if (j.contains("interval")) {
    f.is_interval = true;
    f.modulus = j["interval"].at("modulus").get<i64>();
    f.bound = j["interval"].at("bound").get<i64>();
  } else {
    f.is_interval = false;
    f.bitmap_period = j["set"].at("period").get<i64>();
    f.bitmap = j["set"].at("bits").get<std::vector<std::uint8_t>>();
    if (static_cast<i64>(f.bitmap.size()) != f.bitmap_period)
      throw std::invalid_argument("corrupt factor bitmap");
  }
  return f;
}

}  // namespace

std::vector<std::uint8_t> family_to_cbor(const Family& fam, const nlohmann::json& log) {
  nlohmann::json j;
  j["format"] = "subavg-family-v1";
  j["params"] = fam.params.to_json();
  j["T"] = fam.T;
  j["R"] = fam.R;
  nlohmann::json fs = nlohmann::json::array();
  for (const auto& f : fam.f) fs.push_back(pf_to_json(f));
  j["f"] = fs;
  nlohmann::json xs = nlohmann::json::array();
  for (const auto& x : fam.X) {
    nlohmann::json xj;
    xj["period"] = x.period();
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : x.terms()) {
      nlohmann::json tj;
      tj["coeff"] = rat_str(t.coeff);
      nlohmann::json factors = nlohmann::json::array();
      for (const auto& f : t.factors) factors.push_back(factor_to_json(f));
      tj["factors"] = factors;
      terms.push_back(tj);
    }
    xj["terms"] = terms;
    xs.push_back(xj);
  }
  j["X"] = xs;
  j["E"] = fam.E;
  j["q_values"] = fam.q_values;
  j["q_idx"] = fam.q_idx;
  j["provenance"] = log;
  return nlohmann::json::to_cbor(j);
}

Family family_from_cbor(const std::vector<std::uint8_t>& data, nlohmann::json* log_out) {
  nlohmann::json j = nlohmann::json::from_cbor(data);
  if (j.at("format").get<std::string>() != "subavg-family-v1")
    throw std::invalid_argument("unknown family container format");
  Family fam;
  fam.params = StepParams::from_json(j.at("params"));
  fam.T = j.at("T").get<i64>();
  fam.R = j.at("R").get<i64>();
  for (const auto& fj : j.at("f")) fam.f.push_back(pf_from_json(fj));
  for (const auto& xj : j.at("X")) {
    XFunction x;
    x.set_period(xj.at("period").get<i64>());
    for (const auto& tj : xj.at("terms")) {
      XTerm t;
      t.coeff = parse_rat(tj.at("coeff").get<std::string>());
      for (const auto& fj : tj.at("factors")) t.factors.push_back(factor_from_json(fj));
      x.terms().push_back(std::move(t));
    }
    fam.X.push_back(std::move(x));
  }
  fam.E = j.at("E").get<std::vector<std::uint8_t>>();
  fam.q_values = j.at("q_values").get<std::vector<i64>>();
  fam.q_idx = j.at("q_idx").get<std::vector<std::uint8_t>>();
  if (log_out && j.contains("provenance")) *log_out = j.at("provenance");
  fam.validate_structure();
  return fam;
}

}  // namespace subavg
