#include "gentwist/report.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace gentwist {

using OrderedJson = nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hashHex(const std::string& data) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(data);
  return os.str();
}

namespace {

OrderedJson verdictJson(const Verdict& v) {
  OrderedJson j;
  j["predicate"] = v.predicate;
  j["component"] = v.component;
  j["pass"] = v.pass;
  j["max_residual"] = v.maxResidual;
  j["samples"] = v.samples;
  j["tolerance"] = v.tolerance;
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.witness.present) {
    OrderedJson w;
    w["point"] = v.witness.point;
    w["fiber"] = v.witness.fiber;
    w["probe"] = v.witness.probe;
    w["residual"] = v.witness.residual;
    w["detail"] = v.witness.detail;
    j["witness"] = w;
  }
  return j;
}

Verdict verdictFromJson(const OrderedJson& j) {
  Verdict v;
  v.predicate = j.at("predicate").get<std::string>();
  v.component = j.at("component").get<std::string>();
  v.pass = j.at("pass").get<bool>();
  v.maxResidual = j.at("max_residual").get<double>();
  v.samples = j.at("samples").get<long>();
  v.tolerance = j.at("tolerance").get<double>();
  if (j.contains("reason")) v.reason = j.at("reason").get<std::string>();
  if (j.contains("witness")) {
    const auto& w = j.at("witness");
    v.witness.present = true;
    v.witness.point = w.at("point").get<int>();
    v.witness.fiber = w.at("fiber").get<int>();
    v.witness.probe = w.at("probe").get<int>();
    v.witness.residual = w.at("residual").get<double>();
    v.witness.detail = w.at("detail").get<std::string>();
  }
  return v;
}

}  // namespace

std::string reportJson(const Report& r) {
  OrderedJson j;
  j["version"] = r.version;
  j["spec_hash"] = r.specHash;
  j["seed"] = r.seed;
  OrderedJson suites = OrderedJson::array();
  for (const SuiteReport& s : r.suites) {
    OrderedJson sj;
    sj["name"] = s.name;
    OrderedJson verdicts = OrderedJson::array();
    for (const Verdict& v : s.verdicts) verdicts.push_back(verdictJson(v));
    sj["verdicts"] = verdicts;
    sj["elapsed_ms"] = s.elapsedMs;
    suites.push_back(sj);
  }
  j["suites"] = suites;
  return j.dump(2) + "\n";
}

Report reportFromJson(const std::string& text) {
  const OrderedJson j = OrderedJson::parse(text);
  Report r;
  r.version = j.at("version").get<std::string>();
  r.specHash = j.at("spec_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& sj : j.at("suites")) {
    SuiteReport s;
    s.name = sj.at("name").get<std::string>();
    for (const auto& vj : sj.at("verdicts")) s.verdicts.push_back(verdictFromJson(vj));
    s.elapsedMs = sj.at("elapsed_ms").get<double>();
    r.suites.push_back(std::move(s));
  }
  return r;
}

std::string reportText(const Report& r) {
  std::ostringstream os;
  os << "gentwist " << r.version << "  spec " << r.specHash << "  seed " << r.seed << "\n";
  for (const SuiteReport& s : r.suites) {
    os << "\nsuite " << s.name;
    if (s.elapsedMs > 0.0) os << "  (" << s.elapsedMs << " ms)";
    os << "\n";
    os << "  " << std::left << std::setw(36) << "predicate" << std::setw(5) << "comp"
       << std::setw(7) << "result" << std::setw(14) << "max residual" << "samples\n";
    for (const Verdict& v : s.verdicts) {
      std::ostringstream res;
      res << std::scientific << std::setprecision(3) << v.maxResidual;
      os << "  " << std::left << std::setw(36) << v.predicate << std::setw(5) << v.component
         << std::setw(7) << (v.pass ? "pass" : "FAIL") << std::setw(14) << res.str()
         << v.samples << "\n";
      if (!v.reason.empty()) os << "      reason: " << v.reason << "\n";
      if (v.witness.present) {
        os << "      witness: point " << v.witness.point;
        if (v.witness.fiber >= 0) os << ", fiber " << v.witness.fiber;
        if (v.witness.probe >= 0) os << ", probe " << v.witness.probe;
        os << ", residual " << std::scientific << std::setprecision(3) << v.witness.residual
           << " (" << v.witness.detail << ")\n";
      }
    }
  }
  return os.str();
}

bool reportAllPass(const Report& r) {
  for (const SuiteReport& s : r.suites)
    for (const Verdict& v : s.verdicts)
      if (!v.pass) return false;
  return true;
}

}  // namespace gentwist
