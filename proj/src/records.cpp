#include <algorithm>
#include <limits>

#include "errors.hpp"
#include "jsonutil.hpp"
#include "solver.hpp"

namespace pfde {

nlohmann::json mpz_to_json(const mpz_class& v) {
  if (mpz_fits_slong_p(v.get_mpz_t())) return static_cast<std::int64_t>(v.get_si());
  return v.get_str();
}

mpz_class mpz_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned()) return mpz_class(std::to_string(j.get<std::uint64_t>()));
    return mpz_class(std::to_string(j.get<std::int64_t>()));
  }
  if (j.is_string()) {
    mpz_class v;
    if (v.set_str(j.get<std::string>(), 10) != 0) fail(ErrorKind::InvalidArgument, "bad integer in JSON");
    return v;
  }
  fail(ErrorKind::InvalidArgument, "expected an integer in JSON");
}

}  // namespace pfde

namespace pfde::solver {

using nlohmann::json;

const Range* SearchBounds::find(const std::string& var) const {
  auto it = ranges.find(var);
  return it == ranges.end() ? nullptr : &it->second;
}

namespace {

const char* prune_kind_name(PruneCertificate::Kind k) {
  switch (k) {
    case PruneCertificate::Kind::Bertrand: return "bertrand";
    case PruneCertificate::Kind::NoRootModQ: return "no_root_mod_q";
    case PruneCertificate::Kind::Sign: return "sign";
  }
  return "bertrand";
}

PruneCertificate::Kind prune_kind_from(const std::string& s) {
  if (s == "bertrand") return PruneCertificate::Kind::Bertrand;
  if (s == "no_root_mod_q") return PruneCertificate::Kind::NoRootModQ;
  if (s == "sign") return PruneCertificate::Kind::Sign;
  fail(ErrorKind::InvalidArgument, "unknown prune rule '" + s + "'");
}

}  // namespace

json certificate_to_json(const Certificate& c) {
  if (std::holds_alternative<ExactEquality>(c)) return json{{"type", "exact"}};
  if (const auto* p = std::get_if<PruneCertificate>(&c)) {
    return json{{"type", "prune"},
                {"rule", prune_kind_name(p->kind)},
                {"q", p->q},
                {"valuation", mpz_to_json(p->valuation)},
                {"degree", p->degree}};
  }
  const auto& k = std::get<ConstructionCertificate>(c);
  return json{{"type", "construction"},
              {"route", k.route},
              {"t", mpz_to_json(k.t)},
              {"R", mpz_to_json(k.r)},
              {"s", mpz_to_json(k.s)},
              {"m", mpz_to_json(k.m)},
              {"proportion", mpz_to_json(k.proportion)},
              {"coefficient", mpz_to_json(k.coefficient)},
              {"expanded_check", k.expanded_check}};
}

namespace {

Certificate certificate_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "exact") return ExactEquality{};
  if (type == "prune") {
    PruneCertificate p;
    p.kind = prune_kind_from(j.at("rule").get<std::string>());
    p.q = j.at("q").get<std::uint64_t>();
    p.valuation = mpz_from_json(j.at("valuation"));
    p.degree = j.at("degree").get<unsigned long>();
    return p;
  }
  if (type == "construction") {
    ConstructionCertificate k;
    k.route = j.at("route").get<std::string>();
    k.t = mpz_from_json(j.at("t"));
    k.r = mpz_from_json(j.at("R"));
    k.s = mpz_from_json(j.at("s"));
    k.m = mpz_from_json(j.at("m"));
    k.proportion = mpz_from_json(j.at("proportion"));
    k.coefficient = mpz_from_json(j.at("coefficient"));
    k.expanded_check = j.at("expanded_check").get<bool>();
    return k;
  }
  fail(ErrorKind::InvalidArgument, "unknown certificate type '" + type + "'");
}

bool same_certificate(const Certificate& a, const Certificate& b) {
  return certificate_to_json(a) == certificate_to_json(b);
}

}  // namespace

bool SolutionRecord::operator==(const SolutionRecord& other) const {
  return equation == other.equation && assignment == other.assignment &&
         symbolic == other.symbolic && verified == other.verified && flags == other.flags &&
         same_certificate(certificate, other.certificate);
}

json record_to_json(const SolutionRecord& record) {
  json assignment = json::object();
  for (const auto& [var, value] : record.assignment) assignment[var] = mpz_to_json(value);
  json out{{"schema", kSchemaVersion},
           {"kind", "solution"},
           {"equation", record.equation},
           {"assignment", assignment},
           {"verified", record.verified},
           {"certificate", certificate_to_json(record.certificate)}};
  if (!record.symbolic.empty()) out["symbolic"] = record.symbolic;
  if (!record.flags.empty()) out["flags"] = record.flags;
  return out;
}

SolutionRecord record_from_json(const json& j) {
  if (j.value("schema", "") != kSchemaVersion) {
    fail(ErrorKind::InvalidArgument, "record has unknown schema version");
  }
  SolutionRecord r;
  r.equation = j.at("equation").get<std::string>();
  for (const auto& [var, value] : j.at("assignment").items()) r.assignment[var] = mpz_from_json(value);
  if (j.contains("symbolic")) r.symbolic = j.at("symbolic").get<std::map<std::string, std::string>>();
  r.verified = j.at("verified").get<bool>();
  r.certificate = certificate_from_json(j.at("certificate"));
  if (j.contains("flags")) r.flags = j.at("flags").get<std::vector<std::string>>();
  return r;
}

bool check_record(const model::Equation& eq, const SolutionRecord& record) {
  if (!record.symbolic.empty()) return false;
  const auto x = record.assignment.find("x");
  if (x == record.assignment.end()) return false;
  const auto y = record.assignment.find("y");
  std::optional<mpz_class> yv;
  if (y != record.assignment.end()) yv = y->second;
  if (eq.rhs.poly.uses_y() && !yv) return false;
  model::Assignment tuple;
  for (const auto& var : eq.lhs.variables()) {
    auto it = record.assignment.find(var);
    if (it == record.assignment.end()) return false;
    tuple[var] = it->second;
  }
  if (eq.constraints.coprime && yv && eq.rhs.poly.uses_y() && gcd(x->second, *yv) != 1) return false;
  if (!eq.rhs.poly.uses_y()) yv.reset();
  return mpq_class(model::eval_lhs(eq.lhs, tuple)) == model::eval_rhs(eq.rhs, x->second, yv);
}

}  // namespace pfde::solver
