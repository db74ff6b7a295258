#pragma once

// CSV / JSON emission of sum records. Floats carry 12 significant digits.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "charfield/charsum.hpp"
#include "charfield/error.hpp"
#include "json.hpp"

namespace charfield::report {

using json = nlohmann::ordered_json;

inline std::string fmt12(double v) {
  if (v == 0) v = 0;  // folds -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// The double nearest to the 12-digit decimal rendering of v.
inline double round12(double v) { return std::strtod(fmt12(v).c_str(), nullptr); }

inline const char* kCsvHeader = "q,m,theta,chi_index,psi_param,re,im,modulus,bound,slack,bound_kind";

inline std::string csv_row(const SumRecord& r) {
  std::ostringstream os;
  os << r.q << ',' << r.m << ',' << r.theta << ',' << r.chi_index << ',' << r.psi_param << ',' << fmt12(r.value.real()) << ','
     << fmt12(r.value.imag()) << ',' << fmt12(r.modulus) << ',' << (r.bound ? fmt12(*r.bound) : "") << ','
     << (r.slack ? fmt12(*r.slack) : "") << ',' << bound_kind_name(r.bound_kind);
  return os.str();
}

inline void write_csv(std::ostream& os, const std::vector<SumRecord>& recs) {
  os << kCsvHeader << '\n';
  for (const auto& r : recs) os << csv_row(r) << '\n';
}

inline json to_json(const SumRecord& r) {
  json j;
  j["q"] = r.q;
  j["m"] = r.m;
  j["theta"] = r.theta;
  j["chi_index"] = r.chi_index;
  j["psi_param"] = r.psi_param;
  j["re"] = round12(r.value.real());
  j["im"] = round12(r.value.imag());
  j["modulus"] = round12(r.modulus);
  j["bound"] = r.bound ? json(round12(*r.bound)) : json(nullptr);
  j["slack"] = r.slack ? json(round12(*r.slack)) : json(nullptr);
  j["bound_kind"] = bound_kind_name(r.bound_kind);
  if (r.bound_kind == BoundKind::fuwan) {
    j["D1"] = r.D[0];
    j["D2"] = r.D[1];
    j["D3"] = r.D[2];
    j["D4"] = r.D[3];
    j["degenerate_or_bug"] = r.degenerate_or_bug;
  }
  return j;
}

inline SumRecord record_from_json(const json& j) {
  SumRecord r;
  r.q = j.at("q").get<std::uint64_t>();
  r.m = j.at("m").get<int>();
  r.theta = j.at("theta").get<Handle>();
  r.chi_index = j.at("chi_index").get<std::uint64_t>();
  r.psi_param = j.at("psi_param").get<Handle>();
  r.value = {j.at("re").get<double>(), j.at("im").get<double>()};
  r.modulus = j.at("modulus").get<double>();
  if (!j.at("bound").is_null()) r.bound = j.at("bound").get<double>();
  if (!j.at("slack").is_null()) r.slack = j.at("slack").get<double>();
  r.bound_kind = parse_bound_kind(j.at("bound_kind").get<std::string>());
  if (j.contains("D1")) {
    r.D = {j.at("D1").get<int>(), j.at("D2").get<int>(), j.at("D3").get<int>(), j.at("D4").get<int>()};
    r.degenerate_or_bug = j.at("degenerate_or_bug").get<bool>();
  }
  return r;
}

/// Rounds a record's floats the way they are emitted, for round-trip comparison.
inline SumRecord rounded(SumRecord r) {
  r.value = {round12(r.value.real()), round12(r.value.imag())};
  r.modulus = round12(r.modulus);
  if (r.bound) r.bound = round12(*r.bound);
  if (r.slack) r.slack = round12(*r.slack);
  return r;
}

inline bool same_record(const SumRecord& a, const SumRecord& b) {
  return a.q == b.q && a.m == b.m && a.theta == b.theta && a.chi_index == b.chi_index && a.psi_param == b.psi_param &&
         a.value == b.value && a.modulus == b.modulus && a.bound == b.bound && a.slack == b.slack && a.bound_kind == b.bound_kind &&
         a.D == b.D && a.degenerate_or_bug == b.degenerate_or_bug;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path + " for writing");
  out << bytes;
  if (!out) throw Error(Errc::IoError, "write to " + path + " failed");
}

}  // namespace charfield::report
