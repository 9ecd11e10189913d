#pragma once

// JSON and CSV serialization. Needs nlohmann/json (json.hpp) on the include path.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ballharm/conv.hpp"
#include "ballharm/error.hpp"
#include "ballharm/moments.hpp"

namespace ballharm {

using json = nlohmann::ordered_json;

inline json to_json(const MomentVector& m) {
  json coeffs = json::array();
  const auto idx = enumerate_indices(m.n_max);
  for (std::size_t k = 0; k < idx.size(); ++k)
    coeffs.push_back({{"n", idx[k].n}, {"l", idx[k].l}, {"m", idx[k].m}, {"re", m.coeffs[k].real()}, {"im", m.coeffs[k].imag()}});
  return {{"n_max", m.n_max}, {"convention", std::string(to_string(m.convention))}, {"coeffs", std::move(coeffs)}};
}

// Records may come in any order; missing indices are zero.
inline MomentVector moments_from_json(const json& j) {
  try {
    MomentVector m(j.at("n_max").get<int>(), parse_convention(j.at("convention").get<std::string>()));
    for (const auto& c : j.at("coeffs")) {
      const BasisIndex i{c.at("n").get<int>(), c.at("l").get<int>(), c.at("m").get<int>()};
      if (!i.valid() || i.n > m.n_max) throw ConfigError("moment record " + to_string(i) + " is out of range");
      m[i] = cplx(c.at("re").get<double>(), c.at("im").get<double>());
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed moment vector: ") + e.what());
  }
}

inline json to_json(const FeatureMap& fm) {
  json coeffs = json::array();
  for (int l = 0; l <= fm.l_max; ++l)
    for (int m = -l; m <= l; ++m)
      coeffs.push_back({{"l", l}, {"m", m}, {"re", fm.at(l, m).real()}, {"im", fm.at(l, m).imag()}});
  return {{"l_max", fm.l_max}, {"coeffs", std::move(coeffs)}};
}

inline FeatureMap feature_map_from_json(const json& j) {
  try {
    FeatureMap fm(j.at("l_max").get<int>());
    for (const auto& c : j.at("coeffs")) {
      const int l = c.at("l").get<int>(), m = c.at("m").get<int>();
      if (l < 0 || l > fm.l_max || m < -l || m > l) throw ConfigError("feature map record out of range");
      fm.at(l, m) = cplx(c.at("re").get<double>(), c.at("im").get<double>());
    }
    return fm;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed feature map: ") + e.what());
  }
}

inline void write_csv(std::ostream& out, const MomentVector& m) {
  out << std::setprecision(17) << "n,l,m,re,im\n";
  const auto idx = enumerate_indices(m.n_max);
  for (std::size_t k = 0; k < idx.size(); ++k)
    out << idx[k].n << ',' << idx[k].l << ',' << idx[k].m << ',' << m.coeffs[k].real() << ',' << m.coeffs[k].imag() << '\n';
}

inline void write_csv(std::ostream& out, const FeatureMap& fm) {
  out << std::setprecision(17) << "l,m,re,im\n";
  for (int l = 0; l <= fm.l_max; ++l)
    for (int m = -l; m <= l; ++m) out << l << ',' << m << ',' << fm.at(l, m).real() << ',' << fm.at(l, m).imag() << '\n';
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// A kernel bank file is a JSON array of moment vectors, or an object with a
// "kernels" array. Each entry is symmetrized on load.
inline std::vector<AxialKernel> kernels_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("kernels") : j;
  if (!arr.is_array() || arr.empty()) throw ConfigError("kernel bank must be a non-empty array");
  std::vector<AxialKernel> bank;
  for (const auto& k : arr) bank.push_back(symmetrize_kernel(moments_from_json(k)));
  return bank;
}

inline json to_json(const AxialKernel& g) { return to_json(g.moments()); }

}  // namespace ballharm
