#ifndef XORFOLD_INSTANCE_IO_HPP
#define XORFOLD_INSTANCE_IO_HPP

// JSON form of an instance:
//   {"n": N, "epsilon": eps, "seed": s, "planted": "<bits>", "constraints": [[i, j, k, sign], ...]}
// The planted string is written most significant variable first, so its last
// character is variable 0.

#include <json.hpp>
#include <string>
#include <vector>

#include "xorfold/errors.hpp"
#include "xorfold/instance.hpp"

namespace xorfold {

inline std::string bits_to_string(BitString m, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q)
    if ((m >> q) & 1) s[static_cast<std::size_t>(n - 1 - q)] = '1';
  return s;
}

inline BitString bits_from_string(const std::string& s) {
  if (s.empty() || s.size() > static_cast<std::size_t>(kMaxVariables)) throw ParameterError("bit string length out of range");
  BitString m = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw ParameterError("bit string may contain only 0 and 1");
    m = (m << 1) | static_cast<BitString>(c == '1');
  }
  return m;
}

inline nlohmann::ordered_json to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["n"] = inst.n_vars();
  j["epsilon"] = inst.epsilon();
  j["seed"] = inst.seed();
  if (inst.planted()) j["planted"] = bits_to_string(*inst.planted(), inst.n_vars());
  auto& cs = j["constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : inst.constraints()) cs.push_back({c.i, c.j, c.k, c.sign});
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const double eps = j.value("epsilon", 0.0);
    const auto seed = j.value("seed", std::uint64_t{0});
    std::optional<BitString> planted;
    if (j.contains("planted") && !j.at("planted").is_null()) {
      const auto s = j.at("planted").get<std::string>();
      if (s.size() != static_cast<std::size_t>(n)) throw ParameterError("planted string length differs from n");
      planted = bits_from_string(s);
    }
    std::vector<Constraint> cs;
    for (const auto& row : j.at("constraints")) {
      if (row.size() != 4) throw ParameterError("constraint rows must be [i, j, k, sign]");
      cs.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<int>(), row[3].get<int>()});
    }
    return Instance(n, std::move(cs), eps, seed, planted);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed instance JSON: ") + e.what());
  }
}

}  // namespace xorfold

#endif  // XORFOLD_INSTANCE_IO_HPP
