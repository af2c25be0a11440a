#pragma once

// JSON (de)serialization for polynomials, symmetric polynomial matrices and
// optimization instances.
//
//   polynomial: {"n": 2, "terms": [{"exp": [1, 0], "coef": 1.0}, ...]}
//   matrix:     {"m": 2, "entries": [[p00, p01], [p11]]}   (upper triangle,
//               row-major; symmetry enforced on load)
//   instance:   {"n":..., "objective": poly, "G": matrix,
//                "domain": "binary"|"ball", "blocks": [matrix...]?,
//                "normalize": bool}

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsos/matrix_poly.hpp"
#include "pmsos/polynomial.hpp"

namespace pmsos {

using json = nlohmann::json;

inline json poly_to_json(const MultiPoly& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms())
    terms.push_back({{"exp", m.exp}, {"coef", c}});
  return {{"n", p.nvars()}, {"terms", terms}};
}

inline MultiPoly poly_from_json(const json& j, int expect_n = -1) {
  if (!j.contains("n") || !j.contains("terms"))
    throw std::invalid_argument("polynomial JSON: missing \"n\" or \"terms\"");
  const int n = j.at("n").get<int>();
  if (n < 1) throw std::invalid_argument("polynomial JSON: need n >= 1");
  if (expect_n > 0 && n != expect_n)
    throw std::invalid_argument("polynomial JSON: variable count mismatch");
  MultiPoly p(n);
  for (const auto& t : j.at("terms")) {
    auto exp = t.at("exp").get<std::vector<int>>();
    if (static_cast<int>(exp.size()) != n)
      throw std::invalid_argument("polynomial JSON: exponent length != n");
    for (int e : exp)
      if (e < 0) throw std::invalid_argument("polynomial JSON: negative exponent");
    p.add_term(Monomial(std::move(exp)), t.at("coef").get<double>());
  }
  return p;
}

inline json matrix_to_json(const SymPolyMatrix& g) {
  json rows = json::array();
  for (int i = 0; i < g.dim(); ++i) {
    json row = json::array();
    for (int j = i; j < g.dim(); ++j) row.push_back(poly_to_json(g.at(i, j)));
    rows.push_back(row);
  }
  return {{"m", g.dim()}, {"entries", rows}};
}

inline SymPolyMatrix matrix_from_json(const json& j, int n) {
  if (!j.contains("m") || !j.contains("entries"))
    throw std::invalid_argument("matrix JSON: missing \"m\" or \"entries\"");
  const int m = j.at("m").get<int>();
  if (m < 1) throw std::invalid_argument("matrix JSON: need m >= 1");
  const auto& rows = j.at("entries");
  if (static_cast<int>(rows.size()) != m)
    throw std::invalid_argument("matrix JSON: expected m upper-triangle rows");
  SymPolyMatrix g(n, m);
  for (int i = 0; i < m; ++i) {
    const auto& row = rows.at(i);
    if (static_cast<int>(row.size()) != m - i)
      throw std::invalid_argument(
          "matrix JSON: upper-triangle row " + std::to_string(i) +
          " must have " + std::to_string(m - i) + " entries");
    for (int j = i; j < m; ++j)
      g.set(i, j, poly_from_json(row.at(j - i), n));
  }
  return g;
}

enum class Domain { Binary, Ball };

inline std::string domain_name(Domain d) {
  return d == Domain::Binary ? "binary" : "ball";
}
inline Domain domain_from_name(const std::string& s) {
  if (s == "binary") return Domain::Binary;
  if (s == "ball") return Domain::Ball;
  throw std::invalid_argument("unknown domain \"" + s + "\"");
}

// A polynomial optimization instance: minimize `objective` over the binary
// cube or unit ball intersected with { x : G(x) PSD }.
struct Instance {
  int n = 0;
  MultiPoly objective;
  SymPolyMatrix g;
  Domain domain = Domain::Binary;
  std::vector<SymPolyMatrix> blocks;  // optional diagonal blocks of G
  bool normalize = false;
};

inline json instance_to_json(const Instance& inst) {
  json j = {{"n", inst.n},
            {"objective", poly_to_json(inst.objective)},
            {"G", matrix_to_json(inst.g)},
            {"domain", domain_name(inst.domain)},
            {"normalize", inst.normalize}};
  if (!inst.blocks.empty()) {
    json b = json::array();
    for (const auto& gb : inst.blocks) b.push_back(matrix_to_json(gb));
    j["blocks"] = b;
  }
  return j;
}

inline Instance instance_from_json(const json& j) {
  Instance inst;
  inst.n = j.at("n").get<int>();
  if (inst.n < 1) throw std::invalid_argument("instance JSON: need n >= 1");
  inst.objective = poly_from_json(j.at("objective"), inst.n);
  inst.g = matrix_from_json(j.at("G"), inst.n);
  inst.domain = domain_from_name(j.value("domain", std::string("binary")));
  inst.normalize = j.value("normalize", false);
  if (j.contains("blocks")) {
    int mtot = 0;
    for (const auto& bj : j.at("blocks")) {
      inst.blocks.push_back(matrix_from_json(bj, inst.n));
      mtot += inst.blocks.back().dim();
    }
    if (mtot != inst.g.dim())
      throw std::invalid_argument(
          "instance JSON: block dimensions do not sum to m");
  }
  return inst;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace pmsos
