#pragma once

// SDPA sparse format (.dat-s) export/import for the standard-form problem:
//
//   (P)  min c'x  s.t.  sum_i x_i F_i - F_0  PSD
//
// which matches the (P) reading of SdpProblem with F_0 = C.  Inequality
// blocks map one-to-one; each equality block is encoded portably as one
// diagonal block (negative size in bLOCKsTRUCT) holding two opposing
// inequality rows per matrix entry, kept in declared block order.  The
// encoding is pinned by a golden fixture in the test suite.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmsos/sdp.hpp"

namespace pmsos {

namespace detail {
inline std::string fmt_num(double v) {
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15)
    return std::to_string(static_cast<long long>(v));
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

inline std::string write_sdpa(const SdpProblem& p) {
  p.validate();
  const int nv = p.nvars();

  // Blocks are exported in declared order.  Each equality block becomes one
  // shared diagonal block with two opposing inequality rows per matrix entry
  // (entry order: upper triangle, row-major), so the block-count line always
  // equals the declared block count.
  struct EqEntry {
    std::pair<int, int> rc;
  };
  std::vector<std::vector<std::pair<int, int>>> eq_entries(p.blocks.size());
  std::vector<int> export_size(p.blocks.size());
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    if (!p.blocks[b].equality) {
      export_size[b] = p.blocks[b].size;
      continue;
    }
    std::set<std::pair<int, int>> keys;
    for (int i = 0; i < nv; ++i)
      for (const auto& [rc, v] : p.blocks[b].A[i].entries()) keys.insert(rc);
    for (const auto& [rc, v] : p.blocks[b].C.entries()) keys.insert(rc);
    eq_entries[b].assign(keys.begin(), keys.end());
    export_size[b] = -2 * std::max<int>(1, eq_entries[b].size());
  }

  std::ostringstream os;
  os << "* SDPA sparse export\n";
  os << "* mDIM=" << nv << " nBLOCK=" << p.blocks.size() << "\n";
  os << nv << "\n";
  os << p.blocks.size() << "\n";
  for (size_t b = 0; b < p.blocks.size(); ++b)
    os << (b ? " " : "") << export_size[b];
  os << "\n";
  for (int i = 0; i < nv; ++i)
    os << (i ? " " : "") << detail::fmt_num(p.c(i));
  os << "\n";

  auto emit = [&](int matno, int blk, int i, int j, double v) {
    if (v == 0.0) return;
    os << matno << " " << blk << " " << (i + 1) << " " << (j + 1) << " "
       << detail::fmt_num(v) << "\n";
  };
  for (int matno = 0; matno <= nv; ++matno) {
    for (size_t b = 0; b < p.blocks.size(); ++b) {
      const SymSparse& s =
          matno == 0 ? p.blocks[b].C : p.blocks[b].A[matno - 1];
      if (!p.blocks[b].equality) {
        for (const auto& [rc, v] : s.entries())
          emit(matno, static_cast<int>(b) + 1, rc.first, rc.second, v);
        continue;
      }
      for (size_t e = 0; e < eq_entries[b].size(); ++e) {
        auto it = s.entries().find(eq_entries[b][e]);
        if (it == s.entries().end()) continue;
        emit(matno, static_cast<int>(b) + 1, 2 * (int)e, 2 * (int)e,
             it->second);
        emit(matno, static_cast<int>(b) + 1, 2 * (int)e + 1, 2 * (int)e + 1,
             -it->second);
      }
    }
  }
  return os.str();
}

inline void write_sdpa_file(const SdpProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << write_sdpa(p);
}

inline SdpProblem read_sdpa(std::istream& in) {
  // Tokenize, dropping comment lines and the separators SDPA allows.
  std::vector<std::string> tok;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) continue;
    for (char& ch : line)
      if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}')
        ch = ' ';
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) tok.push_back(t);
  }
  size_t at = 0;
  auto next_int = [&]() -> long long {
    if (at >= tok.size()) throw std::runtime_error("sdpa: unexpected end of file");
    return std::stoll(tok[at++]);
  };
  auto next_double = [&]() -> double {
    if (at >= tok.size()) throw std::runtime_error("sdpa: unexpected end of file");
    return std::stod(tok[at++]);
  };

  SdpProblem p;
  const int nv = static_cast<int>(next_int());
  const int nblock = static_cast<int>(next_int());
  if (nv < 0 || nblock < 1) throw std::runtime_error("sdpa: bad dimensions");
  std::vector<int> bs(nblock);
  std::vector<bool> diag(nblock);
  for (int b = 0; b < nblock; ++b) {
    const int s = static_cast<int>(next_int());
    bs[b] = std::abs(s);
    diag[b] = s < 0;
    if (bs[b] == 0) throw std::runtime_error("sdpa: zero block size");
  }
  for (int i = 0; i < nv; ++i) p.var_names.push_back("x" + std::to_string(i + 1));
  p.c = Eigen::VectorXd(nv);
  for (int i = 0; i < nv; ++i) p.c(i) = next_double();
  for (int b = 0; b < nblock; ++b)
    p.add_block("block" + std::to_string(b + 1), bs[b]);
  while (at + 5 <= tok.size()) {
    const int matno = static_cast<int>(next_int());
    const int blk = static_cast<int>(next_int());
    const int i = static_cast<int>(next_int());
    const int j = static_cast<int>(next_int());
    const double v = next_double();
    if (matno < 0 || matno > nv || blk < 1 || blk > nblock)
      throw std::runtime_error("sdpa: entry indices out of range");
    if (i < 1 || j < 1 || i > bs[blk - 1] || j > bs[blk - 1])
      throw std::runtime_error("sdpa: matrix entry out of range");
    if (diag[blk - 1] && i != j)
      throw std::runtime_error("sdpa: off-diagonal entry in diagonal block");
    SymSparse& target =
        matno == 0 ? p.blocks[blk - 1].C : p.blocks[blk - 1].A[matno - 1];
    target.add(i - 1, j - 1, v);
  }
  if (at != tok.size()) throw std::runtime_error("sdpa: trailing tokens");
  p.validate();
  return p;
}

inline SdpProblem read_sdpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_sdpa(in);
}

}  // namespace pmsos
