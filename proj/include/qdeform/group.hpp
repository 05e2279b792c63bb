#pragma once

// Finite groups as explicit Cayley tables, plus the abelian invariant-factor
// constructor and the line-oriented group file format.

#include <istream>
#include <optional>
#include <sstream>

#include "qdeform/tensorkit.hpp"

namespace qdeform {

struct FiniteGroup {
  std::string name;
  int order = 1;
  std::vector<std::string> elements;
  std::vector<std::vector<int>> mul;  // mul[a][b] = index of a*b
  std::vector<int> inv;
  int e = 0;
  std::vector<int> invariant_factors;  // nonempty iff built from them

  int op(int a, int b) const { return mul[a][b]; }
  bool is_abelian() const {
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < a; ++b)
        if (mul[a][b] != mul[b][a]) return false;
    return true;
  }
};

inline FiniteGroup group_from_table(std::string name,
                                    std::vector<std::vector<int>> table,
                                    std::vector<std::string> element_names = {}) {
  int n = (int)table.size();
  if (n < 1) throw std::invalid_argument("empty multiplication table");
  for (int r = 0; r < n; ++r) {
    if ((int)table[r].size() != n)
      throw std::invalid_argument("multiplication table is not square at row " +
                                  std::to_string(r));
    for (int c = 0; c < n; ++c)
      if (table[r][c] < 0 || table[r][c] >= n)
        throw std::invalid_argument("table entry out of range at cell (" +
                                    std::to_string(r) + "," + std::to_string(c) + ")");
  }
  // Latin square: report the first duplicated cell
  for (int r = 0; r < n; ++r) {
    std::vector<int> seen(n, -1);
    for (int c = 0; c < n; ++c) {
      int v = table[r][c];
      if (seen[v] >= 0)
        throw std::invalid_argument(
            "not a Latin square: row " + std::to_string(r) + " repeats value " +
            std::to_string(v) + " at cell (" + std::to_string(r) + "," +
            std::to_string(c) + ")");
      seen[v] = c;
    }
  }
  for (int c = 0; c < n; ++c) {
    std::vector<int> seen(n, -1);
    for (int r = 0; r < n; ++r) {
      int v = table[r][c];
      if (seen[v] >= 0)
        throw std::invalid_argument(
            "not a Latin square: column " + std::to_string(c) + " repeats value " +
            std::to_string(v) + " at cell (" + std::to_string(r) + "," +
            std::to_string(c) + ")");
      seen[v] = r;
    }
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (table[table[a][b]][c] != table[a][table[b][c]])
          throw std::invalid_argument("associativity fails at triple (" +
                                      std::to_string(a) + "," + std::to_string(b) +
                                      "," + std::to_string(c) + ")");
  int e = -1;
  for (int g = 0; g < n; ++g) {
    bool ok = true;
    for (int x = 0; x < n; ++x)
      if (table[g][x] != x || table[x][g] != x) ok = false;
    if (ok) {
      e = g;
      break;
    }
  }
  if (e < 0) throw std::invalid_argument("no identity element");
  std::vector<int> inv(n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (table[a][b] == e) inv[a] = b;
  for (int a = 0; a < n; ++a)
    if (inv[a] < 0 || table[inv[a]][a] != e)
      throw std::invalid_argument("inverse missing for element " + std::to_string(a));
  if (element_names.empty())
    for (int g = 0; g < n; ++g) element_names.push_back(std::to_string(g));
  return FiniteGroup{std::move(name), n, std::move(element_names),
                     std::move(table), std::move(inv), e, {}};
}

// Z_{n1} x ... x Z_{nk}; element index is the row-major mixed-radix encoding of
// the coordinate tuple.
inline FiniteGroup abelian_group(const std::vector<int>& factors,
                                 std::string name = "") {
  std::vector<int> fs = factors;
  if (fs.empty()) fs.push_back(1);
  int n = 1;
  for (int f : fs) {
    if (f < 1) throw std::invalid_argument("invalid invariant factor");
    n *= f;
  }
  if (name.empty()) {
    name = "Z";
    for (size_t i = 0; i < fs.size(); ++i)
      name += (i ? "xZ" : "") + std::to_string(fs[i]);
  }
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  std::vector<int> A, B, C(fs.size());
  for (int a = 0; a < n; ++a) {
    decode_index(a, fs, A);
    for (int b = 0; b < n; ++b) {
      decode_index(b, fs, B);
      for (size_t k = 0; k < fs.size(); ++k) C[k] = (A[k] + B[k]) % fs[k];
      table[a][b] = encode_index(C, fs);
    }
  }
  std::vector<std::string> names;
  for (int g = 0; g < n; ++g) {
    decode_index(g, fs, A);
    std::string s;
    for (size_t k = 0; k < fs.size(); ++k) s += (k ? "," : "") + std::to_string(A[k]);
    names.push_back(s);
  }
  auto grp = group_from_table(std::move(name), std::move(table), std::move(names));
  grp.invariant_factors = fs;
  return grp;
}

// Character of an invariant-factor abelian group, labeled by a dual tuple k.
inline complexd character_value(const FiniteGroup& g, int chi_index, int elem) {
  if (g.invariant_factors.empty())
    throw std::invalid_argument("characters need invariant-factor structure");
  std::vector<int> K, S;
  decode_index(chi_index, g.invariant_factors, K);
  decode_index(elem, g.invariant_factors, S);
  double phase = 0;
  for (size_t j = 0; j < K.size(); ++j)
    phase += (double)K[j] * S[j] / g.invariant_factors[j];
  return std::polar(1.0, 2.0 * M_PI * phase);
}

inline FiniteGroup symmetric_group_3() {
  // elements: e, (12), (13), (23), (123), (132) acting on {0,1,2}
  std::vector<std::vector<int>> perms = {{0, 1, 2}, {1, 0, 2}, {2, 1, 0},
                                         {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
  int n = (int)perms.size();
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::vector<int> comp(3);
      for (int x = 0; x < 3; ++x) comp[x] = perms[a][perms[b][x]];
      for (int c = 0; c < n; ++c)
        if (perms[c] == comp) table[a][b] = c;
    }
  return group_from_table("S3", std::move(table),
                          {"e", "(12)", "(13)", "(23)", "(123)", "(132)"});
}

// Plain-text format: header `group <name> order <n>`, then either `table`
// followed by n rows of n indices, or `abelian n1 n2 ... nk`.
inline FiniteGroup parse_group(std::istream& in) {
  std::string line;
  auto next_content_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      auto pos = line.find('#');
      if (pos != std::string::npos) line.erase(pos);
      std::istringstream probe(line);
      std::string tok;
      if (probe >> tok) {
        out = line;
        return true;
      }
    }
    return false;
  };
  std::string header;
  if (!next_content_line(header)) throw std::invalid_argument("empty group file");
  std::istringstream hs(header);
  std::string kw, name, order_kw;
  int n = 0;
  if (!(hs >> kw >> name >> order_kw >> n) || kw != "group" || order_kw != "order" ||
      n < 1)
    throw std::invalid_argument("bad group header: expected 'group <name> order <n>'");
  std::string body;
  if (!next_content_line(body)) throw std::invalid_argument("missing group body");
  std::istringstream bs(body);
  std::string mode;
  bs >> mode;
  if (mode == "abelian") {
    std::vector<int> fs;
    int f;
    while (bs >> f) fs.push_back(f);
    if (fs.empty()) throw std::invalid_argument("abelian line lists no factors");
    auto g = abelian_group(fs, name);
    if (g.order != n)
      throw std::invalid_argument("declared order does not match invariant factors");
    return g;
  }
  if (mode != "table") throw std::invalid_argument("expected 'table' or 'abelian'");
  std::vector<std::vector<int>> table;
  for (int r = 0; r < n; ++r) {
    std::string row_line;
    if (!next_content_line(row_line))
      throw std::invalid_argument("table row " + std::to_string(r) + " missing");
    std::istringstream rs(row_line);
    std::vector<int> row;
    int v;
    while (rs >> v) row.push_back(v);
    if ((int)row.size() != n)
      throw std::invalid_argument("table row " + std::to_string(r) +
                                  " has wrong length");
    table.push_back(std::move(row));
  }
  return group_from_table(name, std::move(table));
}

}  // namespace qdeform
