#include "vfree/permutation.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace vfree {

Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Element>(i);
  return p;
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  if (outer.size() != inner.size()) throw Error("composing permutations of different degree");
  Permutation out(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) out[i] = outer[inner[i]];
  return out;
}

Permutation invert(const Permutation& p) {
  Permutation out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[p[i]] = static_cast<Element>(i);
  return out;
}

std::vector<Permutation> permutation_closure(std::span<const Permutation> generators,
                                             std::size_t cap) {
  if (generators.empty()) return {};
  const std::size_t n = generators.front().size();
  for (const auto& g : generators) {
    if (g.size() != n) throw Error("permutations of different degree");
    std::vector<Element> sorted = g;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != identity_permutation(n)) throw Error("not a permutation");
  }
  std::vector<Permutation> elements{identity_permutation(n)};
  std::set<Permutation> seen{elements.front()};
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (const auto& g : generators) {
      Permutation next = compose(elements[i], g);
      if (seen.insert(next).second) {
        if (seen.size() > cap)
          throw CapExceeded("permutation closure exceeds " + std::to_string(cap) + " elements");
        elements.push_back(std::move(next));
      }
    }
  }
  return elements;
}

FiniteGroup group_from_permutations(std::span<const Permutation> generators,
                                    std::span<const std::string> names, std::size_t cap) {
  if (generators.size() != names.size()) throw Error("one name per generator expected");
  if (generators.empty()) return build_cyclic(1);
  auto elements = permutation_closure(generators, cap);
  std::sort(elements.begin(), elements.end());
  std::map<Permutation, Element> index;
  for (std::size_t i = 0; i < elements.size(); ++i) index.emplace(elements[i], static_cast<Element>(i));
  const std::size_t n = elements.size();
  std::vector<Element> table(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      table[a * n + b] = index.at(compose(elements[a], elements[b]));
  std::vector<NamedElement> gens;
  for (std::size_t i = 0; i < generators.size(); ++i)
    gens.push_back({names[i], index.at(generators[i])});
  return FiniteGroup::from_table(n, std::move(table), std::move(gens));
}

// --- BinaryMatrix -------------------------------------------------------------

BinaryMatrix BinaryMatrix::identity(std::size_t dim) {
  if (dim > 31) throw Error("binary matrix dimension too large");
  BinaryMatrix m;
  m.columns_.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) m.columns_[j] = 1u << j;
  return m;
}

BinaryMatrix BinaryMatrix::from_cycles(std::string_view cycles, std::size_t dim) {
  BinaryMatrix m = identity(dim);
  std::vector<bool> moved(dim, false);
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < cycles.size() && (cycles[i] == ' ' || cycles[i] == '\t' || cycles[i] == ',')) ++i;
  };
  skip_space();
  while (i < cycles.size()) {
    if (cycles[i] != '(') throw Error("malformed cycle notation '" + std::string(cycles) + "'");
    ++i;
    std::vector<std::size_t> cycle;
    for (;;) {
      skip_space();
      if (i >= cycles.size()) throw Error("unterminated cycle in '" + std::string(cycles) + "'");
      if (cycles[i] == ')') {
        ++i;
        break;
      }
      if (cycles[i] != 'e') throw Error("cycle entries must be basis vectors e1..e" + std::to_string(dim));
      ++i;
      std::size_t k = 0, digits = 0;
      while (i < cycles.size() && cycles[i] >= '0' && cycles[i] <= '9') {
        k = k * 10 + static_cast<std::size_t>(cycles[i++] - '0');
        ++digits;
      }
      if (digits == 0 || k == 0 || k > dim)
        throw Error("basis vector out of range in '" + std::string(cycles) + "'");
      if (moved[k - 1]) throw Error("basis vector e" + std::to_string(k) + " repeated in cycles");
      moved[k - 1] = true;
      cycle.push_back(k - 1);
    }
    for (std::size_t c = 0; c < cycle.size(); ++c)
      m.columns_[cycle[c]] = 1u << cycle[(c + 1) % cycle.size()];
    skip_space();
  }
  return m;
}

BinaryMatrix BinaryMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  const std::size_t dim = rows.size();
  BinaryMatrix m = identity(dim);
  for (std::size_t j = 0; j < dim; ++j) m.columns_[j] = 0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (rows[i].size() != dim) throw Error("matrix is not square");
    for (std::size_t j = 0; j < dim; ++j) {
      if (rows[i][j] != 0 && rows[i][j] != 1) throw Error("matrix entries must be 0 or 1");
      if (rows[i][j]) m.columns_[j] |= 1u << i;
    }
  }
  return m;
}

std::uint32_t BinaryMatrix::apply(std::uint32_t v) const {
  std::uint32_t out = 0;
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (v >> j & 1) out ^= columns_[j];
  return out;
}

BinaryMatrix BinaryMatrix::after(const BinaryMatrix& inner) const {
  if (inner.dim() != dim()) throw Error("composing matrices of different size");
  BinaryMatrix m = inner;
  for (auto& col : m.columns_) col = apply(col);
  return m;
}

bool BinaryMatrix::is_invertible() const {
  // Gaussian elimination over F_2 on a copy of the columns.
  std::vector<std::uint32_t> cols = columns_;
  std::size_t rank = 0;
  for (std::size_t bit = 0; bit < dim(); ++bit) {
    std::size_t pivot = rank;
    while (pivot < cols.size() && !(cols[pivot] >> bit & 1)) ++pivot;
    if (pivot == cols.size()) continue;
    std::swap(cols[rank], cols[pivot]);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (k != rank && (cols[k] >> bit & 1)) cols[k] ^= cols[rank];
    ++rank;
  }
  return rank == dim();
}

Permutation BinaryMatrix::to_permutation() const {
  if (!is_invertible()) throw Error("singular matrix does not induce a permutation");
  Permutation p(std::size_t{1} << dim());
  for (std::uint32_t v = 0; v < p.size(); ++v) p[v] = apply(v);
  return p;
}

std::string BinaryMatrix::to_string() const {
  bool monomial = true;
  std::vector<std::size_t> target(dim());
  for (std::size_t j = 0; j < dim() && monomial; ++j) {
    std::uint32_t c = columns_[j];
    if (c == 0 || (c & (c - 1)) != 0) {
      monomial = false;
      break;
    }
    target[j] = static_cast<std::size_t>(__builtin_ctz(c));
  }
  if (monomial) {
    std::vector<bool> done(dim(), false);
    std::string out;
    for (std::size_t j = 0; j < dim(); ++j) {
      if (done[j] || target[j] == j) continue;
      out += '(';
      std::size_t k = j;
      bool first = true;
      while (!done[k]) {
        done[k] = true;
        if (!first) out += ' ';
        first = false;
        out += "e" + std::to_string(k + 1);
        k = target[k];
      }
      out += ')';
    }
    return out.empty() ? "()" : out;
  }
  std::string out = "[";
  for (std::size_t i = 0; i < dim(); ++i) {
    out += i ? ",[" : "[";
    for (std::size_t j = 0; j < dim(); ++j) {
      if (j) out += ',';
      out += (columns_[j] >> i & 1) ? '1' : '0';
    }
    out += ']';
  }
  return out + "]";
}

std::optional<BinaryMatrix> as_binary_matrix(const Permutation& p, std::size_t dim) {
  if (p.size() != (std::size_t{1} << dim)) return std::nullopt;
  BinaryMatrix m = BinaryMatrix::identity(dim);
  std::vector<std::vector<int>> rows(dim, std::vector<int>(dim));
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t i = 0; i < dim; ++i) rows[i][j] = static_cast<int>(p[1u << j] >> i & 1);
  m = BinaryMatrix::from_rows(rows);
  for (std::uint32_t v = 0; v < p.size(); ++v)
    if (m.apply(v) != p[v]) return std::nullopt;
  return m;
}

}  // namespace vfree
