#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vfree/fingroup.hpp"

namespace vfree {

// A permutation of {0, ..., n-1}; entry i is the image of i.
using Permutation = std::vector<Element>;

Permutation identity_permutation(std::size_t n);
// (outer o inner)(i) = outer[inner[i]]
Permutation compose(const Permutation& outer, const Permutation& inner);
Permutation invert(const Permutation& p);

// Closure of a set of permutations of a common finite set under composition.
// Throws CapExceeded when more than `cap` elements are produced.
std::vector<Permutation> permutation_closure(std::span<const Permutation> generators,
                                             std::size_t cap = 10000);

// The finite group generated by `generators` with its full table. Generator
// i is named `names[i]`.
FiniteGroup group_from_permutations(std::span<const Permutation> generators,
                                    std::span<const std::string> names,
                                    std::size_t cap = 10000);

// A linear map of F_2^dim stored by the images of the basis vectors; vectors
// are bit masks with e_i at bit i-1.
class BinaryMatrix {
 public:
  static BinaryMatrix identity(std::size_t dim);
  // Cycle notation on basis vectors, e.g. "(e1 e2)(e3 e4)" or "(e1 e2 e3)":
  // the linear map permuting basis vectors accordingly and fixing the rest.
  static BinaryMatrix from_cycles(std::string_view cycles, std::size_t dim);
  // rows[i][j] is the entry in row i, column j (column j = image of e_{j+1}).
  static BinaryMatrix from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t dim() const { return columns_.size(); }
  std::uint32_t apply(std::uint32_t v) const;
  BinaryMatrix after(const BinaryMatrix& inner) const;  // this o inner
  bool is_invertible() const;
  // The induced permutation of the 2^dim vectors.
  Permutation to_permutation() const;
  // "(e1 e3)(e2 e4)" if the map permutes basis vectors, "()" for the
  // identity, otherwise the row form "[[0,1],[1,0]]".
  std::string to_string() const;

  bool operator==(const BinaryMatrix&) const = default;

 private:
  std::vector<std::uint32_t> columns_;
};

// Reads a permutation of 2^dim vectors back as a linear map, if it is one.
std::optional<BinaryMatrix> as_binary_matrix(const Permutation& p, std::size_t dim);

}  // namespace vfree
