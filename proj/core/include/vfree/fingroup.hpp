#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vfree/error.hpp"

namespace vfree {

// Elements of a finite group are dense indices into its multiplication table.
using Element = std::uint32_t;

struct NamedElement {
  std::string name;
  Element element;
  bool operator==(const NamedElement&) const = default;
};

// An explicit finite group given by its multiplication table.
//
// Instances are immutable once constructed and are shared through GroupPtr.
class FiniteGroup {
 public:
  // Validates the group axioms: a Latin-square table with an identity,
  // associativity (full scan up to order 64, 4096 random triples above) and
  // generators that generate the whole group.
  static FiniteGroup from_table(std::size_t order, std::vector<Element> table,
                                std::vector<NamedElement> generators,
                                std::vector<std::string> labels = {});

  std::size_t order() const { return order_; }
  Element identity() const { return identity_; }
  Element multiply(Element a, Element b) const { return table_[a * order_ + b]; }
  Element inverse(Element a) const { return inverses_[a]; }
  Element power(Element a, long long exponent) const;
  Element conjugate(Element g, Element h) const;  // g h g^-1
  std::size_t element_order(Element a) const;
  bool is_abelian() const;

  const std::vector<NamedElement>& generators() const { return generators_; }
  std::optional<Element> generator(std::string_view name) const;
  std::string label(Element a) const;
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Element>& table() const { return table_; }

  // Evaluates a word such as "x y^-1 e1^3" (or "1") over generator names.
  Element evaluate(std::string_view word) const;
  // Shortest word over the generators representing `a` (BFS order).
  std::string word_for(Element a) const;

  bool operator==(const FiniteGroup& other) const {
    return order_ == other.order_ && table_ == other.table_;
  }

 private:
  FiniteGroup() = default;

  std::size_t order_ = 0;
  std::vector<Element> table_;
  Element identity_ = 0;
  std::vector<Element> inverses_;
  std::vector<NamedElement> generators_;
  std::vector<std::string> labels_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

inline GroupPtr share(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

// A subgroup as a sorted element set of its parent group.
struct Subgroup {
  std::vector<Element> elements;

  std::size_t order() const { return elements.size(); }
  bool contains(Element a) const;
  bool operator==(const Subgroup&) const = default;
};

// A homomorphism given by the image of every source element.
struct GroupHom {
  GroupPtr source;
  GroupPtr target;
  std::vector<Element> map;

  Element operator()(Element a) const { return map[a]; }
};

enum class HomStatus { valid_hom, valid_iso, invalid };
enum class HomClaim { homomorphism, isomorphism };

struct HomCheck {
  HomStatus status = HomStatus::invalid;
  // For a failed multiplicativity check: (x, y) with h(xy) != h(x)h(y).
  // For a failed isomorphism claim: two distinct elements with equal image,
  // or (x, x) when the orders differ.
  std::optional<std::pair<Element, Element>> witness;
  std::string detail;
};

// --- construction -----------------------------------------------------------

FiniteGroup build_cyclic(std::size_t n, std::string generator_name = "g");
// (Z/2)^rank; element index = bit vector with e_i at bit i-1.
FiniteGroup build_elementary_abelian(std::size_t rank);
// Index (g, h) -> h * |G| + g.
FiniteGroup build_direct_product(const FiniteGroup& first, const FiniteGroup& second);

// C x| Q with (c,q)(c',q') = (c * action(q)(c'), q q'). `generator_actions`
// gives the automorphism of C attached to each generator of Q; the action is
// extended over Q and rejected (with the violating pair) if it is not a
// homomorphism Q -> Aut(C). Index (c, q) -> q * |C| + c.
FiniteGroup build_semidirect(const GroupPtr& normal, const GroupPtr& quotient,
                             const std::map<std::string, GroupHom>& generator_actions);

// The group structure of a subgroup; element i corresponds to
// `subgroup.elements[i]`. Generator names are the labels of a small
// generating set.
FiniteGroup subgroup_as_group(const FiniteGroup& parent, const Subgroup& subgroup);

// --- subgroups and homomorphisms ---------------------------------------------

Subgroup subgroup_closure(const FiniteGroup& g, std::span<const Element> generators);
Subgroup whole_group(const FiniteGroup& g);
// Every subgroup of g, sorted by (order, elements).
std::vector<Subgroup> all_subgroups(const FiniteGroup& g);
// A small generating set chosen greedily by decreasing element order.
std::vector<Element> small_generating_set(const FiniteGroup& g);

// Extends generator images (one per entry of source->generators()) to a
// homomorphism; throws Error naming the first violated relation.
GroupHom extend_generator_images(const GroupPtr& source, const GroupPtr& target,
                                 std::span<const Element> images);
GroupHom identity_hom(const GroupPtr& g);
GroupHom compose(const GroupHom& outer, const GroupHom& inner);  // outer after inner
bool is_injective(const GroupHom& h);

HomCheck check_hom(const GroupHom& h, HomClaim claim = HomClaim::homomorphism);

// The restriction of ad(g): h -> g h g^-1 to the normal-under-g subgroup N,
// as an automorphism of subgroup_as_group(G, N). Throws if gNg^-1 != N.
GroupHom conjugation_action(const FiniteGroup& g, Element conjugator, const Subgroup& n);

// Element-order profile: count of elements of each order.
std::map<std::size_t, std::size_t> order_profile(const FiniteGroup& g);

inline constexpr std::size_t kDefaultIsomorphismCap = 64;

// Exhaustive generator-image search with order-profile pruning. Throws
// CapExceeded above `cap`.
std::optional<GroupHom> are_isomorphic(const GroupPtr& first, const GroupPtr& second,
                                       std::size_t cap = kDefaultIsomorphismCap);
std::vector<GroupHom> all_isomorphisms(const GroupPtr& first, const GroupPtr& second,
                                       std::size_t cap = kDefaultIsomorphismCap);

}  // namespace vfree
