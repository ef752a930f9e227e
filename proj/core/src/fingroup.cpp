#include "vfree/fingroup.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "text.hpp"

namespace vfree {

namespace {

constexpr Element kUnset = static_cast<Element>(-1);

std::string pair_text(const FiniteGroup& g, Element x, Element y) {
  return "(" + g.label(x) + ", " + g.label(y) + ")";
}

}  // namespace

FiniteGroup FiniteGroup::from_table(std::size_t order, std::vector<Element> table,
                                    std::vector<NamedElement> generators,
                                    std::vector<std::string> labels) {
  if (order == 0) throw Error("group order must be positive");
  if (table.size() != order * order) throw Error("multiplication table has wrong size");
  if (!labels.empty() && labels.size() != order) throw Error("label count differs from order");

  for (Element v : table)
    if (v >= order) throw Error("multiplication table entry out of range");

  // Latin square: every row and column is a permutation.
  std::vector<char> seen(order);
  for (std::size_t r = 0; r < order; ++r) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t c = 0; c < order; ++c) {
      if (seen[table[r * order + c]]++) throw Error("multiplication table row is not a permutation");
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t c = 0; c < order; ++c) {
      if (seen[table[c * order + r]]++) throw Error("multiplication table column is not a permutation");
    }
  }

  FiniteGroup g;
  g.order_ = order;
  g.table_ = std::move(table);

  std::optional<Element> identity;
  for (Element e = 0; e < order && !identity; ++e) {
    bool ok = true;
    for (Element x = 0; x < order && ok; ++x)
      ok = g.table_[e * order + x] == x && g.table_[x * order + e] == x;
    if (ok) identity = e;
  }
  if (!identity) throw Error("multiplication table has no identity");
  g.identity_ = *identity;

  auto assoc_fails = [&](Element a, Element b, Element c) {
    return g.multiply(g.multiply(a, b), c) != g.multiply(a, g.multiply(b, c));
  };
  if (order <= 64) {
    for (Element a = 0; a < order; ++a)
      for (Element b = 0; b < order; ++b)
        for (Element c = 0; c < order; ++c)
          if (assoc_fails(a, b, c)) throw Error("multiplication table is not associative");
  } else {
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_int_distribution<Element> pick(0, static_cast<Element>(order - 1));
    for (int i = 0; i < 4096; ++i)
      if (assoc_fails(pick(rng), pick(rng), pick(rng)))
        throw Error("multiplication table is not associative");
  }

  g.inverses_.assign(order, 0);
  for (Element a = 0; a < order; ++a)
    for (Element b = 0; b < order; ++b)
      if (g.multiply(a, b) == g.identity_) g.inverses_[a] = b;

  for (const auto& gen : generators)
    if (gen.element >= order) throw Error("generator '" + gen.name + "' out of range");
  g.generators_ = std::move(generators);

  if (labels.empty()) {
    labels.resize(order);
    for (Element a = 0; a < order; ++a) labels[a] = "#" + std::to_string(a);
  }
  g.labels_ = std::move(labels);

  std::vector<Element> gen_elements;
  for (const auto& gen : g.generators_) gen_elements.push_back(gen.element);
  if (subgroup_closure(g, gen_elements).order() != order)
    throw Error("generators do not generate the group");
  return g;
}

Element FiniteGroup::power(Element a, long long exponent) const {
  Element base = exponent < 0 ? inverse(a) : a;
  unsigned long long n = exponent < 0 ? static_cast<unsigned long long>(-exponent)
                                      : static_cast<unsigned long long>(exponent);
  n %= element_order(a);
  Element result = identity_;
  for (unsigned long long i = 0; i < n; ++i) result = multiply(result, base);
  return result;
}

Element FiniteGroup::conjugate(Element g, Element h) const {
  return multiply(multiply(g, h), inverse(g));
}

std::size_t FiniteGroup::element_order(Element a) const {
  std::size_t n = 1;
  for (Element x = a; x != identity_; x = multiply(x, a)) ++n;
  return n;
}

bool FiniteGroup::is_abelian() const {
  for (Element a = 0; a < order_; ++a)
    for (Element b = a + 1; b < order_; ++b)
      if (multiply(a, b) != multiply(b, a)) return false;
  return true;
}

std::optional<Element> FiniteGroup::generator(std::string_view name) const {
  for (const auto& gen : generators_)
    if (gen.name == name) return gen.element;
  return std::nullopt;
}

std::string FiniteGroup::label(Element a) const {
  return a < labels_.size() ? labels_[a] : "#" + std::to_string(a);
}

Element FiniteGroup::evaluate(std::string_view word) const {
  Element result = identity_;
  for (const auto& letter : detail::tokenize_word(word)) {
    auto gen = generator(letter.symbol);
    if (!gen) throw Error("unknown generator '" + letter.symbol + "'");
    result = multiply(result, power(*gen, letter.exponent));
  }
  return result;
}

std::string FiniteGroup::word_for(Element a) const {
  if (a == identity_) return "1";
  std::vector<Element> parent(order_, kUnset);
  std::vector<std::size_t> via(order_, 0);
  std::deque<Element> queue{identity_};
  parent[identity_] = identity_;
  while (!queue.empty() && parent[a] == kUnset) {
    Element x = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      Element y = multiply(x, generators_[i].element);
      if (parent[y] == kUnset) {
        parent[y] = x;
        via[y] = i;
        queue.push_back(y);
      }
    }
  }
  std::vector<std::string> names;
  for (Element x = a; x != identity_; x = parent[x]) names.push_back(generators_[via[x]].name);
  std::reverse(names.begin(), names.end());
  // Collapse runs into powers.
  std::string out;
  for (std::size_t i = 0; i < names.size();) {
    std::size_t j = i;
    while (j < names.size() && names[j] == names[i]) ++j;
    if (!out.empty()) out += ' ';
    out += detail::render_letter(names[i], static_cast<long long>(j - i));
    i = j;
  }
  return out;
}

bool Subgroup::contains(Element a) const {
  return std::binary_search(elements.begin(), elements.end(), a);
}

// --- construction -----------------------------------------------------------

FiniteGroup build_cyclic(std::size_t n, std::string generator_name) {
  if (n == 0) throw Error("cyclic group order must be at least 1");
  std::vector<Element> table(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = static_cast<Element>((a + b) % n);
    labels[a] = a == 0 ? "1" : detail::render_letter(generator_name, static_cast<long long>(a));
  }
  Element gen = n == 1 ? 0 : 1;
  return FiniteGroup::from_table(n, std::move(table), {{std::move(generator_name), gen}},
                                 std::move(labels));
}

FiniteGroup build_elementary_abelian(std::size_t rank) {
  if (rank > 12) throw CapExceeded("elementary abelian rank above 12");
  std::size_t n = std::size_t{1} << rank;
  std::vector<Element> table(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = static_cast<Element>(a ^ b);
    std::string label;
    for (std::size_t i = 0; i < rank; ++i) {
      if (!(a >> i & 1)) continue;
      if (!label.empty()) label += '+';
      label += "e" + std::to_string(i + 1);
    }
    labels[a] = label.empty() ? "0" : label;
  }
  std::vector<NamedElement> gens;
  for (std::size_t i = 0; i < rank; ++i)
    gens.push_back({"e" + std::to_string(i + 1), static_cast<Element>(1u << i)});
  return FiniteGroup::from_table(n, std::move(table), std::move(gens), std::move(labels));
}

FiniteGroup build_direct_product(const FiniteGroup& first, const FiniteGroup& second) {
  std::size_t n1 = first.order(), n2 = second.order(), n = n1 * n2;
  std::vector<Element> table(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < n; ++a) {
    Element g1 = static_cast<Element>(a % n1), h1 = static_cast<Element>(a / n1);
    for (std::size_t b = 0; b < n; ++b) {
      Element g2 = static_cast<Element>(b % n1), h2 = static_cast<Element>(b / n1);
      table[a * n + b] = static_cast<Element>(second.multiply(h1, h2) * n1 + first.multiply(g1, g2));
    }
    labels[a] = "(" + first.label(g1) + "," + second.label(h1) + ")";
  }
  std::vector<NamedElement> gens;
  for (const auto& gen : first.generators())
    gens.push_back({gen.name, static_cast<Element>(second.identity() * n1 + gen.element)});
  for (const auto& gen : second.generators())
    gens.push_back({gen.name, static_cast<Element>(gen.element * n1 + first.identity())});
  return FiniteGroup::from_table(n, std::move(table), std::move(gens), std::move(labels));
}

FiniteGroup build_semidirect(const GroupPtr& normal, const GroupPtr& quotient,
                             const std::map<std::string, GroupHom>& generator_actions) {
  const FiniteGroup& c = *normal;
  const FiniteGroup& q = *quotient;
  const std::size_t nc = c.order(), nq = q.order();

  for (const auto& [name, aut] : generator_actions) {
    if (!q.generator(name)) throw Error("action given for unknown generator '" + name + "'");
    if (!(*aut.source == c) || !(*aut.target == c))
      throw Error("action image of '" + name + "' is not an endomorphism of the normal subgroup");
    auto check = check_hom(aut, HomClaim::isomorphism);
    if (check.status != HomStatus::valid_iso)
      throw Error("action image of '" + name + "' is not an automorphism: " + check.detail);
  }

  // Extend over Q along the Cayley graph: act(p s) = act(p) o act(s).
  std::vector<std::vector<Element>> act(nq);
  act[q.identity()].resize(nc);
  std::iota(act[q.identity()].begin(), act[q.identity()].end(), Element{0});
  std::deque<Element> queue{q.identity()};
  auto compose_maps = [&](const std::vector<Element>& outer, const std::vector<Element>& inner) {
    std::vector<Element> out(nc);
    for (std::size_t i = 0; i < nc; ++i) out[i] = outer[inner[i]];
    return out;
  };
  while (!queue.empty()) {
    Element p = queue.front();
    queue.pop_front();
    for (const auto& gen : q.generators()) {
      auto it = generator_actions.find(gen.name);
      std::vector<Element> gen_map(nc);
      if (it == generator_actions.end())
        std::iota(gen_map.begin(), gen_map.end(), Element{0});
      else
        gen_map = it->second.map;
      Element next = q.multiply(p, gen.element);
      auto image = compose_maps(act[p], gen_map);
      if (act[next].empty()) {
        act[next] = std::move(image);
        queue.push_back(next);
      } else if (act[next] != image) {
        throw Error("action is not a homomorphism: violating pair " +
                    pair_text(q, p, gen.element));
      }
    }
  }
  for (Element a = 0; a < nq; ++a)
    for (Element b = 0; b < nq; ++b)
      if (act[q.multiply(a, b)] != compose_maps(act[a], act[b]))
        throw Error("action is not a homomorphism: violating pair " + pair_text(q, a, b));

  const std::size_t n = nc * nq;
  std::vector<Element> table(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t x = 0; x < n; ++x) {
    Element c1 = static_cast<Element>(x % nc), q1 = static_cast<Element>(x / nc);
    for (std::size_t y = 0; y < n; ++y) {
      Element c2 = static_cast<Element>(y % nc), q2 = static_cast<Element>(y / nc);
      Element cc = c.multiply(c1, act[q1][c2]);
      table[x * n + y] = static_cast<Element>(q.multiply(q1, q2) * nc + cc);
    }
    if (q1 == q.identity())
      labels[x] = c.label(c1);
    else if (c1 == c.identity())
      labels[x] = q.label(q1);
    else
      labels[x] = c.label(c1) + "*" + q.label(q1);
  }
  std::vector<NamedElement> gens;
  for (const auto& gen : c.generators())
    gens.push_back({gen.name, static_cast<Element>(q.identity() * nc + gen.element)});
  for (const auto& gen : q.generators())
    gens.push_back({gen.name, static_cast<Element>(gen.element * nc + c.identity())});
  return FiniteGroup::from_table(n, std::move(table), std::move(gens), std::move(labels));
}

FiniteGroup subgroup_as_group(const FiniteGroup& parent, const Subgroup& subgroup) {
  const auto& els = subgroup.elements;
  const std::size_t n = els.size();
  if (n == 0) throw Error("empty subgroup");
  auto index_of = [&](Element a) {
    auto it = std::lower_bound(els.begin(), els.end(), a);
    if (it == els.end() || *it != a) throw Error("element set is not closed under multiplication");
    return static_cast<Element>(it - els.begin());
  };
  std::vector<Element> table(n * n);
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = index_of(parent.multiply(els[i], els[j]));
    labels[i] = parent.label(els[i]);
  }
  // Generators: a small generating set, computed in the parent.
  std::vector<NamedElement> gens;
  Subgroup closure{{parent.identity()}};
  std::vector<Element> chosen;
  while (closure.order() < n) {
    Element best = 0;
    std::size_t best_order = 0;
    for (Element a : els) {
      if (closure.contains(a)) continue;
      std::size_t o = parent.element_order(a);
      if (o > best_order) best = a, best_order = o;
    }
    chosen.push_back(best);
    closure = subgroup_closure(parent, chosen);
  }
  for (Element a : chosen) gens.push_back({parent.label(a), index_of(a)});
  return FiniteGroup::from_table(n, std::move(table), std::move(gens), std::move(labels));
}

// --- subgroups and homomorphisms ---------------------------------------------

Subgroup subgroup_closure(const FiniteGroup& g, std::span<const Element> generators) {
  std::vector<char> in(g.order(), 0);
  std::vector<Element> elements{g.identity()};
  in[g.identity()] = 1;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (Element s : generators) {
      if (s >= g.order()) throw Error("generator outside the group");
      Element next = g.multiply(elements[i], s);
      if (!in[next]) {
        in[next] = 1;
        elements.push_back(next);
      }
    }
  }
  std::sort(elements.begin(), elements.end());
  return Subgroup{std::move(elements)};
}

Subgroup whole_group(const FiniteGroup& g) {
  Subgroup s;
  s.elements.resize(g.order());
  std::iota(s.elements.begin(), s.elements.end(), Element{0});
  return s;
}

std::vector<Subgroup> all_subgroups(const FiniteGroup& g) {
  std::set<std::vector<Element>> found;
  std::vector<Subgroup> frontier{Subgroup{{g.identity()}}};
  found.insert(frontier.front().elements);
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    for (Element a = 0; a < g.order(); ++a) {
      if (frontier[i].contains(a)) continue;
      std::vector<Element> gens = frontier[i].elements;
      gens.push_back(a);
      Subgroup next = subgroup_closure(g, gens);
      if (found.insert(next.elements).second) frontier.push_back(std::move(next));
    }
  }
  std::sort(frontier.begin(), frontier.end(), [](const Subgroup& a, const Subgroup& b) {
    return std::pair(a.order(), a.elements) < std::pair(b.order(), b.elements);
  });
  return frontier;
}

std::vector<Element> small_generating_set(const FiniteGroup& g) {
  std::vector<Element> chosen;
  Subgroup closure{{g.identity()}};
  while (closure.order() < g.order()) {
    Element best = 0;
    std::size_t best_order = 0;
    for (Element a = 0; a < g.order(); ++a) {
      if (closure.contains(a)) continue;
      std::size_t o = g.element_order(a);
      if (o > best_order) best = a, best_order = o;
    }
    chosen.push_back(best);
    closure = subgroup_closure(g, chosen);
  }
  return chosen;
}

GroupHom extend_generator_images(const GroupPtr& source, const GroupPtr& target,
                                 std::span<const Element> images) {
  const FiniteGroup& s = *source;
  const FiniteGroup& t = *target;
  if (images.size() != s.generators().size())
    throw Error("expected " + std::to_string(s.generators().size()) + " generator images, got " +
                std::to_string(images.size()));
  for (Element img : images)
    if (img >= t.order()) throw Error("generator image outside the target group");

  std::vector<Element> map(s.order(), kUnset);
  map[s.identity()] = t.identity();
  std::deque<Element> queue{s.identity()};
  while (!queue.empty()) {
    Element x = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i < images.size(); ++i) {
      Element next = s.multiply(x, s.generators()[i].element);
      Element img = t.multiply(map[x], images[i]);
      if (map[next] == kUnset) {
        map[next] = img;
        queue.push_back(next);
      } else if (map[next] != img) {
        throw Error("generator images do not extend to a homomorphism: relation violated at " +
                    s.label(x) + " * " + s.generators()[i].name);
      }
    }
  }
  return GroupHom{source, target, std::move(map)};
}

GroupHom identity_hom(const GroupPtr& g) {
  std::vector<Element> map(g->order());
  std::iota(map.begin(), map.end(), Element{0});
  return GroupHom{g, g, std::move(map)};
}

GroupHom compose(const GroupHom& outer, const GroupHom& inner) {
  if (!(*inner.target == *outer.source)) throw Error("composition of incompatible homomorphisms");
  std::vector<Element> map(inner.map.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = outer.map[inner.map[i]];
  return GroupHom{inner.source, outer.target, std::move(map)};
}

bool is_injective(const GroupHom& h) {
  std::vector<Element> sorted = h.map;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

HomCheck check_hom(const GroupHom& h, HomClaim claim) {
  const FiniteGroup& s = *h.source;
  const FiniteGroup& t = *h.target;
  HomCheck result;
  if (h.map.size() != s.order()) {
    result.detail = "map does not cover the source group";
    return result;
  }
  for (Element x = 0; x < s.order(); ++x) {
    if (h.map[x] >= t.order()) {
      result.witness = std::pair(x, x);
      result.detail = "image of " + s.label(x) + " outside the target";
      return result;
    }
  }
  for (Element x = 0; x < s.order(); ++x)
    for (Element y = 0; y < s.order(); ++y)
      if (h.map[s.multiply(x, y)] != t.multiply(h.map[x], h.map[y])) {
        result.witness = std::pair(x, y);
        result.detail = "h(xy) != h(x)h(y) for (x, y) = " + pair_text(s, x, y);
        return result;
      }
  bool bijective = s.order() == t.order() && is_injective(h);
  if (bijective) {
    result.status = HomStatus::valid_iso;
    return result;
  }
  if (claim == HomClaim::isomorphism) {
    if (s.order() != t.order()) {
      result.witness = std::pair(s.identity(), s.identity());
      result.detail = "orders differ: " + std::to_string(s.order()) + " vs " + std::to_string(t.order());
      return result;
    }
    for (Element x = 0; x < s.order(); ++x)
      for (Element y = x + 1; y < s.order(); ++y)
        if (h.map[x] == h.map[y]) {
          result.witness = std::pair(x, y);
          result.detail = "not injective: " + s.label(x) + " and " + s.label(y) + " have equal image";
          return result;
        }
  }
  result.status = HomStatus::valid_hom;
  return result;
}

GroupHom conjugation_action(const FiniteGroup& g, Element conjugator, const Subgroup& n) {
  for (Element a : n.elements) {
    Element image = g.conjugate(conjugator, a);
    if (!n.contains(image))
      throw Error("subgroup is not normalized by " + g.label(conjugator) + ": " + g.label(a) +
                  " escapes to " + g.label(image));
  }
  auto group = share(subgroup_as_group(g, n));
  std::vector<Element> map(n.order());
  for (std::size_t i = 0; i < n.order(); ++i) {
    Element image = g.conjugate(conjugator, n.elements[i]);
    map[i] = static_cast<Element>(std::lower_bound(n.elements.begin(), n.elements.end(), image) -
                                  n.elements.begin());
  }
  return GroupHom{group, group, std::move(map)};
}

std::map<std::size_t, std::size_t> order_profile(const FiniteGroup& g) {
  std::map<std::size_t, std::size_t> profile;
  for (Element a = 0; a < g.order(); ++a) ++profile[g.element_order(a)];
  return profile;
}

namespace {

// Backtracking over images of a small generating set of `first`; each partial
// assignment is checked for consistency on the subgroup it generates.
void search_isomorphisms(const GroupPtr& first, const GroupPtr& second, bool stop_at_first,
                         std::vector<GroupHom>& out) {
  const FiniteGroup& s = *first;
  const FiniteGroup& t = *second;
  std::vector<Element> gens = small_generating_set(s);
  std::vector<std::vector<Element>> candidates(gens.size());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::size_t o = s.element_order(gens[i]);
    for (Element b = 0; b < t.order(); ++b)
      if (t.element_order(b) == o) candidates[i].push_back(b);
  }

  std::vector<Element> images(gens.size());
  // Partial map over <gens[0..k)>; returns false on inconsistency.
  auto partial_map = [&](std::size_t k, std::vector<Element>& map) {
    std::fill(map.begin(), map.end(), kUnset);
    map[s.identity()] = t.identity();
    std::deque<Element> queue{s.identity()};
    while (!queue.empty()) {
      Element x = queue.front();
      queue.pop_front();
      for (std::size_t i = 0; i < k; ++i) {
        Element next = s.multiply(x, gens[i]);
        Element img = t.multiply(map[x], images[i]);
        if (map[next] == kUnset) {
          map[next] = img;
          queue.push_back(next);
        } else if (map[next] != img) {
          return false;
        }
      }
    }
    return true;
  };

  std::vector<Element> map(s.order());
  std::function<bool(std::size_t)> recurse = [&](std::size_t k) -> bool {
    if (k == gens.size()) {
      if (!partial_map(k, map)) return false;
      GroupHom h{first, second, map};
      if (!is_injective(h)) return false;
      out.push_back(std::move(h));
      return stop_at_first;
    }
    for (Element b : candidates[k]) {
      images[k] = b;
      if (!partial_map(k + 1, map)) continue;
      // Injectivity on the partial subgroup.
      std::vector<Element> seen;
      for (Element x = 0; x < s.order(); ++x)
        if (map[x] != kUnset) seen.push_back(map[x]);
      std::sort(seen.begin(), seen.end());
      if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) continue;
      if (recurse(k + 1)) return true;
    }
    return false;
  };
  recurse(0);
}

void check_cap(const FiniteGroup& g, std::size_t cap) {
  if (g.order() > cap)
    throw CapExceeded("isomorphism search: group of order " + std::to_string(g.order()) +
                      " is too large (cap " + std::to_string(cap) + ")");
}

}  // namespace

std::optional<GroupHom> are_isomorphic(const GroupPtr& first, const GroupPtr& second,
                                       std::size_t cap) {
  check_cap(*first, cap);
  check_cap(*second, cap);
  if (first->order() != second->order()) return std::nullopt;
  if (order_profile(*first) != order_profile(*second)) return std::nullopt;
  if (first->is_abelian() != second->is_abelian()) return std::nullopt;
  std::vector<GroupHom> found;
  search_isomorphisms(first, second, true, found);
  if (found.empty()) return std::nullopt;
  return std::move(found.front());
}

std::vector<GroupHom> all_isomorphisms(const GroupPtr& first, const GroupPtr& second,
                                       std::size_t cap) {
  check_cap(*first, cap);
  check_cap(*second, cap);
  std::vector<GroupHom> found;
  if (first->order() != second->order() || order_profile(*first) != order_profile(*second))
    return found;
  search_isomorphisms(first, second, false, found);
  return found;
}

}  // namespace vfree
