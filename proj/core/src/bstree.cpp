#include "vfree/bstree.hpp"

namespace vfree {

TreeVertex tree_vertex(const GraphOfGroups& g, const NormalForm& path) {
  if (path.graph != g.fingerprint()) throw Error("path belongs to a different graph of groups");
  if (path.start != g.base()) throw Error("tree vertices are coded by paths from the base vertex");
  TreeVertex x{path.end, path};
  x.rep.tail = g.vertex_group(path.end).identity();
  return x;
}

TreeVertex base_tree_vertex(const GraphOfGroups& g, std::size_t v) {
  GroupWord w{g.base(), {}};
  for (Traversal y : g.tree_path(v)) w.syllables.emplace_back(y);
  return tree_vertex(g, normal_form(g, w));
}

TreeVertex act(const GraphOfGroups& g, const NormalForm& element, const TreeVertex& x) {
  return tree_vertex(g, multiply(g, element, x.rep));
}

std::vector<TreeVertex> neighbors(const GraphOfGroups& g, const TreeVertex& x) {
  std::vector<TreeVertex> out;
  for (Traversal y : g.outgoing(x.orbit)) {
    for (Element r : g.transversal(y)) {
      NormalForm step = multiply(g, local_element(g, x.orbit, r), traversal_element(g, y));
      out.push_back(tree_vertex(g, multiply(g, x.rep, step)));
    }
  }
  return out;
}

std::size_t distance(const GraphOfGroups& g, const TreeVertex& x, const TreeVertex& y) {
  return multiply(g, invert(g, x.rep), y.rep).length();
}

std::vector<TreeVertex> geodesic(const GraphOfGroups& g, const TreeVertex& x, const TreeVertex& y) {
  NormalForm d = multiply(g, invert(g, x.rep), y.rep);
  std::vector<TreeVertex> out{x};
  NormalForm prefix = x.rep;
  for (std::size_t i = 0; i < d.length(); ++i) {
    prefix = multiply(g, prefix, local_element(g, prefix.end, d.reps[i]));
    prefix = multiply(g, prefix, traversal_element(g, d.path[i]));
    out.push_back(tree_vertex(g, prefix));
  }
  return out;
}

Classification classify(const GraphOfGroups& g, const NormalForm& element) {
  if (element.start != g.base() || element.end != g.base())
    throw Error("classify expects a loop at the base vertex");
  Classification c;
  c.reduction = cyclic_reduction(g, element);
  c.translation_length = c.reduction.core.length();
  c.hyperbolic = c.translation_length > 0;
  if (!c.hyperbolic) c.fixed_vertex = tree_vertex(g, c.reduction.conjugator);
  return c;
}

AxisSegment axis_window(const GraphOfGroups& g, const NormalForm& element, std::size_t periods) {
  return axis_window(g, element, 0, periods);
}

AxisSegment axis_window(const GraphOfGroups& g, const NormalForm& element, std::size_t before,
                        std::size_t periods) {
  Classification c = classify(g, element);
  if (!c.hyperbolic) throw Error("no axis: element is elliptic");
  const NormalForm& core = c.reduction.core;
  AxisSegment out;
  out.element = element;
  out.period = c.translation_length;
  NormalForm prefix = multiply(g, c.reduction.conjugator, power(g, core, -static_cast<long long>(before)));
  out.vertices.push_back(tree_vertex(g, prefix));
  for (std::size_t k = 0; k < before + periods; ++k) {
    for (std::size_t i = 0; i < core.length(); ++i) {
      prefix = multiply(g, prefix, local_element(g, prefix.end, core.reps[i]));
      prefix = multiply(g, prefix, traversal_element(g, core.path[i]));
      out.vertices.push_back(tree_vertex(g, prefix));
    }
    prefix = multiply(g, prefix, local_element(g, prefix.end, core.tail));
  }
  return out;
}

std::string format_vertex(const GraphOfGroups& g, const TreeVertex& x) {
  return describe(g, x.rep);
}

}  // namespace vfree
