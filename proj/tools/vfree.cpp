// Command-line front end. Every decision is delegated to vfree_core; this
// file only parses arguments and renders results.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "vfree/bstree.hpp"
#include "vfree/case_studies.hpp"
#include "vfree/defspace.hpp"
#include "vfree/folds.hpp"
#include "vfree/folog.hpp"
#include "vfree/genericity.hpp"
#include "vfree/io.hpp"

namespace {

using nlohmann::json;
using namespace vfree;

enum class Format { json, text };

struct Output {
  std::string format;
  Format get() const { return format == "text" ? Format::text : Format::json; }
};

// A graph of groups from a file, or a builtin fixture by name ("sl2z",
// "data/sl2z.json" when no such file exists, ...).
std::shared_ptr<const GraphOfGroups> load_graph(const std::string& spec) {
  namespace fs = std::filesystem;
  if (spec.empty()) return std::make_shared<const GraphOfGroups>(builtin_graph("sl2z"));
  if (fs::is_regular_file(spec)) return std::make_shared<const GraphOfGroups>(io::parse_graph(io::read_file(spec)));
  std::string stem = fs::path(spec).stem().string();
  if (builtin_fixtures().count(stem)) return std::make_shared<const GraphOfGroups>(builtin_graph(stem));
  throw Error("cannot read file '" + spec + "'");
}

json vertex_json(const GraphOfGroups& g, const TreeVertex& x) {
  return {{"orbit", g.vertices()[x.orbit].id}, {"path", format_vertex(g, x)}};
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// --- subcommands ---------------------------------------------------------------

struct GroupArgs {
  std::string file;
  std::string word;
  bool table = false;
};

void run_group(const GroupArgs& a, Format f) {
  GroupPtr g = io::parse_group(io::read_file(a.file));
  if (a.table) {
    std::cout << io::group_to_json(*g) << '\n';
    return;
  }
  json gens = json::array();
  for (const auto& gen : g->generators()) gens.push_back({{"name", gen.name}, {"label", g->label(gen.element)}});
  json profile = json::object();
  for (auto [order, count] : order_profile(*g)) profile[std::to_string(order)] = count;
  json out = {{"order", g->order()}, {"abelian", g->is_abelian()}, {"generators", gens}, {"order_profile", profile}};
  if (!a.word.empty()) {
    Element e = g->evaluate(a.word);
    out["word"] = {{"input", a.word}, {"label", g->label(e)}, {"order", g->element_order(e)}};
  }
  if (f == Format::json) return print(out);
  std::cout << "order " << g->order() << (g->is_abelian() ? ", abelian" : ", non-abelian") << '\n';
  for (const auto& gen : g->generators()) std::cout << "generator " << gen.name << " = " << g->label(gen.element) << '\n';
  for (auto [order, count] : order_profile(*g)) std::cout << count << " element(s) of order " << order << '\n';
  if (!a.word.empty()) std::cout << a.word << " = " << out["word"]["label"].get<std::string>() << '\n';
}

struct WordArgs {
  std::string group;
  std::string word;
  std::size_t periods = 2;
};

void run_nf(const WordArgs& a, Format f) {
  auto g = load_graph(a.group);
  NormalForm w = parse_word(*g, a.word);
  json out = {{"input", a.word},
              {"normal_form", format_word(*g, w)},
              {"syllables", describe(*g, w)},
              {"length", w.length()},
              {"identity", is_identity(*g, w)}};
  if (f == Format::json) return print(out);
  std::cout << format_word(*g, w) << '\n' << describe(*g, w) << '\n';
}

void run_classify(const WordArgs& a, Format f) {
  auto g = load_graph(a.group);
  NormalForm w = parse_word(*g, a.word);
  Classification c = classify(*g, w);
  auto order = element_order(*g, w);
  json out = {{"input", a.word},
              {"normal_form", format_word(*g, w)},
              {"type", c.hyperbolic ? "hyperbolic" : "elliptic"},
              {"translation_length", c.translation_length},
              {"order", order ? json(*order) : json("infinite")},
              {"cyclic_core", describe(*g, c.reduction.core)}};
  if (c.fixed_vertex) out["fixed_vertex"] = vertex_json(*g, *c.fixed_vertex);
  if (f == Format::json) return print(out);
  std::cout << (c.hyperbolic ? "hyperbolic, translation length " + std::to_string(c.translation_length)
                             : "elliptic, fixes " + format_vertex(*g, *c.fixed_vertex))
            << '\n';
}

void run_axis(const WordArgs& a, Format f) {
  auto g = load_graph(a.group);
  NormalForm w = parse_word(*g, a.word);
  AxisSegment s = axis_window(*g, w, a.periods);
  json vertices = json::array();
  for (const auto& v : s.vertices) vertices.push_back(vertex_json(*g, v));
  if (f == Format::json) return print({{"input", a.word}, {"period", s.period}, {"vertices", vertices}});
  std::cout << "period " << s.period << '\n';
  for (const auto& v : s.vertices) std::cout << format_vertex(*g, v) << '\n';
}

struct DefspaceArgs {
  std::string group;
  std::size_t p = 2, q = 1, r = 6;
  std::size_t depth = 2;
};

void run_reduced(const DefspaceArgs& a, Format f) {
  auto g = load_graph(a.group);
  DegreeSum d = degree_sum(*g);
  json collapsible = json::array();
  for (std::size_t e : collapsible_edges(*g)) collapsible.push_back(g->edges()[e].id);
  json out = {{"reduced", is_reduced(*g)},
              {"non_redundant", is_non_redundant(*g)},
              {"collapsible_edges", collapsible},
              {"degree_sum", d.value},
              {"tree_degree_sum", d.tree_value}};
  if (f == Format::json) return print(out);
  std::cout << "reduced " << yes_no(is_reduced(*g)) << ", non-redundant " << yes_no(is_non_redundant(*g))
            << ", degree sum " << d.value << '\n';
}

void print_graphs(const std::vector<GraphOfGroups>& graphs, Format f) {
  if (f == Format::json) {
    std::cout << io::graphs_to_json(graphs) << '\n';
    return;
  }
  std::cout << graphs.size() << " graph(s)\n";
  for (const auto& g : graphs) {
    std::cout << "-";
    for (const auto& v : g.vertices()) std::cout << ' ' << v.id << ":|" << v.group->order() << '|';
    for (const auto& e : g.edges())
      std::cout << ' ' << e.id << ":" << g.vertices()[e.from].id << "-" << g.vertices()[e.to].id << ":|"
                << e.group->order() << '|';
    std::cout << '\n';
  }
}

void run_enumerate(const DefspaceArgs& a, Format f) { print_graphs(enumerate_reduced(a.p, a.q, a.r), f); }

void run_expand(const DefspaceArgs& a, Format f) {
  auto g = load_graph(a.group);
  ExpansionSearch s = nonredundant_expansions(*g, a.depth);
  if (f == Format::text) {
    std::cout << "seed non-redundant " << yes_no(s.seed_non_redundant) << '\n';
    for (std::size_t i = 0; i < s.reached_per_level.size(); ++i)
      std::cout << "depth " << i + 1 << ": " << s.reached_per_level[i] << " class(es), " << s.redundant_per_level[i]
                << " redundant\n";
  }
  print_graphs(s.expansions, f);
}

struct FoldArgs {
  std::string tree;
  std::string group;
  std::string target;
  std::size_t max_steps = 50;
  bool list = false;
};

void run_fold(const FoldArgs& a, Format f) {
  std::shared_ptr<const GraphOfGroups> ambient = a.group.empty() ? nullptr : load_graph(a.group);
  MarkedTree t = io::parse_marked_tree(io::read_file(a.tree), ambient);
  if (a.list) {
    json out = json::array();
    for (const auto& d : available_folds(t)) {
      json item = {{"kind", to_string(d.kind)}, {"edge", t.edges[d.first.edge].id}};
      if (d.kind != DirectiveKind::collapse) item["type"] = to_string(classify_fold(t, d));
      out.push_back(item);
    }
    if (f == Format::json) return print(out);
    for (const auto& item : out)
      std::cout << item["kind"].get<std::string>() << " at " << item["edge"].get<std::string>()
                << (item.contains("type") ? " (" + item["type"].get<std::string>() + ")" : std::string()) << '\n';
    return;
  }
  std::shared_ptr<const GraphOfGroups> target = a.target.empty() ? t.ambient : load_graph(a.target);
  auto steps = fold_sequence(t, *target, a.max_steps);
  const MarkedTree* before = &t;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (f == Format::json) {
      std::cout << io::fold_step_to_json(*before, steps[i], i + 1) << '\n';
    } else {
      const auto& s = steps[i];
      std::cout << "step " << i + 1 << ": " << to_string(s.directive.kind)
                << (s.type ? " " + to_string(*s.type) : std::string()) << ", edge orbits " << before->edge_orbits()
                << " -> " << s.result.edge_orbits() << '\n';
    }
    before = &steps[i].result;
  }
  if (f == Format::text) std::cout << steps.size() << " step(s); quotient isomorphic to the target\n";
}

void run_whitehead(const WordArgs& a, Format f) {
  auto g = load_graph(a.group);
  NormalForm w = parse_word(*g, a.word);
  CertificateResult r = one_ended_certificate(*g, w);
  json graphs = json::array();
  for (const auto& wh : r.report.graphs) {
    json edges = json::array(), missing = json::array();
    for (auto [i, j] : wh.edges) edges.push_back({i, j});
    for (auto [i, j] : wh.missing()) missing.push_back({i, j});
    graphs.push_back({{"vertex", g->vertices()[wh.orbit].id},
                      {"nodes", wh.labels},
                      {"edges", edges},
                      {"missing", missing},
                      {"complete", wh.complete()}});
  }
  std::string status = r.status == Certificate::certified_one_ended ? "certified_one_ended" : "inconclusive";
  if (f == Format::json) return print({{"input", a.word}, {"fills", r.report.fills}, {"certificate", status}, {"graphs", graphs}});
  std::cout << (r.report.fills ? "fills" : "does not fill") << " (" << status << ")\n";
  for (const auto& wh : r.report.graphs)
    std::cout << g->vertices()[wh.orbit].id << ": " << wh.edges.size() << " of "
              << wh.nodes.size() * (wh.nodes.size() - 1) / 2 << " turns\n";
}

struct WalkArgs {
  std::string group;
  std::string measure;
  std::vector<std::size_t> lengths{8, 32, 128};
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

// Uniform on the vertex-group generators, the non-tree edge loops and their
// inverses.
RandomWalkSpec default_measure(const GraphOfGroups& g) {
  RandomWalkSpec spec;
  auto add = [&](const NormalForm& w) {
    for (const NormalForm& x : {w, invert(g, w)})
      if (std::find(spec.support.begin(), spec.support.end(), x) == spec.support.end()) spec.support.push_back(x);
  };
  for (std::size_t v = 0; v < g.vertices().size(); ++v)
    for (const auto& gen : g.vertex_group(v).generators())
      if (gen.element != g.vertex_group(v).identity()) add(vertex_loop(g, v, gen.element));
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    if (!g.in_tree(e)) add(edge_loop(g, e));
  spec.weights.assign(spec.support.size(), Weight{1, spec.support.size()});
  return spec;
}

void run_walk(const WalkArgs& a, Format f, bool seed_given, bool trials_given, bool threads_given) {
  auto g = load_graph(a.group);
  RandomWalkSpec spec = a.measure.empty() ? default_measure(*g) : io::parse_measure(*g, io::read_file(a.measure));
  if (a.measure.empty() || seed_given) spec.seed = a.seed;
  if (a.measure.empty() || trials_given) spec.trials = a.trials;
  if (a.measure.empty() || threads_given) spec.threads = a.threads;
  if (const char* env = std::getenv("VFREE_SEED")) {
    try {
      spec.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(std::string("VFREE_SEED is not an unsigned integer: ") + env);
    }
  }
  auto rows = run_genericity_experiment(*g, spec, a.lengths);
  if (f == Format::text) {
    std::cout << experiment_csv(rows);
    return;
  }
  json out = json::array();
  for (const auto& r : rows) {
    json row = {{"n", r.n}, {"trials", r.trials}, {"hyperbolic_count", r.hyperbolic}, {"filling_count", r.filling},
                {"filling_rate", r.filling_rate()}};
    if (r.p_matches) row["pmatch_count"] = *r.p_matches;
    out.push_back(row);
  }
  print({{"seed", spec.seed}, {"rows", out}});
}

struct FormulaArgs {
  std::string kind;
  std::string params;
};

void run_emit(const FormulaArgs& a, Format f) {
  std::string text = a.params.empty() ? std::string() : io::read_file(a.params);
  folog::Formula formula = io::formula_from_params(a.kind, text);
  folog::validate(formula);
  std::string rendering = folog::pretty_print(formula);
  if (f == Format::text) {
    std::cout << rendering << '\n';
    return;
  }
  print({{"kind", a.kind},
         {"class", folog::to_string(folog::classify(formula))},
         {"free_variables", formula.free_variables},
         {"formula", rendering}});
}

struct VerifyArgs {
  std::string which;
  std::string fixture;
  std::string z_action;
};

bool run_verify(const VerifyArgs& a, Format f) {
  std::vector<VerificationReport> reports;
  std::string fixture = a.fixture.empty() ? std::string() : io::read_file(a.fixture);
  if (a.which == "sl2z" || a.which == "all")
    reports.push_back(fixture.empty() || a.which == "all" ? verify_sl2z() : verify_sl2z(fixture));
  if (a.which == "counterexample" || a.which == "all") {
    CounterexampleOptions options;
    if (!a.z_action.empty()) options.z_action_override = a.z_action;
    reports.push_back(verify_counterexample(
        fixture.empty() || a.which == "all" ? builtin_fixtures().at("counterexample") : fixture, options));
  }
  bool ok = true;
  for (const auto& r : reports) {
    ok = ok && r.overall();
    std::cout << (f == Format::json ? report_to_json(r) + "\n" : report_to_text(r));
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Computations with virtually free groups given as graphs of finite groups"};
  app.require_subcommand(1);
  // Empty until given; the default depends on the subcommand.
  Output out{""};

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", out.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  };

  GroupArgs group_args;
  auto* group = app.add_subcommand("group", "Describe a finite group given in JSON");
  group->add_option("--file", group_args.file, "Group JSON file")->required();
  group->add_option("--word", group_args.word, "Evaluate a word over the generators");
  group->add_flag("--table", group_args.table, "Print the group in table form");

  WordArgs word_args;
  auto word_command = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--group", word_args.group, "Graph-of-groups JSON file or builtin name (default sl2z)");
    sub->add_option("--word", word_args.word, "Loop at the base vertex, e.g. \"a b^-1\"")->required();
    return sub;
  };
  auto* nf = word_command("nf", "Normal form of a word");
  auto* cls = word_command("classify", "Elliptic or hyperbolic, with translation length");
  auto* axis = word_command("axis", "A window of the axis of a hyperbolic element");
  axis->add_option("--periods", word_args.periods, "Fundamental domains to print");
  auto* whitehead = word_command("whitehead", "Whitehead graphs and the filling certificate");

  DefspaceArgs ds_args;
  auto* defspace = app.add_subcommand("defspace", "Deformation-space queries");
  defspace->require_subcommand(1);
  auto* reduced = defspace->add_subcommand("reduced", "Reducedness, redundancy and degree sum");
  reduced->add_option("--group", ds_args.group, "Graph-of-groups JSON file or builtin name");
  auto* enumerate = defspace->add_subcommand("enumerate", "Reduced graphs with p vertices, q edges, |G_v| <= r");
  enumerate->add_option("--p", ds_args.p, "Vertices")->required();
  enumerate->add_option("--q", ds_args.q, "Edges")->required();
  enumerate->add_option("--r", ds_args.r, "Largest vertex group order")->required();
  auto* expand = defspace->add_subcommand("expand", "Non-redundant graphs reachable by expansions");
  expand->add_option("--group", ds_args.group, "Graph-of-groups JSON file or builtin name");
  expand->add_option("--depth", ds_args.depth, "Number of expansions")->check(CLI::Range(1, 3));

  FoldArgs fold_args;
  auto* fold = app.add_subcommand("fold", "Fold a marked tree until it matches a target splitting");
  fold->add_option("--source,--tree", fold_args.tree, "Marked tree JSON file")->required();
  fold->add_option("--group", fold_args.group, "Ambient graph when the tree file has none");
  fold->add_option("--target", fold_args.target, "Target graph (default: the ambient graph)");
  fold->add_option("--max-steps", fold_args.max_steps, "Step budget");
  fold->add_flag("--list", fold_args.list, "Only list the available folds");

  WalkArgs walk_args;
  auto* walk = app.add_subcommand("walk", "Random-walk genericity experiment (CSV)");
  walk->add_option("--group", walk_args.group, "Graph-of-groups JSON file or builtin name (default sl2z)");
  walk->add_option("--measure", walk_args.measure, "Measure JSON file (default uniform on generators)");
  walk->add_option("--lengths", walk_args.lengths, "Walk lengths")->delimiter(',');
  auto* trials_opt = walk->add_option("--trials", walk_args.trials, "Trials per length");
  auto* seed_opt = walk->add_option("--seed", walk_args.seed, "Master seed (VFREE_SEED overrides)");
  auto* threads_opt = walk->add_option("--threads", walk_args.threads, "Worker threads, 0 for all cores");

  FormulaArgs formula_args;
  auto* emit = app.add_subcommand("emit-formula", "Print theta, mu or delta as a first-order formula");
  emit->add_option("kind", formula_args.kind, "theta, mu or delta")->required()->check(CLI::IsMember({"theta", "mu", "delta"}));
  emit->add_option("--params", formula_args.params, "Parameter JSON file");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run a built-in case study");
  verify->add_option("case", verify_args.which, "sl2z, counterexample or all")
      ->required()
      ->check(CLI::IsMember({"sl2z", "counterexample", "all"}));
  verify->add_option("--fixture", verify_args.fixture, "Replacement fixture JSON");
  verify->add_option("--z-action", verify_args.z_action, "Fault injection: action of z on C in cycle notation");

  for (auto* sub : {group, nf, cls, axis, whitehead, reduced, enumerate, expand, fold, walk, emit, verify})
    add_format(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  auto chosen = [](CLI::App* sub) { return sub->parsed(); };
  if (out.format.empty()) out.format = (chosen(walk) || chosen(emit)) ? "text" : "json";
  const Format f = out.get();

  try {
    if (chosen(group)) run_group(group_args, f);
    else if (chosen(nf)) run_nf(word_args, f);
    else if (chosen(cls)) run_classify(word_args, f);
    else if (chosen(axis)) run_axis(word_args, f);
    else if (chosen(whitehead)) run_whitehead(word_args, f);
    else if (chosen(reduced)) run_reduced(ds_args, f);
    else if (chosen(enumerate)) run_enumerate(ds_args, f);
    else if (chosen(expand)) run_expand(ds_args, f);
    else if (chosen(fold)) run_fold(fold_args, f);
    else if (chosen(walk)) run_walk(walk_args, f, seed_opt->count() > 0, trials_opt->count() > 0, threads_opt->count() > 0);
    else if (chosen(emit)) run_emit(formula_args, f);
    else if (chosen(verify)) return run_verify(verify_args, f) ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
