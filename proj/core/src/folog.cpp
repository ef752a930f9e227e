#include "vfree/folog.hpp"

#include <cctype>
#include <functional>
#include <set>

#include "vfree/error.hpp"

namespace vfree::folog {

namespace {

const std::set<std::string, std::less<>> kKeywords{"EXISTS", "FORALL", "AND", "OR", "FREE"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Token {
  enum Kind { ident, number, symbol, end } kind = end;
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      out.push_back({Token::ident, std::string(s.substr(i, j - i))});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Token::number, std::string(s.substr(i, j - i))});
      i = j;
    } else if (s.substr(i, 2) == "~=" || s.substr(i, 2) == "=>") {
      out.push_back({Token::symbol, std::string(s.substr(i, 2))});
      i += 2;
    } else if (std::string_view("()=:.^-").find(c) != std::string_view::npos) {
      out.push_back({Token::symbol, std::string(1, c)});
      ++i;
    } else {
      throw Error("unexpected character '" + std::string(1, c) + "' in formula");
    }
  }
  out.push_back({Token::end, ""});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  bool at_end() const { return peek().kind == Token::end; }
  const Token& peek() const { return tokens_[pos_]; }
  bool is(std::string_view text) const { return peek().kind != Token::end && peek().text == text; }
  bool is_variable() const { return peek().kind == Token::ident && !kKeywords.count(peek().text); }

  void expect(std::string_view text) {
    if (!is(text)) throw Error("expected '" + std::string(text) + "' but found '" + describe_token() + "'");
    ++pos_;
  }

  std::string describe_token() const { return at_end() ? "end of input" : peek().text; }

  std::string variable() {
    if (!is_variable()) throw Error("expected a variable but found '" + describe_token() + "'");
    return tokens_[pos_++].text;
  }

  Word word() {
    if (peek().kind == Token::number) {
      if (peek().text != "1") throw Error("the only numeral allowed as a word is 1");
      ++pos_;
      return {};
    }
    Word w;
    while (is_variable()) {
      Letter l{tokens_[pos_++].text, 1};
      if (is("^")) {
        ++pos_;
        bool negative = false;
        if (is("-")) {
          negative = true;
          ++pos_;
        }
        if (peek().kind != Token::number) throw Error("expected an exponent after '^'");
        l.exp = std::stoll(tokens_[pos_++].text);
        if (negative) l.exp = -l.exp;
      }
      w.push_back(std::move(l));
    }
    if (w.empty()) throw Error("expected a group word but found '" + describe_token() + "'");
    return w;
  }

  Node formula() {
    if (is("EXISTS") || is("FORALL")) {
      bool ex = is("EXISTS");
      ++pos_;
      std::vector<std::string> vars;
      while (is_variable()) vars.push_back(variable());
      if (vars.empty()) throw Error("quantifier without variables");
      expect(":");
      Node body = formula();
      return ex ? exists(std::move(vars), std::move(body)) : forall(std::move(vars), std::move(body));
    }
    return primary();
  }

  Node primary() {
    if (is("(")) {
      ++pos_;
      Node first = formula();
      if (is(")")) {
        ++pos_;
        return first;
      }
      if (is("=>")) {
        ++pos_;
        Node second = formula();
        expect(")");
        return implication(std::move(first), std::move(second));
      }
      std::string op = is("AND") ? "AND" : is("OR") ? "OR" : "";
      if (op.empty()) throw Error("expected AND, OR, => or ')' but found '" + describe_token() + "'");
      std::vector<Node> parts{std::move(first)};
      while (is(op)) {
        ++pos_;
        parts.push_back(formula());
      }
      expect(")");
      Node n;
      n.op = op == "AND" ? Op::conjunction : Op::disjunction;
      n.children = std::move(parts);
      return n;
    }
    Word lhs = word();
    bool neg = is("~=");
    if (!neg) expect("=");
    else ++pos_;
    Word rhs = word();
    return neg ? inequation(std::move(lhs), std::move(rhs)) : equation(std::move(lhs), std::move(rhs));
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool reduced(const Word& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i].exp == 0) return false;
    if (i > 0 && w[i].var == w[i - 1].var) return false;
  }
  return true;
}

bool contains_op(const Node& n, Op op) {
  if (n.op == op) return true;
  for (const auto& c : n.children)
    if (contains_op(c, op)) return true;
  return false;
}

bool quantifier_in_antecedent(const Node& n, bool negative) {
  if ((n.op == Op::exists || n.op == Op::forall) && negative) return true;
  if (n.op == Op::implication)
    return quantifier_in_antecedent(n.children[0], true) || quantifier_in_antecedent(n.children[1], negative);
  for (const auto& c : n.children)
    if (quantifier_in_antecedent(c, negative)) return true;
  return false;
}

void print(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::equation:
    case Op::inequation:
      out += format_word(n.lhs);
      out += n.op == Op::equation ? " = " : " ~= ";
      out += format_word(n.rhs);
      return;
    case Op::conjunction:
    case Op::disjunction:
    case Op::implication: {
      const char* sep = n.op == Op::conjunction ? " AND " : n.op == Op::disjunction ? " OR " : " => ";
      out += '(';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += sep;
        print(n.children[i], out);
      }
      out += ')';
      return;
    }
    case Op::exists:
    case Op::forall:
      out += n.op == Op::exists ? "EXISTS" : "FORALL";
      for (const auto& v : n.variables) out += ' ' + v;
      out += ": ";
      print(n.children[0], out);
      return;
  }
}

Node connective(Op op, std::vector<Node> parts) {
  if (parts.empty()) throw Error("empty conjunction or disjunction");
  if (parts.size() == 1) return std::move(parts.front());
  Node n;
  n.op = op;
  n.children = std::move(parts);
  return n;
}

Node quantifier(Op op, std::vector<std::string> variables, Node body) {
  if (variables.empty()) throw Error("quantifier without variables");
  Node n;
  n.op = op;
  n.variables = std::move(variables);
  n.children.push_back(std::move(body));
  return n;
}

void check_letters(const Word& w, const std::set<std::string>& allowed, const char* what) {
  for (const auto& l : w)
    if (!allowed.count(l.var)) throw Error(std::string(what) + " uses undeclared letter '" + l.var + "'");
}

std::map<std::string, Word> positional(const std::vector<std::string>& from, const std::vector<std::string>& to) {
  std::map<std::string, Word> m;
  for (std::size_t i = 0; i < from.size(); ++i) m[from[i]] = Word{{to[i], 1}};
  return m;
}

std::vector<std::string> numbered(const std::string& stem, std::size_t count, std::size_t first = 1) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(stem + std::to_string(first + i));
  return out;
}

Node substitute_node(const Node& n, const std::map<std::string, Word>& s) {
  Node out = n;
  out.lhs = substitute(n.lhs, s);
  out.rhs = substitute(n.rhs, s);
  if (n.op == Op::exists || n.op == Op::forall) {
    std::map<std::string, Word> inner = s;
    for (const auto& v : n.variables) inner.erase(v);
    out.children[0] = substitute_node(n.children[0], inner);
    return out;
  }
  for (auto& c : out.children) c = substitute_node(c, s);
  return out;
}

// Renames bound variables that occur in `taken`.
Node rename_bound(const Node& n, std::set<std::string>& taken) {
  Node out = n;
  if (n.op == Op::exists || n.op == Op::forall) {
    std::map<std::string, Word> renames;
    for (auto& v : out.variables) {
      if (!taken.count(v)) {
        taken.insert(v);
        continue;
      }
      std::string fresh = v;
      while (taken.count(fresh)) fresh += "_";
      taken.insert(fresh);
      renames[v] = Word{{fresh, 1}};
      v = fresh;
    }
    out.children[0] = rename_bound(substitute_node(n.children[0], renames), taken);
    return out;
  }
  for (auto& c : out.children) c = rename_bound(c, taken);
  return out;
}

}  // namespace

Word parse_formal_word(std::string_view text) {
  Parser p(text);
  Word w = p.word();
  if (!p.at_end()) throw Error("trailing input after word: '" + p.describe_token() + "'");
  return w;
}

std::string format_word(const Word& w) {
  if (w.empty()) return "1";
  std::string out;
  for (const auto& l : w) {
    if (!out.empty()) out += ' ';
    out += l.var;
    if (l.exp != 1) out += '^' + std::to_string(l.exp);
  }
  return out;
}

Word free_reduce(Word w) {
  Word out;
  for (auto& l : w) {
    if (l.exp == 0) continue;
    if (!out.empty() && out.back().var == l.var) {
      out.back().exp += l.exp;
      if (out.back().exp == 0) out.pop_back();
    } else {
      out.push_back(std::move(l));
    }
  }
  return out;
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& l : out) l.exp = -l.exp;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return free_reduce(std::move(out));
}

Word substitute(const Word& w, const std::map<std::string, Word>& substitution) {
  Word out;
  for (const auto& l : w) {
    auto it = substitution.find(l.var);
    if (it == substitution.end()) {
      out.push_back(l);
      continue;
    }
    Word piece = l.exp < 0 ? inverse(it->second) : it->second;
    for (long long k = 0; k < (l.exp < 0 ? -l.exp : l.exp); ++k) out.insert(out.end(), piece.begin(), piece.end());
  }
  return free_reduce(std::move(out));
}

Node equation(Word lhs, Word rhs) {
  Node n;
  n.op = Op::equation;
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return n;
}

Node inequation(Word lhs, Word rhs) {
  Node n = equation(std::move(lhs), std::move(rhs));
  n.op = Op::inequation;
  return n;
}

Node conjunction(std::vector<Node> parts) { return connective(Op::conjunction, std::move(parts)); }
Node disjunction(std::vector<Node> parts) { return connective(Op::disjunction, std::move(parts)); }

Node implication(Node antecedent, Node consequent) {
  Node n;
  n.op = Op::implication;
  n.children.push_back(std::move(antecedent));
  n.children.push_back(std::move(consequent));
  return n;
}

Node exists(std::vector<std::string> variables, Node body) {
  return quantifier(Op::exists, std::move(variables), std::move(body));
}

Node forall(std::vector<std::string> variables, Node body) {
  return quantifier(Op::forall, std::move(variables), std::move(body));
}

void validate(const Formula& f) {
  std::set<std::string> scope;
  for (const auto& v : f.free_variables)
    if (!scope.insert(v).second) throw Error("free variable '" + v + "' listed twice");
  std::function<void(const Node&)> walk = [&](const Node& n) {
    switch (n.op) {
      case Op::equation:
      case Op::inequation:
        for (const Word* w : {&n.lhs, &n.rhs}) {
          if (!reduced(*w)) throw Error("atomic word '" + format_word(*w) + "' is not freely reduced");
          for (const auto& l : *w)
            if (!scope.count(l.var)) throw Error("variable '" + l.var + "' is neither bound nor free");
        }
        return;
      case Op::conjunction:
      case Op::disjunction:
        if (n.children.size() < 2) throw Error("connective with fewer than two operands");
        for (const auto& c : n.children) walk(c);
        return;
      case Op::implication:
        if (n.children.size() != 2) throw Error("implication needs two operands");
        for (const auto& c : n.children) walk(c);
        return;
      case Op::exists:
      case Op::forall: {
        if (n.children.size() != 1 || n.variables.empty()) throw Error("malformed quantifier");
        for (const auto& v : n.variables)
          if (!scope.insert(v).second) throw Error("variable '" + v + "' bound twice");
        walk(n.children[0]);
        for (const auto& v : n.variables) scope.erase(v);
        return;
      }
    }
  };
  walk(f.root);
}

std::string to_string(FormulaClass c) {
  switch (c) {
    case FormulaClass::existential: return "existential";
    case FormulaClass::universal: return "universal";
    case FormulaClass::forall_exists: return "forall_exists";
    case FormulaClass::other: return "other";
  }
  return "other";
}

FormulaClass classify(const Formula& f) {
  const Node& root = f.root;
  if (!contains_op(root, Op::forall)) return FormulaClass::existential;
  if (!contains_op(root, Op::exists)) return FormulaClass::universal;
  if (root.op != Op::forall) return FormulaClass::other;
  const Node* body = &root;
  while (body->op == Op::forall) body = &body->children[0];
  if (contains_op(*body, Op::forall) || quantifier_in_antecedent(*body, false)) return FormulaClass::other;
  return FormulaClass::forall_exists;
}

std::string pretty_print(const Formula& f) {
  std::string out = "FREE";
  for (const auto& v : f.free_variables) out += ' ' + v;
  out += ". ";
  print(f.root, out);
  return out;
}

Formula parse(std::string_view text) {
  Parser p(text);
  Formula f;
  p.expect("FREE");
  while (p.is_variable()) f.free_variables.push_back(p.variable());
  p.expect(".");
  f.root = p.formula();
  if (!p.at_end()) throw Error("trailing input after formula: '" + p.describe_token() + "'");
  validate(f);
  return f;
}

std::pair<Word, Word> parse_relation(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos) return {free_reduce(parse_formal_word(text)), {}};
  return {free_reduce(parse_formal_word(text.substr(0, eq))), free_reduce(parse_formal_word(text.substr(eq + 1)))};
}

std::vector<Node> relations_at(const Presentation& p, const std::vector<std::string>& variables) {
  if (variables.size() != p.generators.size())
    throw Error("arity mismatch: presentation has " + std::to_string(p.generators.size()) + " generators, " +
                std::to_string(variables.size()) + " variables given");
  std::set<std::string> gens(p.generators.begin(), p.generators.end());
  auto s = positional(p.generators, variables);
  std::vector<Node> out;
  for (const auto& [lhs, rhs] : p.relations) {
    check_letters(lhs, gens, "relation");
    check_letters(rhs, gens, "relation");
    out.push_back(equation(substitute(lhs, s), substitute(rhs, s)));
  }
  return out;
}

Formula emit_theta(const Presentation& sigma, const std::vector<Word>& words, std::pair<unsigned, unsigned> orders) {
  if (sigma.generators.size() != 2) throw Error("arity mismatch: theta needs a presentation on two generators");
  if (words.empty()) throw Error("theta needs at least one word");
  if (orders.first < 1 || orders.second < 1) throw Error("generator orders must be positive");
  const std::vector<std::string> xy{"x", "y"};
  std::set<std::string> gens(sigma.generators.begin(), sigma.generators.end());
  Formula f;
  f.free_variables = numbered("u", words.size());
  std::vector<Node> parts = relations_at(sigma, xy);
  auto s = positional(sigma.generators, xy);
  for (std::size_t i = 0; i < words.size(); ++i) {
    check_letters(words[i], gens, "word");
    parts.push_back(equation({{f.free_variables[i], 1}}, substitute(words[i], s)));
  }
  for (std::size_t k = 0; k < 2; ++k) {
    unsigned order = k == 0 ? orders.first : orders.second;
    for (unsigned l = 1; l < order; ++l) parts.push_back(inequation({{xy[k], static_cast<long long>(l)}}));
  }
  f.root = exists(xy, conjunction(std::move(parts)));
  validate(f);
  return f;
}

Formula emit_delta_related(unsigned n, const std::vector<std::vector<Word>>& blocks) {
  if (n == 0) throw Error("delta formula needs n >= 1");
  if (blocks.empty()) throw Error("delta formula needs at least one subgroup block");
  std::vector<std::string> first = numbered("x", n);
  std::vector<std::string> second = numbered("x", n, n + 1);
  std::set<std::string> allowed(first.begin(), first.end());
  auto shift = positional(first, second);
  Formula f;
  f.free_variables = numbered("x", 2 * n);
  std::vector<std::string> us = numbered("u", blocks.size());
  std::vector<Node> parts;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].empty()) throw Error("delta formula: subgroup block " + std::to_string(i + 1) + " is empty");
    Word u{{us[i], 1}};
    for (const auto& w : blocks[i]) {
      check_letters(w, allowed, "subgroup word");
      Word reduced_w = free_reduce(w);
      parts.push_back(equation(reduced_w, concat(concat(u, substitute(reduced_w, shift)), inverse(u))));
    }
  }
  f.root = exists(us, conjunction(std::move(parts)));
  validate(f);
  return f;
}

Formula emit_mu(const MuInput& in) {
  const std::size_t n = in.g.generators.size();
  const std::size_t p = in.u.generators.size();
  if (n == 0 || p == 0) throw Error("mu needs presentations with generators");
  if (in.embedding.size() != p)
    throw Error("arity mismatch: " + std::to_string(p) + " embedding words expected");
  if (in.tests.empty()) throw Error("mu needs at least one test word");
  if (in.kill_list.empty()) throw Error("mu needs a nonempty kill list (the disjunction must be nonempty)");
  if (in.theta.free_variables.size() != 2 * p)
    throw Error("arity mismatch: theta must have " + std::to_string(2 * p) + " free variables");
  std::vector<std::string> xs = numbered("x", n);
  std::vector<std::string> ys = numbered("y", p);
  std::vector<std::string> zs = numbered("z", in.tests.size());
  std::set<std::string> g_gens(in.g.generators.begin(), in.g.generators.end());
  std::set<std::string> u_gens(in.u.generators.begin(), in.u.generators.end());
  auto sx = positional(in.g.generators, xs);
  auto sy = positional(in.u.generators, ys);

  std::vector<Node> antecedent = relations_at(in.g, xs);
  for (std::size_t i = 0; i < in.tests.size(); ++i) {
    check_letters(in.tests[i], g_gens, "test word");
    antecedent.push_back(equation({{zs[i], 1}}, substitute(in.tests[i], sx)));
  }
  std::vector<Node> consequent = relations_at(in.u, ys);
  std::vector<Node> kills;
  for (const auto& w : in.kill_list) {
    check_letters(w, u_gens, "kill-list word");
    kills.push_back(equation(substitute(w, sy)));
  }
  consequent.push_back(disjunction(std::move(kills)));

  std::set<std::string> taken(xs.begin(), xs.end());
  taken.insert(ys.begin(), ys.end());
  taken.insert(zs.begin(), zs.end());
  Node theta = rename_bound(in.theta.root, taken);
  std::map<std::string, Word> args;
  for (std::size_t i = 0; i < p; ++i) {
    check_letters(in.embedding[i], g_gens, "embedding word");
    args[in.theta.free_variables[i]] = substitute(in.embedding[i], sx);
    args[in.theta.free_variables[p + i]] = Word{{ys[i], 1}};
  }
  consequent.push_back(substitute_node(theta, args));

  Formula f;
  f.free_variables = zs;
  f.root = forall(xs, implication(conjunction(std::move(antecedent)), exists(ys, conjunction(std::move(consequent)))));
  validate(f);
  return f;
}

}  // namespace vfree::folog
