#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vfree::folog {

// A formal group word: letters var^exp, empty for the identity "1".
struct Letter {
  std::string var;
  long long exp = 1;
  bool operator==(const Letter&) const = default;
};
using Word = std::vector<Letter>;

Word parse_formal_word(std::string_view text);
std::string format_word(const Word& w);
Word free_reduce(Word w);
Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
// Replaces every letter v^k with substitution[v]^k (other letters are kept)
// and freely reduces the result.
Word substitute(const Word& w, const std::map<std::string, Word>& substitution);

enum class Op { equation, inequation, conjunction, disjunction, implication, exists, forall };

struct Node {
  Op op = Op::equation;
  Word lhs;                            // atoms: lhs = rhs, lhs ~= rhs
  Word rhs;
  std::vector<std::string> variables;  // quantifiers
  std::vector<Node> children;          // connectives (>= 2, implication = 2), quantifiers (1)
  bool operator==(const Node&) const = default;
};

struct Formula {
  std::vector<std::string> free_variables;
  Node root;
  bool operator==(const Formula&) const = default;
};

Node equation(Word lhs, Word rhs = {});
Node inequation(Word lhs, Word rhs = {});
// A one-element conjunction or disjunction is the element itself.
Node conjunction(std::vector<Node> parts);
Node disjunction(std::vector<Node> parts);
Node implication(Node antecedent, Node consequent);
Node exists(std::vector<std::string> variables, Node body);
Node forall(std::vector<std::string> variables, Node body);

// Throws Error unless every variable is bound or listed free, no variable is
// bound twice along a branch, and every atomic word is freely reduced.
void validate(const Formula& f);

enum class FormulaClass { existential, universal, forall_exists, other };
std::string to_string(FormulaClass c);

// existential: no FORALL anywhere (quantifier-free included). universal: no
// EXISTS and some FORALL. forall_exists: a leading FORALL block whose body has
// no FORALL and no quantifier under the antecedent of an implication.
FormulaClass classify(const Formula& f);

// "FREE u1 u2. EXISTS x y: (x^4 = 1 AND u1 = x y)"; connectives are always
// parenthesised, so parse(pretty_print(f)) == f.
std::string pretty_print(const Formula& f);
Formula parse(std::string_view text);

// <s_1..s_n | lhs_i = rhs_i>
struct Presentation {
  std::vector<std::string> generators;
  std::vector<std::pair<Word, Word>> relations;
};

// Parses "a^2 = b^3" or "a^4" (meaning a^4 = 1).
std::pair<Word, Word> parse_relation(std::string_view text);

// Sigma(x_1..x_n) = 1 as a list of equations over `variables`, positionally.
std::vector<Node> relations_at(const Presentation& p, const std::vector<std::string>& variables);

// theta(u): EXISTS x y: Sigma(x, y) = 1 AND u_i = w_i(x, y) AND x^l ~= 1
// (l < orders[0]) AND y^l ~= 1 (l < orders[1]). Free variables u1..uk.
Formula emit_theta(const Presentation& sigma, const std::vector<Word>& words,
                   std::pair<unsigned, unsigned> orders = {4, 6});

// EXISTS u_1..u_m: AND_{i,j} w_ij(x_1..x_n) = u_i w_ij(x_{n+1}..x_{2n}) u_i^-1,
// with w_ij written over x1..xn. Free variables x1..x2n.
Formula emit_delta_related(unsigned n, const std::vector<std::vector<Word>>& blocks);

struct MuInput {
  Presentation g;                  // generators s_1..s_n
  Presentation u;                  // generators t_1..t_p
  std::vector<Word> embedding;     // t_i as words over the s_j
  std::vector<Word> tests;         // u_i over the s_j, one per free variable z_i
  std::vector<Word> kill_list;     // w_i over the t_j, nonempty
  Formula theta;                   // 2p free variables, substituted positionally
};

// FORALL x_1..x_n: ((Sigma(x) AND z_i = u_i(x)) => EXISTS y_1..y_p: (Pi(y) AND
// OR_i w_i(y) = 1 AND theta(t_1(x)..t_p(x), y_1..y_p))). Bound variables of
// theta that clash with x, y or z are renamed.
Formula emit_mu(const MuInput& input);

}  // namespace vfree::folog
