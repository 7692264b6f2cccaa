#include "intrarel/parse_tree.h"

#include <cctype>

#include "intrarel/error.h"

namespace intrarel {
namespace {

std::vector<std::string> lex(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < s.size() && s[j] != '(' && s[j] != ')' &&
             !std::isspace(static_cast<unsigned char>(s[j]))) {
        ++j;
      }
      out.emplace_back(s.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

struct Walk {
  std::vector<std::string> linear;
  std::vector<std::string> words;
};

// Recursive-descent over the lexed bracket stream; `pos` points at "(".
void walk_node(const std::vector<std::string>& toks, std::size_t& pos, LinearizeMode mode,
               Walk& out) {
  ++pos;  // consume "("
  std::string label;
  if (pos < toks.size() && toks[pos] != "(" && toks[pos] != ")") label = toks[pos++];
  out.linear.push_back("(" + label);
  while (true) {
    if (pos >= toks.size()) throw ParseError("unbalanced brackets: missing ')'");
    const std::string& t = toks[pos];
    if (t == ")") {
      ++pos;
      break;
    }
    if (t == "(") {
      walk_node(toks, pos, mode, out);
    } else {
      out.words.push_back(t);
      if (mode == LinearizeMode::kLabelsAndTerminals) out.linear.push_back(t);
      ++pos;
    }
  }
  out.linear.emplace_back(")");
}

Walk walk(std::string_view parse, LinearizeMode mode) {
  auto toks = lex(parse);
  if (toks.empty()) throw ParseError("empty parse tree");
  if (toks.front() != "(") throw ParseError("parse tree must start with '('");
  Walk out;
  std::size_t pos = 0;
  walk_node(toks, pos, mode, out);
  if (pos != toks.size()) {
    throw ParseError("unbalanced brackets: trailing material after the root constituent");
  }
  return out;
}

}  // namespace

std::vector<std::string> linearize_parse(std::string_view parse, LinearizeMode mode) {
  return walk(parse, mode).linear;
}

std::size_t count_terminals(std::string_view parse) {
  return walk(parse, LinearizeMode::kLabelsOnly).words.size();
}

std::vector<std::string> terminals(std::string_view parse) {
  return walk(parse, LinearizeMode::kLabelsOnly).words;
}

}  // namespace intrarel
