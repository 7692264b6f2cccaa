#ifndef INTRAREL_PARSE_TREE_H_
#define INTRAREL_PARSE_TREE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace intrarel {

enum class LinearizeMode { kLabelsOnly, kLabelsAndTerminals };

// Depth-first, left-to-right rendering of a Penn Treebank bracketed tree.
// Each constituent contributes "(LABEL" on entry and ")" on exit; terminal
// words are kept only in kLabelsAndTerminals mode.
//
//   "(S (NP (NN dog)) (VP (VBZ barks)))"
//     -> (S (NP (NN ) ) (VP (VBZ ) ) )
//
// Throws ParseError on empty input or unbalanced brackets.
std::vector<std::string> linearize_parse(std::string_view parse,
                                         LinearizeMode mode = LinearizeMode::kLabelsOnly);

// Number of terminal words in the tree.
std::size_t count_terminals(std::string_view parse);

// Terminal words in order.
std::vector<std::string> terminals(std::string_view parse);

}  // namespace intrarel

#endif  // INTRAREL_PARSE_TREE_H_
