// Line-oriented text format for instances and layouts.
//
//   soac 1
//   vertices N
//   arc TAIL HEAD lat R1 ... Rc     # capacity = number of latency values
//   agent S T                       # repetition = multiplicity
//   lambda R                        # optional decision threshold
//   alpha N                         # optional min-max budget
//   tree P0 P1 ... P_{N-1}          # optional layout: -1 marks the root
//   extra U V                       # optional supergraph edges
//   root R
//
// '#' starts a comment; blank lines are ignored.  Serialization is canonical
// (fixed section order, one space between tokens) so serialize . parse is the
// identity on its own output.
#pragma once

#include <optional>
#include <string>

#include "soac/decomposition.hpp"
#include "soac/model.hpp"

namespace soac {

struct ParsedFile {
  Instance instance;
  std::optional<SpanningTreeLayout> layout;
};

ParsedFile parse_instance_text(const std::string& text);  // throws ParseError
std::string serialize_instance(const Instance& inst,
                               const SpanningTreeLayout* layout = nullptr);

}  // namespace soac
