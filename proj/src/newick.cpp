// Copyright 2026 The umaf-bnp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "umaf/newick.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace umaf {

namespace {

bool isLabelChar(char c) {
  switch (c) {
    case '(': case ')': case ',': case ';': case ':': case '[': case ']':
      return false;
    default:
      return !std::isspace(static_cast<unsigned char>(c));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PhyloTree run() {
    skipSpace();
    if (peek() != '(') fail("expected '('");
    std::vector<int> top = parseChildren();
    skipLabel();
    skipBranchLength();
    skipSpace();
    if (peek() != ';') fail("expected ';'");
    ++pos_;
    skipSpace();
    if (pos_ != text_.size()) fail("trailing characters after ';'");
    if (top.size() != 2 && top.size() != 3) fail("top level must have 2 or 3 children", 0);
    int root = builder_.addInternal();
    for (int c : top) builder_.connect(root, c);
    try {
      return builder_.build();
    } catch (const NewickError&) {
      throw;
    } catch (const Error& e) {
      throw NewickError(e.what(), pos_);
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw NewickError(what, pos_); }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw NewickError(what, at);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (peek() == '[') fail("comments are not supported");
  }

  // Parses "(child,child,...)" and returns the builder ids of the children.
  std::vector<int> parseChildren() {
    const std::size_t open = pos_;
    ++pos_;
    std::vector<int> children;
    while (true) {
      children.push_back(parseSubtree());
      skipSpace();
      char c = peek();
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == ')') {
        ++pos_;
        break;
      }
      fail(c == '\0' ? "unbalanced parentheses" : "expected ',' or ')'");
    }
    if (children.size() > 3) fail("non-binary vertex", open);
    return children;
  }

  int parseSubtree() {
    skipSpace();
    if (peek() == '(') {
      const std::size_t open = pos_;
      std::vector<int> children = parseChildren();
      if (children.size() != 2) fail("non-binary vertex", open);
      skipLabel();
      skipBranchLength();
      int v = builder_.addInternal();
      for (int c : children) builder_.connect(v, c);
      return v;
    }
    std::string label = readLabel();
    if (label.empty()) fail("expected a leaf label");
    skipBranchLength();
    if (!seen_.insert(label).second) fail("duplicate leaf label \"" + label + "\"");
    return builder_.addLeaf(std::move(label));
  }

  std::string readLabel() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && isLabelChar(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void skipLabel() { readLabel(); }

  void skipBranchLength() {
    skipSpace();
    if (peek() != ':') return;
    ++pos_;
    skipSpace();
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr == first) fail("malformed branch length");
    pos_ += static_cast<std::size_t>(ptr - first);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  TreeBuilder builder_;
  std::set<std::string> seen_;
};

}  // namespace

PhyloTree parseNewick(std::string_view text) { return Parser(text).run(); }

std::string serializeNewick(const PhyloTree& tree) { return restrict(tree, allTaxa(tree)); }

std::vector<PhyloTree> readNewickFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string content = buffer.str();
  std::vector<PhyloTree> trees;
  std::size_t start = 0;
  while (true) {
    std::size_t end = content.find(';', start);
    std::string_view chunk(content.data() + start,
                           (end == std::string::npos ? content.size() : end + 1) - start);
    bool blank = true;
    for (char c : chunk) blank = blank && std::isspace(static_cast<unsigned char>(c));
    if (!blank) {
      if (end == std::string::npos) throw NewickError("missing ';' in " + path.string(), start);
      trees.push_back(parseNewick(chunk));
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  if (trees.empty()) throw Error("no tree in " + path.string());
  return trees;
}

}  // namespace umaf
