/*
 * Copyright 2026 The FlowFuzz Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "flowfuzz/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace flowfuzz {

const char* to_string(DiagCode code) {
  switch (code) {
    case DiagCode::Syntax: return "syntax";
    case DiagCode::UnknownOperator: return "unknown-operator";
    case DiagCode::DanglingReference: return "dangling-reference";
    case DiagCode::DanglingUdf: return "dangling-udf";
    case DiagCode::ArityMismatch: return "arity-mismatch";
    case DiagCode::Cycle: return "cycle";
    case DiagCode::DuplicateName: return "duplicate-name";
    case DiagCode::MissingSink: return "missing-sink";
    case DiagCode::UnknownBuiltin: return "unknown-builtin";
    case DiagCode::UnboundVariable: return "unbound-variable";
    case DiagCode::UnknownColumnKind: return "unknown-column-kind";
    case DiagCode::MalformedRange: return "malformed-range";
    case DiagCode::EmptyPattern: return "empty-pattern";
  }
  return "?";
}

std::string ParseDiagnostic::render() const {
  return std::to_string(line) + ":" + std::to_string(col) + ": " + message + " [" +
         to_string(code) + "]";
}

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Map: return "map";
    case OperatorKind::Filter: return "filter";
    case OperatorKind::FlatMap: return "flatMap";
    case OperatorKind::MapValues: return "mapValues";
    case OperatorKind::ReduceByKey: return "reduceByKey";
    case OperatorKind::Reduce: return "reduce";
    case OperatorKind::Join: return "join";
    case OperatorKind::Distinct: return "distinct";
    case OperatorKind::Union: return "union";
  }
  return "?";
}

std::optional<OperatorKind> operator_kind_from(std::string_view name) {
  static const std::pair<std::string_view, OperatorKind> table[] = {
      {"map", OperatorKind::Map},
      {"filter", OperatorKind::Filter},
      {"flatMap", OperatorKind::FlatMap},
      {"mapValues", OperatorKind::MapValues},
      {"reduceByKey", OperatorKind::ReduceByKey},
      {"reduce", OperatorKind::Reduce},
      {"join", OperatorKind::Join},
      {"distinct", OperatorKind::Distinct},
      {"union", OperatorKind::Union},
  };
  for (const auto& [text, kind] : table) {
    if (text == name) return kind;
  }
  return std::nullopt;
}

int kind_upstream_count(OperatorKind kind) {
  return (kind == OperatorKind::Join || kind == OperatorKind::Union) ? 2 : 1;
}

bool kind_needs_udf(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Join:
    case OperatorKind::Distinct:
    case OperatorKind::Union:
      return false;
    default:
      return true;
  }
}

int kind_udf_arity(OperatorKind kind) {
  return (kind == OperatorKind::Reduce || kind == OperatorKind::ReduceByKey) ? 2 : 1;
}

int kind_arm_count(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Map:
    case OperatorKind::MapValues:
    case OperatorKind::Union:
      return 1;
    default:
      return 2;
  }
}

namespace {

struct Statement {
  enum class Kind { Pipeline, Source, Assign, Sink, Udf };
  Kind kind;
  int line = 0;

  std::string name;                   // pipeline/source/sink name, assign output, udf name
  std::string op_kind_text;           // assign
  std::vector<std::string> upstream;  // assign
  std::string udf_ref;                // assign (empty when absent)
  std::vector<std::string> params;    // udf
  std::string body;                   // udf
  int body_line = 0;                  // 1-based position of the body text
  int body_col = 0;
};

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Line-level scanner for the statement grammar. UDF bodies are taken
/// verbatim between braces (strings respected) and handed to the expression
/// parser with their file position.
class StatementScanner {
 public:
  explicit StatementScanner(std::string_view text) : text_(text) {}

  ParseResult<std::vector<Statement>> run() {
    std::vector<Statement> out;
    while (pos_ < text_.size()) {
      skip_ws_and_comments();
      if (pos_ >= text_.size()) break;
      auto stmt = scan_statement();
      if (!stmt.ok()) return stmt.diagnostic();
      out.push_back(stmt.take_value());
    }
    return out;
  }

 private:
  char peek() const { return text_[pos_]; }
  bool done() const { return pos_ >= text_.size(); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_spaces() {
    while (!done() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  void skip_ws_and_comments() {
    while (!done()) {
      skip_spaces();
      if (done()) return;
      if (peek() == '#') {
        while (!done() && peek() != '\n') advance();
      } else if (peek() == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  void skip_line_comment() {
    if (!done() && peek() == '#') {
      while (!done() && peek() != '\n') advance();
    }
  }

  ParseDiagnostic err(std::string message, DiagCode code = DiagCode::Syntax) const {
    return ParseDiagnostic{code, std::move(message), line_, col_};
  }

  std::string scan_ident() {
    std::string out;
    while (!done() && is_ident_char(peek())) {
      out += peek();
      advance();
    }
    return out;
  }

  bool eat(char c) {
    skip_spaces();
    if (!done() && peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  ParseResult<Statement> scan_statement() {
    Statement stmt;
    stmt.line = line_;
    skip_spaces();
    const std::string head = scan_ident();
    if (head.empty()) return err("expected statement");
    if (head == "pipeline") {
      stmt.kind = Statement::Kind::Pipeline;
      skip_spaces();
      stmt.name = scan_ident();
      if (stmt.name.empty()) return err("expected pipeline name");
      return finish_line(std::move(stmt));
    }
    if (head == "source") {
      stmt.kind = Statement::Kind::Source;
      skip_spaces();
      stmt.name = scan_ident();
      if (stmt.name.empty()) return err("expected source name");
      if (!eat(':')) return err("expected ':' after source name");
      skip_spaces();
      const std::string type = scan_ident();
      if (type != "text") return err("source type must be 'text'");
      return finish_line(std::move(stmt));
    }
    if (head == "sink") {
      stmt.kind = Statement::Kind::Sink;
      skip_spaces();
      stmt.name = scan_ident();
      if (stmt.name.empty()) return err("expected sink name");
      return finish_line(std::move(stmt));
    }
    if (head == "udf") return scan_udf(std::move(stmt));
    return scan_assign(std::move(stmt), head);
  }

  ParseResult<Statement> scan_assign(Statement stmt, std::string output) {
    stmt.kind = Statement::Kind::Assign;
    stmt.name = std::move(output);
    if (!eat('=')) return err("expected '=' after dataset name");
    skip_spaces();
    stmt.op_kind_text = scan_ident();
    if (stmt.op_kind_text.empty()) return err("expected operator kind");
    if (!eat('(')) return err("expected '(' after operator kind");
    while (true) {
      skip_spaces();
      const std::string up = scan_ident();
      if (up.empty()) return err("expected upstream dataset name");
      stmt.upstream.push_back(up);
      if (eat(',')) continue;
      break;
    }
    if (!eat(')')) return err("expected ')' after upstream list");
    skip_spaces();
    if (!done() && is_ident_char(peek())) {
      const int kw_line = line_;
      const int kw_col = col_;
      const std::string kw = scan_ident();
      if (kw != "with") {
        return ParseDiagnostic{DiagCode::Syntax, "expected 'with udf' or end of line", kw_line,
                               kw_col};
      }
      skip_spaces();
      if (scan_ident() != "udf") return err("expected 'udf' after 'with'");
      skip_spaces();
      stmt.udf_ref = scan_ident();
      if (stmt.udf_ref.empty()) return err("expected UDF name");
    }
    return finish_line(std::move(stmt));
  }

  ParseResult<Statement> scan_udf(Statement stmt) {
    stmt.kind = Statement::Kind::Udf;
    skip_spaces();
    stmt.name = scan_ident();
    if (stmt.name.empty()) return err("expected UDF name");
    if (!eat('(')) return err("expected '(' after UDF name");
    while (true) {
      skip_spaces();
      const std::string p = scan_ident();
      if (p.empty()) return err("expected parameter name");
      stmt.params.push_back(p);
      if (eat(',')) continue;
      break;
    }
    if (!eat(')')) return err("expected ')' after parameter list");
    if (!eat('{')) return err("expected '{' before UDF body");
    stmt.body_line = line_;
    stmt.body_col = col_;
    const size_t body_start = pos_;
    int depth = 1;
    bool in_string = false;
    while (!done()) {
      const char c = peek();
      if (in_string) {
        if (c == '\\') {
          advance();
          if (!done()) advance();
          continue;
        }
        if (c == '"' || c == '\n') in_string = false;
        advance();
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '#') {
        while (!done() && peek() != '\n') advance();
        continue;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        --depth;
        if (depth == 0) {
          stmt.body = strip_comments(text_.substr(body_start, pos_ - body_start));
          advance();  // consume '}'
          return finish_line(std::move(stmt));
        }
      }
      advance();
    }
    return ParseDiagnostic{DiagCode::Syntax, "unclosed UDF body", stmt.line, 1};
  }

  /// Blank out '#' comments (string-aware) so the expression lexer never
  /// sees them; newlines and byte positions are preserved.
  static std::string strip_comments(std::string_view body) {
    std::string out(body);
    bool in_string = false;
    bool in_comment = false;
    for (char& c : out) {
      if (c == '\n') {
        in_comment = false;
        in_string = false;
        continue;
      }
      if (in_comment) {
        c = ' ';
        continue;
      }
      if (in_string) {
        if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '#') {
        in_comment = true;
        c = ' ';
      }
    }
    return out;
  }

  ParseResult<Statement> finish_line(Statement stmt) {
    skip_spaces();
    skip_line_comment();
    if (!done() && peek() != '\n') return err("unexpected trailing text");
    return stmt;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

ParseResult<PipelineSpec> parse_pipeline(std::string_view source_text) {
  auto scanned = StatementScanner(source_text).run();
  if (!scanned.ok()) return scanned.diagnostic();
  const std::vector<Statement> statements = scanned.take_value();

  if (statements.empty() || statements[0].kind != Statement::Kind::Pipeline) {
    return ParseDiagnostic{DiagCode::Syntax, "file must start with 'pipeline <name>'", 1, 1};
  }

  PipelineSpec spec;
  spec.name = statements[0].name;

  // First pass: declare names so later statements can reference earlier and
  // later datasets alike.
  std::map<std::string, int> dataset_refs;  // name -> ref id
  std::map<std::string, int> dataset_lines;
  struct PendingSink {
    std::string name;
    int line;
  };
  std::vector<PendingSink> pending_sinks;
  std::vector<const Statement*> assigns;
  std::vector<const Statement*> udf_decls;

  for (size_t i = 1; i < statements.size(); ++i) {
    const Statement& stmt = statements[i];
    switch (stmt.kind) {
      case Statement::Kind::Pipeline:
        return ParseDiagnostic{DiagCode::Syntax, "duplicate 'pipeline' statement", stmt.line, 1};
      case Statement::Kind::Source: {
        if (dataset_refs.count(stmt.name)) {
          return ParseDiagnostic{DiagCode::DuplicateName,
                                 "dataset '" + stmt.name + "' already defined", stmt.line, 1};
        }
        dataset_refs[stmt.name] = source_ref(static_cast<int>(spec.source_names.size()));
        dataset_lines[stmt.name] = stmt.line;
        spec.source_names.push_back(stmt.name);
        break;
      }
      case Statement::Kind::Assign: {
        if (dataset_refs.count(stmt.name)) {
          return ParseDiagnostic{DiagCode::DuplicateName,
                                 "dataset '" + stmt.name + "' already defined", stmt.line, 1};
        }
        assigns.push_back(&stmt);
        dataset_refs[stmt.name] = static_cast<int>(assigns.size());  // op_id, textual order
        dataset_lines[stmt.name] = stmt.line;
        break;
      }
      case Statement::Kind::Sink:
        pending_sinks.push_back({stmt.name, stmt.line});
        break;
      case Statement::Kind::Udf: {
        bool duplicate = false;
        for (const Statement* d : udf_decls) duplicate |= d->name == stmt.name;
        if (duplicate) {
          return ParseDiagnostic{DiagCode::DuplicateName,
                                 "udf '" + stmt.name + "' already defined", stmt.line, 1};
        }
        udf_decls.push_back(&stmt);
        break;
      }
    }
  }

  // UDF table, ids in textual order starting at 1.
  for (size_t i = 0; i < udf_decls.size(); ++i) {
    const Statement& decl = *udf_decls[i];
    auto parsed = parse_udf_body(decl.body, decl.params, decl.name, static_cast<int>(i) + 1,
                                 decl.body_line, decl.body_col);
    if (!parsed.ok()) return parsed.diagnostic();
    spec.udfs.emplace(decl.name, parsed.take_value());
  }

  // Operator nodes.
  for (size_t i = 0; i < assigns.size(); ++i) {
    const Statement& stmt = *assigns[i];
    OperatorNode node;
    node.op_id = static_cast<int>(i) + 1;
    node.output_name = stmt.name;
    node.line = stmt.line;
    const auto kind = operator_kind_from(stmt.op_kind_text);
    if (!kind) {
      return ParseDiagnostic{DiagCode::UnknownOperator,
                             "unknown operator kind '" + stmt.op_kind_text + "'", stmt.line, 1};
    }
    node.kind = *kind;
    if (static_cast<int>(stmt.upstream.size()) != kind_upstream_count(node.kind)) {
      return ParseDiagnostic{DiagCode::ArityMismatch,
                             std::string(to_string(node.kind)) + " takes " +
                                 std::to_string(kind_upstream_count(node.kind)) +
                                 " upstream(s), got " + std::to_string(stmt.upstream.size()),
                             stmt.line, 1};
    }
    for (const std::string& up : stmt.upstream) {
      const auto it = dataset_refs.find(up);
      if (it == dataset_refs.end()) {
        return ParseDiagnostic{DiagCode::DanglingReference,
                               "dangling reference to dataset '" + up + "'", stmt.line, 1};
      }
      node.upstream.push_back(it->second);
    }
    if (kind_needs_udf(node.kind)) {
      if (stmt.udf_ref.empty()) {
        return ParseDiagnostic{DiagCode::Syntax,
                               std::string(to_string(node.kind)) + " requires 'with udf'",
                               stmt.line, 1};
      }
      const UdfAst* udf = nullptr;
      auto it = spec.udfs.find(stmt.udf_ref);
      if (it != spec.udfs.end()) udf = &it->second;
      if (!udf) {
        return ParseDiagnostic{DiagCode::DanglingUdf,
                               "dangling reference to udf '" + stmt.udf_ref + "'", stmt.line, 1};
      }
      if (static_cast<int>(udf->params.size()) != kind_udf_arity(node.kind)) {
        return ParseDiagnostic{DiagCode::ArityMismatch,
                               "udf '" + stmt.udf_ref + "' has arity " +
                                   std::to_string(udf->params.size()) + " but " +
                                   to_string(node.kind) + " needs " +
                                   std::to_string(kind_udf_arity(node.kind)),
                               stmt.line, 1};
      }
      node.udf_ref = stmt.udf_ref;
    } else if (!stmt.udf_ref.empty()) {
      return ParseDiagnostic{DiagCode::Syntax,
                             std::string(to_string(node.kind)) + " takes no udf", stmt.line, 1};
    }
    spec.nodes.push_back(std::move(node));
  }

  // Sinks.
  for (const PendingSink& sink : pending_sinks) {
    const auto it = dataset_refs.find(sink.name);
    if (it == dataset_refs.end()) {
      return ParseDiagnostic{DiagCode::DanglingReference,
                             "dangling reference to dataset '" + sink.name + "'", sink.line, 1};
    }
    spec.sinks.push_back(it->second);
  }
  if (spec.sinks.empty()) {
    return ParseDiagnostic{DiagCode::MissingSink, "pipeline has no sink", 1, 1};
  }

  // Cycle check: Kahn's algorithm schedules every node iff the graph is
  // acyclic. The lowest unscheduled op_id names the offending statement.
  const std::vector<int> order = topo_order(spec);
  if (order.size() != spec.nodes.size()) {
    std::set<int> scheduled(order.begin(), order.end());
    for (const OperatorNode& node : spec.nodes) {
      if (!scheduled.count(node.op_id)) {
        return ParseDiagnostic{DiagCode::Cycle,
                               "cycle detected through dataset '" + node.output_name + "'",
                               node.line, 1};
      }
    }
  }

  return spec;
}

std::vector<int> topo_order(const PipelineSpec& spec) {
  const size_t n = spec.nodes.size();
  std::vector<int> indegree(n + 1, 0);
  std::vector<std::vector<int>> downstream(n + 1);
  for (const OperatorNode& node : spec.nodes) {
    for (int up : node.upstream) {
      if (is_source_ref(up)) continue;
      ++indegree[static_cast<size_t>(node.op_id)];
      downstream[static_cast<size_t>(up)].push_back(node.op_id);
    }
  }
  std::set<int> ready;
  for (const OperatorNode& node : spec.nodes) {
    if (indegree[static_cast<size_t>(node.op_id)] == 0) ready.insert(node.op_id);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (int down : downstream[static_cast<size_t>(id)]) {
      if (--indegree[static_cast<size_t>(down)] == 0) ready.insert(down);
    }
  }
  return order;
}

std::vector<CoverageKey> jdu_universe(const PipelineSpec& spec) {
  std::set<CoverageKey> keys;
  std::set<std::string> referenced;
  for (const OperatorNode& node : spec.nodes) {
    for (int arm = 0; arm < kind_arm_count(node.kind); ++arm) {
      keys.insert(DataflowKey{node.op_id, arm});
    }
    if (node.udf_ref) referenced.insert(*node.udf_ref);
  }
  for (const std::string& name : referenced) {
    const UdfAst* udf = spec.find_udf(name);
    for (int branch : udf->branch_ids) {
      keys.insert(BranchKey{udf->udf_id, branch, false});
      keys.insert(BranchKey{udf->udf_id, branch, true});
    }
  }
  return {keys.begin(), keys.end()};
}

std::string render_pipeline(const PipelineSpec& spec) {
  std::string out = "pipeline " + spec.name + "\n";
  for (const std::string& s : spec.source_names) {
    out += "source " + s + " : text\n";
  }
  auto ref_name = [&](int ref) -> std::string {
    if (is_source_ref(ref)) return spec.source_names[static_cast<size_t>(source_index_of(ref))];
    return spec.node(ref).output_name;
  };
  for (const OperatorNode& node : spec.nodes) {
    out += node.output_name + " = " + to_string(node.kind) + "(";
    for (size_t i = 0; i < node.upstream.size(); ++i) {
      if (i) out += ", ";
      out += ref_name(node.upstream[i]);
    }
    out += ")";
    if (node.udf_ref) out += " with udf " + *node.udf_ref;
    out += "\n";
  }
  for (int sink : spec.sinks) {
    out += "sink " + ref_name(sink) + "\n";
  }
  // Render UDFs in udf_id (textual) order.
  std::vector<const UdfAst*> by_id;
  for (const auto& [name, udf] : spec.udfs) by_id.push_back(&udf);
  std::sort(by_id.begin(), by_id.end(),
            [](const UdfAst* a, const UdfAst* b) { return a->udf_id < b->udf_id; });
  for (const UdfAst* udf : by_id) {
    out += "udf " + udf->name + "(";
    for (size_t i = 0; i < udf->params.size(); ++i) {
      if (i) out += ", ";
      out += udf->params[i];
    }
    out += ") { " + render_expr(*udf->body) + " }\n";
  }
  return out;
}

}  // namespace flowfuzz
