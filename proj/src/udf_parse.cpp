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

#include <charconv>
#include <cctype>
#include <map>
#include <optional>
#include <utility>

#include "flowfuzz/udf.hpp"

namespace flowfuzz {

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

const char* to_string(Builtin b) {
  switch (b) {
    case Builtin::Split: return "split";
    case Builtin::ParseInt: return "parseInt";
    case Builtin::ParseFloat: return "parseFloat";
    case Builtin::Len: return "len";
    case Builtin::Substr: return "substr";
    case Builtin::Concat: return "concat";
    case Builtin::ToStr: return "toStr";
    case Builtin::Trim: return "trim";
  }
  return "?";
}

namespace {

const std::map<std::string_view, std::pair<Builtin, int>>& builtin_table() {
  static const std::map<std::string_view, std::pair<Builtin, int>> table = {
      {"split", {Builtin::Split, 2}},
      {"parseInt", {Builtin::ParseInt, 1}},
      {"parseFloat", {Builtin::ParseFloat, 1}},
      {"len", {Builtin::Len, 1}},
      {"substr", {Builtin::Substr, 3}},
      {"concat", {Builtin::Concat, 2}},
      {"toStr", {Builtin::ToStr, 1}},
      {"trim", {Builtin::Trim, 1}},
  };
  return table;
}

enum class TokKind { Ident, Int, Float, Str, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string_view text;
  std::string str_value;  // unescaped payload for Str tokens
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  Lexer(std::string_view text, int base_line, int base_col)
      : text_(text), line_(base_line), col_(base_col) {}

  ParseResult<std::vector<Token>> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      const int line = line_;
      const int col = col_;
      const char c = text_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          advance();
        }
        out.push_back({TokKind::Ident, text_.substr(start, pos_ - start), "", line, col});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        auto tok = lex_number(line, col);
        if (!tok.ok()) return tok.diagnostic();
        out.push_back(tok.take_value());
      } else if (c == '"') {
        auto tok = lex_string(line, col);
        if (!tok.ok()) return tok.diagnostic();
        out.push_back(tok.take_value());
      } else {
        auto tok = lex_punct(line, col);
        if (!tok.ok()) return tok.diagnostic();
        out.push_back(tok.take_value());
      }
    }
    out.push_back({TokKind::End, "", "", line_, col_});
    return out;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      advance();
    }
  }

  ParseResult<Token> lex_number(int line, int col) {
    const size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) advance();
    bool is_float = false;
    if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      is_float = true;
      advance();
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      }
    }
    Token tok{is_float ? TokKind::Float : TokKind::Int, text_.substr(start, pos_ - start), "",
              line, col};
    return tok;
  }

  ParseResult<Token> lex_string(int line, int col) {
    const size_t start = pos_;
    advance();  // opening quote
    std::string payload;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '"') {
        advance();
        Token tok{TokKind::Str, text_.substr(start, pos_ - start), std::move(payload), line, col};
        return tok;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_];
        switch (e) {
          case '"': payload += '"'; break;
          case '\\': payload += '\\'; break;
          case 'n': payload += '\n'; break;
          case 't': payload += '\t'; break;
          case 'r': payload += '\r'; break;
          default:
            return ParseDiagnostic{DiagCode::Syntax, "unknown escape sequence", line_, col_};
        }
        advance();
      } else if (c == '\n') {
        break;  // strings do not span lines
      } else {
        payload += c;
        advance();
      }
    }
    return ParseDiagnostic{DiagCode::Syntax, "unterminated string literal", line, col};
  }

  ParseResult<Token> lex_punct(int line, int col) {
    static const std::string_view two_char[] = {"==", "!=", "<=", ">=", "&&", "||"};
    for (std::string_view p : two_char) {
      if (text_.substr(pos_, 2) == p) {
        advance();
        advance();
        return Token{TokKind::Punct, p, "", line, col};
      }
    }
    static const std::string_view singles = "+-*/%<>!()[],=";
    const char c = text_[pos_];
    if (singles.find(c) != std::string_view::npos) {
      const size_t start = pos_;
      advance();
      return Token{TokKind::Punct, text_.substr(start, 1), "", line, col};
    }
    return ParseDiagnostic{DiagCode::Syntax, std::string("unexpected character '") + c + "'",
                           line, col};
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_;
  int col_;
};

using ExprPtr = std::unique_ptr<Expr>;

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::span<const std::string> params)
      : tokens_(std::move(tokens)) {
    for (const auto& p : params) scope_.emplace_back(p);
  }

  ParseResult<ExprPtr> run() {
    auto e = parse_expr();
    if (!e.ok()) return e;
    if (!at_end()) {
      return err(DiagCode::Syntax, "unexpected trailing input");
    }
    return e;
  }

 private:
  const Token& cur() const { return tokens_[idx_]; }
  bool at_end() const { return cur().kind == TokKind::End; }

  bool is_punct(std::string_view p) const {
    return cur().kind == TokKind::Punct && cur().text == p;
  }

  bool is_keyword(std::string_view k) const {
    return cur().kind == TokKind::Ident && cur().text == k;
  }

  Token take() { return tokens_[idx_++]; }

  ParseDiagnostic err(DiagCode code, std::string message) const {
    return ParseDiagnostic{code, std::move(message), cur().line, cur().col};
  }

  static ParseDiagnostic err_at(DiagCode code, std::string message, const Token& tok) {
    return ParseDiagnostic{code, std::move(message), tok.line, tok.col};
  }

  ExprPtr make(ExprKind kind, const Token& tok) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = tok.line;
    e->col = tok.col;
    return e;
  }

  int lookup(std::string_view name) const {
    for (int i = static_cast<int>(scope_.size()) - 1; i >= 0; --i) {
      if (scope_[i] == name) return i;
    }
    return -1;
  }

  // expr := 'let' ident '=' expr 'in' expr | 'if' '(' expr ')' expr 'else' expr | or-expr
  ParseResult<ExprPtr> parse_expr() {
    if (is_keyword("let")) return parse_let();
    if (is_keyword("if")) return parse_if();
    return parse_or();
  }

  ParseResult<ExprPtr> parse_let() {
    const Token kw = take();
    if (cur().kind != TokKind::Ident) return err(DiagCode::Syntax, "expected binder name");
    const Token binder = take();
    if (is_reserved(binder.text)) {
      return err_at(DiagCode::Syntax, "reserved word cannot be a binder", binder);
    }
    if (!is_punct("=")) return err(DiagCode::Syntax, "expected '=' in let-binding");
    take();
    auto bound = parse_expr();
    if (!bound.ok()) return bound;
    if (!is_keyword("in")) return err(DiagCode::Syntax, "expected 'in' after let-binding");
    take();
    scope_.emplace_back(binder.text);
    auto body = parse_expr();
    scope_.pop_back();
    if (!body.ok()) return body;
    auto e = make(ExprKind::Let, kw);
    e->name = std::string(binder.text);
    e->kids.push_back(bound.take_value());
    e->kids.push_back(body.take_value());
    return e;
  }

  ParseResult<ExprPtr> parse_if() {
    const Token kw = take();
    if (!is_punct("(")) return err(DiagCode::Syntax, "expected '(' after 'if'");
    const Token open = take();
    auto cond = parse_expr();
    if (!cond.ok()) return cond;
    if (!is_punct(")")) return err_at(DiagCode::Syntax, "unclosed '('", open);
    take();
    auto then_branch = parse_expr();
    if (!then_branch.ok()) return then_branch;
    if (!is_keyword("else")) return err(DiagCode::Syntax, "expected 'else'");
    take();
    auto else_branch = parse_expr();
    if (!else_branch.ok()) return else_branch;
    auto e = make(ExprKind::If, kw);
    e->kids.push_back(cond.take_value());
    e->kids.push_back(then_branch.take_value());
    e->kids.push_back(else_branch.take_value());
    return e;
  }

  ParseResult<ExprPtr> parse_or() { return parse_left_assoc(&Parser::parse_and, {{"||", BinOp::Or}}); }

  ParseResult<ExprPtr> parse_and() {
    return parse_left_assoc(&Parser::parse_cmp, {{"&&", BinOp::And}});
  }

  ParseResult<ExprPtr> parse_cmp() {
    return parse_left_assoc(&Parser::parse_add, {{"==", BinOp::Eq},
                                                 {"!=", BinOp::Ne},
                                                 {"<=", BinOp::Le},
                                                 {">=", BinOp::Ge},
                                                 {"<", BinOp::Lt},
                                                 {">", BinOp::Gt}});
  }

  ParseResult<ExprPtr> parse_add() {
    return parse_left_assoc(&Parser::parse_mul, {{"+", BinOp::Add}, {"-", BinOp::Sub}});
  }

  ParseResult<ExprPtr> parse_mul() {
    return parse_left_assoc(&Parser::parse_unary,
                            {{"*", BinOp::Mul}, {"/", BinOp::Div}, {"%", BinOp::Mod}});
  }

  using SubParser = ParseResult<ExprPtr> (Parser::*)();

  ParseResult<ExprPtr> parse_left_assoc(
      SubParser next, std::initializer_list<std::pair<std::string_view, BinOp>> ops) {
    auto lhs = (this->*next)();
    if (!lhs.ok()) return lhs;
    ExprPtr acc = lhs.take_value();
    while (true) {
      const BinOp* matched = nullptr;
      for (const auto& [text, op] : ops) {
        if (is_punct(text)) {
          matched = &op;
          break;
        }
      }
      if (!matched) return acc;
      const Token op_tok = take();
      auto rhs = (this->*next)();
      if (!rhs.ok()) return rhs;
      auto e = make(ExprKind::Binary, op_tok);
      e->bin_op = *matched;
      e->kids.push_back(std::move(acc));
      e->kids.push_back(rhs.take_value());
      acc = std::move(e);
    }
  }

  ParseResult<ExprPtr> parse_unary() {
    if (is_punct("-") || is_punct("!")) {
      const Token op_tok = take();
      auto operand = parse_unary();
      if (!operand.ok()) return operand;
      auto e = make(ExprKind::Unary, op_tok);
      e->un_op = op_tok.text == "-" ? UnOp::Neg : UnOp::Not;
      e->kids.push_back(operand.take_value());
      return e;
    }
    return parse_postfix();
  }

  ParseResult<ExprPtr> parse_postfix() {
    auto base = parse_primary();
    if (!base.ok()) return base;
    ExprPtr acc = base.take_value();
    while (is_punct("[")) {
      const Token open = take();
      auto index = parse_expr();
      if (!index.ok()) return index;
      if (!is_punct("]")) return err_at(DiagCode::Syntax, "unclosed '['", open);
      take();
      auto e = make(ExprKind::Index, open);
      e->kids.push_back(std::move(acc));
      e->kids.push_back(index.take_value());
      acc = std::move(e);
    }
    return acc;
  }

  static bool is_reserved(std::string_view name) {
    return name == "if" || name == "else" || name == "let" || name == "in" || name == "true" ||
           name == "false" || name == "null";
  }

  ParseResult<ExprPtr> parse_primary() {
    const Token tok = cur();
    switch (tok.kind) {
      case TokKind::Int: {
        take();
        int64_t v = 0;
        auto [p, ec] =
            std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
        if (ec != std::errc{} || p != tok.text.data() + tok.text.size()) {
          return err_at(DiagCode::Syntax, "integer literal out of range", tok);
        }
        auto e = make(ExprKind::Literal, tok);
        e->literal = vint(v);
        return e;
      }
      case TokKind::Float: {
        take();
        double v = 0;
        auto [p, ec] =
            std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
        if (ec != std::errc{} || p != tok.text.data() + tok.text.size()) {
          return err_at(DiagCode::Syntax, "malformed float literal", tok);
        }
        auto e = make(ExprKind::Literal, tok);
        e->literal = vfloat(v);
        return e;
      }
      case TokKind::Str: {
        take();
        auto e = make(ExprKind::Literal, tok);
        e->literal = vstr(tok.str_value);
        return e;
      }
      case TokKind::Ident:
        if (tok.text == "true" || tok.text == "false") {
          take();
          auto e = make(ExprKind::Literal, tok);
          e->literal = vbool(tok.text == "true");
          return e;
        }
        if (tok.text == "null") {
          take();
          auto e = make(ExprKind::Literal, tok);
          e->literal = vnull();
          return e;
        }
        return parse_ident(tok);
      case TokKind::Punct:
        if (tok.text == "(") return parse_parenthesized();
        break;
      default:
        break;
    }
    return err(DiagCode::Syntax, "expected expression");
  }

  // Either a call on a builtin or a variable reference.
  ParseResult<ExprPtr> parse_ident(const Token& tok) {
    take();
    if (is_punct("(")) {
      const Token open = take();
      const auto it = builtin_table().find(tok.text);
      if (it == builtin_table().end()) {
        return err_at(DiagCode::UnknownBuiltin,
                      "unknown builtin '" + std::string(tok.text) + "'", tok);
      }
      std::vector<ExprPtr> args;
      if (!is_punct(")")) {
        while (true) {
          auto arg = parse_expr();
          if (!arg.ok()) return arg;
          args.push_back(arg.take_value());
          if (is_punct(",")) {
            take();
            continue;
          }
          break;
        }
      }
      if (!is_punct(")")) return err_at(DiagCode::Syntax, "unclosed '('", open);
      take();
      if (static_cast<int>(args.size()) != it->second.second) {
        return err_at(DiagCode::ArityMismatch,
                      std::string(tok.text) + " expects " +
                          std::to_string(it->second.second) + " argument(s), got " +
                          std::to_string(args.size()),
                      tok);
      }
      auto e = make(ExprKind::Call, tok);
      e->builtin = it->second.first;
      e->name = std::string(tok.text);
      e->kids = std::move(args);
      return e;
    }
    const int slot = lookup(tok.text);
    if (slot < 0) {
      return err_at(DiagCode::UnboundVariable,
                    "unbound variable '" + std::string(tok.text) + "'", tok);
    }
    auto e = make(ExprKind::Var, tok);
    e->slot = slot;
    e->name = std::string(tok.text);
    return e;
  }

  // '(' expr ')' groups; '(' expr ',' expr [',' expr]* ')' constructs a tuple.
  ParseResult<ExprPtr> parse_parenthesized() {
    const Token open = take();
    std::vector<ExprPtr> items;
    while (true) {
      auto item = parse_expr();
      if (!item.ok()) return item;
      items.push_back(item.take_value());
      if (is_punct(",")) {
        take();
        continue;
      }
      break;
    }
    if (!is_punct(")")) return err_at(DiagCode::Syntax, "unclosed '('", open);
    take();
    if (items.size() == 1) return std::move(items[0]);
    auto e = make(ExprKind::TupleCtor, open);
    e->kids = std::move(items);
    return e;
  }

  std::vector<Token> tokens_;
  size_t idx_ = 0;
  std::vector<std::string> scope_;
};

void number_preorder(Expr& e, int& next_id, std::vector<int>& branch_ids) {
  e.node_id = next_id++;
  if (e.kind == ExprKind::If) branch_ids.push_back(e.node_id);
  for (auto& kid : e.kids) number_preorder(*kid, next_id, branch_ids);
}

int precedence_of(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Let:
    case ExprKind::If:
      return 0;
    case ExprKind::Binary:
      switch (e.bin_op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 3;
        case BinOp::Add:
        case BinOp::Sub: return 4;
        default: return 5;
      }
    case ExprKind::Unary:
      return 6;
    case ExprKind::Index:
      return 7;
    default:
      return 8;
  }
}

void render_with_parens(const Expr& e, int min_prec, std::string& out);

void render_node(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::Literal:
      out += render_value(e.literal);
      return;
    case ExprKind::Var:
      out += e.name;
      return;
    case ExprKind::Let:
      out += "let " + e.name + " = ";
      render_with_parens(*e.kids[0], 0, out);
      out += " in ";
      render_with_parens(*e.kids[1], 0, out);
      return;
    case ExprKind::If:
      out += "if (";
      render_with_parens(*e.kids[0], 0, out);
      out += ") ";
      // Branch expressions at full precedence would swallow a following
      // 'else', so the then-branch gets parens when it is a let/if.
      render_with_parens(*e.kids[1], 1, out);
      out += " else ";
      render_with_parens(*e.kids[2], 0, out);
      return;
    case ExprKind::TupleCtor: {
      out += '(';
      bool first = true;
      for (const auto& kid : e.kids) {
        if (!first) out += ", ";
        first = false;
        render_with_parens(*kid, 0, out);
      }
      out += ')';
      return;
    }
    case ExprKind::Index:
      render_with_parens(*e.kids[0], precedence_of(e), out);
      out += '[';
      render_with_parens(*e.kids[1], 0, out);
      out += ']';
      return;
    case ExprKind::Unary:
      out += e.un_op == UnOp::Neg ? "-" : "!";
      render_with_parens(*e.kids[0], precedence_of(e), out);
      return;
    case ExprKind::Binary: {
      const int prec = precedence_of(e);
      render_with_parens(*e.kids[0], prec, out);
      out += ' ';
      out += to_string(e.bin_op);
      out += ' ';
      render_with_parens(*e.kids[1], prec + 1, out);
      return;
    }
    case ExprKind::Call: {
      out += e.name;
      out += '(';
      bool first = true;
      for (const auto& kid : e.kids) {
        if (!first) out += ", ";
        first = false;
        render_with_parens(*kid, 0, out);
      }
      out += ')';
      return;
    }
  }
}

void render_with_parens(const Expr& e, int min_prec, std::string& out) {
  if (precedence_of(e) < min_prec) {
    out += '(';
    render_node(e, out);
    out += ')';
  } else {
    render_node(e, out);
  }
}

}  // namespace

ParseResult<UdfAst> parse_udf_body(std::string_view body, std::vector<std::string> params,
                                   std::string name, int udf_id, int base_line, int base_col) {
  auto tokens = Lexer(body, base_line, base_col).run();
  if (!tokens.ok()) return tokens.diagnostic();
  auto tree = Parser(tokens.take_value(), params).run();
  if (!tree.ok()) return tree.diagnostic();
  UdfAst udf;
  udf.udf_id = udf_id;
  udf.name = std::move(name);
  udf.params = std::move(params);
  udf.body = tree.take_value();
  int next_id = 0;
  number_preorder(*udf.body, next_id, udf.branch_ids);
  udf.node_count = next_id;
  return udf;
}

std::string render_expr(const Expr& e) {
  std::string out;
  render_node(e, out);
  return out;
}

}  // namespace flowfuzz
