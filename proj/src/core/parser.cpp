#include "mm/core/parser.hpp"

#include <cctype>
#include <charconv>
#include <string>

namespace mm {

ParseError::ParseError(const std::string& what, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

enum class TokenType { Word, Int, LBrace, RBrace, End };

struct Token {
  TokenType type = TokenType::End;
  std::string_view text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_separators();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (c == '{' || c == '}') {
      t.type = c == '{' ? TokenType::LBrace : TokenType::RBrace;
      t.text = src_.substr(pos_, 1);
      advance();
      return t;
    }
    std::size_t start = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      t.type = TokenType::Int;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      t.type = TokenType::Word;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    }
    t.text = src_.substr(start, pos_ - start);
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_separators() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';' || std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { look_ = lexer_.next(); }

  Program parse() {
    Sequence seq = sequence();
    if (look_.type != TokenType::End) fail("unexpected '" + std::string(look_.text) + "'");
    return Program(std::move(seq));
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, look_.line, look_.column);
  }

  Token take() {
    Token t = look_;
    look_ = lexer_.next();
    return t;
  }

  void expect(TokenType type, const char* what) {
    if (look_.type != type) {
      if (look_.type == TokenType::End) fail(std::string("expected ") + what + ", found end of input");
      fail(std::string("expected ") + what + ", found '" + std::string(look_.text) + "'");
    }
    take();
  }

  Sequence sequence() {
    Sequence seq;
    while (look_.type == TokenType::Word) seq.push_back(block());
    if (look_.type == TokenType::Int) fail("unexpected number '" + std::string(look_.text) + "'");
    return seq;
  }

  Sequence braced() {
    Token open = look_;
    expect(TokenType::LBrace, "'{'");
    Sequence body = sequence();
    if (look_.type != TokenType::RBrace) {
      if (look_.type == TokenType::End)
        throw ParseError("unbalanced brace: '{' is never closed", open.line, open.column);
      fail("expected '}'");
    }
    take();
    return body;
  }

  Condition condition() {
    if (look_.type != TokenType::Word) fail("expected a condition");
    auto c = condition_from_keyword(look_.text);
    if (!c) fail("unknown condition '" + std::string(look_.text) + "'");
    take();
    return *c;
  }

  Block block() {
    Token word = take();
    auto kind = block_kind_from_keyword(word.text);
    if (!kind) throw ParseError("unknown block '" + std::string(word.text) + "'", word.line, word.column);
    switch (*kind) {
      case BlockKind::Move:
      case BlockKind::TurnLeft:
      case BlockKind::TurnRight: return Block::action(*action_of(*kind));
      case BlockKind::Repeat: {
        if (look_.type != TokenType::Int) fail("expected a repeat count");
        int n = 0;
        auto [ptr, ec] = std::from_chars(look_.text.data(), look_.text.data() + look_.text.size(), n);
        if (ec != std::errc{} || ptr != look_.text.data() + look_.text.size())
          fail("invalid repeat count '" + std::string(look_.text) + "'");
        take();
        return Block::repeat(n, braced());
      }
      case BlockKind::RepeatUntilGoal: return Block::repeat_until_goal(braced());
      case BlockKind::If: {
        Condition c = condition();
        return Block::if_(c, braced());
      }
      case BlockKind::IfElse: {
        Condition c = condition();
        Sequence then_body = braced();
        if (look_.type != TokenType::Word || look_.text != "else") fail("expected 'else'");
        take();
        return Block::if_else(c, std::move(then_body), braced());
      }
    }
    fail("unreachable");
  }

  Lexer lexer_;
  Token look_;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

}  // namespace mm
