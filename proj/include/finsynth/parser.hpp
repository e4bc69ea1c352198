/*! \file parser.hpp
 *  \brief Recursive-descent parser for the LTLf concrete syntax.
 *
 *  Precedence, tightest first: prefix ! X N F G, then U R, &, |, ->, <->.
 *  All binary operators associate to the right.
 */

#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "finsynth/atoms.hpp"
#include "finsynth/formula.hpp"

namespace finsynth {

namespace detail {

enum class Tok {
  End,
  Ident,
  True,
  False,
  Last,
  Not,
  Next,
  WeakNext,
  Finally,
  Globally,
  Until,
  Release,
  And,
  Or,
  Implies,
  Iff,
  LParen,
  RParen,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_'))
        ++j;
      std::string word = text.substr(i, j - i);
      i = j;
      Tok kind = Tok::Ident;
      if (word == "true") kind = Tok::True;
      else if (word == "false") kind = Tok::False;
      else if (word == "last") kind = Tok::Last;
      else if (word == "X") kind = Tok::Next;
      else if (word == "N") kind = Tok::WeakNext;
      else if (word == "F") kind = Tok::Finally;
      else if (word == "G") kind = Tok::Globally;
      else if (word == "U") kind = Tok::Until;
      else if (word == "R") kind = Tok::Release;
      out.push_back({kind, word, start});
      continue;
    }
    switch (c) {
      case '!':
        out.push_back({Tok::Not, "!", start});
        ++i;
        break;
      case '&':
        out.push_back({Tok::And, "&", start});
        ++i;
        break;
      case '|':
        out.push_back({Tok::Or, "|", start});
        ++i;
        break;
      case '(':
        out.push_back({Tok::LParen, "(", start});
        ++i;
        break;
      case ')':
        out.push_back({Tok::RParen, ")", start});
        ++i;
        break;
      case '-':
        if (i + 1 < text.size() && text[i + 1] == '>') {
          out.push_back({Tok::Implies, "->", start});
          i += 2;
        } else {
          throw ParseError("unexpected character '-'", start);
        }
        break;
      case '<':
        if (i + 2 < text.size() && text[i + 1] == '-' && text[i + 2] == '>') {
          out.push_back({Tok::Iff, "<->", start});
          i += 3;
        } else {
          throw ParseError("unexpected character '<'", start);
        }
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         start);
    }
  }
  out.push_back({Tok::End, "", text.size()});
  return out;
}

class Parser {
public:
  Parser(std::vector<Token> tokens, const AtomPartition& atoms)
      : toks_(std::move(tokens)), atoms_(atoms) {}

  Formula parse() {
    Formula f = parse_iff();
    expect(Tok::End, "end of input");
    return f;
  }

private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k))
      throw ParseError(std::string("expected ") + what + ", got '" +
                           (peek().kind == Tok::End ? "<end>" : peek().text) +
                           "'",
                       peek().pos);
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    if (accept(Tok::Iff)) return Formula::iff(lhs, parse_iff());
    return lhs;
  }
  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept(Tok::Implies)) return Formula::implies(lhs, parse_implies());
    return lhs;
  }
  Formula parse_or() {
    Formula lhs = parse_and();
    if (accept(Tok::Or)) return Formula::disj(lhs, parse_or());
    return lhs;
  }
  Formula parse_and() {
    Formula lhs = parse_until();
    if (accept(Tok::And)) return Formula::conj(lhs, parse_and());
    return lhs;
  }
  Formula parse_until() {
    Formula lhs = parse_unary();
    if (accept(Tok::Until)) return Formula::until(lhs, parse_until());
    if (accept(Tok::Release)) return Formula::release(lhs, parse_until());
    return lhs;
  }
  Formula parse_unary() {
    switch (peek().kind) {
      case Tok::Not:
        take();
        return Formula::negate(parse_unary());
      case Tok::Next:
        take();
        return Formula::next(parse_unary());
      case Tok::WeakNext:
        take();
        return Formula::weak_next(parse_unary());
      case Tok::Finally:
        take();
        return Formula::eventually(parse_unary());
      case Tok::Globally:
        take();
        return Formula::globally(parse_unary());
      default:
        return parse_primary();
    }
  }
  Formula parse_primary() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::True:
        take();
        return Formula::make_true();
      case Tok::False:
        take();
        return Formula::make_false();
      case Tok::Last:
        take();
        return Formula::last();
      case Tok::Ident: {
        take();
        if (atoms_.index_of(t.text) < 0) throw UndeclaredAtomError(t.text);
        return Formula::atom(t.text);
      }
      case Tok::LParen: {
        take();
        Formula f = parse_iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      default:
        throw ParseError("expected a formula, got '" +
                             (t.kind == Tok::End ? "<end>" : t.text) + "'",
                         t.pos);
    }
  }

  std::vector<Token> toks_;
  const AtomPartition& atoms_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse(const std::string& text, const AtomPartition& atoms) {
  return detail::Parser(detail::lex(text), atoms).parse();
}

}  // namespace finsynth
