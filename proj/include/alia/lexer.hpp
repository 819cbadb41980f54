// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "alia/diagnostics.hpp"

namespace alia {

enum class Tok {
    Ident,
    Int,
    String,
    Colon,
    Comma,
    Dot,
    Assign, // =
    LParen,
    RParen,
    LBrace,
    RBrace,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Newline,
    End,
    Bad, // unrecognized byte or unterminated string; text holds the message
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    long long int_value = 0;
    SourceSpan span;
};

/// Tokenizes source text. Accepts LF and CRLF, `//` line comments, and both
/// single- and double-quoted strings (no escape sequences; a string may not
/// contain its own quote character). Never fails: unrecognized input becomes
/// Bad tokens for the parser to diagnose.
class Lexer {
public:
    explicit Lexer(const std::string& source) : src_(source) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\r') {
                advance();
                continue;
            }
            if (c == '\n') {
                // collapse blank lines: only emit a newline after content
                if (!out.empty() && out.back().kind != Tok::Newline)
                    out.push_back(make(Tok::Newline, "\n"));
                advance_line();
                continue;
            }
            if (c == ' ' || c == '\t') {
                advance();
                continue;
            }
            if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(lex_ident());
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(lex_int());
                continue;
            }
            if (c == '\'' || c == '"') {
                out.push_back(lex_string(c));
                continue;
            }
            out.push_back(lex_punct());
        }
        if (!out.empty() && out.back().kind != Tok::Newline)
            out.push_back(make(Tok::Newline, "\n"));
        out.push_back(make(Tok::End, ""));
        return out;
    }

private:
    Token make(Tok kind, std::string text, int width = 1) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.span = {line_, col_, col_ + width - 1};
        return t;
    }

    void advance() {
        ++pos_;
        ++col_;
    }

    void advance_line() {
        ++pos_;
        ++line_;
        col_ = 1;
    }

    Token lex_ident() {
        std::size_t start = pos_;
        int col = col_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            advance();
        std::string text = src_.substr(start, pos_ - start);
        Token t;
        t.kind = Tok::Ident;
        t.text = std::move(text);
        t.span = {line_, col, col_ - 1};
        return t;
    }

    Token lex_int() {
        std::size_t start = pos_;
        int col = col_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            advance();
        Token t;
        t.kind = Tok::Int;
        t.text = src_.substr(start, pos_ - start);
        t.int_value = std::stoll(t.text);
        t.span = {line_, col, col_ - 1};
        return t;
    }

    Token lex_string(char quote) {
        int col = col_;
        advance(); // opening quote
        std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n')
            advance();
        Token t;
        if (pos_ >= src_.size() || src_[pos_] == '\n') {
            t.kind = Tok::Bad;
            t.text = "unterminated string literal";
            t.span = {line_, col, col_ - 1};
            return t;
        }
        t.kind = Tok::String;
        t.text = src_.substr(start, pos_ - start);
        advance(); // closing quote
        t.span = {line_, col, col_ - 1};
        return t;
    }

    Token lex_punct() {
        char c = src_[pos_];
        char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
        auto two = [&](Tok kind, const char* text) {
            Token t = make(kind, text, 2);
            advance();
            advance();
            return t;
        };
        auto one = [&](Tok kind) {
            Token t = make(kind, std::string(1, c));
            advance();
            return t;
        };
        switch (c) {
        case ':': return one(Tok::Colon);
        case ',': return one(Tok::Comma);
        case '.': return one(Tok::Dot);
        case '(': return one(Tok::LParen);
        case ')': return one(Tok::RParen);
        case '{': return one(Tok::LBrace);
        case '}': return one(Tok::RBrace);
        case '+': return one(Tok::Plus);
        case '-': return one(Tok::Minus);
        case '*': return one(Tok::Star);
        case '/': return one(Tok::Slash);
        case '=': return next == '=' ? two(Tok::EqEq, "==") : one(Tok::Assign);
        case '!':
            if (next == '=')
                return two(Tok::Ne, "!=");
            break;
        case '<': return next == '=' ? two(Tok::Le, "<=") : one(Tok::Lt);
        case '>': return next == '=' ? two(Tok::Ge, ">=") : one(Tok::Gt);
        default: break;
        }
        Token t = make(Tok::Bad, "unexpected character '" + std::string(1, c) + "'");
        advance();
        return t;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace alia
