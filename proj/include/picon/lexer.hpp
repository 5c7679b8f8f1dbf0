#pragma once

// Minimal hand-rolled tokenizer shared by the theory, protocol, and
// architecture parsers. `#` starts a comment running to end of line.

#include <cctype>
#include <string>
#include <vector>

#include "picon/term.hpp"

namespace picon {

struct Token {
    enum class Kind { Ident, Punct, Number, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string src) : src_(std::move(src)) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

    bool at_end() const { return tok_.kind == Token::Kind::End; }

    bool accept_ident(const std::string& kw) {
        if (tok_.kind == Token::Kind::Ident && tok_.text == kw) {
            advance();
            return true;
        }
        return false;
    }

    bool accept_punct(const std::string& p) {
        if (tok_.kind == Token::Kind::Punct && tok_.text == p) {
            advance();
            return true;
        }
        return false;
    }

    std::string expect_ident(const std::string& what) {
        if (tok_.kind != Token::Kind::Ident)
            throw ParseError("expected " + what + ", got '" + tok_.text + "'", tok_.line, tok_.col);
        return next().text;
    }

    void expect_keyword(const std::string& kw) {
        if (!accept_ident(kw))
            throw ParseError("expected '" + kw + "', got '" + tok_.text + "'", tok_.line, tok_.col);
    }

    void expect_punct(const std::string& p) {
        if (!accept_punct(p))
            throw ParseError("expected '" + p + "', got '" + tok_.text + "'", tok_.line, tok_.col);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, tok_.line, tok_.col);
    }

private:
    void advance() {
        skip_ws();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_ = {Token::Kind::End, "", line_, col_};
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                    src_[pos_] == '\'')) {
                s += src_[pos_];
                bump();
            }
            tok_ = {Token::Kind::Ident, s, tok_.line, tok_.col};
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                s += src_[pos_];
                bump();
            }
            tok_ = {Token::Kind::Number, s, tok_.line, tok_.col};
            return;
        }
        // multi-char punctuation first
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            bump();
            bump();
            tok_ = {Token::Kind::Punct, "->", tok_.line, tok_.col};
            return;
        }
        if (c == '.' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '.') {
            bump();
            bump();
            tok_ = {Token::Kind::Punct, "..", tok_.line, tok_.col};
            return;
        }
        bump();
        tok_ = {Token::Kind::Punct, std::string(1, c), tok_.line, tok_.col};
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

}  // namespace picon
