#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wxmood {

enum class TokenKind { Word, Emoji, Punct };

struct Token {
    std::string text;    // lowercased (ASCII) form
    std::string surface; // as written, for emphasis rules
    TokenKind kind;
};

/// Splits a post into tokens:
///  - words are runs of letters/digits/underscores/non-ASCII letters, with
///    inner apostrophes and hyphens kept ("don't", "ice-cream");
///  - emoji (with modifiers, variation selectors and ZWJ sequences) are
///    single tokens;
///  - "#tag" yields "tag"; "@user" mentions and URLs are dropped;
///  - every other punctuation character is its own token.
/// Lowercasing is ASCII-only.
std::vector<Token> tokenize_detailed(std::string_view text);

/// Lowercased token texts of tokenize_detailed.
std::vector<std::string> tokenize(std::string_view text);

/// Word and emoji tokens only: the units that enter the association graph.
std::vector<std::string> content_tokens(std::string_view text);

} // namespace wxmood
