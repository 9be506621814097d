#include "wxmood/tokenize.hpp"

#include <cstdint>

namespace wxmood {

namespace {

struct Decoded {
    char32_t cp;
    std::size_t len;
};

Decoded decode(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    auto cont = [&](std::size_t k) -> int {
        if (pos + k >= s.size())
            return -1;
        const auto b = static_cast<unsigned char>(s[pos + k]);
        return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
    };
    if (b0 < 0x80)
        return {b0, 1};
    if ((b0 & 0xE0) == 0xC0) {
        const int c1 = cont(1);
        if (c1 >= 0)
            return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
    } else if ((b0 & 0xF0) == 0xE0) {
        const int c1 = cont(1), c2 = cont(2);
        if (c1 >= 0 && c2 >= 0)
            return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
    } else if ((b0 & 0xF8) == 0xF0) {
        const int c1 = cont(1), c2 = cont(2), c3 = cont(3);
        if (c1 >= 0 && c2 >= 0 && c3 >= 0)
            return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
    }
    return {0xFFFD, 1};
}

bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0x00A0 ||
           (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_regional_indicator(char32_t c) { return c >= 0x1F1E6 && c <= 0x1F1FF; }

bool is_emoji_base(char32_t c) {
    return (c >= 0x1F000 && c <= 0x1FAFF) || (c >= 0x2600 && c <= 0x27BF) || (c >= 0x2300 && c <= 0x23FF) ||
           (c >= 0x2B00 && c <= 0x2BFF);
}

bool is_emoji_modifier(char32_t c) {
    return c == 0xFE0F || c == 0xFE0E || (c >= 0x1F3FB && c <= 0x1F3FF) || c == 0x20E3 ||
           (c >= 0xE0020 && c <= 0xE007F);
}

constexpr char32_t kZwj = 0x200D;

bool is_nonascii_punct(char32_t c) {
    return (c >= 0x00A1 && c <= 0x00BF) || c == 0x00D7 || c == 0x00F7 || (c >= 0x2010 && c <= 0x206F) ||
           (c >= 0x2190 && c <= 0x22FF) || (c >= 0x3001 && c <= 0x303F) || c == 0xFFFD;
}

bool is_word_char(char32_t c) {
    if (c < 0x80)
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    return !is_space(c) && !is_emoji_base(c) && !is_emoji_modifier(c) && c != kZwj && !is_nonascii_punct(c);
}

bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size())
        return false;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        char c = s[pos + k];
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
        if (c != prefix[k])
            return false;
    }
    return true;
}

std::string ascii_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        const auto d = decode(s, i);
        if (d.cp == 0x2019) {
            out.push_back('\'');
        } else if (d.len == 1) {
            char c = s[i];
            if (c >= 'A' && c <= 'Z')
                c = static_cast<char>(c - 'A' + 'a');
            out.push_back(c);
        } else {
            out.append(s.substr(i, d.len));
        }
        i += d.len;
    }
    return out;
}

// Length of the word starting at pos (pos must hold a word char).
std::size_t scan_word(std::string_view s, std::size_t pos) {
    std::size_t end = pos;
    while (end < s.size()) {
        const auto d = decode(s, end);
        if (is_word_char(d.cp)) {
            end += d.len;
            continue;
        }
        if ((is_apostrophe(d.cp) || d.cp == '-') && end + d.len < s.size()) {
            const auto next = decode(s, end + d.len);
            if (is_word_char(next.cp)) {
                end += d.len;
                continue;
            }
        }
        break;
    }
    return end - pos;
}

std::size_t scan_emoji(std::string_view s, std::size_t pos) {
    std::size_t end = pos;
    const auto first = decode(s, end);
    end += first.len;
    if (is_regional_indicator(first.cp) && end < s.size()) {
        const auto second = decode(s, end);
        if (is_regional_indicator(second.cp))
            return end + second.len - pos;
    }
    while (end < s.size()) {
        const auto d = decode(s, end);
        if (is_emoji_modifier(d.cp)) {
            end += d.len;
        } else if (d.cp == kZwj && end + d.len < s.size() && is_emoji_base(decode(s, end + d.len).cp)) {
            end += d.len;
            end += decode(s, end).len;
        } else {
            break;
        }
    }
    return end - pos;
}

} // namespace

std::vector<Token> tokenize_detailed(std::string_view s) {
    std::vector<Token> out;
    std::size_t pos = 0;
    bool at_boundary = true; // previous char was whitespace or start
    while (pos < s.size()) {
        const auto d = decode(s, pos);
        if (is_space(d.cp)) {
            pos += d.len;
            at_boundary = true;
            continue;
        }
        if (at_boundary && (starts_with_ci(s, pos, "http://") || starts_with_ci(s, pos, "https://") ||
                            starts_with_ci(s, pos, "www."))) {
            while (pos < s.size() && !is_space(decode(s, pos).cp))
                pos += decode(s, pos).len;
            continue;
        }
        at_boundary = false;

        if ((d.cp == '#' || d.cp == '@') && pos + 1 < s.size() && is_word_char(decode(s, pos + 1).cp)) {
            const std::size_t len = scan_word(s, pos + 1);
            if (d.cp == '#') {
                const auto word = s.substr(pos + 1, len);
                out.push_back({ascii_lower(word), std::string(word), TokenKind::Word});
            }
            pos += 1 + len;
            continue;
        }
        if (is_word_char(d.cp)) {
            const std::size_t len = scan_word(s, pos);
            const auto word = s.substr(pos, len);
            out.push_back({ascii_lower(word), std::string(word), TokenKind::Word});
            pos += len;
            continue;
        }
        if (is_emoji_base(d.cp) || is_regional_indicator(d.cp)) {
            const std::size_t len = scan_emoji(s, pos);
            const auto emoji = std::string(s.substr(pos, len));
            out.push_back({emoji, emoji, TokenKind::Emoji});
            pos += len;
            continue;
        }
        if (is_emoji_modifier(d.cp) || d.cp == kZwj) {
            pos += d.len; // stray modifier
            continue;
        }
        const auto punct = std::string(s.substr(pos, d.len));
        out.push_back({punct, punct, TokenKind::Punct});
        pos += d.len;
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize_detailed(text))
        out.push_back(std::move(t.text));
    return out;
}

std::vector<std::string> content_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize_detailed(text))
        if (t.kind != TokenKind::Punct)
            out.push_back(std::move(t.text));
    return out;
}

} // namespace wxmood
