#pragma once

// Text analysis: Unicode normalization, tokenization, stopword removal and
// optional stemming. One analyzer configuration is shared by the expansion
// side (no stemming, so candidate terms keep their surface forms) and the
// retrieval side (stemming on).

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "webqe/porter.hpp"
#include "webqe/smart_stopwords.hpp"

namespace webqe {

struct stoplist {
    std::unordered_set<std::string> words;

    bool contains(std::string_view w) const {
        return words.find(std::string(w)) != words.end();
    }

    // The embedded SMART English list.
    static stoplist smart() {
        stoplist s;
        s.words.reserve(smart_stopwords.size());
        for (std::string_view w : smart_stopwords) s.words.emplace(w);
        return s;
    }

    // One word per line, UTF-8, '#' starts a comment line.
    static stoplist from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open stoplist file: " + path.string());
        stoplist s;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t b = line.find_first_not_of(" \t");
            if (b == std::string::npos || line[b] == '#') continue;
            std::size_t e = line.find_last_not_of(" \t");
            s.words.insert(line.substr(b, e - b + 1));
        }
        return s;
    }
};

struct analyzer_config {
    stoplist stops = stoplist::smart();
    bool stemming = false;
    int min_len = 2;
    int max_len = 40;
    bool drop_numeric = false;
};

namespace analysis_detail {

inline bool is_ascii(std::string_view s) {
    for (char c : s)
        if (static_cast<unsigned char>(c) >= 0x80) return false;
    return true;
}

// NFKC-normalize and lowercase (root locale). ASCII input skips the Unicode
// machinery entirely; the scanner lowercases ASCII letters itself.
inline std::string normalize(std::string_view text) {
    if (is_ascii(text)) return std::string(text);
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC unavailable");
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString folded = nfkc->normalize(u, status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
    folded.toLower(icu::Locale::getRoot());
    std::string out;
    folded.toUTF8String(out);
    return out;
}

// Decodes one UTF-8 code point; returns its byte length (1 on malformed
// input, with cp set to U+FFFD so it acts as a separator).
inline int decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
    unsigned char c0 = static_cast<unsigned char>(s[pos]);
    if (c0 < 0x80) {
        cp = c0;
        return 1;
    }
    int len = (c0 & 0xE0) == 0xC0 ? 2 : (c0 & 0xF0) == 0xE0 ? 3 : (c0 & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || pos + static_cast<std::size_t>(len) > s.size()) {
        cp = 0xFFFD;
        return 1;
    }
    char32_t acc = c0 & (0x7F >> len);
    for (int i = 1; i < len; ++i) {
        unsigned char c = static_cast<unsigned char>(s[pos + static_cast<std::size_t>(i)]);
        if ((c & 0xC0) != 0x80) {
            cp = 0xFFFD;
            return 1;
        }
        acc = (acc << 6) | (c & 0x3F);
    }
    cp = acc;
    return len;
}

inline bool is_word_cp(char32_t cp) {
    if (cp < 0x80)
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    return u_isalnum(static_cast<UChar32>(cp));
}

inline bool all_digits(const std::string& t) {
    for (char c : t)
        if (c < '0' || c > '9') return false;
    return !t.empty();
}

}  // namespace analysis_detail

// Splits normalized text into tokens: runs of letters/digits, with hyphens
// and apostrophes kept when they join two word characters ("state-of-the-art",
// "o'brien"). Curly apostrophes and en dashes fold to their ASCII joiners; an
// em dash separates. Tokens outside the length bounds, purely numeric tokens
// (when configured) and stoplist members are dropped. With stemming enabled
// each surviving token is stemmed and re-checked against the same filters.
inline std::vector<std::string> tokenize(std::string_view text, const analyzer_config& cfg) {
    using namespace analysis_detail;

    std::string norm = normalize(text);
    std::vector<std::string> out;
    std::string tok;
    int tok_cps = 0;

    auto keep = [&](const std::string& t, int cps) {
        return cps >= cfg.min_len && cps <= cfg.max_len &&
               !(cfg.drop_numeric && all_digits(t)) && !cfg.stops.contains(t);
    };
    auto flush = [&] {
        if (!tok.empty() && keep(tok, tok_cps)) {
            if (cfg.stemming) {
                std::string stemmed = porter_stem(tok);
                int cps = 0;
                for (char c : stemmed)
                    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++cps;
                if (keep(stemmed, cps)) out.push_back(std::move(stemmed));
            } else {
                out.push_back(tok);
            }
        }
        tok.clear();
        tok_cps = 0;
    };

    std::size_t pos = 0;
    while (pos < norm.size()) {
        char32_t cp = 0;
        int len = decode_utf8(norm, pos, cp);
        char joiner = 0;
        if (cp == U'\'' || cp == U'‘' || cp == U'’') joiner = '\'';
        else if (cp == U'-' || cp == U'–') joiner = '-';

        if (joiner != 0) {
            bool prev_word = !tok.empty() && tok.back() != '-' && tok.back() != '\'';
            char32_t next_cp = 0;
            std::size_t next_pos = pos + static_cast<std::size_t>(len);
            bool next_word = next_pos < norm.size() &&
                             (decode_utf8(norm, next_pos, next_cp), is_word_cp(next_cp));
            if (prev_word && next_word) {
                tok.push_back(joiner);
                ++tok_cps;
            } else {
                flush();
            }
        } else if (is_word_cp(cp)) {
            if (cp < 0x80) {
                tok.push_back(static_cast<char>(
                    std::tolower(static_cast<unsigned char>(cp))));
            } else {
                tok.append(norm, pos, static_cast<std::size_t>(len));
            }
            ++tok_cps;
        } else {
            flush();
        }
        pos += static_cast<std::size_t>(len);
    }
    flush();
    return out;
}

}  // namespace webqe
