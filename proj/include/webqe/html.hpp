#pragma once

// Tag-level text extraction for web pages. Keeps the text of content blocks
// (p, h1-h6, table, ul/ol/li), drops script/style/form/nav/footer subtrees and
// blocks whose text is nothing but link anchors, and decodes HTML entities.
// Tolerates malformed markup; never emits tag fragments.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace webqe {

class undecodable_content : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace html_detail {

inline bool is_tag_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline bool is_block_tag(const std::string& t) {
    static const std::array<const char*, 11> tags = {
        "p", "h1", "h2", "h3", "h4", "h5", "h6", "table", "ul", "ol", "li"};
    return std::find_if(tags.begin(), tags.end(),
                        [&](const char* x) { return t == x; }) != tags.end();
}

inline bool is_dropped_container(const std::string& t) {
    return t == "form" || t == "nav" || t == "footer";
}

inline bool is_raw_text_tag(const std::string& t) {
    return t == "script" || t == "style";
}

// Tags whose boundaries do not separate words ("bo<b>ld</b>" is one word);
// every other tag boundary acts as whitespace ("a<br>b", "<td>a</td><td>b").
inline bool is_inline_tag(const std::string& t) {
    static const std::array<const char*, 14> tags = {
        "a", "b", "i", "em", "strong", "span", "u", "small",
        "sub", "sup", "code", "abbr", "mark", "time"};
    return std::find_if(tags.begin(), tags.end(),
                        [&](const char* x) { return t == x; }) != tags.end();
}

// Appends the UTF-8 encoding of a code point, or nothing if out of range.
inline void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp <= 0x7F) {
        out.push_back(static_cast<char>(cp));
    } else if (cp <= 0x7FF) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0xFFFF) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp <= 0x10FFFF) {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Decodes the entity starting at s[pos] (s[pos] == '&'). Returns the number of
// input chars consumed and appends the decoded text; consumes 1 and appends
// "&" when the sequence is not a recognizable entity.
inline std::size_t decode_entity(std::string_view s, std::size_t pos, std::string& out) {
    std::size_t semi = s.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 12) {
        out.push_back('&');
        return 1;
    }
    std::string_view body = s.substr(pos + 1, semi - pos - 1);
    if (!body.empty() && body[0] == '#') {
        std::uint32_t cp = 0;
        bool ok = body.size() > 1;
        if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
            for (std::size_t i = 2; i < body.size() && ok; ++i) {
                char c = body[i];
                int d = (c >= '0' && c <= '9')   ? c - '0'
                        : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                        : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                                 : -1;
                if (d < 0) ok = false;
                else cp = cp * 16 + static_cast<std::uint32_t>(d);
            }
        } else {
            for (std::size_t i = 1; i < body.size() && ok; ++i) {
                char c = body[i];
                if (c < '0' || c > '9') ok = false;
                else cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
            }
        }
        if (ok && cp > 0 && cp <= 0x10FFFF) {
            append_utf8(out, cp);
            return semi - pos + 1;
        }
        out.push_back('&');
        return 1;
    }
    struct named { const char* name; const char* text; };
    static const std::array<named, 16> table = {{{"amp", "&"},
                                                 {"lt", "<"},
                                                 {"gt", ">"},
                                                 {"quot", "\""},
                                                 {"apos", "'"},
                                                 {"nbsp", " "},
                                                 {"copy", "\xC2\xA9"},
                                                 {"reg", "\xC2\xAE"},
                                                 {"trade", "\xE2\x84\xA2"},
                                                 {"ndash", "\xE2\x80\x93"},
                                                 {"mdash", "\xE2\x80\x94"},
                                                 {"lsquo", "\xE2\x80\x98"},
                                                 {"rsquo", "\xE2\x80\x99"},
                                                 {"ldquo", "\xE2\x80\x9C"},
                                                 {"rdquo", "\xE2\x80\x9D"},
                                                 {"hellip", "\xE2\x80\xA6"}}};
    for (const auto& e : table) {
        if (body == e.name) {
            out += e.text;
            return semi - pos + 1;
        }
    }
    out.push_back('&');
    return 1;
}

inline bool looks_binary(std::string_view raw) {
    std::size_t probe = std::min<std::size_t>(raw.size(), 4096);
    std::size_t control = 0;
    for (std::size_t i = 0; i < probe; ++i) {
        unsigned char c = static_cast<unsigned char>(raw[i]);
        if (c == 0) return true;
        if (c < 0x20 && c != '\t' && c != '\n' && c != '\r' && c != '\f') ++control;
    }
    return probe > 0 && control * 5 > probe;  // >20% control bytes
}

struct block {
    std::size_t order = 0;
    std::string tag;
    std::string text;
    std::size_t visible_chars = 0;
    std::size_t anchored_chars = 0;
};

inline std::string finalize_block_text(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (ws) {
            if (!out.empty()) pending_space = true;
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace html_detail

// Extracts readable text from HTML-ish bytes, one line per content block in
// document order. Throws undecodable_content for binary payloads.
inline std::string extract_text(std::string_view raw_html) {
    using namespace html_detail;

    if (looks_binary(raw_html)) throw undecodable_content("payload is not text");

    std::vector<block> closed;
    std::vector<block> open;
    std::size_t order = 0;
    int suppressed = 0;  // depth inside form/nav/footer
    int anchor = 0;      // depth inside <a>

    auto close_top = [&]() {
        block b = std::move(open.back());
        open.pop_back();
        b.text = finalize_block_text(b.text);
        bool anchor_only = b.visible_chars > 0 && b.anchored_chars == b.visible_chars;
        if (!b.text.empty() && !anchor_only) closed.push_back(std::move(b));
    };
    auto close_tag_named = [&](const std::string& name) {
        for (std::size_t i = open.size(); i-- > 0;) {
            if (open[i].tag == name) {
                while (open.size() > i) close_top();
                return;
            }
        }
    };

    std::size_t i = 0;
    const std::size_t n = raw_html.size();
    while (i < n) {
        char c = raw_html[i];
        if (c != '<') {
            std::size_t end = raw_html.find('<', i);
            if (end == std::string_view::npos) end = n;
            if (suppressed == 0 && !open.empty()) {
                block& b = open.back();
                std::size_t j = i;
                while (j < end) {
                    std::size_t before = b.text.size();
                    if (raw_html[j] == '&') {
                        j += decode_entity(raw_html, j, b.text);
                    } else {
                        b.text.push_back(raw_html[j]);
                        ++j;
                    }
                    for (std::size_t p = before; p < b.text.size(); ++p) {
                        if (!std::isspace(static_cast<unsigned char>(b.text[p]))) {
                            ++b.visible_chars;
                            if (anchor > 0) ++b.anchored_chars;
                        }
                    }
                }
            }
            i = end;
            continue;
        }

        // c == '<'
        if (i + 1 >= n) break;
        char next = raw_html[i + 1];
        if (next == '!') {
            if (raw_html.compare(i, 4, "<!--") == 0) {
                std::size_t end = raw_html.find("-->", i + 4);
                i = end == std::string_view::npos ? n : end + 3;
            } else {
                std::size_t end = raw_html.find('>', i);
                i = end == std::string_view::npos ? n : end + 1;
            }
            continue;
        }
        if (next == '?') {
            std::size_t end = raw_html.find('>', i);
            i = end == std::string_view::npos ? n : end + 1;
            continue;
        }
        bool closing = next == '/';
        std::size_t name_start = i + (closing ? 2 : 1);
        if (closing && (name_start >= n || !is_tag_name_char(raw_html[name_start]))) {
            // "</" with no tag name: bogus comment, skip to '>'
            std::size_t end = raw_html.find('>', i);
            i = end == std::string_view::npos ? n : end + 1;
            continue;
        }
        if (name_start >= n || !is_tag_name_char(raw_html[name_start])) {
            // stray '<' — literal text
            if (suppressed == 0 && !open.empty()) {
                open.back().text.push_back('<');
                ++open.back().visible_chars;
                if (anchor > 0) ++open.back().anchored_chars;
            }
            ++i;
            continue;
        }
        std::size_t name_end = name_start;
        while (name_end < n && is_tag_name_char(raw_html[name_end])) ++name_end;
        std::string name = to_lower_ascii(raw_html.substr(name_start, name_end - name_start));

        // scan to the closing '>' of this tag, respecting quoted attributes
        std::size_t p = name_end;
        char quote = 0;
        while (p < n) {
            char qc = raw_html[p];
            if (quote) {
                if (qc == quote) quote = 0;
            } else if (qc == '"' || qc == '\'') {
                quote = qc;
            } else if (qc == '>') {
                break;
            }
            ++p;
        }
        bool self_closing = !closing && p > name_end && p <= n && p >= 1 && raw_html[p - 1] == '/';
        std::size_t tag_close = p == n ? n : p + 1;

        if (!closing && is_raw_text_tag(name)) {
            // skip content up to the matching close tag
            std::string needle = "</" + name;
            std::size_t pos = tag_close;
            std::size_t found = std::string_view::npos;
            while (pos < n) {
                std::size_t cand = raw_html.find('<', pos);
                if (cand == std::string_view::npos) break;
                if (cand + needle.size() <= n &&
                    to_lower_ascii(raw_html.substr(cand, needle.size())) == needle) {
                    found = cand;
                    break;
                }
                pos = cand + 1;
            }
            if (found == std::string_view::npos) {
                i = n;
            } else {
                std::size_t end = raw_html.find('>', found);
                i = end == std::string_view::npos ? n : end + 1;
            }
            continue;
        }

        if (closing) {
            if (name == "a") {
                if (anchor > 0) --anchor;
            } else if (is_dropped_container(name)) {
                if (suppressed > 0) --suppressed;
            } else if (is_block_tag(name) && suppressed == 0) {
                close_tag_named(name);
            }
        } else {
            if (name == "a") {
                ++anchor;
                if (self_closing && anchor > 0) --anchor;
            } else if (is_dropped_container(name)) {
                if (!self_closing) ++suppressed;
            } else if (is_block_tag(name) && suppressed == 0) {
                // sloppy markup: an unclosed <p> or <li> is ended by the next one
                if ((name == "p" || name == "li") && !open.empty() && open.back().tag == name)
                    close_top();
                open.push_back(block{order++, name, {}, 0, 0});
                if (self_closing) close_top();
            }
        }
        if (!is_inline_tag(name) && suppressed == 0 && !open.empty())
            open.back().text.push_back(' ');
        i = tag_close;
    }
    while (!open.empty()) close_top();

    std::sort(closed.begin(), closed.end(),
              [](const block& a, const block& b) { return a.order < b.order; });
    std::string out;
    for (const auto& b : closed) {
        if (!out.empty()) out.push_back('\n');
        out += b.text;
    }
    return out;
}

}  // namespace webqe
