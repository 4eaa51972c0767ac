#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "webqe/html.hpp"

using webqe::extract_text;
using webqe::undecodable_content;

TEST_CASE("extract_text keeps content blocks in document order", "[html]") {
    const std::string page =
        "<html><head><title>t</title></head><body>"
        "<h1>Big Title</h1>"
        "<p>First paragraph.</p>"
        "<p>Second one.</p>"
        "stray body text"
        "</body></html>";
    CHECK(extract_text(page) == "Big Title\nFirst paragraph.\nSecond one.");
}

TEST_CASE("extract_text drops script, style and suppressed containers", "[html]") {
    const std::string page =
        "<p>keep</p>"
        "<script>var x = '<p>not text</p>';</script>"
        "<style>p { color: red }</style>"
        "<nav><p>menu item</p></nav>"
        "<footer><p>copyright</p></footer>"
        "<form><p>field label</p></form>"
        "<p>also keep</p>";
    CHECK(extract_text(page) == "keep\nalso keep");
}

TEST_CASE("extract_text drops anchor-only blocks but keeps mixed ones", "[html]") {
    const std::string page =
        "<li><a href=\"/x\">only a link</a></li>"
        "<li>text with a <a href=\"/y\">link</a> inside</li>";
    CHECK(extract_text(page) == "text with a link inside");
}

TEST_CASE("extract_text decodes entities", "[html]") {
    CHECK(extract_text("<p>Fish &amp; Chips &lt;fresh&gt;</p>") ==
          "Fish & Chips <fresh>");
    CHECK(extract_text("<p>&#65;&#x42;c</p>") == "ABc");
    CHECK(extract_text("<p>caf&#233;</p>") == "café");
    CHECK(extract_text("<p>a&nbsp;b</p>") == "a b");
    CHECK(extract_text("<p>&ldquo;q&rdquo; &ndash; r</p>") ==
          "“q” – r");
    // not entities: literal ampersand survives
    CHECK(extract_text("<p>AT&T and R&D; x</p>") == "AT&T and R&D; x");
    CHECK(extract_text("<p>50 &percent-of-nothing; done</p>") ==
          "50 &percent-of-nothing; done");
}

TEST_CASE("extract_text collapses whitespace inside blocks", "[html]") {
    CHECK(extract_text("<p>  a \t b\n\n c  </p>") == "a b c");
    CHECK(extract_text("<p></p><p> </p><p>x</p>") == "x");
}

TEST_CASE("tag boundaries separate words except for inline markup", "[html]") {
    CHECK(extract_text("<p>line<br>break</p>") == "line break");
    CHECK(extract_text("<p>bo<b>ld</b> and <em>em</em>phasis</p>") ==
          "bold and emphasis");
    CHECK(extract_text("<table><tr><td>cell1</td><td>cell2</td></tr></table>") ==
          "cell1 cell2");
    CHECK(extract_text("<ul><li>one</li><li>two</li></ul>") == "one\ntwo");
}

TEST_CASE("extract_text tolerates malformed markup", "[html]") {
    // unclosed blocks flush at end of input
    CHECK(extract_text("<p>open paragraph") == "open paragraph");
    // repeated <p>/<li> implicitly close the previous one
    CHECK(extract_text("<p>one<p>two") == "one\ntwo");
    CHECK(extract_text("<ul><li>a<li>b</ul>") == "a\nb");
    // bogus closing tag and stray angle brackets
    CHECK(extract_text("<p>a </ > b</p>") == "a b");
    CHECK(extract_text("<p>1 < 2 and 3 > 2</p>") == "1 < 2 and 3 > 2");
    // attributes with '>' inside quotes
    CHECK(extract_text("<p data-x=\"a>b\">quoted</p>") == "quoted");
    // comments and processing instructions vanish
    CHECK(extract_text("<!doctype html><!-- note --><?pi ?><p>x<!--y-->z</p>") ==
          "xz");
    // unterminated script swallows the remainder
    CHECK(extract_text("<p>seen</p><script>var a = 1;") == "seen");
    // case-insensitive tag names
    CHECK(extract_text("<P>Mixed<SCRIPT>hidden()</SCRIPT> case</P>") ==
          "Mixed case");
}

TEST_CASE("extract_text never emits markup fragments", "[html]") {
    const std::string page =
        "<div><p>alpha <span class='x'>beta</span></p>"
        "<table><tr><td>gamma</td></tr></table>"
        "<p>delta <img src='y.png'/> epsilon</p></div>";
    std::string text = extract_text(page);
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if (text[i] == '<') {
            char c = text[i + 1];
            bool tagish = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          c == '/' || c == '!';
            CHECK_FALSE(tagish);
        }
    }
    CHECK(text == "alpha beta\ngamma\ndelta epsilon");
}

TEST_CASE("extract_text rejects binary payloads", "[html]") {
    std::string with_nul = "<p>ok</p>";
    with_nul.push_back('\0');
    CHECK_THROWS_AS(extract_text(with_nul), undecodable_content);

    std::string mostly_control(100, '\x01');
    CHECK_THROWS_AS(extract_text(mostly_control), undecodable_content);

    CHECK_NOTHROW(extract_text("plain text, no tags at all"));
    CHECK(extract_text("plain text, no tags at all").empty());  // no blocks
}
