#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "oacite/converter.hpp"
#include "oacite/extract.hpp"
#include "oacite/text.hpp"
#include "oacite/url.hpp"

using namespace oacite;

// --- text ---------------------------------------------------------------------------

TEST(Text, NormalizeFoldsCaseAndPunctuation) {
  EXPECT_EQ(text::normalize("  Online   or\tInvisible? "), "online or invisible");
  EXPECT_EQ(text::normalize("A-B_c"), "a b c");
  EXPECT_EQ(text::normalize(""), "");
  EXPECT_EQ(text::normalize("?!"), "");
}

TEST(Text, NormalizeKeepsNonAsciiBytes) {
  EXPECT_EQ(text::normalize("Müller, J."), "m\xc3\xbcller j");
}

TEST(Text, OffsetsPointIntoSource) {
  const std::string src = "  Hello,  World";
  const auto n = text::normalize_with_offsets(src);
  ASSERT_EQ(n.text, "hello world");
  ASSERT_EQ(n.source_offset.size(), n.text.size());
  EXPECT_EQ(n.source_offset[0], 2u);
  EXPECT_EQ(src[n.source_offset[6]], 'W');
}

TEST(Text, FindTokenRespectsBoundaries) {
  const std::string hay = "see references and preferences";
  EXPECT_EQ(text::find_token(hay, "references", 0, hay.size()), 4u);
  EXPECT_EQ(text::find_token(hay, "ferences", 0, hay.size()), std::string::npos);
  EXPECT_EQ(text::find_token(hay, "references", 5, hay.size()), std::string::npos);
  EXPECT_EQ(text::find_token(hay, "see", 0, 2), std::string::npos);
}

TEST(Text, FindTokenJudgesBoundariesOnWholeText) {
  // "refer" ends at the window edge but continues past it.
  const std::string hay = "x references";
  EXPECT_EQ(text::find_token(hay, "refer", 0, 7), std::string::npos);
}

TEST(Text, Utf8Validation) {
  EXPECT_TRUE(text::valid_utf8("plain"));
  EXPECT_TRUE(text::valid_utf8("caf\xc3\xa9"));
  EXPECT_FALSE(text::valid_utf8("\xff\xfe"));
  EXPECT_FALSE(text::valid_utf8("\xc3"));
  EXPECT_FALSE(text::valid_utf8("\xc0\xaf"));  // overlong
}

// --- URLs -----------------------------------------------------------------------------

TEST(Url, NormalizeAppliesAllRules) {
  EXPECT_EQ(url::normalize_url("HTTP://Host.EX:80/a/../b#frag").value(), "http://host.ex/b");
  EXPECT_EQ(url::normalize_url("https://h/x?b=2&a=1").value(), "https://h/x?b=2&a=1");
  EXPECT_EQ(url::normalize_url("http://h").value(), "http://h/");
  EXPECT_EQ(url::normalize_url("https://h:443/p").value(), "https://h/p");
  EXPECT_EQ(url::normalize_url("http://h:8080/p").value(), "http://h:8080/p");
  EXPECT_EQ(url::normalize_url("http://h/%7ea%2f").value(), "http://h/%7Ea%2F");
  EXPECT_EQ(url::normalize_url("http://h/./a/./b/../c").value(), "http://h/a/c");
}

TEST(Url, NormalizeIsIdempotent) {
  const char* inputs[] = {"HTTP://Host.EX:80/a/../b#frag", "https://h/x?b=2&a=1",
                          "http://h/%7ea/./b", "http://user@H.example:81/q?x#y"};
  for (const char* in : inputs) {
    const auto once = url::normalize_url(in).value();
    EXPECT_EQ(url::normalize_url(once).value(), once) << in;
  }
}

TEST(Url, NormalizeRejectsInvalid) {
  struct Case {
    const char* in;
    const char* code;
  } cases[] = {{"", "EMPTY"},
               {"no-scheme/path", "MISSING_SCHEME"},
               {"1http://h/", "INVALID_SCHEME"},
               {"mailto:x@y", "MISSING_AUTHORITY"},
               {"http:///path", "EMPTY_HOST"},
               {"http://h:99999/", "INVALID_PORT"},
               {"http://h/%zz", "INVALID_PERCENT_ENCODING"},
               {"http://h/a b", "CONTAINS_WHITESPACE"}};
  for (const auto& c : cases) {
    auto r = url::normalize_url(c.in);
    ASSERT_FALSE(r.has_value()) << c.in;
    EXPECT_EQ(r.error().code, c.code) << c.in;
  }
}

TEST(Url, ResolveReference) {
  const std::string base = "http://a/b/c/d;p?q";
  EXPECT_EQ(url::resolve_reference(base, "g"), "http://a/b/c/g");
  EXPECT_EQ(url::resolve_reference(base, "./g"), "http://a/b/c/g");
  EXPECT_EQ(url::resolve_reference(base, "/g"), "http://a/g");
  EXPECT_EQ(url::resolve_reference(base, "//g"), "http://g");
  EXPECT_EQ(url::resolve_reference(base, "?y"), "http://a/b/c/d;p?y");
  EXPECT_EQ(url::resolve_reference(base, "../../g"), "http://a/g");
  EXPECT_EQ(url::resolve_reference(base, "https://x/y"), "https://x/y");
}

TEST(Url, DedupKeepsFirstOccurrence) {
  EXPECT_EQ(url::dedup_urls({"http://a/", "http://b/", "http://a/"}),
            (std::vector<std::string>{"http://a/", "http://b/"}));
  EXPECT_TRUE(url::dedup_urls({}).empty());
  EXPECT_EQ(url::dedup_urls({"http://a/x#one", "http://a/x#two"}).size(), 1u);
  EXPECT_EQ(url::dedup_urls({"http://a/x#one", "http://a/x#two"}).front(), "http://a/x#one");
}

TEST(Url, PrioritizeIsStablePartition) {
  EXPECT_EQ(url::prioritize_urls({"http://h/a.html", "http://h/b.pdf", "http://h/c.ps",
                                  "http://h/d.htm"}),
            (std::vector<std::string>{"http://h/b.pdf", "http://h/c.ps", "http://h/a.html",
                                      "http://h/d.htm"}));
  const std::vector<std::string> pdfs{"http://h/1.pdf", "http://h/2.PDF"};
  EXPECT_EQ(url::prioritize_urls(pdfs), pdfs);
  const std::vector<std::string> none{"http://h/1", "http://h/2.txt"};
  EXPECT_EQ(url::prioritize_urls(none), none);
}

TEST(Url, PrioritizeStabilityProperty) {
  std::mt19937 gen(7);
  const char* exts[] = {".pdf", ".ps", ".html", "", ".txt"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> in;
    const int n = gen() % 20;
    for (int i = 0; i < n; ++i) in.push_back("http://h/" + std::to_string(i) + exts[gen() % 5]);
    const auto out = url::prioritize_urls(in);
    std::vector<std::string> first, second;
    for (const auto& u : in) (url::has_full_text_extension(u) ? first : second).push_back(u);
    first.insert(first.end(), second.begin(), second.end());
    EXPECT_EQ(out, first);
  }
}

TEST(Url, HostMatching) {
  EXPECT_TRUE(url::host_matches("ads.example", "ads.example"));
  EXPECT_TRUE(url::host_matches("x.ads.example", "ads.example"));
  EXPECT_TRUE(url::host_matches("x.ads.example", "*.ads.example"));
  EXPECT_FALSE(url::host_matches("badads.example", "ads.example"));
  EXPECT_EQ(url::host_of("http://User@WWW.Ex.com:8080/p"), "www.ex.com");
}

// --- extraction ----------------------------------------------------------------------

TEST(Extract, HtmlParagraph) {
  auto r = extract_text("<p>Hello</p>", Format::Html, nullptr);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->text, "Hello");
}

TEST(Extract, PlainTextIdentity) {
  const std::string t = "Line one\n  line two\n";
  auto r = extract_text(t, Format::Text, nullptr);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->text, t);
}

TEST(Extract, PdfWithoutConverter) {
  auto r = extract_text("%PDF-1.4 ...", Format::Pdf, nullptr);
  ASSERT_FALSE(r);
  EXPECT_EQ(r.error().code, "CONVERTER_UNAVAILABLE");
}

TEST(Extract, UndecodableBytes) {
  auto r = extract_text("\xff\xfe\x00", Format::Text, nullptr);
  ASSERT_FALSE(r);
  EXPECT_EQ(r.error().code, "UNDECODABLE");
}

TEST(Extract, HtmlDropsScriptsStylesAndKeepsLinks) {
  const std::string html =
      "<html><head><style>p{color:red}</style><script>var references=1;</script></head>"
      "<body><!-- hidden --><h1>Title &amp; More</h1><p>See <a href='/x.pdf'>the PDF</a> "
      "and <A HREF=\"http://e.org/?a=1&amp;b=2\">other</A>.</p>&#233;&#x41;</body></html>";
  auto r = extract_text(html, Format::Html, nullptr);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->text.find("references"), std::string::npos);
  EXPECT_EQ(r->text.find("color"), std::string::npos);
  EXPECT_EQ(r->text.find("hidden"), std::string::npos);
  EXPECT_NE(r->text.find("Title & More"), std::string::npos);
  EXPECT_NE(r->text.find("\xc3\xa9" "A"), std::string::npos);
  ASSERT_EQ(r->links.size(), 2u);
  EXPECT_EQ(r->links[0].href, "/x.pdf");
  EXPECT_EQ(r->links[0].text, "the PDF");
  EXPECT_EQ(r->links[1].href, "http://e.org/?a=1&b=2");
}

TEST(Extract, FormatDetection) {
  EXPECT_EQ(detect_format("text/html; charset=utf-8", "http://h/x.pdf"), Format::Html);
  EXPECT_EQ(detect_format("", "http://h/x.pdf"), Format::Pdf);
  EXPECT_EQ(detect_format("application/octet-stream", "http://h/x.ps"), Format::PostScript);
  EXPECT_EQ(detect_format("", "http://h/x"), Format::Unknown);
  EXPECT_EQ(parse_format(to_string(Format::Rtf)), Format::Rtf);
}

// --- external converter ------------------------------------------------------------

TEST(Converter, PathTemplate) {
  ExternalConverter conv("cat {path}");
  auto r = extract_text("converted text\n", Format::Pdf, &conv);
  ASSERT_TRUE(r) << r.error().message;
  EXPECT_EQ(r->text, "converted text\n");
}

TEST(Converter, StdinWhenNoPath) {
  ExternalConverter conv("tr a-z A-Z");
  auto r = conv.convert("abc", Format::PostScript);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, "ABC");
}

TEST(Converter, FormatPlaceholder) {
  ExternalConverter conv("echo {format}");
  auto r = conv.convert("", Format::Rtf);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, "rtf\n");
}

TEST(Converter, NonzeroExitFails) {
  ExternalConverter conv("exit 3");
  auto r = conv.convert("x", Format::Pdf);
  ASSERT_FALSE(r);
  EXPECT_EQ(r.error().code, "CONVERTER_FAILED");
}

TEST(Converter, Timeout) {
  ExternalConverter conv("sleep 5", std::chrono::milliseconds(200));
  const auto t0 = std::chrono::steady_clock::now();
  auto r = conv.convert("x", Format::Pdf);
  const auto took = std::chrono::steady_clock::now() - t0;
  ASSERT_FALSE(r);
  EXPECT_EQ(r.error().code, "CONVERTER_TIMEOUT");
  EXPECT_LT(took, std::chrono::seconds(3));
}

TEST(Converter, FromEnvironment) {
  ::unsetenv(kConverterEnvVar);
  EXPECT_FALSE(ExternalConverter::from_environment().has_value());
  ::setenv(kConverterEnvVar, "cat {path}", 1);
  auto c = ExternalConverter::from_environment();
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->command_template(), "cat {path}");
  ::unsetenv(kConverterEnvVar);
}
