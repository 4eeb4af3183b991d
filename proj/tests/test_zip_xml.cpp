#include <doctest.h>

#include "pptx/xml.hpp"
#include "pptx/zip.hpp"
#include "support/error.hpp"
#include "testutil.hpp"

using namespace deckhand;

TEST_CASE("zip archives round-trip arbitrary bytes") {
  std::vector<zip::Entry> entries = {
      {"a.txt", "plain"},
      {"dir/b.bin", std::string("\x00\x01\x02\xff", 4)},
      {"dir/c.xml", std::string(100000, 'x')},  // compressible
      {"empty", ""},
  };
  std::string bytes = zip::write_archive_bytes(entries);
  auto back = zip::read_archive_bytes(bytes);
  REQUIRE(back.size() == entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(back[i].name == entries[i].name);
    CHECK(back[i].data == entries[i].data);
  }
  CHECK(bytes.size() < 100000);  // the filler actually compressed
}

TEST_CASE("zip writer is deterministic") {
  std::vector<zip::Entry> entries = {{"x", "same"}, {"y", "bytes"}};
  CHECK(zip::write_archive_bytes(entries) == zip::write_archive_bytes(entries));
}

TEST_CASE("non-zip bytes are rejected as NotAZip") {
  try {
    zip::read_archive_bytes("just some text, definitely not an archive");
    FAIL("expected NotAZip");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_a_zip);
  }
}

TEST_CASE("truncated archive is MalformedPackage") {
  std::string bytes = zip::write_archive_bytes({{"a.txt", "payload bytes"}});
  // corrupt the compressed payload while keeping the directory intact
  bytes[35] ^= 0x5a;
  try {
    zip::read_archive_bytes(bytes);
    FAIL("expected MalformedPackage");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::malformed_package);
  }
}

TEST_CASE("xml parser handles attributes, entities, cdata, comments") {
  std::string doc =
      "<?xml version=\"1.0\"?><!-- top -->\n"
      "<root a=\"1\" ns:b=\"two &amp; three\">"
      "<child>text &lt;here&gt;</child>"
      "<!-- skip me --><child x=\"&#65;&#x42;\"/>"
      "<![CDATA[raw <cdata> &amp; bytes]]>"
      "</root>";
  xml::Node root = xml::parse(doc);
  CHECK(root.name == "root");
  CHECK(root.attr("a") == "1");
  CHECK(root.attr("b") == "two & three");      // local-name fallback
  CHECK(root.attr("ns:b") == "two & three");   // exact match
  auto children = root.children_named("child");
  REQUIRE(children.size() == 2);
  CHECK(children[0]->text() == "text <here>");
  CHECK(children[1]->attr("x") == "AB");
  CHECK(root.text() == "raw <cdata> &amp; bytes");
}

TEST_CASE("xml fragment spans are exact source bytes") {
  std::string doc = "<a><b c=\"1\"><d/></b><e>t</e></a>";
  xml::Node root = xml::parse(doc);
  const xml::Node* b = root.child("b");
  REQUIRE(b != nullptr);
  CHECK(xml::fragment(doc, *b) == "<b c=\"1\"><d/></b>");
  CHECK(xml::fragment(doc, *root.child("e")) == "<e>t</e>");
}

TEST_CASE("xml serializer re-escapes and preserves mixed content order") {
  std::string doc = "<a x=\"q&quot;q\">one<b/>two<c>3 &gt; 2</c></a>";
  xml::Node root = xml::parse(doc);
  std::string out = xml::serialize(root, /*xml_decl=*/false);
  CHECK(out == "<a x=\"q&quot;q\">one<b/>two<c>3 &gt; 2</c></a>");
  // parse(serialize(x)) is stable
  CHECK(xml::serialize(xml::parse(out), false) == out);
}

TEST_CASE("xml parser rejects malformed documents") {
  for (const char* bad :
       {"<a><b></a>", "<a attr></a>", "no markup at all", "<a>&bogus;</a>",
        "<a><![CDATA[unterminated</a>"}) {
    CHECK_THROWS_AS(xml::parse(bad), Error);
  }
}
