#include "idsign/canonical.h"

#include <random>

#include <gtest/gtest.h>

#include "idsign/crypto.h"
#include "idsign/error.h"

namespace idsign {
namespace {

using nlohmann::json;

// Expected bytes below come from Python's json.dumps(sort_keys=True,
// separators=(",", ":"), ensure_ascii=False).
TEST(CanonicalEncodeTest, MatchesReferenceSerializer) {
  const json value = {
      {"b", {1, "x", {{"z", -5}, {"a", "\xc3\xa9"}}}},
      {"a", "line\n\"q\"\\ \x01"},
      {"\xc3\xa9", 18446744073709551615ull},
  };
  const auto bytes = CanonicalEncode(value);
  EXPECT_EQ(bytes.bytes(),
            "{\"a\":\"line\\n\\\"q\\\"\\\\ \\u0001\",\"b\":[1,\"x\",{\"a\":"
            "\"\xc3\xa9\",\"z\":-5}],\"\xc3\xa9\":18446744073709551615}");
  EXPECT_EQ(Digest(bytes.view()),
            "3d197a28169760da541ee276ecf33292e063adbc43b9d47be6d91b2ece1beb8a");
}

TEST(CanonicalEncodeTest, NormalizesKeysAndValues) {
  EXPECT_EQ(CanonicalEncode({{"k", "e\xcc\x81"}}).bytes(),
            "{\"k\":\"\xc3\xa9\"}");
  EXPECT_EQ(CanonicalEncode({{"e\xcc\x81", 1}}).bytes(),
            "{\"\xc3\xa9\":1}");
}

TEST(CanonicalEncodeTest, RejectsUnsupportedValues) {
  for (const json& bad : {json(1.5), json(true), json(nullptr),
                          json({{"a", {1, 2.0}}}),
                          json({{"e\xcc\x81", 1}, {"\xc3\xa9", 2}}),
                          json("\xff")}) {
    SCOPED_TRACE(bad.dump(-1, ' ', false, json::error_handler_t::replace));
    EXPECT_THROW(CanonicalEncode(bad), Error);
  }
}

TEST(CanonicalEncodeTest, StableUnderKeyPermutation) {
  std::mt19937 rng(3);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::pair<std::string, int>> items;
    for (int i = 0; i < 12; ++i) {
      items.emplace_back("k" + std::to_string(rng() % 1000), i);
    }
    json a = json::object();
    for (const auto& [k, v] : items) a[k] = v;
    std::shuffle(items.begin(), items.end(), rng);
    json b = json::object();
    for (const auto& [k, v] : items) b[k] = a[k];
    ASSERT_EQ(CanonicalEncode(a), CanonicalEncode(b));
  }
}

TEST(ParseCanonicalTest, AcceptsOnlyCanonicalBytes) {
  EXPECT_EQ(ParseCanonical(R"({"a":1,"b":[2]})"), json({{"a", 1}, {"b", {2}}}));
  for (const char* bad : {R"({"b":1,"a":2})", R"({"a": 1})", "{\"a\":1}\n",
                          R"({"a":"\u00e9"})", "{\"k\":\"e\xcc\x81\"}",
                          R"({"a":1.0})", "not json"}) {
    SCOPED_TRACE(bad);
    try {
      ParseCanonical(bad);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNonCanonicalizable);
    }
  }
}

TEST(NormalizeNfcTest, ComposesAndValidates) {
  EXPECT_EQ(NormalizeNfc("e\xcc\x81"), "\xc3\xa9");
  EXPECT_EQ(NormalizeNfc("plain"), "plain");
  EXPECT_THROW(NormalizeNfc("\xed\xa0\x80"), Error);  // surrogate
  EXPECT_EQ(CodePointCount("a\xc3\xa9\xf0\x9f\x98\x80"), 3u);
}

}  // namespace
}  // namespace idsign
