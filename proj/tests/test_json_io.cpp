#include "frametop/json_io.hpp"

#include <gtest/gtest.h>

using namespace frametop;

TEST(JsonIo, ParsesDecimalsAndFractions) {
  EXPECT_DOUBLE_EQ(parse_number("0.25"), 0.25);
  EXPECT_DOUBLE_EQ(parse_number(" 1/3 "), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(parse_number("-2/4"), -0.5);
  EXPECT_DOUBLE_EQ(parse_number("3"), 3.0);
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  const Vector v = parse_vector("1, 1/3,1/3 ,1/3");
  ASSERT_EQ(v.size(), 4);
  EXPECT_DOUBLE_EQ(v(0), 1.0);
  EXPECT_DOUBLE_EQ(v(3), 1.0 / 3.0);
  for (const char* bad : {"", "1/0", "a", "1/", "/2", "0.5x", "1//2"}) {
    try {
      parse_number(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << bad;
    }
  }
  EXPECT_THROW(parse_vector("0.5,,0.5"), Error);
}

TEST(JsonIo, TargetRoundTripAndFractionStrings) {
  const DiagonalTarget t({0.4, 0.3, 0.3, 0.4, 0.3, 0.3}, 2);
  const DiagonalTarget back = target_from_json(to_json(t));
  EXPECT_EQ(back.k, 2);
  EXPECT_EQ(back.d, t.d);
  const DiagonalTarget frac = target_from_json(json::parse(R"({"k": 2, "d": ["1", "1/3", "1/3", 0.3333333333333333]})"));
  EXPECT_DOUBLE_EQ(frac.d(1), 1.0 / 3.0);
  EXPECT_THROW(target_from_json(json::parse(R"({"d": [0.5, 0.5]})")), Error);
  EXPECT_THROW(target_from_json(json::parse(R"({"n": 3, "k": 1, "d": [0.5, 0.5]})")), Error);
  EXPECT_THROW(target_from_json(json::parse(R"({"k": 1.5, "d": [0.5, 0.5]})")), Error);
}

TEST(JsonIo, FrameRoundTripIsExact) {
  const Frame f = random_frame(5, 2, 17);
  const Frame back = frame_from_json(json::parse(to_json(f).dump()));
  EXPECT_EQ(back.rows, f.rows);
  EXPECT_THROW(frame_from_json(json::parse(R"({"rows": [[1, 0], [0]]})")), Error);
}

TEST(JsonIo, CertificateRoundTripVerifies) {
  const ConnectivityCertificate c = certify_equal_norm(5, 2);
  const std::string text = to_json(c).dump();
  const ConnectivityCertificate back = certificate_from_json(json::parse(text));
  EXPECT_EQ(back.route, c.route);
  EXPECT_EQ(back.reflection, c.reflection);
  EXPECT_EQ(back.path.grid.size(), c.path.grid.size());
  EXPECT_EQ(back.path.segments.size(), c.path.segments.size());
  const VerificationReport rep = verify_certificate(back);
  EXPECT_TRUE(rep.passed) << rep.failure;
  // Serialisation is deterministic.
  EXPECT_EQ(to_json(back).dump(), text);
}

TEST(JsonIo, TamperedCertificateFails) {
  json j = to_json(certify_equal_norm(4, 2));
  j["grid"][5][0][0] = j["grid"][5][0][0].get<double>() + 0.01;
  EXPECT_FALSE(verify_certificate(certificate_from_json(j)).passed);
  json wrong_d = to_json(certify_equal_norm(4, 2));
  wrong_d["D"] = json::parse("[[1, 0], [0, 1]]");
  EXPECT_FALSE(verify_certificate(certificate_from_json(wrong_d)).passed);
}
