#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "salrc/image.hpp"
#include "salrc/resample.hpp"
#include "test_util.hpp"

using namespace salrc;

TEST_CASE("PGM roundtrip of a constant 4x4 image") {
  test_util::TempDir tmp;
  Image img = make_image(4, 4, 128);
  save_pgm(img, tmp.file("c.pgm"));
  Image back = load_image(tmp.file("c.pgm"));
  REQUIRE(back.width == 4);
  REQUIRE(back.height == 4);
  for (std::uint8_t s : back.samples) CHECK(s == 128);
}

TEST_CASE("PGM parser accepts comments and odd whitespace") {
  test_util::TempDir tmp;
  {
    std::ofstream out(tmp.file("c.pgm"), std::ios::binary);
    out << "P5 # magic\n# a comment line\n 3\n#width done\n2 255" << '\n';
    const char data[6] = {0, 1, 2, 3, 4, 5};
    out.write(data, 6);
  }
  Image img = load_image(tmp.file("c.pgm"));
  REQUIRE(img.width == 3);
  REQUIRE(img.height == 2);
  CHECK(img.at(2, 1) == 5);
}

TEST_CASE("PPM converts to BT.601 luma") {
  test_util::TempDir tmp;
  {
    std::ofstream out(tmp.file("c.ppm"), std::ios::binary);
    out << "P6\n2 1\n255\n";
    const unsigned char px[6] = {255, 255, 255, 255, 0, 0};
    out.write(reinterpret_cast<const char*>(px), 6);
  }
  Image img = load_image(tmp.file("c.ppm"));
  CHECK(img.at(0, 0) == 255);  // white maps to max
  CHECK(img.at(1, 0) == 76);   // round(0.299*255)
}

TEST_CASE("image loader error paths") {
  test_util::TempDir tmp;
  SECTION("missing file") { CHECK_THROWS(load_image(tmp.file("nope.pgm"))); }
  SECTION("bad magic") {
    std::ofstream(tmp.file("x.pgm")) << "P7 1 1 255 x";
    CHECK_THROWS_WITH(load_image(tmp.file("x.pgm")), Catch::Matchers::ContainsSubstring("unsupported"));
  }
  SECTION("zero dimension") {
    std::ofstream(tmp.file("z.pgm")) << "P5 0 4 255\n";
    CHECK_THROWS(load_image(tmp.file("z.pgm")));
  }
  SECTION("16-bit maxval rejected") {
    std::ofstream(tmp.file("w.pgm")) << "P5 1 1 65535\n";
    CHECK_THROWS(load_image(tmp.file("w.pgm")));
  }
  SECTION("truncated payload") {
    std::ofstream out(tmp.file("t.pgm"), std::ios::binary);
    out << "P5 4 4 255\n";
    out << "ab";
    out.close();
    CHECK_THROWS(load_image(tmp.file("t.pgm")));
  }
}

TEST_CASE("rescale 500x375 to 416 long side") {
  Image img = test_util::structured_image(500, 375, 7);
  auto [out, si] = rescale_keep_aspect(img, 416);
  CHECK(out.width == 416);
  CHECK(out.height == 312);
  CHECK(si.scale == Catch::Approx(0.832).epsilon(1e-12));
  CHECK(si.width_l == 416);
  CHECK(si.height_l == 312);
  CHECK(si.src_width == 500);
}

TEST_CASE("rescale at scale 1 is the identity") {
  Image img = test_util::random_image(416, 416, 11);
  auto [out, si] = rescale_keep_aspect(img, 416);
  CHECK(si.scale == 1.0);
  REQUIRE(out.width == img.width);
  REQUIRE(out.height == img.height);
  CHECK(out.samples == img.samples);
}

TEST_CASE("rescale of a constant image is constant") {
  Image img = make_image(100, 63, 77);
  auto [out, si] = rescale_keep_aspect(img, 416);
  CHECK(out.width == 416);
  CHECK(out.height == static_cast<int>(std::lround(63 * si.scale)));
  for (std::uint8_t s : out.samples) REQUIRE(s == 77);
}

TEST_CASE("rescale rejects tiny targets") {
  Image img = make_image(32, 32);
  CHECK_THROWS_AS(rescale_keep_aspect(img, 8), std::invalid_argument);
}
