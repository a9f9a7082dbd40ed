#include "xtinct/symop.hpp"
#include "xtinct/spacegroup.hpp"

#include <doctest.h>

using namespace xtinct;

TEST_CASE("identity triplet") {
  SymOp op = parse_symop("x, y, z");
  CHECK(op.rotation == IntMatrix3::Identity());
  CHECK(op.translation.isZero());
  CHECK(op.is_identity());
}

TEST_CASE("hexagonal threefold reads row by row") {
  SymOp op = parse_symop("-y, x-y, z");
  IntMatrix3 expected;
  expected << 0, -1, 0, 1, -1, 0, 0, 0, 1;
  CHECK(op.rotation == expected);
  CHECK(op.translation.isZero());
}

TEST_CASE("body-centering translation") {
  SymOp op = parse_symop("x+1/2, y+1/2, z+1/2");
  CHECK(op.rotation == IntMatrix3::Identity());
  CHECK(op.translation == IntVector3(6, 6, 6));
  CHECK(op.is_centering());
}

TEST_CASE("constants: leading, decimal, reduced modulo one") {
  CHECK(parse_symop("1/2+x,y,z").translation == IntVector3(6, 0, 0));
  CHECK(parse_symop("x+.5,y+0.25,z+.75").translation == IntVector3(6, 3, 9));
  CHECK(parse_symop("x+3/2,y-1/4,z+1").translation == IntVector3(6, 9, 0));
  CHECK(parse_symop("X,Y,-Z+5/6").translation == IntVector3(0, 0, 10));
  CHECK(parse_symop("x,y,z+2/12").translation == IntVector3(0, 0, 2));
}

TEST_CASE("malformed triplets name the offending term") {
  auto term_of = [](const char* text) {
    try {
      parse_symop(text);
    } catch (const SymOpParseError& e) {
      return e.term;
    }
    return std::string("<no error>");
  };
  CHECK(term_of("x+x,y,z") == "x+x");
  CHECK(term_of("2x,y,z") == "2x");
  CHECK(term_of("x,y+1/5,z") == "y+1/5");
  CHECK(term_of("x,y+1/8,z") == "y+1/8");
  CHECK(term_of("x,y+1/2+1/2,z") == "y+1/2+1/2");
  CHECK(term_of("x,w,z") == "w");
  CHECK(term_of("x,,z") == "");
  CHECK(term_of("x,y+.3,z") == "y+.3");
  CHECK_THROWS_AS(parse_symop("x,y"), SymOpParseError);
  CHECK_THROWS_AS(parse_symop("x,y,z,x"), SymOpParseError);
  CHECK_THROWS_AS(parse_symop("x,x,z"), SymOpParseError);  // singular
}

TEST_CASE("composition and inverse") {
  SymOp four = parse_symop("-y,x,z+1/4");
  SymOp two = four * four;
  CHECK(format_symop(two) == "-x,-y,z+1/2");
  CHECK((four * four.inverse()).is_identity());
  CHECK((four.inverse() * four).is_identity());
  SymOp g = parse_symop("-x+y+2/3,y+1/3,z+5/6");
  CHECK((g * g.inverse()).is_identity());
}

TEST_CASE("format(parse(s)) reparses to the same op for every table entry") {
  const auto& reg = default_registry();
  for (const auto& [n, g] : reg)
    for (const SymOp& op : g.ops) {
      SymOp back = parse_symop(format_symop(op));
      REQUIRE_MESSAGE(back == op, "group " << n << " op " << format_symop(op));
    }
}

TEST_CASE("op then its inverse returns the coordinate modulo one") {
  const auto& reg = default_registry();
  const Eigen::Vector3d x(0.1234, 0.5678, 0.9012);
  for (int n : {92, 161, 167, 212, 227, 230}) {
    for (const SymOp& op : reg.at(n).ops) {
      Eigen::Vector3d y = op.inverse().apply(op.apply(x));
      Eigen::Vector3d diff = y - x;
      for (int i = 0; i < 3; ++i)
        CHECK(std::abs(diff(i) - std::round(diff(i))) < 1e-12);
    }
  }
}
