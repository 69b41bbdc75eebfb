#include <doctest.h>

#include "offlang/config.hpp"
#include "offlang/errors.hpp"
#include "offlang/pipeline.hpp"

using namespace offlang;

TEST_CASE("KvConfig::parse") {
  auto c = KvConfig::parse(
      "# a comment\n"
      "alpha = 1.5\n"
      "\n"
      "name = cnn   # trailing comment\n"
      "list = 2, 3,4\n");
  CHECK(c.entries().size() == 3);
  CHECK(c.get_double("alpha", 0) == 1.5);
  CHECK(c.get_or("name", "") == "cnn");
  CHECK(split_list(c.get_or("list", "")) ==
        std::vector<std::string>{"2", "3", "4"});
  CHECK(!c.has("missing"));
  CHECK(c.get_long("absent", 7) == 7);
}

TEST_CASE("KvConfig: malformed input") {
  CHECK_THROWS_AS(KvConfig::parse("just words\n"), ParseError);
  CHECK_THROWS_AS(KvConfig::parse("a = 1\na = 2\n"), ValidationError);
  CHECK_THROWS_AS(KvConfig::parse("= 2\n"), ParseError);
  auto c = KvConfig::parse("x = abc\n");
  CHECK_THROWS_AS(c.get_double("x", 0), ValidationError);
  CHECK_THROWS_AS(c.get_long("x", 0), ValidationError);
  CHECK_THROWS_AS(c.get_bool("x", false), ValidationError);
}

TEST_CASE("expand_grid: cartesian product in file order") {
  auto grid = KvConfig::parse("lr = 0.1, 0.2\ndepth = 1, 2\n");
  auto cells = expand_grid(grid);
  REQUIRE(cells.size() == 4);
  // earlier keys vary slower
  CHECK(cells[0].brief() == "lr=0.1,depth=1");
  CHECK(cells[1].brief() == "lr=0.1,depth=2");
  CHECK(cells[2].brief() == "lr=0.2,depth=1");
  CHECK(cells[3].brief() == "lr=0.2,depth=2");
}

TEST_CASE("expand_grid: singletons pass through") {
  auto cells = expand_grid(KvConfig::parse("a = 1\nb = x\n"));
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].brief() == "a=1,b=x");
}

TEST_CASE("hyperparameter key validation per model") {
  KvConfig good;
  good.set("l2", "0.01");
  validate_hyper(ModelKind::logreg, good);

  KvConfig bad;
  bad.set("l3", "0.01");
  CHECK_THROWS_AS(validate_hyper(ModelKind::logreg, bad), ValidationError);

  KvConfig cnn_keys;
  cnn_keys.set("kernel_sizes", "2,3");
  cnn_keys.set("dropout", "0.4");
  validate_hyper(ModelKind::cnn, cnn_keys);
  CHECK_THROWS_AS(validate_hyper(ModelKind::svm, cnn_keys), ValidationError);
}

TEST_CASE("default grids expand to the documented sizes") {
  CHECK(expand_grid(default_grid(ModelKind::cnn)).size() == 8);
  CHECK(expand_grid(default_grid(ModelKind::lstm)).size() == 4);
  CHECK(expand_grid(default_grid(ModelKind::gru)).size() == 4);
  CHECK(expand_grid(default_grid(ModelKind::logreg)).size() == 2);
  CHECK(expand_grid(default_grid(ModelKind::svm)).size() == 3);
  CHECK(expand_grid(default_grid(ModelKind::forest)).size() == 4);
}
