#include "doctest.h"
#include "helpers.hpp"
#include "meld/dataset.hpp"
#include "meld/schema.hpp"

using namespace meld;

namespace {
const char* kDnaTraitSchema = R"({
  "variables": [
    {"name": "DNA", "kind": "categorical", "levels": ["A", "C", "G", "T"]},
    {"name": "trait", "kind": "continuous"}
  ]
})";
}

TEST_CASE("schema parsing maps kinds to encoded dimensions") {
  Schema s = parse_schema(kDnaTraitSchema);
  REQUIRE(s.p() == 2);
  CHECK(s.vars[0].name == "DNA");
  CHECK(s.vars[0].categorical());
  CHECK(s.dim(0) == 4);
  CHECK(s.vars[1].kind == VarKind::Continuous);
  CHECK(s.dim(1) == 1);

  Schema c = parse_schema(R"({"variables": [{"name": "reads", "kind": "count"},
                                            {"name": "x", "kind": "continuous"}]})");
  CHECK(c.dim(0) == 1);
}

TEST_CASE("schema validation rejects bad descriptors") {
  CHECK_THROWS_AS(parse_schema(R"({"variables": [{"name": "x", "kind": "continuous"},
                                                 {"name": "x", "kind": "count"}]})"),
                  validation_error);
  CHECK_THROWS_AS(parse_schema(R"({"variables": [{"name": "a", "kind": "categorical",
                                                  "levels": ["only"]}]})"),
                  validation_error);
  CHECK_THROWS_AS(parse_schema(R"({"variables": [{"name": "a", "kind": "ordinal"}]})"),
                  validation_error);
  CHECK_THROWS_AS(parse_schema("not json"), validation_error);
}

TEST_CASE("schema round-trips through its JSON form") {
  Schema s = parse_schema(kDnaTraitSchema);
  Schema r = parse_schema(schema_to_json(s));
  REQUIRE(r.p() == s.p());
  for (int j = 0; j < s.p(); ++j) {
    CHECK(r.vars[j].name == s.vars[j].name);
    CHECK(r.vars[j].kind == s.vars[j].kind);
    CHECK(r.vars[j].levels == s.vars[j].levels);
  }
}

TEST_CASE("encode_value produces standard-basis vectors and identity scalars") {
  Schema s = parse_schema(kDnaTraitSchema);
  Eigen::VectorXd g = encode_value("G", s.vars[0]);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 1.0);
  CHECK(g[3] == 0.0);
  CHECK(encode_value("C", s.vars[0])[1] == 1.0);  // level index 2 of 4
  CHECK(encode_value("0.0", s.vars[1])[0] == 0.0);

  VariableSpec count;
  count.name = "reads";
  count.kind = VarKind::Count;
  CHECK(encode_value("5", count)[0] == 5.0);
  CHECK_THROWS_AS(encode_value("Z", s.vars[0]), validation_error);
  CHECK_THROWS_AS(encode_value("-1", count), validation_error);
  CHECK_THROWS_AS(encode_value("2.5", count), validation_error);
  CHECK_THROWS_AS(encode_value("inf", s.vars[1]), validation_error);
}

TEST_CASE("load_dataset encodes rows against the schema") {
  Schema s = parse_schema(kDnaTraitSchema);
  Dataset d = load_dataset("DNA,trait\nG,3.7\nA,-1.5\n", s);
  REQUIRE(d.n == 2);
  Eigen::VectorXd b1 = d.encoded(0, 0);
  CHECK(b1[2] == 1.0);
  CHECK(b1.sum() == 1.0);
  CHECK(d.encoded(0, 1)[0] == 3.7);
  CHECK(d.code(1, 0) == 0);

  SUBCASE("empty table yields an n = 0 dataset") {
    Dataset e = load_dataset("DNA,trait\n", s);
    CHECK(e.n == 0);
  }
  SUBCASE("tab separation is detected from the header") {
    Dataset t = load_dataset("DNA\ttrait\nT\t0.25\n", s);
    CHECK(t.code(0, 0) == 3);
  }
  SUBCASE("bad cells are rejected with row diagnostics") {
    CHECK_THROWS_AS(load_dataset("DNA,trait\nZ,1.0\n", s), validation_error);
    CHECK_THROWS_AS(load_dataset("DNA,trait\nA,nan\n", s), validation_error);
    CHECK_THROWS_AS(load_dataset("DNA,trait\nA\n", s), validation_error);
    CHECK_THROWS_AS(load_dataset("trait,DNA\n1.0,A\n", s), validation_error);
  }
}

TEST_CASE("datasets round-trip through the table writer") {
  Schema s = parse_schema(kDnaTraitSchema);
  Dataset d = load_dataset("DNA,trait\nG,3.7\nC,0.1000000000000001\nT,-2\n", s);
  Dataset r = load_dataset(dataset_to_table(d), s);
  REQUIRE(r.n == d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    CHECK(r.code(i, 0) == d.code(i, 0));
    CHECK(r.value(i, 1) == d.value(i, 1));  // exact: %.17g serialization
  }
}

TEST_CASE("categorical encodings are exact one-hot vectors") {
  Schema s = meld::testing::cat_schema(3, 4);
  Dataset d = meld::testing::dataset_from_codes(s, {{0, 1, 2}, {3, 3, 3}, {2, 0, 1}});
  for (std::size_t i = 0; i < d.n; ++i)
    for (int j = 0; j < s.p(); ++j) {
      Eigen::VectorXd b = d.encoded(i, j);
      CHECK(b.sum() == 1.0);
      CHECK(b.maxCoeff() == 1.0);
      CHECK(b.minCoeff() == 0.0);
      CHECK(b[d.code(i, j)] == 1.0);  // decode recovers the level
    }
}
