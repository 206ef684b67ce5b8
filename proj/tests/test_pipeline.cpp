#include <doctest.h>

#include "isomush/error.hpp"
#include "isomush/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace isomush;
namespace ts = testing_support;

TEST_CASE("configuration JSON round trip") {
  RunConfig config;
  config.basis = 12;
  config.universe = 40;
  config.seed = 99;
  config.shapes = {"a.off", "b.off"};
  nlohmann::json j = config;
  RunConfig back;
  from_json(j, back);
  CHECK(back.basis == 12);
  CHECK(back.universe == 40);
  CHECK(back.seed == 99);
  CHECK(back.shapes == config.shapes);
  CHECK(back.epsilon == config.epsilon);
}

TEST_CASE("configuration errors") {
  RunConfig config;
  CHECK_THROWS_AS(from_json(nlohmann::json{{"bogus", 1}}, config), Error);
  CHECK_THROWS_AS(from_json(nlohmann::json{{"basis", "ten"}}, config), Error);
  CHECK_THROWS_AS(from_json(nlohmann::json::array(), config), Error);

  RunConfig bad;
  bad.basis = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = RunConfig{};
  bad.map_cols = 5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = RunConfig{};
  bad.epsilon = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  RunConfig{}.validate();
  CHECK(RunConfig{}.resolved_map_cols() == 30);
}

TEST_CASE("universe size resolution") {
  const std::vector<Shape> shapes = {ts::regular_tetrahedron(), ts::icosahedron()};
  RunConfig config;
  CHECK(resolve_universe_size(shapes, config) == 12);
  config.universe = 20;
  CHECK(resolve_universe_size(shapes, config) == 20);
  config.universe = 5;
  CHECK_THROWS_AS(resolve_universe_size(shapes, config), Error);
}

TEST_CASE("matching relabelled rigid copies recovers the relabelling") {
  ts::Rng rng(3);
  const Shape base = ts::bumpy_sphere(10, 14, 41);
  std::vector<Shape> shapes = {base};
  std::vector<std::vector<int>> truth = {{}};
  for (int i = 1; i < 3; ++i) {
    auto copy = ts::permuted_rigid_copy(base, rng);
    truth.push_back(copy.map);
    shapes.push_back(std::move(copy.shape));
  }
  RunConfig config;
  config.basis = 20;
  const auto out = match_shapes(shapes, config);
  CHECK(out.state.U.is_valid());
  CHECK(out.timings.count("optimise") == 1);
  CHECK(out.pairwise.size() == 3);
  for (std::size_t t = 1; t < out.state.trace.size(); ++t) {
    CHECK(out.state.trace[t].objective >= out.state.trace[t - 1].objective * (1.0 - 1e-9));
  }
  for (int i = 1; i < 3; ++i) CHECK(pairwise_from_universe(out.state.U, 0, i).match == truth[i]);
}

TEST_CASE("matching needs two shapes") {
  RunConfig config;
  config.basis = 4;
  config.init_basis = 4;
  CHECK_THROWS_AS(match_shapes({ts::icosahedron()}, config), Error);
}
