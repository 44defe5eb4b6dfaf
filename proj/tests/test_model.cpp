#include <doctest.h>

#include "testutil.hpp"
#include "tmboson/model.hpp"

using namespace tmb;

TEST_CASE("allowed_q lists the lowest-weight labels in ascending order") {
  CHECK(allowed_q(1) == std::vector<Rational>{Rational(1)});
  CHECK(allowed_q(2) == std::vector<Rational>{Rational(1, 4), Rational(3, 4)});
  CHECK(allowed_q(3) == std::vector<Rational>{Rational(1, 9), Rational(4, 9), Rational(7, 9)});
  CHECK_THROWS_AS(allowed_q(0), std::invalid_argument);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("-1/2") == Rational(-1, 2));
  CHECK(parse_rational("5") == Rational(5));
  CHECK(!parse_rational("1/0"));
  CHECK(!parse_rational("a/b"));
  CHECK(!parse_rational("1.5"));
  CHECK(to_string(Rational(3, 4)) == "3/4");
  CHECK(to_string(Rational(7)) == "7");
}

TEST_CASE("block_from_quanta inverts the occupation map") {
  ModelParams m11{1, 1, 0, 0, 0, 0, 0, 0};
  auto [l0, n0] = block_from_quanta(m11, 0, 0);
  CHECK(l0.M == 0);
  CHECK(l0.delta1 == 0);
  CHECK(l0.delta2 == 0);
  CHECK(n0 == 0);

  ModelParams m21{2, 1, 0, 0, 0, 0, 0, 0};
  auto [l1, n1] = block_from_quanta(m21, 3, 2);
  CHECK(l1.M == 3);
  CHECK(l1.delta1 == 1);
  CHECK(l1.delta2 == 0);
  CHECK(n1 == 1);

  ModelParams m33{3, 3, 0, 0, 0, 0, 0, 0};
  auto [l2, n2] = block_from_quanta(m33, 7, 5);
  CHECK(l2.M == 3);
  CHECK(l2.delta1 == 1);
  CHECK(l2.delta2 == 2);
  CHECK(n2 == 2);
}

TEST_CASE("block_states matches the occupation ladder and conserves the charge") {
  ModelParams m11{1, 1, 0, 0, 0, 0, 0, 0};
  CHECK(block_states(m11, {1, 0, 0}) ==
        std::vector<std::pair<long long, long long>>{{0, 1}, {1, 0}});

  ModelParams m21{2, 1, 0, 0, 0, 0, 0, 0};
  CHECK(block_states(m21, {2, 1, 0}) ==
        std::vector<std::pair<long long, long long>>{{1, 2}, {3, 1}, {5, 0}});

  // round trip and constant charge across every desk-scale block
  testutil::for_each_block(3, 6, [](int s, int r, const BlockLabel& label) {
    ModelParams m{s, r, 0, 0, 0, 0, 0, 0};
    const long long k = block_charge(m, label);
    const auto states = block_states(m, label);
    for (int n = 0; n < static_cast<int>(states.size()); ++n) {
      const auto [n1, n2] = states[static_cast<size_t>(n)];
      CHECK(r * n1 + s * n2 == k);
      const auto [back, idx] = block_from_quanta(m, n1, n2);
      CHECK(back.M == label.M);
      CHECK(back.delta1 == label.delta1);
      CHECK(back.delta2 == label.delta2);
      CHECK(idx == n);
    }
  });
}

TEST_CASE("blocks_for_charge enumerates exactly the blocks with that charge") {
  ModelParams m{2, 2, 0, 0, 0, 0, 0, 0};
  const auto blocks = blocks_for_charge(m, 10);
  CHECK(!blocks.empty());
  for (const auto& label : blocks) CHECK(block_charge(m, label) == 10);
  // charge 1 with s = r = 2 cannot be realized
  CHECK(blocks_for_charge(m, 1).empty());
}

TEST_CASE("derived rational labels") {
  ModelParams m{2, 1, 0, 0, 0, 0, 0, 0};
  BlockLabel label{1, 0, 0};
  CHECK(q1_of(m, label) == Rational(1, 4));
  CHECK(q2_of(m, label) == Rational(1));
  CHECK(l_of(m, label) == Rational(9, 8));
  CHECK_THROWS_AS(validate_label(m, BlockLabel{1, 2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_label(m, BlockLabel{-1, 0, 0}), std::invalid_argument);
  const ModelParams degenerate{0, 1};
  CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);
}
