#include <doctest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "fnd/checkpoint.hpp"
#include "support.hpp"

using namespace fnd;

namespace {

bool same_bits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("checkpoint round-trips every bit") {
  std::mt19937_64 rng(5);
  Checkpoint ck;
  ck.params = nn::ModelParams<double>(4, 7, 16, 64);
  ck.params.estimator.initialize(rng);
  ck.params.classifier.initialize(rng);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto* p : ck.params.parameters()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) p->value.data()[i] = u(rng) * 1e-300 * (i % 2 ? 1 : 1e300);
    p->grad = p->value * 3.0;
  }
  ck.params.parameters()[0]->value(0, 0) = -0.0;
  ck.params.parameters()[1]->value(0, 0) = std::numeric_limits<double>::denorm_min();
  for (auto* p : ck.params.parameters()) {
    ck.params.adam.m.push_back(p->value * 0.1);
    ck.params.adam.v.push_back(p->value.cwiseAbs2());
  }
  ck.params.adam.step = 123;
  ck.meta = {{"best_epoch", "17"}, {"seed", "3"}};

  const auto dir = testing::temp_dir("checkpoint");
  save_checkpoint(ck, dir / "a.txt");
  const Checkpoint back = load_checkpoint(dir / "a.txt");
  CHECK(back.meta == ck.meta);
  CHECK(back.params.adam.step == 123);
  const auto p1 = ck.params.parameters();
  const auto p2 = back.params.parameters();
  REQUIRE(p1.size() == p2.size());
  for (std::size_t k = 0; k < p1.size(); ++k) {
    CHECK(p1[k]->name == p2[k]->name);
    CHECK(same_bits(p1[k]->value, p2[k]->value));
    CHECK(same_bits(ck.params.adam.m[k], back.params.adam.m[k]));
    CHECK(same_bits(ck.params.adam.v[k], back.params.adam.v[k]));
  }
  save_checkpoint(back, dir / "b.txt");
  std::ifstream fa(dir / "a.txt"), fb(dir / "b.txt");
  CHECK(std::string(std::istreambuf_iterator<char>(fa), {}) == std::string(std::istreambuf_iterator<char>(fb), {}));
}

TEST_CASE("checkpoint errors") {
  const auto dir = testing::temp_dir("checkpoint-bad");
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.txt"), CheckpointError);
  std::ofstream(dir / "junk.txt") << "not a checkpoint\n";
  CHECK_THROWS_AS(load_checkpoint(dir / "junk.txt"), CheckpointError);
}
