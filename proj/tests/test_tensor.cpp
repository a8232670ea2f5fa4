#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fd_check.hpp"
#include "pathgat/tensor.hpp"

using namespace pathgat;
using pathgat::testing::fd_gradient_check;
using pathgat::testing::random_values;

TEST_CASE("matmul basics") {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor id = Tensor::identity(2);
  Tensor r = matmul(id, a);
  CHECK(r.data() == std::vector<double>{1, 2, 3, 4});

  Tensor row({1, 2}, {1, 2});
  Tensor col({2, 1}, {3, 4});
  CHECK(matmul(row, col).value() == doctest::Approx(11.0));

  CHECK_THROWS_AS(matmul(Tensor({1, 2}, {1, 2}), Tensor({3, 1}, {1, 2, 3})), ShapeError);
  try {
    matmul(Tensor({1, 2}, {1, 2}), Tensor({3, 1}, {1, 2, 3}));
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[1x2]") != std::string::npos);
    CHECK(msg.find("[3x1]") != std::string::npos);
  }
}

TEST_CASE("matmul gradient vs finite differences") {
  std::mt19937_64 rng(7);
  Tape tape;
  std::vector<Tensor> params = {Tensor::param({3, 4}, random_values(12, rng), tape),
                                Tensor::param({4, 2}, random_values(8, rng), tape)};
  auto report = fd_gradient_check(tape, params, [&] { return sum(matmul(params[0], params[1])); });
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("leaky_relu values and gradient") {
  Tensor x({2}, {1.0, -1.0});
  Tensor y = leaky_relu(x, 0.2);
  CHECK(y.at(0) == doctest::Approx(1.0));
  CHECK(y.at(1) == doctest::Approx(-0.2));
  CHECK(leaky_relu(Tensor({1}, {0.0}), 0.2).at(0) == 0.0);

  Tape tape;
  std::vector<Tensor> params = {Tensor::param({2}, {-3.0, 5.0}, tape)};
  tape.backward(sum(leaky_relu(params[0], 0.2)));
  CHECK(params[0].grad()[0] == doctest::Approx(0.2));
  CHECK(params[0].grad()[1] == doctest::Approx(1.0));
  auto report = fd_gradient_check(tape, params, [&] { return sum(leaky_relu(params[0], 0.2)); });
  CHECK(report.max_rel_error < 1e-4);

  CHECK_THROWS(leaky_relu(x, 0.0));
  CHECK_THROWS(leaky_relu(x, 1.5));
}

TEST_CASE("masked_softmax values") {
  Tensor zeros = Tensor::zeros({2, 2});
  Tensor all = Tensor::full({2, 2}, 1.0);
  Tensor r = masked_softmax(zeros, all);
  for (double v : r.data()) CHECK(v == doctest::Approx(0.5));

  // single permitted neighbor wins regardless of score
  Tensor scores({1, 2}, {-100.0, 100.0});
  Tensor mask({1, 2}, {1.0, 0.0});
  Tensor one = masked_softmax(scores, mask);
  CHECK(one.at(0, 0) == doctest::Approx(1.0));
  CHECK(one.at(0, 1) == 0.0);

  // frozen from the direct exp-normalization oracle below
  Tensor s123({1, 3}, {1, 2, 3});
  Tensor full = Tensor::full({1, 3}, 1.0);
  Tensor out = masked_softmax(s123, full);
  double e1 = std::exp(1.0), e2 = std::exp(2.0), e3 = std::exp(3.0);
  double z = e1 + e2 + e3;
  CHECK(out.at(0, 0) == doctest::Approx(e1 / z).epsilon(1e-12));
  CHECK(out.at(0, 0) == doctest::Approx(0.0900).epsilon(1e-3));
  CHECK(out.at(0, 1) == doctest::Approx(0.2447).epsilon(1e-3));
  CHECK(out.at(0, 2) == doctest::Approx(0.6652).epsilon(1e-3));
}

TEST_CASE("masked_softmax row properties") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor scores({4, 4}, random_values(16, rng));
    std::vector<double> m(16);
    std::bernoulli_distribution flip(0.5);
    for (auto& v : m) v = flip(rng) ? 1.0 : 0.0;
    Tensor mask({4, 4}, m);
    Tensor out = masked_softmax(scores, mask);
    for (std::size_t i = 0; i < 4; ++i) {
      double row_sum = 0.0;
      int permitted = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        if (mask.at(i, j) == 0.0) {
          // bit-exact zero at masked entries
          CHECK(out.at(i, j) == 0.0);
        } else {
          ++permitted;
        }
        row_sum += out.at(i, j);
      }
      if (permitted > 0)
        CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-9));
      else
        CHECK(row_sum == 0.0);
    }
  }
}

TEST_CASE("masked_softmax gradient vs finite differences") {
  std::mt19937_64 rng(13);
  Tensor mask({3, 3}, {1, 1, 0, 0, 1, 1, 1, 1, 1});
  Tensor weight({3, 3}, random_values(9, rng));
  Tape tape;
  std::vector<Tensor> params = {Tensor::param({3, 3}, random_values(9, rng), tape)};
  auto report = fd_gradient_check(tape, params, [&] {
    return sum(multiply(masked_softmax(params[0], mask), weight));
  });
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("tanh_act values and gradient") {
  CHECK(tanh_act(Tensor({1}, {0.0})).at(0) == 0.0);
  CHECK(tanh_act(Tensor({1}, {1e6})).at(0) == doctest::Approx(1.0).epsilon(1e-12));

  Tape tape;
  std::vector<Tensor> params = {Tensor::param({1}, {0.5}, tape)};
  tape.backward(sum(tanh_act(params[0])));
  const double expected = 1.0 - std::tanh(0.5) * std::tanh(0.5);
  CHECK(params[0].grad()[0] == doctest::Approx(expected).epsilon(1e-10));
  CHECK(params[0].grad()[0] == doctest::Approx(0.7864).epsilon(1e-3));
  auto report = fd_gradient_check(tape, params, [&] { return sum(tanh_act(params[0])); });
  CHECK(report.max_rel_error < 1e-4);
}

TEST_CASE("backward basics") {
  Tape tape;
  Tensor w = Tensor::param({3}, {1, 2, 3}, tape);
  tape.backward(sum(w));
  CHECK(w.grad() == std::vector<double>{1, 1, 1});

  Tape tape2;
  Tensor w2 = Tensor::param({2}, {1, 2}, tape2);
  tape2.backward(sum(multiply(w2, w2)));
  CHECK(w2.grad() == std::vector<double>{2, 4});

  // unreachable parameters keep zero gradients
  Tape tape3;
  Tensor used = Tensor::param({2}, {1, 1}, tape3);
  Tensor unused = Tensor::param({2}, {5, 5}, tape3);
  tape3.backward(sum(used));
  CHECK(unused.grad() == std::vector<double>{0, 0});

  CHECK_THROWS(tape.backward(Tensor({2}, {1, 2})));
}

TEST_CASE("primitive gradient suite on random inputs") {
  std::mt19937_64 rng(101);
  for (int draw = 0; draw < 20; ++draw) {
    Tape tape;
    std::vector<Tensor> params = {Tensor::param({2, 3}, random_values(6, rng), tape),
                                  Tensor::param({2, 3}, random_values(6, rng), tape),
                                  Tensor::param({3, 2}, random_values(6, rng), tape)};
    Tensor c({2, 3}, random_values(6, rng));
    auto build = [&] {
      Tensor s = add(params[0], params[1]);
      s = multiply(s, c);
      s = sub(s, scale(params[1], 0.5));
      Tensor t = transpose(matmul(s, params[2]));              // 2x2
      Tensor cat = concat({s, t});                             // 2x5
      Tensor first = slice_rows(reshape(cat, {5, 2}), 1, 4);
      Tensor m = mean(leaky_relu(cat, 0.3));
      Tensor n = sum(tanh_act(first));
      return add(m, n);                                        // scalar + scalar
    };
    auto report = fd_gradient_check(tape, params, build);
    CHECK(report.max_rel_error < 1e-4);
  }
}

TEST_CASE("scalar broadcast add") {
  Tensor a({2, 2}, {1, 2, 3, 4});
  Tensor s = Tensor::scalar(10.0);
  CHECK(add(a, s).data() == std::vector<double>{11, 12, 13, 14});

  Tape tape;
  std::vector<Tensor> params = {Tensor::param({1}, {0.5}, tape)};
  auto report = fd_gradient_check(tape, params, [&] { return sum(add(a, params[0])); });
  CHECK(report.max_rel_error < 1e-4);

  // row-vector broadcast
  Tensor row({1, 2}, {10, 20});
  CHECK(add(a, row).data() == std::vector<double>{11, 22, 13, 24});
}

TEST_CASE("dropout semantics") {
  std::mt19937_64 rng(5);
  Tensor x({4}, {1, 2, 3, 4});

  // p=0 and eval mode are identities
  CHECK(dropout(x, 0.0, true, rng).data() == x.data());
  CHECK(dropout(x, 0.9, false, rng).data() == x.data());

  // same seed gives bit-identical masks
  std::mt19937_64 r1(42), r2(42);
  Tensor a = dropout(x, 0.5, true, r1);
  Tensor b = dropout(x, 0.5, true, r2);
  CHECK(a.data() == b.data());

  // surviving entries scale by 1/(1-p)
  for (std::size_t i = 0; i < 4; ++i)
    CHECK((a.at(i) == 0.0 || a.at(i) == doctest::Approx(x.at(i) * 2.0)));

  CHECK_THROWS(dropout(x, 1.0, true, rng));

  // gradient flows through the same mask
  Tape tape;
  std::vector<Tensor> params = {Tensor::param({4}, {1, 2, 3, 4}, tape)};
  std::mt19937_64 r3(42);
  tape.backward(sum(dropout(params[0], 0.5, true, r3)));
  std::mt19937_64 r4(42);
  Tensor mask_ref = dropout(x, 0.5, true, r4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(params[0].grad()[i] == doctest::Approx(mask_ref.at(i) == 0.0 ? 0.0 : 2.0));
}

TEST_CASE("determinism of forward and backward") {
  auto run = [] {
    std::mt19937_64 rng(99);
    Tape tape;
    Tensor w = Tensor::param({3, 3}, pathgat::testing::random_values(9, rng), tape);
    Tensor x({3, 3}, pathgat::testing::random_values(9, rng));
    Tensor out = masked_softmax(matmul(w, x), Tensor::full({3, 3}, 1.0));
    Tensor loss = mean(multiply(out, out));
    tape.backward(loss);
    auto g = w.grad();
    g.push_back(loss.value());
    return g;
  };
  CHECK(run() == run());
}

TEST_CASE("tape clear frees records") {
  Tape tape;
  Tensor w = Tensor::param({2}, {1, 2}, tape);
  sum(multiply(w, w));
  CHECK(tape.size() == 2);
  tape.clear();
  CHECK(tape.size() == 0);
}
