#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mssd/ops.hpp"
#include "oracles.hpp"

using namespace mssd;

namespace {
std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}
} // namespace

TEST_CASE("conv1d impulse response of a causal sum filter") {
    Tensor x = Tensor::from({1, 5}, {0, 0, 1, 0, 0});
    Tensor w = Tensor::from({1, 1, 2}, {1, 1});
    Tensor b = Tensor::zeros({1});
    Tensor y = ops::conv1d(nullptr, x, w, b, 1, 1, true);
    REQUIRE(y.shape() == Shape{1, 5});
    const std::vector<double> expected{0, 0, 1, 1, 0};
    for (std::size_t i = 0; i < 5; ++i) CHECK(y.at(i) == expected[i]);
}

TEST_CASE("conv1d compressing length 96 by kernel=stride=3") {
    std::mt19937_64 rng(1);
    Tensor x = Tensor::from({1, 96}, random_vec(96, rng));
    Tensor w = Tensor::from({1, 1, 3}, {0.5, 1.0, -0.25});
    Tensor b = Tensor::zeros({1});
    Tensor y = ops::conv1d(nullptr, x, w, b, 3, 1, false);
    CHECK(y.dim(1) == 32);
}

TEST_CASE("conv1d dilated causal sum") {
    Tensor x = Tensor::from({1, 8}, {1, 2, 3, 4, 5, 6, 7, 8});
    Tensor w = Tensor::from({1, 1, 2}, {1, 1});
    Tensor b = Tensor::zeros({1});
    Tensor y = ops::conv1d(nullptr, x, w, b, 1, 4, true);
    const std::vector<double> expected{1, 2, 3, 4, 6, 8, 10, 12};
    REQUIRE(y.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(y.at(i) == expected[i]);

    // against the padded-loop reference
    std::size_t out_len = 0;
    auto ref = oracles::conv1d_reference(x.to_vector(), 1, 8, w.to_vector(), 1, 2,
                                         b.to_vector(), 1, 4, true, out_len);
    REQUIRE(out_len == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(y.at(i) == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("conv1d matches the direct-loop reference on random inputs") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t c_in = 1 + rng() % 3;
        const std::size_t c_out = 1 + rng() % 3;
        const std::size_t len = 6 + rng() % 10;
        const std::size_t kernel = 1 + rng() % 3;
        const int stride = 1 + static_cast<int>(rng() % 3);
        const int dilation = 1 + static_cast<int>(rng() % 2);
        const bool causal = (rng() % 2) == 0;
        if (!causal && static_cast<std::size_t>(dilation) * (kernel - 1) + 1 > len) continue;

        auto xv = random_vec(c_in * len, rng);
        auto wv = random_vec(c_out * c_in * kernel, rng);
        auto bv = random_vec(c_out, rng);
        Tensor y = ops::conv1d(nullptr, Tensor::from({c_in, len}, xv),
                               Tensor::from({c_out, c_in, kernel}, wv),
                               Tensor::from({c_out}, bv), stride, dilation, causal);
        std::size_t out_len = 0;
        auto ref = oracles::conv1d_reference(xv, c_in, len, wv, c_out, kernel, bv, stride,
                                             dilation, causal, out_len);
        REQUIRE(y.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK(std::abs(y.at(i) - ref[i]) < 1e-12);
    }
}

TEST_CASE("conv1d error paths") {
    Tensor x = Tensor::from({1, 4}, {1, 2, 3, 4});
    Tensor w = Tensor::from({1, 2, 2}, {1, 1, 1, 1}); // expects 2 input channels
    Tensor b = Tensor::zeros({1});
    CHECK_THROWS_AS(ops::conv1d(nullptr, x, w, b, 1, 1, true), ShapeError);

    Tensor w1 = Tensor::from({1, 1, 3}, {1, 1, 1});
    CHECK_THROWS_AS(ops::conv1d(nullptr, x, w1, b, 1, 2, false), ShapeError); // span 5 > 4
    CHECK_THROWS_AS(ops::conv1d(nullptr, x, w1, b, 0, 1, true), ContractError);
    CHECK_THROWS_AS(ops::conv1d(nullptr, x, w1, b, 1, 0, true), ContractError);
}

TEST_CASE("conv2d identity kernel leaves the input unchanged") {
    Tensor x = Tensor::full({1, 3, 3}, 1.0);
    Tensor w = Tensor::from({1, 1, 1, 1}, {1.0});
    Tensor b = Tensor::zeros({1});
    Tensor y = ops::conv2d(nullptr, x, w, b, ops::Pad2d::Valid);
    REQUIRE(y.shape() == Shape{1, 3, 3});
    for (std::size_t i = 0; i < 9; ++i) CHECK(y.at(i) == 1.0);
}

TEST_CASE("conv2d constant field") {
    Tensor x = Tensor::full({1, 4, 4}, 1.0);
    Tensor w = Tensor::full({1, 1, 2, 2}, 1.0);
    Tensor b = Tensor::zeros({1});
    Tensor y = ops::conv2d(nullptr, x, w, b, ops::Pad2d::Valid);
    REQUIRE(y.shape() == Shape{1, 3, 3});
    for (std::size_t i = 0; i < 9; ++i) CHECK(y.at(i) == 4.0);
}

TEST_CASE("conv2d matches the nested-loop reference") {
    std::mt19937_64 rng(3);
    auto xv = random_vec(2 * 5 * 5, rng);
    auto wv = random_vec(3 * 2 * 2 * 2, rng);
    auto bv = random_vec(3, rng);
    for (bool same : {false, true}) {
        Tensor y = ops::conv2d(nullptr, Tensor::from({2, 5, 5}, xv),
                               Tensor::from({3, 2, 2, 2}, wv), Tensor::from({3}, bv),
                               same ? ops::Pad2d::Same : ops::Pad2d::Valid);
        std::size_t oh = 0, ow = 0;
        auto ref = oracles::conv2d_reference(xv, 2, 5, 5, wv, 3, 2, 2, bv, same, oh, ow);
        REQUIRE(y.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(y.at(i) - ref[i]) < 1e-12);
    }
    CHECK_THROWS_AS(ops::conv2d(nullptr, Tensor::zeros({1, 3, 3}),
                                Tensor::zeros({1, 2, 2, 2}), Tensor::zeros({1}),
                                ops::Pad2d::Valid),
                    ShapeError);
}

TEST_CASE("conv2d same padding preserves height and width") {
    std::mt19937_64 rng(4);
    Tensor x = Tensor::from({2, 4, 6}, random_vec(48, rng));
    Tensor w = Tensor::from({2, 2, 3, 3}, random_vec(36, rng));
    Tensor b = Tensor::zeros({2});
    Tensor y = ops::conv2d(nullptr, x, w, b, ops::Pad2d::Same);
    CHECK(y.shape() == Shape{2, 4, 6});
}

TEST_CASE("linear identity and hand examples") {
    Tensor eye = Tensor::from({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    Tensor x = Tensor::from({3}, {1, 2, 3});
    Tensor y = ops::linear(nullptr, x, eye, Tensor::zeros({3}));
    for (std::size_t i = 0; i < 3; ++i) CHECK(y.at(i) == x.at(i));

    Tensor w = Tensor::from({2, 2}, {2, 0, 0, 2});
    Tensor out = ops::linear(nullptr, Tensor::from({2}, {3, 4}), w, Tensor::from({2}, {1, 1}));
    CHECK(out.at(0) == 7.0);
    CHECK(out.at(1) == 9.0);
}

TEST_CASE("linear matches the triple-loop oracle") {
    std::mt19937_64 rng(5);
    auto xv = random_vec(8, rng);
    auto wv = random_vec(4 * 8, rng);
    auto bv = random_vec(4, rng);
    Tensor y = ops::linear(nullptr, Tensor::from({8}, xv), Tensor::from({4, 8}, wv),
                           Tensor::from({4}, bv));
    auto ref = oracles::linear_reference(xv, wv, bv, 4, 8);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(y.at(i) - ref[i]) < 1e-12);

    CHECK_THROWS_AS(ops::linear(nullptr, Tensor::zeros({3}), Tensor::zeros({4, 8}),
                                Tensor::zeros({4})),
                    ShapeError);
}

TEST_CASE("layer_norm standardizes per position") {
    Tensor gain = Tensor::full({2}, 1.0);
    Tensor shift = Tensor::zeros({2});

    // constant input: zero variance, output pinned to the shift
    Tensor constant = Tensor::full({2, 3}, 5.0);
    Tensor y = ops::layer_norm(nullptr, constant, gain, shift);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.at(i) == doctest::Approx(0.0));

    // two channels [1, 3] standardize to [-1, 1] under population variance
    Tensor two = Tensor::from({2, 1}, {1.0, 3.0});
    Tensor z = ops::layer_norm(nullptr, two, gain, shift, 1e-12);
    CHECK(z.at(0) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(z.at(1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("layer_norm moments recomputed directly") {
    std::mt19937_64 rng(6);
    const std::size_t c = 5, len = 7;
    Tensor x = Tensor::from({c, len}, random_vec(c * len, rng));
    Tensor y = ops::layer_norm(nullptr, x, Tensor::full({c}, 1.0), Tensor::zeros({c}), 1e-10);
    for (std::size_t t = 0; t < len; ++t) {
        double mean = 0.0, var = 0.0;
        for (std::size_t ch = 0; ch < c; ++ch) mean += y.at(ch * len + t);
        mean /= static_cast<double>(c);
        for (std::size_t ch = 0; ch < c; ++ch) {
            const double d = y.at(ch * len + t) - mean;
            var += d * d;
        }
        var /= static_cast<double>(c);
        CHECK(std::abs(mean) < 1e-10);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("elementwise examples") {
    Tensor x = Tensor::from({2}, {1.0, -2.0});
    CHECK(ops::mse_loss(nullptr, x, x).item() == 0.0);
    CHECK(ops::mse_loss(nullptr, Tensor::from({2}, {0, 0}), Tensor::from({2}, {1, 1})).item() ==
          1.0);
    Tensor r = ops::relu(nullptr, x);
    CHECK(r.at(0) == 1.0);
    CHECK(r.at(1) == 0.0);
    CHECK_THROWS_AS(ops::add(nullptr, x, Tensor::zeros({3})), ShapeError);
}

TEST_CASE("reshape preserves row-major order and element count") {
    std::vector<double> data(12);
    for (std::size_t i = 0; i < 12; ++i) data[i] = static_cast<double>(i);
    Tensor a = Tensor::from({2, 6}, data);
    Tensor b = ops::reshape(nullptr, a, {3, 4});
    REQUIRE(b.shape() == Shape{3, 4});
    for (std::size_t i = 0; i < 12; ++i) CHECK(b.at(i) == data[i]);

    // reshape composed with its inverse is the identity
    Tensor back = ops::reshape(nullptr, b, {2, 6});
    for (std::size_t i = 0; i < 12; ++i) CHECK(back.at(i) == a.at(i));
}

TEST_CASE("concat then slice recovers the originals") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t rows = 1 + rng() % 3;
        const std::size_t n1 = 1 + rng() % 4;
        const std::size_t n2 = 1 + rng() % 4;
        Tensor a = Tensor::from({rows, n1}, random_vec(rows * n1, rng));
        Tensor b = Tensor::from({rows, n2}, random_vec(rows * n2, rng));
        Tensor joined = ops::concat(nullptr, {a, b}, 1);
        REQUIRE(joined.shape() == Shape{rows, n1 + n2});
        Tensor a2 = ops::slice_last(nullptr, joined, 0, n1);
        Tensor b2 = ops::slice_last(nullptr, joined, n1, n2);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a2.at(i) == a.at(i));
        for (std::size_t i = 0; i < b.size(); ++i) CHECK(b2.at(i) == b.at(i));
    }
    CHECK_THROWS_AS(ops::concat(nullptr, {Tensor::zeros({2, 2}), Tensor::zeros({3, 2})}, 1),
                    ShapeError);
}

TEST_CASE("concat along the leading axis") {
    Tensor a = Tensor::from({2}, {1, 2});
    Tensor b = Tensor::from({3}, {3, 4, 5});
    Tensor j = ops::concat(nullptr, {a, b}, 0);
    REQUIRE(j.shape() == Shape{5});
    for (std::size_t i = 0; i < 5; ++i) CHECK(j.at(i) == static_cast<double>(i + 1));
}

TEST_CASE("pad1d and slice_last") {
    Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
    Tensor padded = ops::pad1d(nullptr, a, 1, 2);
    REQUIRE(padded.shape() == Shape{2, 5});
    CHECK(padded.at(0) == 0.0);
    CHECK(padded.at(1) == 1.0);
    CHECK(padded.at(2) == 2.0);
    CHECK(padded.at(3) == 0.0);
    CHECK(padded.at(5) == 0.0);
    CHECK(padded.at(6) == 3.0);
    Tensor back = ops::slice_last(nullptr, padded, 1, 2);
    for (std::size_t i = 0; i < 4; ++i) CHECK(back.at(i) == a.at(i));
}

TEST_CASE("gather and scatter are inverse on disjoint indices") {
    Tensor a = Tensor::from({5}, {10, 20, 30, 40, 50});
    Tensor g = ops::gather(nullptr, a, {4, 0, 2});
    REQUIRE(g.size() == 3);
    CHECK(g.at(0) == 50.0);
    CHECK(g.at(1) == 10.0);
    CHECK(g.at(2) == 30.0);
    Tensor s = ops::scatter_to(nullptr, g, {4, 0, 2}, 5);
    CHECK(s.at(0) == 10.0);
    CHECK(s.at(1) == 0.0);
    CHECK(s.at(2) == 30.0);
    CHECK(s.at(4) == 50.0);
    CHECK_THROWS_AS(ops::scatter_to(nullptr, g, {0, 0, 1}, 5), ContractError);
    CHECK_THROWS_AS(ops::gather(nullptr, a, {9}), ContractError);
}

TEST_CASE("dropout keeps expectation and handles p=0") {
    std::mt19937_64 rng(8);
    Tensor x = Tensor::full({1000}, 1.0);
    Tensor same = ops::dropout(nullptr, x, 0.0, rng);
    CHECK(same.same_buffer(x));
    Tensor dropped = ops::dropout(nullptr, x, 0.5, rng);
    double sum = 0.0;
    for (std::size_t i = 0; i < dropped.size(); ++i) sum += dropped.at(i);
    CHECK(sum / 1000.0 == doctest::Approx(1.0).epsilon(0.15));
    CHECK_THROWS_AS(ops::dropout(nullptr, x, 1.0, rng), ContractError);
}

TEST_CASE("add_scalar shifts every element") {
    Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
    Tensor s = Tensor::scalar(0.5);
    Tensor plus = ops::add_scalar(nullptr, a, s, 2.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(plus.at(i) == a.at(i) + 1.0);
    Tensor minus = ops::add_scalar(nullptr, a, s, -1.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(minus.at(i) == a.at(i) - 0.5);
    CHECK_THROWS_AS(ops::add_scalar(nullptr, a, Tensor::zeros({2}), 1.0), ShapeError);
}

TEST_CASE("mse and mean against direct recomputation") {
    std::mt19937_64 rng(9);
    auto av = random_vec(64, rng);
    auto bv = random_vec(64, rng);
    Tensor a = Tensor::from({8, 8}, av);
    Tensor b = Tensor::from({8, 8}, bv);
    CHECK(ops::mse_loss(nullptr, a, b).item() ==
          doctest::Approx(oracles::mse_reference(av, bv)).epsilon(1e-12));
    double mean = 0.0;
    for (double v : av) mean += v;
    mean /= 64.0;
    CHECK(ops::mean_all(nullptr, a).item() == doctest::Approx(mean).epsilon(1e-12));
}
