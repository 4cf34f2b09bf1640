#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mssd/adam.hpp"
#include "mssd/ops.hpp"

using namespace mssd;

TEST_CASE("one step on f(w) = w^2 moves downhill") {
    Tensor w = Tensor::scalar(1.0);
    std::vector<Param> params{{"w", &w}};
    Adam opt(AdamConfig{0.1, 0.9, 0.999, 1e-8});

    GradTape tape;
    tape.watch(w);
    Tensor loss = ops::mul(&tape, w, w);
    Gradients grads = tape.backward(loss);
    opt.step(params, grads);
    CHECK(w.item() < 1.0);
    CHECK(w.item() > 0.0);
}

TEST_CASE("zero gradient leaves parameters unchanged") {
    Tensor w = Tensor::from({3}, {1.0, -2.0, 3.0});
    Tensor unused = w.detached();
    std::vector<Param> params{{"w", &w}};
    Adam opt;

    GradTape tape;
    tape.watch(w);
    Tensor c = Tensor::from({3}, {7.0, 7.0, 7.0});
    tape.watch(c);
    Tensor loss = ops::mean_all(&tape, c); // w is never used
    Gradients grads = tape.backward(loss);
    opt.step(params, grads);
    for (std::size_t i = 0; i < 3; ++i) CHECK(w.at(i) == unused.at(i));
}

TEST_CASE("200 steps reach the closed-form minimizer of a convex quadratic") {
    // f(w) = sum_i a_i (w_i - c_i)^2, minimizer w* = c
    const std::vector<double> a{1.0, 2.5, 0.5};
    const std::vector<double> c{0.3, -0.7, 1.2};
    Tensor w = Tensor::zeros({3});
    std::vector<Param> params{{"w", &w}};
    Adam opt(AdamConfig{0.05, 0.9, 0.999, 1e-8});

    for (int step = 0; step < 200; ++step) {
        GradTape tape;
        tape.watch(w);
        Tensor diff = ops::sub(&tape, w, Tensor::from({3}, c));
        Tensor sq = ops::mul(&tape, diff, diff);
        Tensor weighted = ops::mul(&tape, sq, Tensor::from({3}, a));
        Tensor loss = ops::scale(&tape, ops::mean_all(&tape, weighted), 3.0);
        Gradients grads = tape.backward(loss);
        opt.step(params, grads);
    }
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w.at(i) - c[i]) < 1e-3);
}

TEST_CASE("state shape mismatch is rejected") {
    Tensor w = Tensor::zeros({2});
    std::vector<Param> params{{"w", &w}};
    Adam opt;
    GradTape tape;
    tape.watch(w);
    Tensor loss = ops::mean_all(&tape, w);
    Gradients grads = tape.backward(loss);
    opt.step(params, grads);

    Tensor other = Tensor::zeros({5});
    std::vector<Param> wrong{{"w", &other}};
    GradTape tape2;
    tape2.watch(other);
    Tensor loss2 = ops::mean_all(&tape2, other);
    Gradients grads2 = tape2.backward(loss2);
    CHECK_THROWS_AS(opt.step(wrong, grads2), ContractError);
}
