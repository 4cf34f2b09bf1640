#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "mssd/data.hpp"
#include "mssd/training.hpp"

using namespace mssd;

namespace {

MssdConfig tiny_model_config() {
    MssdConfig mc;
    mc.input_len = 48;
    mc.horizon = 24;
    mc.sdnet.channels = 4;
    mc.sdnet.tcn_layers = 1;
    mc.sdnet.kernel_scales = {2, 3};
    mc.sdnet.dropout = 0.0;
    return mc;
}

TrainConfig quick_train_config() {
    TrainConfig tc;
    tc.epochs = 8;
    tc.batch_size = 16;
    tc.lr = 5e-3;
    tc.patience = 8;
    tc.seed = 42;
    return tc;
}

} // namespace

TEST_CASE("chronological split covers the series in order") {
    Splits s = chronological_split(100, {0.7, 0.1, 0.2}, 5);
    CHECK(s.train.begin == 0);
    CHECK(s.train.end == 70);
    CHECK(s.val.begin == 70);
    CHECK(s.val.end == 80);
    CHECK(s.test.begin == 80);
    CHECK(s.test.end == 100);

    CHECK_THROWS_AS(chronological_split(100, {1.0, 0.0, 0.0}, 5), ConfigError);
    CHECK_THROWS_AS(chronological_split(100, {0.5, 0.2, 0.2}, 5), ConfigError);
    CHECK_THROWS_AS(chronological_split(30, {0.7, 0.1, 0.2}, 10), ConfigError);
}

TEST_CASE("window coverage matches the closed form") {
    const WindowSpec spec{96, 24, 1};
    const PeriodSpec period = make_period_spec(1);
    for (std::size_t test_len : {120u, 121u, 200u, 500u}) {
        Range range{1000, 1000 + test_len};
        auto windows = make_windows(range, spec, period, 0);
        const std::size_t expected =
            test_len >= 120 ? test_len - spec.input_len - spec.horizon + 1 : 0;
        CHECK(windows.size() == expected);
    }
    CHECK(make_windows({0, 100}, spec, period, 0).empty());
}

TEST_CASE("single window when the range is exactly I+O") {
    const WindowSpec spec{96, 24, 1};
    auto windows = make_windows({10, 130}, spec, make_period_spec(1), 0);
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].start == 10);
}

TEST_CASE("stride 1 and length I+O+4 give 5 windows") {
    const WindowSpec spec{96, 24, 1};
    auto windows = make_windows({0, 124}, spec, make_period_spec(1), 0);
    CHECK(windows.size() == 5);
}

TEST_CASE("window offsets advance by stride modulo the period") {
    const WindowSpec spec{48, 24, 3};
    const PeriodSpec period = make_period_spec(1);
    const int base = 7;
    auto windows = make_windows({50, 400}, spec, period, base);
    REQUIRE(!windows.empty());
    for (const auto& w : windows) {
        const int expected = static_cast<int>((static_cast<std::size_t>(base) + w.start) % 24);
        CHECK(w.day_offset == expected);
    }
    for (std::size_t i = 1; i < windows.size(); ++i) {
        CHECK(windows[i].start - windows[i - 1].start == 3);
        CHECK(windows[i].day_offset == (windows[i - 1].day_offset + 3) % 24);
    }
}

TEST_CASE("norm stats come from the training range only") {
    std::vector<double> series(100, 1.0);
    for (std::size_t i = 70; i < 100; ++i) series[i] = 1000.0; // outside train
    NormStats stats = compute_norm_stats(series, {0, 70});
    CHECK(stats.mean == doctest::Approx(1.0));
    CHECK(stats.stddev == doctest::Approx(1e-8)); // floored
    CHECK(stats.fitted);

    // changing test values never changes the stats
    std::vector<double> tweaked = series;
    tweaked[99] = -5000.0;
    NormStats stats2 = compute_norm_stats(tweaked, {0, 70});
    CHECK(stats2.mean == stats.mean);
    CHECK(stats2.stddev == stats.stddev);
}

TEST_CASE("fit learns a noiseless periodic series quickly") {
    SynthComponents components;
    components.noise_std = 0.0;
    components.trend_slope = 0.0;
    SeriesFrame frame = synth_seasonal(60, 1, components, 3);
    const auto series = frame.column(0);

    MssdModel model(tiny_model_config());
    TrainConfig tc = quick_train_config();
    tc.epochs = 50;
    tc.patience = 50;
    Splits splits = chronological_split(series.size(), tc.split, 72);
    TrainLog log = fit(model, series, 0, splits, tc);
    CHECK(log.best_val_mse < 0.05);
    CHECK(log.records.size() <= 50);
}

TEST_CASE("lr = 0 leaves parameters unchanged") {
    SeriesFrame frame = synth_seasonal(30, 1, SynthComponents{}, 4);
    const auto series = frame.column(0);
    MssdModel model(tiny_model_config());
    auto before = model.snapshot_parameters();

    TrainConfig tc = quick_train_config();
    tc.epochs = 2;
    tc.lr = 0.0;
    Splits splits = chronological_split(series.size(), tc.split, 72);
    fit(model, series, 0, splits, tc);

    auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i)
        for (std::size_t j = 0; j < params[i].value->size(); ++j)
            CHECK(params[i].value->at(j) == before[i].at(j));
}

TEST_CASE("identical seeds give identical training logs") {
    SeriesFrame frame = synth_seasonal(40, 1, SynthComponents{}, 5);
    const auto series = frame.column(0);
    TrainConfig tc = quick_train_config();
    tc.epochs = 4;
    Splits splits = chronological_split(series.size(), tc.split, 72);

    MssdModel a(tiny_model_config());
    MssdModel b(tiny_model_config());
    TrainLog la = fit(a, series, 0, splits, tc);
    TrainLog lb = fit(b, series, 0, splits, tc);
    CHECK(la.same_losses(lb));

    // and a different seed diverges
    TrainConfig other = tc;
    other.seed = 43;
    MssdModel c(tiny_model_config());
    TrainLog lc = fit(c, series, 0, splits, other);
    CHECK_FALSE(la.same_losses(lc));
}

TEST_CASE("early stopping restores the best-validation parameters") {
    SeriesFrame frame = synth_seasonal(50, 1, SynthComponents{}, 6);
    const auto series = frame.column(0);
    MssdModel model(tiny_model_config());
    TrainConfig tc = quick_train_config();
    tc.epochs = 12;
    tc.patience = 3;
    Splits splits = chronological_split(series.size(), tc.split, 72);
    TrainLog log = fit(model, series, 0, splits, tc);

    REQUIRE(!log.records.empty());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    for (const auto& r : log.records) {
        if (r.val_mse < best) {
            best = r.val_mse;
            best_epoch = r.epoch;
        }
    }
    CHECK(log.best_epoch == best_epoch);
    CHECK(log.best_val_mse == best);

    // the restored parameters reproduce the logged best validation loss
    std::vector<double> normalized(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        normalized[i] = (series[i] - model.norm.mean) / model.norm.stddev;
    const WindowSpec spec{48, 24, 1};
    auto val_windows = make_windows(splits.val, spec, model.period(), 0);
    double se = 0.0;
    std::size_t count = 0;
    for (const auto& w : val_windows) {
        std::span<const double> input(normalized.data() + w.start, spec.input_len);
        const auto forecast = model.forward_values(input, w.day_offset);
        for (std::size_t h = 0; h < spec.horizon; ++h) {
            const double d = forecast[h] - normalized[w.start + spec.input_len + h];
            se += d * d;
            ++count;
        }
    }
    CHECK(se / static_cast<double>(count) == doctest::Approx(log.best_val_mse).epsilon(1e-12));
}

TEST_CASE("fit never reads test-range values") {
    SeriesFrame frame = synth_seasonal(40, 1, SynthComponents{}, 7);
    auto series = frame.column(0);
    TrainConfig tc = quick_train_config();
    tc.epochs = 3;
    Splits splits = chronological_split(series.size(), tc.split, 72);

    // poison the test range; any read would surface as a non-finite loss
    // or poisoned parameters
    for (std::size_t i = splits.test.begin; i < splits.test.end; ++i)
        series[i] = std::numeric_limits<double>::quiet_NaN();

    MssdModel model(tiny_model_config());
    TrainLog log = fit(model, series, 0, splits, tc);
    for (const auto& r : log.records) {
        CHECK(std::isfinite(r.train_mse));
        CHECK(std::isfinite(r.val_mse));
    }
    for (const auto& p : model.parameters())
        for (std::size_t j = 0; j < p.value->size(); ++j)
            CHECK(std::isfinite(p.value->at(j)));
}

TEST_CASE("nan in the training data aborts with a diagnostic") {
    SeriesFrame frame = synth_seasonal(40, 1, SynthComponents{}, 8);
    auto series = frame.column(0);
    series[10] = std::numeric_limits<double>::quiet_NaN();
    MssdModel model(tiny_model_config());
    TrainConfig tc = quick_train_config();
    tc.epochs = 2;
    Splits splits = chronological_split(series.size(), tc.split, 72);
    CHECK_THROWS_AS(fit(model, series, 0, splits, tc), ContractError);
}

TEST_CASE("predict denormalizes with the stored statistics") {
    SeriesFrame frame = synth_seasonal(40, 1, SynthComponents{}, 9);
    const auto series = frame.column(0);
    MssdModel model(tiny_model_config());
    TrainConfig tc = quick_train_config();
    tc.epochs = 2;
    Splits splits = chronological_split(series.size(), tc.split, 72);
    fit(model, series, 0, splits, tc);

    // normalization round trip
    const double raw = 1.234;
    const double normalized = (raw - model.norm.mean) / model.norm.stddev;
    CHECK(normalized * model.norm.stddev + model.norm.mean == doctest::Approx(raw).epsilon(1e-12));

    // constant window through a zero-parameter model = stored mean
    model.zero_parameters();
    std::vector<double> window(48, 2.0);
    auto forecast = predict(model, window, 0);
    REQUIRE(forecast.size() == 24);
    for (double v : forecast) CHECK(v == doctest::Approx(model.norm.mean).epsilon(1e-12));

    // smoke bounds on a held-out window
    MssdModel fresh(tiny_model_config());
    fit(fresh, series, 0, splits, tc);
    std::span<const double> held(series.data() + splits.test.begin, 48);
    auto out = predict(fresh, held, static_cast<int>(splits.test.begin % 24));
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = splits.train.begin; i < splits.train.end; ++i) {
        lo = std::min(lo, series[i]);
        hi = std::max(hi, series[i]);
    }
    for (double v : out) {
        CHECK(std::isfinite(v));
        CHECK(v > lo - 10.0 * fresh.norm.stddev);
        CHECK(v < hi + 10.0 * fresh.norm.stddev);
    }

    // stats missing
    MssdModel unfitted(tiny_model_config());
    CHECK_THROWS_AS(predict(unfitted, window, 0), ContractError);
}

TEST_CASE("training log text format") {
    TrainLog log;
    log.records.push_back({1, 0.5, 0.6, 12.0});
    log.records.push_back({2, 0.25, 0.3, 11.0});
    const std::string text = log.to_text();
    CHECK(text.find("epoch,train_mse,val_mse,wall_ms") == 0);
    CHECK(text.find("\n1,0.5,0.6,12\n") != std::string::npos);
    CHECK(text.find("\n2,0.25,0.3,11\n") != std::string::npos);
}
