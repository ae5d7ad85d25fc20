#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ftfreq/errors.hpp"
#include "ftfreq/tapped_delay.hpp"

using ftfreq::TappedDelayLine;

TEST(TappedDelay, ZeroPreHistory) {
  TappedDelayLine<> line(4);
  line.push(1.0);
  EXPECT_EQ(line.tap(0), 1.0);
  EXPECT_EQ(line.tap(1), 0.0);
  EXPECT_EQ(line.tap(4), 0.0);
}

TEST(TappedDelay, TapReturnsValuePushedStepsAgo) {
  TappedDelayLine<> line(2);
  for (double v : {1.0, 2.0, 3.0}) line.push(v);
  EXPECT_EQ(line.tap(0), 3.0);
  EXPECT_EQ(line.tap(1), 2.0);
  EXPECT_EQ(line.tap(2), 1.0);
  line.push(4.0);
  EXPECT_EQ(line.tap(2), 2.0);
  EXPECT_EQ(line.count(), 4u);
}

TEST(TappedDelay, BeyondCapacityIsUsageError) {
  TappedDelayLine<> line(3);
  EXPECT_THROW(line.tap(4), ftfreq::UsageError);
}

TEST(TappedDelay, SineShiftedExactlyOnGrid) {
  const double ts = 1e-3, w = 2.0, phi = 0.3;
  const std::size_t steps = 100;  // h = 0.1 s
  TappedDelayLine<> line(steps);
  for (int k = 0; k < 1000; ++k) {
    const double t = k * ts;
    line.push(std::sin(w * t + phi));
    if (k >= static_cast<int>(steps)) EXPECT_EQ(line.tap(steps), std::sin(w * ((k - 100) * ts) + phi));
    else EXPECT_EQ(line.tap(steps), 0.0);
  }
}

TEST(TappedDelay, CompositionOfShifts) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise;
  const std::size_t j = 3, k = 5;
  TappedDelayLine<> original(j + k), shifted(j);
  TappedDelayLine<> first(k);
  for (int s = 0; s < 200; ++s) {
    const double v = noise(rng);
    original.push(v);
    first.push(v);
    shifted.push(first.tap(k));  // Z^k x
    EXPECT_EQ(shifted.tap(j), original.tap(j + k));
  }
}

TEST(TappedDelay, Linearity) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise;
  const double a = 1.5, b = -0.25;
  TappedDelayLine<> x(7), y(7), z(7);
  for (int s = 0; s < 100; ++s) {
    const double xv = noise(rng), yv = noise(rng);
    x.push(xv);
    y.push(yv);
    z.push(a * xv + b * yv);
    for (std::size_t k = 0; k <= 7; ++k) EXPECT_NEAR(z.tap(k), a * x.tap(k) + b * y.tap(k), 1e-15);
  }
}

TEST(TappedDelay, GridAlignment) {
  std::size_t steps = 0;
  EXPECT_TRUE(ftfreq::delay_in_samples(0.13, 1e-3, steps));
  EXPECT_EQ(steps, 130u);
  EXPECT_TRUE(ftfreq::delay_in_samples(0.1, 1e-3, steps));
  EXPECT_EQ(steps, 100u);
  EXPECT_FALSE(ftfreq::delay_in_samples(0.1305, 1e-3, steps));
  EXPECT_FALSE(ftfreq::delay_in_samples(0.0, 1e-3, steps));
}
