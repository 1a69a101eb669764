// Copyright 2026 The Newsreel Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace newsreel;
using namespace newsreel::media;
namespace nt = newsreel::testing;

TEST(Fft, MatchesBruteForceDft) {
  Rng rng(3);
  for (std::size_t n : {1u, 2u, 8u, 64u, 512u}) {
    std::vector<double> frame(n);
    for (auto& v : frame) v = rng.normal();
    const auto fast = power_spectrum(frame, n);
    const auto slow = nt::brute_dft_power(frame, n);
    ASSERT_EQ(fast.size(), slow.size());
    for (std::size_t k = 0; k < fast.size(); ++k) EXPECT_NEAR(fast[k], slow[k], 1e-9 * (1.0 + slow[k]));
  }
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<std::complex<double>> buf(12);
  EXPECT_THROW(fft_inplace(buf), Error);
}

TEST(Mfcc, DctBasisIsOrthonormal) {
  for (std::size_t bands : {20u, 40u, 64u}) {
    const Tensor m = dct_matrix(bands, bands);
    for (std::size_t a = 0; a < bands; ++a) {
      for (std::size_t b = 0; b < bands; ++b) {
        double dot = 0.0;
        for (std::size_t k = 0; k < bands; ++k) dot += m(a, k) * m(b, k);
        EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(Mfcc, FilterbankMatchesMelDefinition) {
  MfccParams p;
  const auto centers = mel_center_frequencies(p);
  ASSERT_EQ(centers.size(), p.mel_bands);
  for (std::size_t m = 0; m + 1 < centers.size(); ++m) {
    EXPECT_NEAR(hz_to_mel(centers[m + 1]) - hz_to_mel(centers[m]), hz_to_mel(8000.0) / 41.0, 1e-9);
  }
  EXPECT_NEAR(mel_to_hz(hz_to_mel(440.0)), 440.0, 1e-9);
}

TEST(Mfcc, SineAt440PeaksInNearestMelBand) {
  MfccParams p;
  const auto signal = nt::sine(440.0, p.sample_rate, 16000);
  const Tensor energies = mel_energies(signal, p);
  const std::size_t expected = nt::nearest_mel_band(440.0, p.sample_rate, p.mel_bands);
  for (std::size_t t = 0; t < energies.rows(); ++t) {
    const auto row = energies.row_span(t);
    EXPECT_EQ(static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin()), expected);
  }
  // Cross-check the energies themselves against the brute-force DFT pipeline.
  const std::vector<double> head(signal.begin(), signal.begin() + 2000);
  const auto oracle = nt::oracle_mel_energies(head, p.sample_rate, p.frame_length, p.hop_length, p.mel_bands,
                                              p.fft_size());
  const Tensor ours = mel_energies(head, p);
  ASSERT_EQ(ours.rows(), oracle.size());
  for (std::size_t t = 0; t < oracle.size(); ++t)
    for (std::size_t m = 0; m < p.mel_bands; ++m)
      EXPECT_NEAR(ours(t, m), oracle[t][m], 1e-9 * (1.0 + oracle[t][m]));
}

TEST(Mfcc, ZeroSignalGivesIdenticalRows) {
  MfccParams p;
  const std::vector<double> zeros(4000, 0.0);
  const auto m = compute_mfcc(zeros, p);
  ASSERT_EQ(m.frames(), mfcc_frame_count(4000, p));
  for (std::size_t t = 1; t < m.frames(); ++t)
    for (std::size_t c = 0; c < p.num_coefficients; ++c) EXPECT_EQ(m.coefficients(t, c), m.coefficients(0, c));
  // Floored log spectrum: c0 = sqrt(bands) * log(floor), the rest vanish.
  EXPECT_NEAR(m.coefficients(0, 0), std::sqrt(40.0) * std::log(p.log_floor), 1e-9);
  for (std::size_t c = 1; c < p.num_coefficients; ++c) EXPECT_NEAR(m.coefficients(0, c), 0.0, 1e-9);
}

TEST(Mfcc, TimestampsStepByHop) {
  MfccParams p;
  const auto m = compute_mfcc(nt::sine(300.0, p.sample_rate, 3000), p);
  for (std::size_t t = 0; t < m.frames(); ++t) EXPECT_DOUBLE_EQ(m.timestamps[t], t * 0.01);
}

TEST(Mfcc, ErrorsOnShortOrNonFiniteSignal) {
  MfccParams p;
  EXPECT_THROW(compute_mfcc(std::vector<double>(399, 0.1), p), Error);
  std::vector<double> bad(1000, 0.1);
  bad[500] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(compute_mfcc(bad, p), Error);
  MfccParams wrong;
  wrong.num_coefficients = 41;
  EXPECT_THROW(wrong.validate(), Error);
}

TEST(Mfcc, ShiftCovariantByWholeHops) {
  MfccParams p;
  Rng rng(8);
  std::vector<double> x(6000);
  for (auto& v : x) v = rng.normal(0.0, 0.3);
  const std::size_t k = 7;
  std::vector<double> delayed(k * p.hop_length, 0.0);
  delayed.insert(delayed.end(), x.begin(), x.end());
  const auto a = compute_mfcc(x, p);
  const auto b = compute_mfcc(delayed, p);
  ASSERT_EQ(b.frames(), a.frames() + k);
  for (std::size_t t = 0; t < a.frames(); ++t)
    for (std::size_t c = 0; c < p.num_coefficients; ++c) EXPECT_NEAR(b.coefficients(t + k, c), a.coefficients(t, c), 1e-9);
}

namespace {

MfccMatrix matrix_of(const std::vector<std::vector<double>>& rows, double step) {
  MfccMatrix m;
  m.coefficients = Tensor::matrix(rows.size(), rows.front().size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    std::copy(rows[t].begin(), rows[t].end(), m.coefficients.row_span(t).begin());
    m.timestamps.push_back(static_cast<double>(t) * step);
  }
  return m;
}

}  // namespace

TEST(PoolMfcc, Examples) {
  EXPECT_EQ(pool_mfcc(matrix_of({{4, 5}, {4, 5}, {4, 5}}, 1.0), TimeInterval(0, 3)), (std::vector<double>{4, 5}));
  EXPECT_EQ(pool_mfcc(matrix_of({{1, 1}, {3, 3}}, 1.0), TimeInterval(0, 2)), (std::vector<double>{2, 2}));
  // Two regimes: frames 0-3 are 1, frames 4-7 are 9; the shot covers only the second.
  const auto m = matrix_of({{1}, {1}, {1}, {1}, {9}, {9}, {9}, {9}}, 0.5);
  EXPECT_EQ(pool_mfcc(m, TimeInterval(2.0, 4.0)), (std::vector<double>{9}));
  // Half-open: a frame stamped exactly at the shot end is excluded.
  EXPECT_EQ(pool_mfcc(m, TimeInterval(1.0, 2.0)), (std::vector<double>{1}));
  EXPECT_THROW(pool_mfcc(m, TimeInterval(4.1, 4.2)), Error);
}

TEST(PoolMfcc, InvariantToPermutingInRangeFrames) {
  Rng rng(4);
  std::vector<std::vector<double>> rows(10, std::vector<double>(3));
  for (auto& r : rows)
    for (auto& v : r) v = rng.normal();
  const auto a = pool_mfcc(matrix_of(rows, 1.0), TimeInterval(2.0, 8.0));
  std::reverse(rows.begin() + 2, rows.begin() + 8);
  const auto b = pool_mfcc(matrix_of(rows, 1.0), TimeInterval(2.0, 8.0));
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(a[c], b[c], 1e-12);
}

namespace {

Tensor solid_frame(std::size_t h, std::size_t w, double r, double g, double b) {
  Tensor t({h, w, 3});
  for (std::size_t p = 0; p < h * w; ++p) {
    t[3 * p] = r;
    t[3 * p + 1] = g;
    t[3 * p + 2] = b;
  }
  return t;
}

std::vector<FrameDescriptor> stream(const std::vector<double>& values) {
  std::vector<FrameDescriptor> out;
  for (std::size_t i = 0; i < values.size(); ++i) out.push_back({i, 0.0, 0.0, values[i]});
  return out;
}

}  // namespace

TEST(FrameDescriptor, Examples) {
  const auto black = frame_descriptor(solid_frame(4, 4, 0, 0, 0));
  EXPECT_DOUBLE_EQ(black.value, 0.0);
  EXPECT_DOUBLE_EQ(black.saturation, 0.0);

  const auto red = frame_descriptor(solid_frame(4, 4, 1, 0, 0));
  EXPECT_DOUBLE_EQ(red.hue, 0.0);
  EXPECT_DOUBLE_EQ(red.saturation, 1.0);
  EXPECT_DOUBLE_EQ(red.value, 1.0);

  // Left half red (0 deg), right half blue (240 deg): the circular mean of
  // {0, 240} is atan2(sin 0 + sin 240, cos 0 + cos 240) = -60 deg = 300 deg.
  Tensor half = solid_frame(2, 4, 1, 0, 0);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 2; c < 4; ++c) {
      const std::size_t p = r * 4 + c;
      half[3 * p] = 0.0;
      half[3 * p + 2] = 1.0;
    }
  }
  const auto mixed = frame_descriptor(half);
  EXPECT_NEAR(mixed.hue, 300.0, 1e-9);
  EXPECT_DOUBLE_EQ(mixed.value, 1.0);
  EXPECT_DOUBLE_EQ(mixed.saturation, 1.0);

  EXPECT_THROW(frame_descriptor(Tensor({0, 4, 3})), Error);
  EXPECT_THROW(frame_descriptor(Tensor({2, 2, 4})), Error);
}

TEST(DescriptorDistance, CircularHue) {
  EXPECT_DOUBLE_EQ(hue_difference(350.0, 10.0), 20.0);
  EXPECT_DOUBLE_EQ(descriptor_distance({0, 0.0, 0.0, 0.0}, {0, 180.0, 1.0, 1.0}), 1.0);
}

TEST(DetectShots, ConstantStreamIsOneShot) {
  ShotDetectorParams p;
  const auto shots = detect_shots(stream(std::vector<double>(300, 0.4)), p);
  ASSERT_EQ(shots.size(), 1u);
  EXPECT_DOUBLE_EQ(shots[0].interval.start(), 0.0);
  EXPECT_DOUBLE_EQ(shots[0].interval.end(), 300.0 / 25.0);
}

TEST(DetectShots, AbruptJumpAtFrame150) {
  ShotDetectorParams p;
  p.threshold = 0.02;
  std::vector<double> v(300, 0.2);
  // Value step 0.6 -> descriptor distance 0.2 = 10 x threshold.
  for (std::size_t i = 150; i < 300; ++i) v[i] = 0.8;
  const auto starts = detect_boundaries(stream(v), p);
  EXPECT_EQ(starts, (std::vector<std::size_t>{0, 150}));
  const auto shots = detect_shots(stream(v), p);
  ASSERT_EQ(shots.size(), 2u);
  EXPECT_DOUBLE_EQ(shots[0].interval.end() * p.fps, 150.0);
  EXPECT_DOUBLE_EQ(shots[1].interval.end() * p.fps, 300.0);
}

TEST(DetectShots, FadeNeedsTheTrailingWindow) {
  // Plateau 0.2, then 8 frames rising by 0.075 each to 0.8, then plateau 0.8.
  std::vector<double> v(200, 0.2);
  for (std::size_t k = 0; k < 8; ++k) v[100 + k] = 0.2 + 0.6 * static_cast<double>(k + 1) / 8.0;
  for (std::size_t i = 108; i < 200; ++i) v[i] = 0.8;
  ShotDetectorParams p;
  p.threshold = 0.05;  // per-frame change is 0.025
  p.window = 10;
  // Frame 102 (0.425) vs the mean of frames 92..101 (0.2225): 0.0675 > 0.05.
  EXPECT_EQ(detect_boundaries(stream(v), p), (std::vector<std::size_t>{0, 102}));
  p.window = 1;
  EXPECT_EQ(detect_boundaries(stream(v), p), (std::vector<std::size_t>{0}));
}

TEST(DetectShots, PartitionAndMinShotProperty) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FrameDescriptor> frames;
    const auto n = static_cast<std::size_t>(rng.uniform_int(20, 400));
    for (std::size_t i = 0; i < n; ++i)
      frames.push_back({i, rng.uniform(0, 360), rng.uniform(), rng.uniform()});
    ShotDetectorParams p;
    p.min_shot = static_cast<std::size_t>(rng.uniform_int(1, 20));
    p.threshold = rng.uniform(0.05, 0.4);
    const auto shots = detect_shots(frames, p);
    ASSERT_FALSE(shots.empty());
    EXPECT_DOUBLE_EQ(shots.front().interval.start(), 0.0);
    EXPECT_DOUBLE_EQ(shots.back().interval.end(), static_cast<double>(n) / p.fps);
    for (std::size_t i = 0; i < shots.size(); ++i) {
      if (i + 1 < shots.size()) {
        EXPECT_EQ(shots[i].interval.end(), shots[i + 1].interval.start());
        EXPECT_GE(std::lround(shots[i].interval.duration() * p.fps), static_cast<long>(p.min_shot));
      }
    }
  }
}

TEST(DetectShots, Errors) {
  ShotDetectorParams p;
  p.window = 0;
  EXPECT_THROW(detect_shots(stream(std::vector<double>(50, 0.1)), p), Error);
  p.window = 10;
  EXPECT_THROW(detect_shots(stream(std::vector<double>(10, 0.1)), p), Error);
}

TEST(AudioIo, WavAndRawRoundTrip) {
  nt::TempDir dir("audio");
  const auto s = nt::sine(440.0, 16000.0, 1000, 0.5);
  write_wav_pcm16(dir / "a.wav", s, 16000);
  const auto wav = read_audio(dir / "a.wav", 8000.0);
  EXPECT_DOUBLE_EQ(wav.sample_rate, 16000.0);
  ASSERT_EQ(wav.samples.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(wav.samples[i], s[i], 1.0 / 32767.0);

  write_raw_f32(dir / "a.f32", s);
  const auto raw = read_audio(dir / "a.f32", 8000.0);
  EXPECT_DOUBLE_EQ(raw.sample_rate, 8000.0);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(raw.samples[i], s[i], 1e-7);

  std::ofstream(dir / "bad.wav") << "not a wav";
  EXPECT_THROW(read_wav(dir / "bad.wav"), Error);
  EXPECT_THROW(read_wav(dir / "missing.wav"), Error);
}

TEST(FrameDescriptorCsv, ReadsAndValidates) {
  nt::TempDir dir("desc");
  std::ofstream(dir / "ok.csv") << "frame_index,hue,saturation,value\n0,10,0.5,0.5\n1,20,0.5,0.6\n";
  const auto d = read_frame_descriptors(dir / "ok.csv");
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[1].value, 0.6);
  std::ofstream(dir / "bad.csv") << "frame_index,hue,saturation,value\n0,10,1.5,0.5\n";
  EXPECT_THROW(read_frame_descriptors(dir / "bad.csv"), Error);
}
