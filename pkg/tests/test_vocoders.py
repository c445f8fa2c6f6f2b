import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.signal import lfilter, welch

from cycloscd.dsp import AnalysisConfig, AudioSignal, window_coefficients
from cycloscd.errors import ShapeMismatchError, SignalTooShortError, UnstableModelError
from cycloscd.scd import ScdMap, TemporalScdMap, scd_a, scd_b, scd_map
from cycloscd.synthgen import gen_white_noise
from cycloscd.vocoders import (
    LpcModel,
    SinusoidSet,
    VoicingInfo,
    levinson_durbin,
    lpc_analyze,
    lpc_residual,
    lpc_synthesize_frame,
    overlap_add,
    resynthesize_utterance,
    scd_difference_map,
    sinusoidal_analyze,
    sinusoidal_synthesize,
    vocoder_config,
    voicing_decision,
)

from conftest import FS, ar2_coefficients, ar2_noise, three_tone, tone_complex

CFG400 = AnalysisConfig(frame_len=400, hop=200)
BIN_HZ = FS / CFG400.n_fft
HAMMING400 = window_coefficients("hamming", 400)


def snr_db(ref, est):
    return 10 * np.log10(np.sum(ref**2) / np.sum((ref - est) ** 2))


def impulse_train(n, period, offset=0, amp=1.0):
    x = np.zeros(n)
    x[offset::period] = amp
    return x


class TestSinusoidalAnalysis:
    def test_zero_frame_empty(self):
        assert len(sinusoidal_analyze(np.zeros(400), CFG400, FS)) == 0

    def test_single_tone(self):
        n = np.arange(400)
        frame = 0.8 * np.sin(2 * np.pi * 1000.0 * n / FS + 0.4) * HAMMING400
        comps = sinusoidal_analyze(frame, CFG400, FS)
        main = np.argmax(comps.amplitudes)
        assert comps.amplitudes[main] == pytest.approx(0.8, rel=0.01)
        assert abs(comps.frequencies[main] - 1000.0) <= 0.5 * BIN_HZ
        assert comps.phases[main] == pytest.approx(0.4, abs=0.05)

    @pytest.mark.parametrize("start_bin", [20.3, 57.0, 130.6])
    def test_two_tones_ten_bins_apart(self, start_bin):
        f1, f2 = start_bin * BIN_HZ, (start_bin + 10) * BIN_HZ
        n = np.arange(400)
        frame = (np.sin(2 * np.pi * f1 * n / FS) + 0.6 * np.sin(2 * np.pi * f2 * n / FS)) * HAMMING400
        comps = sinusoidal_analyze(frame, CFG400, FS)
        strongest = comps.frequencies[np.argsort(comps.amplitudes)[::-1][:2]]
        for target in (f1, f2):
            assert np.min(np.abs(strongest - target)) <= 0.5 * BIN_HZ

    def test_max_peaks_caps_count(self):
        frame = gen_white_noise(400, 1) * HAMMING400
        assert len(sinusoidal_analyze(frame, CFG400, FS, max_peaks=5)) == 5

    def test_components_inside_open_band(self):
        comps = sinusoidal_analyze(gen_white_noise(400, 2) * HAMMING400, CFG400, FS)
        assert np.all((comps.frequencies > 0) & (comps.frequencies < FS / 2))
        assert np.all(comps.amplitudes > 0)


class TestSinusoidalSynthesis:
    def test_empty_set_is_silence(self):
        assert not sinusoidal_synthesize(SinusoidSet.empty(), 50, FS).any()

    def test_quarter_phase_gives_cosine(self):
        comps = SinusoidSet(np.array([1.0]), np.array([440.0]), np.array([np.pi / 2]))
        n = np.arange(200)
        np.testing.assert_allclose(sinusoidal_synthesize(comps, 200, FS), np.cos(2 * np.pi * 440.0 * n / FS), atol=1e-12)

    def test_three_tone_frame_round_trip(self):
        frame = three_tone(400)
        comps = sinusoidal_analyze(frame * HAMMING400, CFG400, FS)
        y = sinusoidal_synthesize(comps, 400, FS)
        centre = slice(100, 300)
        assert snr_db(frame[centre], y[centre]) >= 30.0


class TestLevinsonLpc:
    def test_levinson_matches_normal_equations(self, rng):
        from scipy.linalg import solve_toeplitz

        x = rng.standard_normal(2000)
        r = np.correlate(x, x, "full")[1999:2011] / 2000
        a, err, _ = levinson_durbin(r, 10)
        np.testing.assert_allclose(a, solve_toeplitz(r[:10], r[1:11]), rtol=1e-9)
        assert err == pytest.approx(r[0] - np.dot(a, r[1:11]))

    def test_white_noise_order_one(self):
        model = lpc_analyze(gen_white_noise(4000, 8), order=1)
        assert abs(model.coefficients[0]) <= 0.1

    @pytest.mark.parametrize("seed", range(3))
    def test_ar2_recovery(self, seed):
        truth = ar2_coefficients()
        model = lpc_analyze(ar2_noise(16000, seed), order=2)
        np.testing.assert_allclose(model.coefficients, truth, rtol=0.05)

    def test_sine_prediction_gain(self):
        x = np.sin(2 * np.pi * 440.0 * np.arange(4000) / FS + 0.7)
        residual = lpc_residual(x, lpc_analyze(x, order=2))
        assert np.sum(residual**2) / np.sum(x**2) <= 1e-3

    def test_zero_frame(self):
        model = lpc_analyze(np.zeros(320), order=20)
        assert model.gain == 0.0
        assert not model.coefficients.any()

    def test_too_short(self):
        with pytest.raises(SignalTooShortError):
            lpc_analyze(np.ones(10), order=20)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 24))
    def test_always_stable(self, seed, order):
        x = np.cumsum(gen_white_noise(320, seed))  # strongly low-pass, near-singular
        assert lpc_analyze(x, order).is_stable()

    def test_sinusoid_high_order_stable(self):
        x = np.cos(2 * np.pi * 1000.0 * np.arange(320) / FS)
        assert lpc_analyze(x, 20).is_stable()


class TestVoicing:
    def test_exact_impulse_train(self):
        v = voicing_decision(impulse_train(320, 160), FS)
        assert v.voiced and v.period == 160

    @pytest.mark.parametrize("seed", range(10))
    def test_seeded_impulse_trains_voiced(self, seed):
        rng = np.random.default_rng(seed)
        period = int(rng.integers(45, 260))
        x = impulse_train(1024, period, int(rng.integers(0, period)), rng.uniform(0.1, 2.0))
        v = voicing_decision(x, FS)
        assert v.voiced and v.period == period

    @pytest.mark.parametrize("seed", range(10))
    def test_noise_unvoiced(self, seed):
        v = voicing_decision(gen_white_noise(320, seed), FS)
        assert not v.voiced and v.period is None and v.confidence < 0.3

    def test_zero_residual(self):
        assert voicing_decision(np.zeros(320), FS) == VoicingInfo(False, None, 0.0)

    def test_short_residual(self):
        with pytest.raises(SignalTooShortError):
            voicing_decision(np.ones(100), FS)


class TestLpcSynthesis:
    def test_zero_gain_silent(self):
        model = LpcModel(np.array([0.5, -0.2]), 0.0)
        assert not lpc_synthesize_frame(model, VoicingInfo(False, None, 0.0), 100).any()

    def test_order_zero_passes_excitation(self):
        model = LpcModel(np.zeros(0), 2.0)
        y = lpc_synthesize_frame(model, VoicingInfo(False, None, 0.0), 100, seed=4)
        np.testing.assert_allclose(y, 2.0 * gen_white_noise(100, 4))

    def test_voiced_excitation_pulses(self):
        model = LpcModel(np.zeros(0), 1.0)
        y = lpc_synthesize_frame(model, VoicingInfo(True, 100, 0.9), 320, first_pulse=7)
        assert np.flatnonzero(y).tolist() == [7, 107, 207, 307]
        assert y[7] == pytest.approx(10.0)

    def test_unstable_rejected(self):
        with pytest.raises(UnstableModelError):
            lpc_synthesize_frame(LpcModel(np.array([2.0]), 1.0), VoicingInfo(False, None, 0.0), 10)

    def test_ar2_output_peak_at_pole_angle(self):
        model = lpc_analyze(ar2_noise(16000, 0), order=2)
        y = lpc_synthesize_frame(model, VoicingInfo(False, None, 0.0), 16000, seed=1)
        f, p = welch(y, FS, nperseg=512)
        assert abs(f[np.argmax(p)] - 500.0) <= FS / 512

    def test_state_chaining_matches_single_block(self):
        model = LpcModel(np.array([1.2, -0.5]), 1.0)
        voicing = VoicingInfo(False, None, 0.0)
        whole = lpc_synthesize_frame(model, voicing, 200, seed=3)
        head, state = lpc_synthesize_frame(model, voicing, 200, seed=3, return_state=True)
        np.testing.assert_allclose(head, whole)
        assert state.tolist() == [whole[-1], whole[-2]]
        # continuing from the carried state equals filtering the joined excitation
        tail = lpc_synthesize_frame(model, voicing, 50, seed=9, state=state)
        exc = np.concatenate([gen_white_noise(200, 3), gen_white_noise(50, 9)])
        joined = lfilter([1.0], [1.0, -1.2, 0.5], exc)
        np.testing.assert_allclose(np.concatenate([head, tail]), joined, atol=1e-12)


class TestOverlapAdd:
    @pytest.mark.parametrize("window", ["hamming", "hann", "rectangular"])
    def test_constant_reconstruction(self, window):
        cfg = vocoder_config(FS, window=window)
        win = window_coefficients(window, cfg.frame_len)
        frames = np.full((30, cfg.frame_len), 0.7)
        out = overlap_add(frames, win, cfg.hop, 29 * cfg.hop + cfg.frame_len)
        covered = out[: 29 * cfg.hop + cfg.frame_len]
        assert np.max(np.abs(covered[1:-1] - 0.7)) <= 1e-9

    def test_uncovered_tail_zero(self):
        win = np.ones(4)
        out = overlap_add(np.ones((2, 4)), win, 2, 10)
        assert out.tolist() == [1.0] * 6 + [0.0] * 4


class TestResynthesis:
    @pytest.mark.parametrize("method", ["sinusoidal", "lpc"])
    def test_length_preserved(self, method):
        sig = AudioSignal(gen_white_noise(5000, 1), FS)
        out = resynthesize_utterance(sig, method)
        assert len(out) == len(sig) and out.sample_rate == FS

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="method"):
            resynthesize_utterance(AudioSignal(np.ones(1000), FS), "world")

    def test_sinusoidal_three_tone_snr(self):
        sig = AudioSignal(three_tone(FS), FS)
        out = resynthesize_utterance(sig, "sinusoidal")
        cfg = vocoder_config(FS)
        last_full = (cfg.n_frames(len(sig)) - 1) * cfg.hop
        inner = slice(cfg.frame_len, last_full)
        assert snr_db(sig.samples[inner], out.samples[inner]) >= 25.0

    @pytest.mark.parametrize("seed", range(3))
    def test_lpc_log_spectral_distance(self, seed):
        sig = AudioSignal(ar2_noise(2 * FS, seed), FS)
        out = resynthesize_utterance(sig, "lpc", seed=seed)
        _, p_in = welch(sig.samples, FS, nperseg=512)
        _, p_out = welch(out.samples, FS, nperseg=512)
        lsd = np.sqrt(np.mean((10 * np.log10(p_in / p_out)) ** 2))
        assert lsd <= 2.0

    def test_lpc_deterministic(self):
        sig = tone_complex(0, seconds=0.2)
        a = resynthesize_utterance(sig, "lpc", seed=5)
        b = resynthesize_utterance(sig, "lpc", seed=5)
        assert np.array_equal(a.samples, b.samples)


@pytest.fixture(scope="module")
def complex_maps():
    cfg = AnalysisConfig.from_ms(FS)
    ref = tone_complex(0)
    return cfg, ref, scd_map(ref, cfg)


class TestDifferenceMaps:
    def test_self_difference_zero(self, complex_maps):
        _, _, ref = complex_maps
        for mode in ("absolute", "relative"):
            assert not scd_difference_map(ref, ref, mode).data.any()

    def test_absolute_is_signed_magnitude_gap(self):
        axes = (np.arange(2.0), np.arange(2.0))
        a = ScdMap(np.array([[3 + 4j, 1.0], [0.0, 2.0]]), *axes)
        b = ScdMap(np.array([[1.0, 2.0], [0.0, -2.0]]), *axes)
        assert scd_difference_map(a, b).data.tolist() == [[4.0, -1.0], [0.0, 0.0]]
        rel = scd_difference_map(a, b, "relative").data
        assert rel[0, 0] == pytest.approx(0.8)
        assert rel[1, 0] == 0.0

    def test_shape_mismatch(self):
        a = ScdMap(np.ones((2, 2)), np.arange(2.0), np.arange(2.0))
        b = ScdMap(np.ones((3, 2)), np.arange(3.0), np.arange(2.0))
        with pytest.raises(ShapeMismatchError):
            scd_difference_map(a, b)

    def test_axis_mismatch(self):
        a = ScdMap(np.ones((2, 2)), np.arange(2.0), np.arange(2.0))
        b = ScdMap(np.ones((2, 2)), np.arange(2.0), np.arange(2.0) * 2)
        with pytest.raises(ShapeMismatchError):
            scd_difference_map(a, b)

    def test_kind_mismatch(self):
        sig = tone_complex(0, seconds=0.1)
        cfg = AnalysisConfig.from_ms(FS, n_alpha=257)
        a, b = scd_a(sig, cfg), scd_b(sig, cfg)
        assert isinstance(a, TemporalScdMap) and a.shape == b.shape
        with pytest.raises(ShapeMismatchError):
            scd_difference_map(a, b)

    def test_bad_mode(self, complex_maps):
        _, _, ref = complex_maps
        with pytest.raises(ValueError, match="mode"):
            scd_difference_map(ref, ref, "ratio")

    @pytest.mark.parametrize("method", ["sinusoidal", "lpc"])
    def test_resynthesis_differs_more_than_reseeded_self(self, complex_maps, method):
        cfg, ref_sig, ref = complex_maps
        reseeded = np.abs(scd_difference_map(ref, scd_map(tone_complex(1), cfg)).data).mean()
        resynth = scd_map(resynthesize_utterance(ref_sig, method), cfg)
        assert np.abs(scd_difference_map(ref, resynth).data).mean() > reseeded
