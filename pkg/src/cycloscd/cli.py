"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 input-format error (unreadable or
malformed files), 4 computation error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import scd as scd_mod
from .dsp import AnalysisConfig, AudioSignal, load_wav, stft, trim_silence, write_wav
from .errors import ComputationError, InputFormatError
from .features import (
    DEFAULT_ALPHA_MAX,
    KINDS,
    FeatureMatrix,
    FeatureMeta,
    extract_features,
    write_csv,
    write_feature_file,
)
from .heatmap import write_heatmap
from .metrics import compute_eer, compute_min_dcf, det_points, read_score_file
from .synthgen import demo_signals
from .vocoders import resynthesize_utterance, scd_difference_map, vocoder_config

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_COMPUTE = 4

DEFAULT_SEED = 42
DEFAULT_OUT = "cycloscd_out"
WAVEFORM_SAMPLES = 320


class UsageError(Exception):
    pass


def _add_analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--frame-ms", type=float, default=25.0, help="frame length in ms (default 25)")
    p.add_argument("--hop-ms", type=float, default=10.0, help="frame shift in ms (default 10)")
    p.add_argument("--nfft", type=int, default=512, help="DFT length (default 512)")
    p.add_argument(
        "--alpha-max",
        type=float,
        default=None,
        help="max cyclic frequency in Hz (default 2000 scd, 2500 scd_a, 500 scd_b)",
    )
    p.add_argument("--n-alpha", type=int, default=257, help="cyclic grid points (default 257)")
    p.add_argument("--window", choices=("hamming", "hann", "rectangular"), default="hamming")


def _add_output_flags(p: argparse.ArgumentParser, with_format: bool = True) -> None:
    p.add_argument("--out", default=DEFAULT_OUT, help=f"output directory (default {DEFAULT_OUT})")
    if with_format:
        p.add_argument("--format", choices=("cycf", "csv"), default="cycf")
        p.add_argument("--db", action="store_true", help="dB-scale heatmaps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cycloscd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("scd", help="SCD map, SCD_a, SCD_b and marginal profiles of a WAV file")
    p.add_argument("wav")
    _add_analysis_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("synth-demo", help="modulated test signals x1..x4 and their SCD artifacts")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"noise seed (default {DEFAULT_SEED})")
    p.add_argument("--duration", type=float, default=1.0, help="seconds (default 1)")
    p.add_argument("--sample-rate", type=int, default=16000)
    _add_analysis_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("vocode", help="sinusoidal/LPC resynthesis and SCD difference maps")
    p.add_argument("wav")
    p.add_argument("--method", choices=("sinusoidal", "lpc"), required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="LPC noise-excitation seed")
    p.add_argument("--order", type=int, default=20, help="LPC order (default 20)")
    _add_analysis_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("features", help="batch feature extraction over a list of WAV files")
    p.add_argument("list", help="text file with one WAV path per line")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--fixed-frames", type=int, default=None, help="crop/replicate to this many frames")
    p.add_argument("--log", action="store_true", help="log-compress magnitudes")
    p.add_argument("--trim-db", type=float, default=None, help="trim silence below this level (e.g. -40)")
    p.add_argument("--jobs", type=int, default=1)
    _add_analysis_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("score", help="EER and minDCF of a score file")
    p.add_argument("scores")
    p.add_argument("--pi-spoof", type=float, default=0.05)
    p.add_argument("--c-miss", type=float, default=1.0)
    p.add_argument("--c-fa", type=float, default=10.0)
    p.add_argument("--det", action="store_true", help="also write det.csv (threshold, p_fa, p_miss) to --out")
    p.add_argument("--out", default=DEFAULT_OUT)
    return parser


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _config(args, sample_rate: int, kind: str) -> AnalysisConfig:
    alpha_max = args.alpha_max if args.alpha_max is not None else DEFAULT_ALPHA_MAX[kind]
    try:
        cfg = AnalysisConfig.from_ms(
            sample_rate,
            frame_ms=args.frame_ms,
            hop_ms=args.hop_ms,
            n_fft=args.nfft,
            window=args.window,
            alpha_max=alpha_max,
            n_alpha=args.n_alpha,
        )
        cfg.check_rate(sample_rate)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(path) -> AudioSignal:
    p = Path(path)
    if not p.is_file():
        raise InputFormatError(f"{path}: file not found")
    try:
        return load_wav(p)
    except InputFormatError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def _emit_matrix(out: Path, name: str, fm: FeatureMatrix, fmt: str, db: bool) -> None:
    if fmt == "cycf":
        write_feature_file(fm, out / f"{name}.cycf")
    else:
        write_csv(fm.data, out / f"{name}.csv")
    write_heatmap(out / f"{name}.png", fm.data, db=db)


def _feature(data, kind: str, cfg: AnalysisConfig, sample_rate: int) -> FeatureMatrix:
    meta = FeatureMeta(float(sample_rate), cfg.alpha_max, cfg.frame_len, cfg.hop, cfg.n_fft)
    return FeatureMatrix(np.ascontiguousarray(np.abs(data)), kind, meta)


def _representations(signal: AudioSignal, args):
    """(ScdMap, SCD_a, SCD_b, configs) honouring per-kind alpha_max defaults."""
    fs = signal.sample_rate
    cfgs = {kind: _config(args, fs, kind) for kind in ("scd", "scd_a", "scd_b", "stft")}
    if args.alpha_max is not None:
        m, a, b = scd_mod.scd_all(signal, cfgs["scd"])
    else:
        m = scd_mod.scd_map(signal, cfgs["scd"])
        a = scd_mod.scd_a(signal, cfgs["scd_a"])
        b = scd_mod.scd_b(signal, cfgs["scd_b"])
    return m, a, b, cfgs


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_scd(args) -> int:
    signal = _load(args.wav)
    out = _outdir(args)
    m, a, b, cfgs = _representations(signal, args)
    fs = signal.sample_rate
    _emit_matrix(out, "scd", _feature(m.data, "scd", cfgs["scd"], fs), args.format, args.db)
    _emit_matrix(out, "scd_a", _feature(a.data, "scd_a", cfgs["scd_a"], fs), args.format, args.db)
    _emit_matrix(out, "scd_b", _feature(b.data, "scd_b", cfgs["scd_b"], fs), args.format, args.db)
    scd_alpha, scd_f = scd_mod.marginal_profiles(m)
    write_csv(np.column_stack([m.alpha_axis, scd_alpha]), out / "scd_alpha.csv")
    write_csv(np.column_stack([m.f_axis, scd_f]), out / "scd_f.csv")
    print(f"scd: {m.shape[0]}x{m.shape[1]}, scd_a: {a.shape[0]}x{a.shape[1]}, scd_b: {b.shape[0]}x{b.shape[1]} -> {out}")
    return EXIT_OK


def cmd_synth_demo(args) -> int:
    if args.duration <= 0:
        raise UsageError("--duration must be positive")
    out = _outdir(args)
    signals = demo_signals(seed=args.seed, duration=args.duration, sample_rate=args.sample_rate)
    for name, signal in signals.items():
        fs = signal.sample_rate
        write_wav(out / f"{name}.wav", signal)
        wave = signal.samples[:WAVEFORM_SAMPLES]
        write_csv(np.column_stack([np.arange(wave.size) / fs, wave]), out / f"{name}_waveform.csv")
        cfg = _config(args, fs, "scd")
        spec = np.abs(stft(signal, cfg)).T
        _emit_matrix(out, f"{name}_stft", _feature(spec, "stft", cfg, fs), args.format, args.db)
        m = scd_mod.scd_map(signal, cfg)
        _emit_matrix(out, f"{name}_scd", _feature(m.data, "scd", cfg, fs), args.format, args.db)
        scd_alpha, scd_f = scd_mod.marginal_profiles(m)
        write_csv(np.column_stack([m.alpha_axis, scd_alpha]), out / f"{name}_scd_alpha.csv")
        write_csv(np.column_stack([m.f_axis, scd_f]), out / f"{name}_scd_f.csv")
    print(f"wrote {len(signals)} test signals (seed {args.seed}) to {out}")
    return EXIT_OK


def _emit_diff(out: Path, name: str, ref, test, modes) -> None:
    for mode in modes:
        d = scd_difference_map(ref, test, mode)
        write_csv(d.data, out / f"diff_{name}_{mode}.csv")
        write_heatmap(out / f"diff_{name}_{mode}.png", d.data, signed=True)


def cmd_vocode(args) -> int:
    signal = _load(args.wav)
    out = _outdir(args)
    fs = signal.sample_rate
    try:
        vcfg = vocoder_config(fs, n_fft=args.nfft, window=args.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    resynth = resynthesize_utterance(signal, args.method, vcfg, order=args.order, seed=args.seed)
    write_wav(out / f"{Path(args.wav).stem}_{args.method}.wav", resynth)

    m_ref, a_ref, b_ref, cfgs = _representations(signal, args)
    m_syn, a_syn, b_syn, _ = _representations(resynth, args)
    _emit_matrix(out, "scd_reference", _feature(m_ref.data, "scd", cfgs["scd"], fs), args.format, args.db)
    _emit_matrix(out, "scd_resynth", _feature(m_syn.data, "scd", cfgs["scd"], fs), args.format, args.db)
    _emit_diff(out, "scd", m_ref, m_syn, ("absolute", "relative"))
    _emit_diff(out, "scd_a", a_ref, a_syn, ("relative",))
    _emit_diff(out, "scd_b", b_ref, b_syn, ("relative",))
    s_ref = np.abs(stft(signal, cfgs["stft"])).T
    s_syn = np.abs(stft(resynth, cfgs["stft"])).T
    _emit_diff(out, "stft", s_ref, s_syn, ("relative",))
    d = scd_difference_map(m_ref, m_syn, "absolute")
    print(f"{args.method}: mean |SCD difference| = {np.abs(d.data).mean():.6g} -> {out}")
    return EXIT_OK


def _read_list(path) -> list[Path]:
    p = Path(path)
    if not p.is_file():
        raise InputFormatError(f"{path}: file not found")
    entries = []
    for line in p.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        q = Path(line)
        if not q.is_absolute() and not q.exists():
            q = p.parent / q
        entries.append(q)
    stems = [q.stem for q in entries]
    dupes = sorted({s for s in stems if stems.count(s) > 1})
    if dupes:
        raise InputFormatError(f"{path}: duplicate file stems would overwrite outputs: {dupes}")
    return entries


def _extract_one(job):
    wav, kind, cfg, fixed, log, trim_db, fmt, out = job
    signal = _load(wav)
    if trim_db is not None:
        signal = trim_silence(signal, cfg, trim_db)
    fm = extract_features(signal, kind, cfg, fixed_frames=fixed, log_compress=log)
    target = Path(out) / f"{Path(wav).stem}.{fmt}"
    if fmt == "cycf":
        write_feature_file(fm, target)
    else:
        write_csv(fm.data, target)
    return f"{wav} -> {target.name} ({fm.rows}x{fm.cols})"


def cmd_features(args) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if args.fixed_frames is not None and args.fixed_frames < 1:
        raise UsageError("--fixed-frames must be >= 1")
    entries = _read_list(args.list)
    out = _outdir(args)
    jobs = []
    for wav in entries:
        signal_rate = _load(wav).sample_rate
        cfg = _config(args, signal_rate, args.kind)
        jobs.append((str(wav), args.kind, cfg, args.fixed_frames, args.log, args.trim_db, args.format, str(out)))
    if args.jobs == 1 or len(jobs) <= 1:
        results = [_extract_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_extract_one, jobs))
    for line in results:
        print(line)
    return EXIT_OK


def cmd_score(args) -> int:
    p = Path(args.scores)
    if not p.is_file():
        raise InputFormatError(f"{args.scores}: file not found")
    _, scores = read_score_file(p)
    try:
        scores.require_both()
    except ComputationError as exc:
        raise InputFormatError(f"{args.scores}: {exc}") from None
    eer, theta = compute_eer(scores)
    try:
        min_dcf = compute_min_dcf(scores, args.pi_spoof, args.c_miss, args.c_fa)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"EER: {eer * 100:.4f}%")
    print(f"minDCF: {min_dcf:.4f}")
    print(f"EER threshold: {theta:.6g}")
    if args.det:
        out = _outdir(args)
        thr, p_fa, p_miss = det_points(scores)
        write_csv(np.column_stack([thr, p_fa, p_miss]), out / "det.csv")
    return EXIT_OK


COMMANDS = {
    "scd": cmd_scd,
    "synth-demo": cmd_synth_demo,
    "vocode": cmd_vocode,
    "features": cmd_features,
    "score": cmd_score,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cycloscd {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputFormatError, FileNotFoundError) as exc:
        print(f"cycloscd {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"cycloscd {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ComputationError, ValueError, FloatingPointError) as exc:
        print(f"cycloscd {args.command}: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
