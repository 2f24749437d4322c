"""Monte Carlo CCDF and BER experiments and their CSV / manifest output.

Symbol ``i`` always draws its bits and noise from the streams
``(master_seed, i)``, and batches are cut at fixed multiples of
``batch_size``, so results do not depend on the number of workers.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import hashlib
import math
import os
import time

import numpy as np

from . import __version__
from ._jit import backend_name
from .clipping import ClipConfig, MethodVariant, composed_response, reduce_papr
from .config import design_all, validate
from .core import mean_power
from .errors import ConfigError
from .link import Receiver, frame, transmit
from .metrics import CALIBRATION, analytical_ber, awgn, ccdf, noise_variance, papr_db
from .modem import PURPOSE_NOISE, generate_bits, get_scheme, map_bits, stream_rng
from .ofdm import ofdm_modulate, oversample_spectrum

NONE_CR = math.inf

CCDF_HEADER = "variant,cr,threshold_db,ccdf,samples"
BER_HEADER = "variant,cr,ebn0_db,bit_errors,bits_total,ber,confident"


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{float(v):.6g}"


def _batches(total, size):
    return [(s, min(s + size, total)) for s in range(0, total, size)]


def _run_batches(fn, cfg, total, workers):
    spans = _batches(total, cfg.batch_size)
    if workers <= 1 or len(spans) <= 1:
        return [fn(cfg, s, e) for s, e in spans]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [cfg] * len(spans), [s for s, _ in spans], [e for _, e in spans]))


def symbol_bits(cfg, start, stop):
    scheme = get_scheme(cfg.scheme)
    count = cfg.ofdm.n_subcarriers * scheme.bits_per_symbol
    return np.stack([generate_bits(count, cfg.master_seed, i).bits for i in range(start, stop)])


def _variants(cfg):
    filters = design_all(cfg)
    out = {"none": MethodVariant("none", None, filters["lpf"])}
    for name in cfg.variants:
        if name != "none":
            out[name] = MethodVariant(name, filters[name], filters["lpf"])
    return out


def _clipped_variants(cfg):
    return [v for v in cfg.variants if v != "none"]


# ------------------------------------------------------------------------ CCDF


@dataclass
class CcdfResult:
    config: object
    curves: dict
    samples: dict
    summary: list
    reference_db: float
    telemetry: list = field(default_factory=list)


def _ccdf_batch(cfg, start, stop):
    scheme = get_scheme(cfg.scheme)
    p = cfg.ofdm
    bits = symbol_bits(cfg, start, stop)
    if cfg.ccdf_domain == "baseband":
        x = ofdm_modulate(oversample_spectrum(map_bits(bits, scheme), p.oversample), p)
        return {("none", NONE_CR): papr_db(x)}, []
    xp = transmit(bits, scheme, p)
    out = {("none", NONE_CR): papr_db(xp)}
    telemetry = []
    variants = _variants(cfg)
    es = float(np.mean(np.abs(scheme.points) ** 2))
    for name in _clipped_variants(cfg):
        v = variants[name]
        response = composed_response(v, p)
        for cr in cfg.cr_list:
            _, tel = reduce_papr(xp, ClipConfig(cr, sigma_estimate=cfg.clip_sigma), v, p, response, es)
            out[(name, cr)] = tel.papr_filt_db
            if cfg.ccdf_telemetry:
                telemetry.append((name, cr, start, tel))
    return out, telemetry


def thresholds(cfg):
    n = int(round((cfg.ccdf_max_db - cfg.ccdf_min_db) / cfg.ccdf_step_db))
    return cfg.ccdf_min_db + cfg.ccdf_step_db * np.arange(n + 1)


def run_ccdf_experiment(cfg, workers=None):
    validate(cfg)
    if cfg.ccdf_domain == "passband":
        design_all(cfg)  # surface filter-design failures before any simulation
    parts = _run_batches(_ccdf_batch, cfg, cfg.n_symbols_ccdf, workers or cfg.workers)
    samples = {}
    telemetry = []
    for part, tel in parts:
        for key, arr in part.items():
            samples.setdefault(key, []).append(arr)
        telemetry.extend(tel)
    samples = {k: np.concatenate(v) for k, v in samples.items()}
    grid = thresholds(cfg)
    curves = {k: ccdf(v, grid) for k, v in samples.items()}
    prob = cfg.ccdf_report_probability
    reference = curves[("none", NONE_CR)].papr_at_ccdf(prob)
    summary = []
    names = _clipped_variants(cfg)
    for cr in cfg.cr_list:
        row = {"cr": cr}
        for name in names:
            row[f"papr_{name}_db"] = curves[(name, cr)].papr_at_ccdf(prob)
        if "previous" in names and "proposed" in names:
            row["improvement_db"] = row["papr_previous_db"] - row["papr_proposed_db"]
        summary.append(row)
    return CcdfResult(cfg, curves, samples, summary, reference, telemetry)


# ------------------------------------------------------------------------- BER


@dataclass
class BerResult:
    config: object
    points: dict  # (variant, cr, snr) -> [bit_errors, bits_total]
    analytical: dict
    summary: list
    bits_processed: int

    def ber(self, variant, cr, snr):
        e, n = self.points[(variant, cr, snr)]
        return e / n


def n_symbols_ber(cfg):
    bps = cfg.ofdm.n_subcarriers * get_scheme(cfg.scheme).bits_per_symbol
    return -(-cfg.bit_budget_ber // bps)


def effective_ebn0(cfg, snr_db):
    """Grid value -> Eb/N0 in dB (identity unless the grid is per-sample SNR)."""
    if cfg.ber_axis == "ebn0":
        return snr_db
    k = get_scheme(cfg.scheme).bits_per_symbol
    # real passband: per-sample SNR = 2 k (Eb/N0) / L
    return snr_db + 10 * math.log10(cfg.ofdm.oversample / (2 * k))


def _ber_batch(cfg, start, stop):
    scheme = get_scheme(cfg.scheme)
    p = cfg.ofdm
    k = scheme.bits_per_symbol
    bits = symbol_bits(cfg, start, stop)
    xp = transmit(bits, scheme, p)
    flen = p.fft_size + p.cp_samples
    unit = np.stack([stream_rng(cfg.master_seed, i, PURPOSE_NOISE).standard_normal(flen) for i in range(start, stop)])
    variants = _variants(cfg)
    es = float(np.mean(np.abs(scheme.points) ** 2))
    runs = [("none", NONE_CR)] + [(n, cr) for n in _clipped_variants(cfg) for cr in cfg.cr_list]
    counts = {}
    for name, cr in runs:
        v = variants[name]
        rx = Receiver(p, v, scheme)
        if name == "none":
            y = xp
        else:
            y, _ = reduce_papr(xp, ClipConfig(cr, sigma_estimate=cfg.clip_sigma), v, p,
                               composed_response(v, p), es)
        tx_frames = frame(y, p)
        power = mean_power(y, axis=-1)
        for snr in cfg.snr_grid_db:
            ebn0 = effective_ebn0(cfg, snr)
            if math.isinf(ebn0):
                noisy, var = tx_frames, np.zeros(len(y))
            else:
                var = noise_variance(power, ebn0, k, oversample=p.oversample, real=True)
                noisy = awgn(tx_frames, ebn0, k, samples_per_bit_factor=p.oversample,
                             unit_noise=unit, power=power)
            decided = rx.detect(noisy, 2 * var)
            counts[(name, cr, snr)] = [int(np.count_nonzero(decided != bits)), int(bits.size)]
    return counts


def run_ber_experiment(cfg, workers=None):
    validate(cfg, for_ber=True)
    design_all(cfg)  # surface filter-design failures before any simulation
    total = n_symbols_ber(cfg)
    parts = _run_batches(_ber_batch, cfg, total, workers or cfg.workers)
    points = {}
    processed = 0
    for part in parts:
        for key, (e, n) in part.items():
            acc = points.setdefault(key, [0, 0, False])
            if acc[2]:
                continue
            acc[0] += e
            acc[1] += n
            processed += n
            if cfg.ber_stop_at_min_errors and acc[0] >= cfg.ber_min_errors:
                acc[2] = True
    points = {key: (e, n) for key, (e, n, _) in points.items()}
    scheme = get_scheme(cfg.scheme)
    analytical = {snr: analytical_ber(scheme, effective_ebn0(cfg, snr)) for snr in cfg.snr_grid_db}
    summary = []
    names = _clipped_variants(cfg)
    snr = cfg.ber_report_ebn0_db
    if snr in cfg.snr_grid_db:
        for cr in cfg.cr_list:
            row = {"cr": cr}
            for name in names:
                e, n = points[(name, cr, snr)]
                row[f"ber_{name}"] = e / n
            if "previous" in names and "proposed" in names:
                row["difference"] = row["ber_previous"] - row["ber_proposed"]
            summary.append(row)
    return BerResult(cfg, points, analytical, summary, processed)


# ---------------------------------------------------------------------- output


def _write(path, lines):
    text = "\n".join(lines) + "\n"
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return hashlib.sha256(text.encode()).hexdigest()


def _summary_lines(rows):
    if not rows:
        return ["cr"]
    cols = list(rows[0])
    return [",".join(cols)] + [",".join(fmt(r[c]) for c in cols) for r in rows]


def _cr_text(cr):
    return "inf" if math.isinf(cr) else fmt(cr)


def emit_ccdf_csv(result, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    lines = [CCDF_HEADER]
    keys = [("none", NONE_CR)] + [k for k in result.curves if k[0] != "none"]
    for variant, cr in keys:
        c = result.curves[(variant, cr)]
        for t, prob in zip(c.thresholds_db, c.probabilities):
            lines.append(f"{variant},{_cr_text(cr)},{fmt(t)},{fmt(prob)},{c.sample_count}")
    digests = {"ccdf.csv": _write(os.path.join(out_dir, "ccdf.csv"), lines)}
    digests["ccdf_summary.csv"] = _write(os.path.join(out_dir, "ccdf_summary.csv"), _summary_lines(result.summary))
    if result.telemetry:
        tl = ["symbol,cr,variant,papr_pre_db,papr_clip_db,papr_filt_db"]
        for name, cr, start, tel in sorted(result.telemetry, key=lambda t: (t[0], t[1], t[2])):
            for j in range(len(tel.papr_pre_db)):
                tl.append(f"{start + j},{fmt(cr)},{name},{fmt(tel.papr_pre_db[j])},"
                          f"{fmt(tel.papr_clip_db[j])},{fmt(tel.papr_filt_db[j])}")
        digests["ccdf_telemetry.csv"] = _write(os.path.join(out_dir, "ccdf_telemetry.csv"), tl)
    return digests


def emit_ber_csv(result, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    cfg = result.config
    lines = [BER_HEADER]
    for (variant, cr, snr), (e, n) in result.points.items():
        lines.append(f"{variant},{_cr_text(cr)},{fmt(snr)},{e},{n},{fmt(e / n)},{fmt(e >= cfg.ber_min_errors)}")
    digests = {"ber.csv": _write(os.path.join(out_dir, "ber.csv"), lines)}
    ana = ["scheme,ebn0_db,ber"] + [f"{get_scheme(cfg.scheme).name},{fmt(s)},{fmt(b)}" for s, b in result.analytical.items()]
    digests["ber_analytical.csv"] = _write(os.path.join(out_dir, "ber_analytical.csv"), ana)
    digests["ber_summary.csv"] = _write(os.path.join(out_dir, "ber_summary.csv"), _summary_lines(result.summary))
    return digests


def write_manifest(cfg, out_dir, digests, wall_clock_s, extra=()):
    filters = design_all(cfg)
    lines = [
        f"code_version = {__version__}",
        f"backend = {backend_name()}",
        f"wall_clock_s = {wall_clock_s:.3f}",
        f"awgn_calibration = {CALIBRATION}",
    ]
    lines += [f"config.{k} = {v}" for k, v in cfg.items()]
    lines += [f"filter.{name}.sha256 = {f.digest()}" for name, f in filters.items()]
    lines += [f"{k} = {v}" for k, v in extra]
    lines += [f"output.{name}.sha256 = {d}" for name, d in sorted(digests.items())]
    with open(os.path.join(out_dir, "manifest.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def dump_filter(cfg, variant, path):
    filters = design_all(cfg)
    if variant not in filters:
        raise ConfigError(f"no filter named {variant!r}; choose from {sorted(filters)}")
    f = filters[variant]
    if f.is_fir:
        lines = ["index,tap"] + [f"{i},{t!r}" for i, t in enumerate(f.taps)]
    else:
        lines = ["section,b0,b1,b2,a1,a2"] + [
            f"{i}," + ",".join(repr(float(c)) for c in row) for i, row in enumerate(f.sos)
        ]
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    _write(path, lines)
    return f
