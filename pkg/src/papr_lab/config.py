"""Experiment configuration: flat ``dotted.key = value`` files plus overrides.

Example::

    # default geometry
    ofdm.n = 128
    ofdm.oversample = 8
    cr_list = 0.8, 1.0, 1.2, 1.4, 1.6
"""
from dataclasses import dataclass, field, replace
import math

from .clipping import FilterSettings, kernel_spec, lowpass_spec, DEFAULT_CR_LIST
from .errors import ConfigError
from .filters import design
from .modem import get_scheme
from .ofdm import OfdmParams


def _opt_float(text):
    return None if text.lower() in ("", "none", "auto") else float(text)


def _bool(text):
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text):
    return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())


def _name_list(text):
    return tuple(t.strip().lower() for t in text.split(",") if t.strip())


# key -> (section, attribute, parser); section None means a top-level field
KEYS = {
    "ofdm.n": ("ofdm", "n_subcarriers", int),
    "ofdm.oversample": ("ofdm", "oversample", int),
    "ofdm.cp_len": ("ofdm", "cp_len", int),
    "ofdm.bandwidth_hz": ("ofdm", "bandwidth_hz", float),
    "ofdm.carrier_hz": ("ofdm", "carrier_hz", float),
    "scheme": (None, "scheme", str.lower),
    "variants": (None, "variants", _name_list),
    "cr_list": (None, "cr_list", _float_list),
    "snr_grid_db": (None, "snr_grid_db", _float_list),
    "n_symbols_ccdf": (None, "n_symbols_ccdf", int),
    "bit_budget_ber": (None, "bit_budget_ber", int),
    "master_seed": (None, "master_seed", int),
    "ccdf.min_db": (None, "ccdf_min_db", float),
    "ccdf.max_db": (None, "ccdf_max_db", float),
    "ccdf.step_db": (None, "ccdf_step_db", float),
    "ccdf.domain": (None, "ccdf_domain", str.lower),
    "ccdf.report_probability": (None, "ccdf_report_probability", float),
    "ccdf.telemetry": (None, "ccdf_telemetry", _bool),
    "ber.report_ebn0_db": (None, "ber_report_ebn0_db", float),
    "ber.min_errors": (None, "ber_min_errors", int),
    "ber.stop_at_min_errors": (None, "ber_stop_at_min_errors", _bool),
    "ber.axis": (None, "ber_axis", str.lower),
    "clip.sigma": (None, "clip_sigma", str.lower),
    "filters.previous.order": ("filters", "previous_order", int),
    "filters.previous.cutoff_hz": ("filters", "previous_cutoff_hz", _opt_float),
    "filters.proposed.order": ("filters", "proposed_order", int),
    "filters.proposed.ripple_db": ("filters", "proposed_ripple_db", float),
    "filters.proposed.low_hz": ("filters", "proposed_low_hz", _opt_float),
    "filters.proposed.high_hz": ("filters", "proposed_high_hz", _opt_float),
    "filters.lpf.order": ("filters", "lpf_order", int),
    "filters.lpf.cutoff_hz": ("filters", "lpf_cutoff_hz", _opt_float),
    "run.workers": (None, "workers", int),
    "run.batch_size": (None, "batch_size", int),
}


@dataclass(frozen=True)
class ExperimentConfig:
    ofdm: OfdmParams = field(default_factory=OfdmParams)
    filters: FilterSettings = field(default_factory=FilterSettings)
    scheme: str = "qpsk"
    variants: tuple = ("previous", "proposed")
    cr_list: tuple = DEFAULT_CR_LIST
    snr_grid_db: tuple = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0)
    n_symbols_ccdf: int = 100_000
    bit_budget_ber: int = 2_000_000
    master_seed: int = 20140103
    ccdf_min_db: float = 0.0
    ccdf_max_db: float = 16.0
    ccdf_step_db: float = 0.02
    ccdf_domain: str = "passband"
    ccdf_report_probability: float = 0.1
    ccdf_telemetry: bool = False
    ber_report_ebn0_db: float = 6.0
    ber_min_errors: int = 100
    ber_stop_at_min_errors: bool = False
    ber_axis: str = "ebn0"
    clip_sigma: str = "per_symbol"
    workers: int = 1
    batch_size: int = 1000

    def items(self):
        """Resolved ``(key, value-text)`` pairs in table order."""
        out = []
        for key, (section, attr, _) in KEYS.items():
            obj = getattr(self, section) if section else self
            out.append((key, format_value(getattr(obj, attr))))
        return out

    def determinism_items(self):
        """Like :meth:`items` but without settings that must not change results."""
        return [(k, v) for k, v in self.items() if k != "run.workers"]


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ", ".join(format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_text(text):
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def build_config(pairs, base=None):
    """Apply ``(key, text)`` pairs on top of ``base``; report every bad entry at once."""
    cfg = base or ExperimentConfig()
    top, sections, errors = {}, {"ofdm": {}, "filters": {}}, []
    for key, text in pairs:
        if key not in KEYS:
            errors.append(f"unknown key {key!r}")
            continue
        section, attr, parse = KEYS[key]
        try:
            value = parse(text)
        except ValueError as exc:
            errors.append(f"{key}: cannot parse {text!r} ({exc})")
            continue
        (sections[section] if section else top)[attr] = value
    if errors:
        raise ConfigError("; ".join(errors))
    try:
        ofdm = replace(cfg.ofdm, **sections["ofdm"])
    except ConfigError as exc:
        raise ConfigError(f"ofdm: {exc}") from None
    cfg = replace(cfg, ofdm=ofdm, filters=replace(cfg.filters, **sections["filters"]), **top)
    validate(cfg)
    return cfg


def load_config(path=None, overrides=()):
    pairs = []
    if path is not None:
        try:
            with open(path) as fh:
                pairs.extend(parse_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return build_config(pairs)


def needs_passband(cfg):
    return cfg.ccdf_domain == "passband"


def validate(cfg, for_ber=False):
    errors = []
    try:
        get_scheme(cfg.scheme)
    except ConfigError as exc:
        errors.append(str(exc))
    for v in cfg.variants:
        if v not in ("none", "previous", "proposed"):
            errors.append(f"unknown variant {v!r}")
    for cr in cfg.cr_list:
        if not cr > 0:
            errors.append(f"clipping ratio {cr} must be positive")
    if cfg.n_symbols_ccdf < 1:
        errors.append("n_symbols_ccdf must be >= 1")
    if cfg.bit_budget_ber < 1:
        errors.append("bit_budget_ber must be >= 1")
    if cfg.batch_size < 1:
        errors.append("run.batch_size must be >= 1")
    if cfg.workers < 1:
        errors.append("run.workers must be >= 1")
    if not cfg.ccdf_min_db < cfg.ccdf_max_db or not cfg.ccdf_step_db > 0:
        errors.append("ccdf grid needs min_db < max_db and step_db > 0")
    if not 0 < cfg.ccdf_report_probability < 1:
        errors.append("ccdf.report_probability must lie in (0, 1)")
    if cfg.ccdf_domain not in ("passband", "baseband"):
        errors.append(f"ccdf.domain must be passband or baseband, got {cfg.ccdf_domain!r}")
    clipped = [v for v in cfg.variants if v != "none"]
    if cfg.ccdf_domain == "baseband" and clipped and cfg.cr_list:
        errors.append("clipping variants run on the passband signal; use ccdf.domain = passband")
    if cfg.ber_axis not in ("ebn0", "snr"):
        errors.append(f"ber.axis must be ebn0 or snr, got {cfg.ber_axis!r}")
    if cfg.clip_sigma not in ("per_symbol", "global"):
        errors.append(f"clip.sigma must be per_symbol or global, got {cfg.clip_sigma!r}")
    if any(not math.isfinite(s) for s in cfg.snr_grid_db if s != math.inf):
        errors.append("snr_grid_db entries must be finite or inf")
    if needs_passband(cfg) or for_ber:
        try:
            cfg.ofdm.validate_passband()
        except ConfigError as exc:
            errors.append(str(exc))
        else:
            for name in ("previous", "proposed"):
                try:
                    kernel_spec(name, cfg.ofdm, cfg.filters)
                except ConfigError as exc:
                    errors.append(f"{name} kernel: {exc}")
            try:
                lowpass_spec(cfg.ofdm, cfg.filters)
            except ConfigError as exc:
                errors.append(f"receiver lowpass: {exc}")
    if errors:
        raise ConfigError("; ".join(errors))


def design_all(cfg):
    """Design every filter the configuration uses (raises NumericalError on failure)."""
    out = {"lpf": design(lowpass_spec(cfg.ofdm, cfg.filters))}
    for name in ("previous", "proposed"):
        out[name] = design(kernel_spec(name, cfg.ofdm, cfg.filters))
    return out
