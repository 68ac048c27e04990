"""
Configuration: environment defaults plus the TOML experiment file.

parse_config() returns (ExperimentConfig, AOConfig). Every key is optional;
missing keys take the defaults of the reference setup (8 dBm transmit power,
-50 dBm noise, 8x8 IRS at 50 m). dB and dBm values are converted to linear
here and nowhere else.
"""

import os
import re
from dataclasses import fields, replace
from pathlib import Path

import toml
from dotenv import load_dotenv

from channel.fading import LINKS, FadingSpec, LinkModel
from channel.geometry import Geometry, array_shape_for
from errors import ParseError, ValidationError
from experiment.records import Scheme
from experiment.runner import ExperimentConfig, VerifySettings
from optimizer.settings import AOConfig
from rate.snr import PowerBudget, dbm_to_mw

load_dotenv()

# --- Environment ---
CONFIG_PATH = os.getenv("IRS_RELAY_CONFIG", "configs/default.toml")
LOG_LEVEL = os.getenv("IRS_RELAY_LOG_LEVEL", "INFO").upper()
OUTPUT_DIR = os.getenv("IRS_RELAY_OUTPUT_DIR", "results")

# --- Reference setup ---
P_DBM = 8.0
SIGMA2_DBM = -50.0
D0_START, D0_STOP, D0_STEP = 10.0, 100.0, 10.0

# --- Schema: section -> key -> kind ---
SCHEMA = {
    "geometry": {
        "ap_pos": "point",
        "irs_center_pos": "point",
        "controller_pos": "point",
        "user_pos": "point",
        "irs_rows": "int",
        "irs_cols": "int",
        "m": "int",
        "element_spacing": "float",
        "wavelength": "float",
    },
    "fading": {
        "gamma0_db": "float",
        "exponent_au": "float",
        "exponent": "float",
        "rician_k_db": "float",
        "models": "table",
    },
    "power": {
        "p_dbm": "float",
        "pa_dbm": "float",
        "pc_dbm": "float",
        "sigma2_dbm": "float",
    },
    "solver": {
        f.name: ("int" if f.name in ("max_ao_iters", "randomization_count", "bm_max_iters", "bm_rank") else "float")
        for f in fields(AOConfig)
    },
    "sweep": {
        "d0_values": "float_list",
        "d0_start": "float",
        "d0_stop": "float",
        "d0_step": "float",
        "trials": "int",
        "seed": "int",
        "schemes": "str_list",
        "workers": "int",
    },
    "verify": {
        "instances": "int",
        "ao_instances": "int",
        "oracle_instances": "int",
        "oracle_m": "int",
        "phase_grid_points": "int",
        "alpha_grid_points": "int",
        "seeds": "int_list",
    },
}


# ---------------------------------------------------------------------------
# Type checks
# ---------------------------------------------------------------------------

def _line_of(text: str, section: str, key: str) -> int | None:
    """Line number of `key = ...` inside [section], if it can be found."""
    current = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        header = re.match(r"^\[\s*([\w.]+)\s*\]", stripped)
        if header:
            current = header.group(1)
            continue
        if current is not None and current.split(".")[0] == section and re.match(rf"^{re.escape(key)}\s*=", stripped):
            return number
    return None


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check(kind: str, value) -> bool:
    if kind == "float":
        return _is_number(value)
    if kind == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "point":
        return isinstance(value, list) and len(value) == 3 and all(_is_number(v) for v in value)
    if kind == "float_list":
        return isinstance(value, list) and all(_is_number(v) for v in value)
    if kind == "int_list":
        return isinstance(value, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in value)
    if kind == "str_list":
        return isinstance(value, list) and all(isinstance(v, str) for v in value)
    if kind == "table":
        return isinstance(value, dict)
    return False


def _checked_sections(raw: dict, text: str) -> dict:
    for section, body in raw.items():
        if section not in SCHEMA:
            raise ParseError(f"unknown section [{section}]", key=section)
        if not isinstance(body, dict):
            raise ParseError(f"'{section}' must be a table", line=_line_of(text, section, section), key=section)
        for key, value in body.items():
            kind = SCHEMA[section].get(key)
            where = {"line": _line_of(text, section, key), "key": f"{section}.{key}"}
            if kind is None:
                raise ParseError("unknown key", **where)
            if not _check(kind, value):
                raise ParseError(f"expected {kind.replace('_', ' ')}, got {value!r}", **where)
    return {section: raw.get(section, {}) for section in SCHEMA}


# ---------------------------------------------------------------------------
# Section builders
# ---------------------------------------------------------------------------

def _geometry(body: dict) -> tuple[Geometry, int | None]:
    kwargs = {k: tuple(float(x) for x in v) for k, v in body.items() if k.endswith("_pos")}
    for key in ("element_spacing", "wavelength"):
        if key in body:
            kwargs[key] = float(body[key])
    for key in ("irs_rows", "irs_cols"):
        if key in body:
            kwargs[key] = body[key]

    m = body.get("m")
    if m is not None and m > 0 and "irs_rows" not in body and "irs_cols" not in body:
        kwargs["irs_rows"], kwargs["irs_cols"] = array_shape_for(m)
    return Geometry(**kwargs), m


def _fading(body: dict) -> FadingSpec:
    base = FadingSpec()
    exponents = dict(base.exponents)
    if "exponent" in body:
        exponents.update({link: float(body["exponent"]) for link in LINKS if link != "au"})
    if "exponent_au" in body:
        exponents["au"] = float(body["exponent_au"])

    models = dict(base.models)
    for link, name in body.get("models", {}).items():
        if link not in LINKS:
            raise ParseError(f"unknown link (known: {', '.join(LINKS)})", key=f"fading.models.{link}")
        try:
            models[link] = LinkModel(name)
        except ValueError:
            known = ", ".join(m.value for m in LinkModel)
            raise ParseError(f"unknown link model '{name}' (known: {known})", key=f"fading.models.{link}") from None

    return FadingSpec(
        gamma0_db=float(body.get("gamma0_db", base.gamma0_db)),
        exponents=exponents,
        rician_k_db=float(body.get("rician_k_db", base.rician_k_db)),
        models=models,
    )


def _power(body: dict) -> PowerBudget:
    p_dbm = float(body.get("p_dbm", P_DBM))
    return PowerBudget(
        p_a=dbm_to_mw(float(body.get("pa_dbm", p_dbm))),
        p_c=dbm_to_mw(float(body.get("pc_dbm", p_dbm))),
        p_max=dbm_to_mw(p_dbm),
        sigma2=dbm_to_mw(float(body.get("sigma2_dbm", SIGMA2_DBM))),
    )


def _d0_values(body: dict) -> tuple[float, ...]:
    if "d0_values" in body:
        if any(k in body for k in ("d0_start", "d0_stop", "d0_step")):
            raise ParseError("give either d0_values or d0_start/d0_stop/d0_step, not both", key="sweep.d0_values")
        return tuple(float(d) for d in body["d0_values"])

    start = float(body.get("d0_start", D0_START))
    stop = float(body.get("d0_stop", D0_STOP))
    step = float(body.get("d0_step", D0_STEP))
    if step <= 0:
        raise ValidationError(f"sweep.d0_step must be > 0, got {step}")
    count = int(round((stop - start) / step)) + 1
    if count < 1:
        raise ValidationError(f"empty distance range {start}..{stop}")
    return tuple(round(start + i * step, 9) for i in range(count))


def _verify(body: dict) -> VerifySettings:
    kwargs = dict(body)
    if "seeds" in kwargs:
        kwargs["seeds"] = tuple(kwargs["seeds"])
    return VerifySettings(**kwargs)


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def parse_config_text(text: str) -> tuple[ExperimentConfig, AOConfig]:
    try:
        raw = toml.loads(text)
    except toml.TomlDecodeError as e:
        raise ParseError(f"malformed TOML: {e.msg}", line=e.lineno) from None

    sections = _checked_sections(raw, text)
    geometry, m = _geometry(sections["geometry"])
    sweep = sections["sweep"]
    schemes = tuple(Scheme.parse(name) for name in sweep.get("schemes", [s.value for s in Scheme]))

    experiment = ExperimentConfig(
        geometry=geometry,
        fading=_fading(sections["fading"]),
        power=_power(sections["power"]),
        d0_values=_d0_values(sweep),
        trials=sweep.get("trials", ExperimentConfig.trials),
        seed=sweep.get("seed", ExperimentConfig.seed),
        schemes=schemes,
        m_override=m,
        workers=sweep.get("workers", ExperimentConfig.workers),
        verify=_verify(sections["verify"]),
    )
    solver = AOConfig(**sections["solver"])
    return experiment, solver


def parse_config(path: str | Path | None) -> tuple[ExperimentConfig, AOConfig]:
    """
    Read a TOML config. `None` means "use IRS_RELAY_CONFIG if that file
    exists, else the built-in defaults".
    """
    if path is None:
        default = Path(CONFIG_PATH)
        if not default.is_file():
            return ExperimentConfig(), AOConfig()
        path = default
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"))


def with_seed(experiment: ExperimentConfig, seed: int | None) -> ExperimentConfig:
    return experiment if seed is None else replace(experiment, seed=seed)


def validate(experiment: ExperimentConfig, solver: AOConfig) -> None:
    """Call at startup to catch bad settings before any work starts."""
    if LOG_LEVEL not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ValidationError(f"IRS_RELAY_LOG_LEVEL must be a logging level name, got '{LOG_LEVEL}'")
    # dataclass __post_init__ checks run again on a fresh copy
    replace(experiment)
    replace(solver)
