"""Command-line front end.

Flags take the form ``--key=value``; ``--config=FILE`` reads ``key=value``
lines (``#`` starts a comment) and flags override the file.  SI inputs
carry their unit in the key name.  Exit codes: 0 success, 1 runtime or
model error, 2 usage error.
"""
from __future__ import annotations

import argparse
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .channel import convergence_study
from .core import FockParams
from .experiments import (SERIES_COLUMNS, ProtocolConfig, boosted_protocol, entanglement_series,
                          heating_series, mimicry_report, unboosted_revival)
from .models import PhysicalParams, derive_couplings, locc_channel, locc_lindblad

SCENARIOS = ("revival", "boosted", "heating", "entanglement", "mimic", "converge",
             "couplings", "selftest")
CONVERGE_DTS = (1e-3, 1e-4, 1e-5, 1e-6)
NUMBER_FORMAT = "{:.15g}"


def _auto_float(s: str):
    return None if s.strip().lower() in ("auto", "none", "") else float(s)


# key -> (parser, target, attribute)
KEYS = {
    "model": (str, "protocol", "model"),
    "alpha_t": (float, "protocol", "alpha_t"),
    "beta_t": (float, "protocol", "beta_t"),
    "omega_sim": (float, "protocol", "omega_sim"),
    "delta": (complex, "protocol", "delta"),
    "t_max": (_auto_float, "protocol", "t_max"),
    "dt": (_auto_float, "protocol", "dt"),
    "n_cut": (int, "protocol", "n_cut"),
    "n_atoms": (int, "both", "n_atoms"),
    "gamma_rate": (float, "protocol", "gamma_rate"),
    "samples": (int, "protocol", "samples"),
    "G_N": (float, "physical", "G_N"),
    "hbar_J_s": (float, "physical", "hbar"),
    "m_kg": (float, "physical", "m_atom"),
    "M_kg": (float, "physical", "M_osc"),
    "ell_m": (float, "physical", "ell"),
    "d_m": (float, "physical", "d"),
    "omega_rad_s": (float, "physical", "omega"),
}

DEFAULT_MODEL = {"revival": "gravity", "entanglement": "gravity"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    scenario: str
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    physical: PhysicalParams = field(default_factory=PhysicalParams)
    output_path: Path | None = None


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gravlocc",
        description="Qubit-oscillator open-system scenarios (CSV output).",
        allow_abbrev=False,
    )
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--config", help="file of key=value lines; flags override it")
    p.add_argument("--output", help="CSV destination (default: standard output)")
    for key in KEYS:
        p.add_argument(f"--{key}", dest=key)
    return p


def read_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS and key not in ("scenario", "output"):
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def parse_config(argv) -> RunConfig:
    """Build a RunConfig; raises UsageError on bad input."""
    ns, extra = _parser().parse_known_args(argv)
    if extra:
        raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
    values = read_config_file(ns.config) if ns.config else {}
    for key, value in vars(ns).items():
        if key != "config" and value is not None:
            values[key] = value
    scenario = values.pop("scenario", None)
    if scenario is None:
        raise UsageError("missing --scenario")
    if scenario not in SCENARIOS:
        raise UsageError(f"unknown scenario {scenario!r}")
    output = values.pop("output", None)

    proto, phys = {}, {}
    for key, raw in values.items():
        conv, target, attr = KEYS[key]
        try:
            val = conv(raw)
        except ValueError:
            raise UsageError(f"cannot parse {key}={raw!r}") from None
        if target in ("protocol", "both"):
            proto[attr] = val
        if target in ("physical", "both"):
            phys[attr] = val
    proto.setdefault("model", DEFAULT_MODEL.get(scenario, "locc"))
    try:
        protocol = ProtocolConfig(**proto)
        physical = PhysicalParams(**phys)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(scenario, protocol, physical, Path(output) if output else None)


def _fmt(x) -> str:
    return NUMBER_FORMAT.format(float(x))


def _table(header, rows, comments=()) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    for key, value in comments:
        out.write(f"# {key}={_fmt(value)}\n")
    return out.getvalue()


def render(cfg: RunConfig) -> str:
    """Run the scenario and return its text output."""
    p = cfg.protocol
    s = cfg.scenario
    if s == "revival":
        return _table(SERIES_COLUMNS, unboosted_revival(p).rows())
    if s == "entanglement":
        return _table(SERIES_COLUMNS, entanglement_series(p).rows())
    if s == "boosted":
        r = boosted_protocol(p)
        return _table(SERIES_COLUMNS, r.series.rows(),
                      [("fitted_decay", r.fitted_decay), ("effective_rate", r.effective_rate),
                       ("oracle_rate", r.oracle_rate)])
    if s == "heating":
        r = heating_series(p)
        return _table(SERIES_COLUMNS, r.series.rows(),
                      [("fitted_dn_dt", r.fitted_dn_dt), ("effective_rate", r.effective_rate)])
    if s == "mimic":
        r = mimicry_report(p.alpha_t, p.beta_t, p.omega_sim, FockParams(p.n_cut), p.samples, p.dt)
        return _table(("t", "visibility_gravity", "visibility_locc"), r.rows(),
                      [("deficit", r.deficit)])
    if s == "converge":
        fock = FockParams(p.n_cut)
        res, slope = convergence_study(lambda dt: locc_channel(p.alpha_t, p.beta_t, dt, fock),
                                       locc_lindblad(p.alpha_t, p.beta_t, fock), CONVERGE_DTS)
        return _table(("dt", "residual"), zip(CONVERGE_DTS, res), [("slope", slope)])
    if s == "couplings":
        c = derive_couplings(cfg.physical)
        items = [("x0_m", c.x0), ("alpha", c.alpha), ("beta", c.beta), ("gamma", c.gamma),
                 ("lambda", c.lam), ("alpha_tilde", c.alpha_tilde), ("beta_tilde", c.beta_tilde),
                 ("lambda_tilde", c.lambda_tilde), ("n_gamma", c.n_gamma)]
        return "".join(f"{k}={_fmt(v)}\n" for k, v in items)
    raise UsageError(f"unknown scenario {s!r}")


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    if cfg.scenario == "selftest":
        from .selftest import run_selftest
        return 0 if run_selftest(lambda line: print(line, file=stdout)) else 1
    try:
        text = render(cfg)
    except Exception as exc:
        print(f"gravlocc: error: {exc}", file=stderr)
        return 1
    if cfg.output_path is None:
        stdout.write(text)
    else:
        with open(cfg.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = _parser()
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gravlocc: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse reports bad choices this way
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
