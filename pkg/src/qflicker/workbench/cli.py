"""Command-line interface.

    qflicker [global options] COMMAND [options]

Every command produces a table (columns, rows, a metadata block and notes)
rendered as CSV or JSON.  Exit status: 0 on success, 2 for bad input or a
schema violation, 3 when a quadrature stops before reaching its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import ConvergenceError, InputError
from ..geometry import (
    Box,
    QuadratureConfig,
    fourier_identity_scalar,
    fourier_identity_vector,
    g_factor_analytic,
    g_factor_numeric,
)
from ..geometry.regions import METHODS
from ..noise import (
    COMPLEX_ODD,
    CONVENTIONS,
    FAIL,
    REAL_POSITIVE,
    STRONG_FIELD_NOTE,
    BiasCondition,
    bose_approx_error,
    predict,
    spectral_unit_factor,
    validity_report,
    voltage_psd,
)
from ..quantities import CGS, CONSTANT_SETS, SI, VOLT_PER_STATVOLT, from_unit, parse_unit
from ..spectral import (
    SpectrumSeries,
    correlation_from_odd_psd,
    psd_parity_decompose,
    total_power_convergence,
)
from ..transport import mobility_from_conductivity, sigma_from_resistance
from .descriptor import SampleDescriptor, from_dict, ingest
from .records import RunRecord

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE = 0, 2, 3


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    status: int = EXIT_OK

    def as_dict(self) -> dict:
        return _plain(
            {"columns": self.columns, "rows": self.rows, "meta": self.meta, "notes": self.notes}
        )


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(v) -> str:
    # repr of a float is the shortest string that round-trips, always with '.'
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(t: Table) -> str:
    buf = io.StringIO()
    for k, v in t.meta.items():
        buf.write(f"# {k}: {_fmt(v) if not isinstance(v, (list, dict)) else json.dumps(_plain(v))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(t.columns)
    for row in t.rows:
        w.writerow([_fmt(v) for v in row])
    for n in t.notes:
        buf.write(f"# {n}\n")
    return buf.getvalue()


def render_json(t: Table) -> str:
    return json.dumps(t.as_dict(), indent=2) + "\n"


# -- context ----------------------------------------------------------------------


class Context:
    def __init__(self, args, descriptor_override=None):
        self.args = args
        self.units = args.units.upper()
        self.constants = CONSTANT_SETS[args.constants]
        self._override = descriptor_override
        self.descriptor: SampleDescriptor | None = None

    def quad(self, method=None, budget=None) -> QuadratureConfig:
        a = self.args
        return QuadratureConfig(
            method=method or getattr(a, "quadrature", METHODS[0]),
            tolerance=a.tolerance,
            budget=budget or getattr(a, "budget", 2_000_000),
            seed=a.seed,
        )

    def load(self, name) -> SampleDescriptor:
        if self._override is not None:
            self.descriptor = self._override
        else:
            self.descriptor = ingest(name)
        return self.descriptor

    # unit labels for the active output system
    @property
    def spec_col(self) -> str:
        return "c_u_v2_per_hz" if self.units == SI else "c_u_statv2_s"

    def g_out(self, g_per_cm: float) -> float:
        return g_per_cm * 100.0 if self.units == SI else g_per_cm

    @property
    def g_unit(self) -> str:
        return "1/m" if self.units == SI else "1/cm"

    def mu_out(self, mu_cgs: float) -> tuple[float, str]:
        if self.units == SI:
            return mu_cgs / VOLT_PER_STATVOLT, "cm2/(V*s)"
        return mu_cgs, "cm2/(statV*s)"


def _g_value(ctx: Context, desc: SampleDescriptor, method: str):
    """(g in 1/cm, metadata, converged)."""
    if method == "analytic":
        if not isinstance(desc.region, Box):
            raise InputError("the analytic g-factor needs a box geometry; use --gfactor numeric")
        return g_factor_analytic(desc.region).value, {"g_method": "analytic"}, True
    res = g_factor_numeric(desc.region, desc.leads, ctx.quad())
    meta = {
        "g_method": f"numeric ({res.method})",
        "g_error": ctx.g_out(res.error),
        "g_converged": res.converged,
    }
    return res.value, meta, res.converged


def _freqs(args) -> np.ndarray:
    if getattr(args, "f_log", None):
        try:
            lo, hi, n = float(args.f_log[0]), float(args.f_log[1]), int(args.f_log[2])
        except ValueError:
            raise InputError(f"--f-log expects LO HI N, got {args.f_log}") from None
        if not (lo > 0 and hi > 0 and n >= 1):
            raise InputError("--f-log needs positive LO and HI (Hz) and N >= 1")
        f = np.logspace(math.log10(lo), math.log10(hi), n)
    else:
        f = np.asarray(args.f if args.f else [1.0], dtype=float)
    if np.any(f == 0):
        raise InputError("frequency grid contains 0 (the spectrum has a pole there)")
    return f


def _validity_notes(ctx: Context, rep) -> list:
    notes = []
    for e in rep.entries:
        notes.append(
            f"validity {e.name}: value={e.value!r} threshold={e.threshold!r} "
            f"margin={e.margin!r} status={e.status}"
        )
    win = "none" if rep.window is None else f"{rep.window[0]!r}..{rep.window[1]!r} Hz"
    notes.append(f"validity trusted_window: {win}")
    notes.extend(f"note: {n}" for n in rep.notes)
    return notes


def _prediction(ctx: Context, desc: SampleDescriptor, g_method: str, convention: str):
    g, gmeta, ok = _g_value(ctx, desc, g_method)
    spec = desc.material.mobility_spec
    pred = predict(
        g, spec, desc.T, desc.U0, material=desc.material,
        constants=ctx.constants, convention=convention,
    )
    return pred, g, gmeta, ok


# -- commands ----------------------------------------------------------------------


def cmd_gfactor(ctx: Context) -> Table:
    a = ctx.args
    desc = ctx.load(a.descriptor)
    methods = ["analytic", "numeric"] if a.method == "both" else [a.method]
    if not isinstance(desc.region, Box) and "analytic" in methods:
        if a.method == "analytic":
            raise InputError("the analytic g-factor needs a box geometry")
        methods.remove("analytic")
    rows, status = [], EXIT_OK
    meta = {"sample": desc.name, "units": ctx.units, "g_unit": ctx.g_unit}
    for m in methods:
        if m == "analytic":
            cutoff = None if a.cutoff is None else from_unit(a.cutoff, a.cutoff_units)
            g = g_factor_analytic(desc.region, cutoff=cutoff).value
            rows.append(["analytic", ctx.g_out(g), 0.0, True, 0])
        else:
            res = g_factor_numeric(desc.region, desc.leads, ctx.quad())
            rows.append([res.method, ctx.g_out(res.value), ctx.g_out(res.error), res.converged, res.n_evals])
            if not res.converged:
                status = EXIT_CONVERGENCE
    if len(rows) == 2:
        meta["numeric_over_analytic"] = rows[1][1] / rows[0][1] if rows[0][1] else math.inf
    return Table(["method", "g", "error", "converged", "n_evals"], rows, meta, status=status)


def cmd_predict(ctx: Context) -> Table:
    a = ctx.args
    desc = ctx.load(a.descriptor)
    f = _freqs(a)
    pred, g, gmeta, ok = _prediction(ctx, desc, a.gfactor, a.convention)
    values = pred.spectrum(f, ctx.units)
    mu_val, mu_unit = ctx.mu_out(pred.provenance["mu_cgs"])

    meta = {
        "sample": desc.name,
        "units": ctx.units,
        "constants": ctx.constants.name,
        "convention": a.convention,
        "eta": pred.eta,
        "g": ctx.g_out(g),
        "g_unit": ctx.g_unit,
        **gmeta,
        "mu": mu_val,
        "mu_unit": mu_unit,
        "T_K": desc.T,
        "U0_V": desc.U0 * VOLT_PER_STATVOLT,
    }
    if desc.material.sigma is not None:
        mu_sigma = mobility_from_conductivity(desc.material.sigma, desc.material.n, desc.material.e)
        meta["mu_from_sigma"] = ctx.mu_out(mu_sigma.value)[0]
    if desc.resistance is not None and isinstance(desc.region, Box):
        sig = sigma_from_resistance(desc.resistance, desc.region, SI)
        meta["sigma_from_resistance_S_per_m"] = sig.value
    for f_ref, c_ref in desc.references:
        c_pred = float(voltage_psd(pred.eta, pred.U0, f_ref, REAL_POSITIVE, CGS))
        meta[f"ratio_to_reference_at_{f_ref:g}_hz"] = c_pred / c_ref

    if a.convention == COMPLEX_ODD:
        cols = ["f_hz", ctx.spec_col + "_re", ctx.spec_col + "_im"]
        rows = [[fi, float(np.real(v)), float(np.imag(v))] for fi, v in zip(f, values)]
    else:
        cols = ["f_hz", ctx.spec_col]
        rows = [[fi, float(v)] for fi, v in zip(f, values)]

    bias = BiasCondition(desc.U0, desc.T, desc.direction)
    rep = validity_report(desc.material, bias, desc.leads, f, constants=ctx.constants)
    notes = _validity_notes(ctx, rep)
    if rep["strong_field"].status == FAIL:
        print(f"qflicker: {STRONG_FIELD_NOTE}", file=sys.stderr)
    return Table(cols, rows, meta, notes, EXIT_OK if ok else EXIT_CONVERGENCE)


_SWEEP_DEFAULT_UNITS = {"U0": "V", "T": "K", "l": "um", "w": "um", "h": "um"}


def cmd_sweep(ctx: Context) -> Table:
    a = ctx.args
    base = ctx.load(a.descriptor)
    f = _freqs(a)
    unit = a.param_units or _SWEEP_DEFAULT_UNITS[a.param]
    rows, status = [], EXIT_OK
    for v in a.values:
        q = from_unit(v, unit).value
        desc = base
        if a.param == "U0":
            desc = replace(base, U0=q)
        elif a.param == "T":
            desc = replace(base, T=q)
        else:
            if not isinstance(base.region, Box):
                raise InputError("dimension sweeps need a box geometry")
            dims = {"l": base.region.l, "w": base.region.w, "h": base.region.h}
            dims[a.param] = q
            box = Box(dims["l"], dims["w"], dims["h"])
            desc = replace(base, region=box, leads=box.end_face_leads())
        pred, g, _, ok = _prediction(ctx, desc, a.gfactor, REAL_POSITIVE)
        if not ok:
            status = EXIT_CONVERGENCE
        for fi, c in zip(f, pred.spectrum(f, ctx.units)):
            rows.append([a.param, v, unit, fi, float(c), pred.eta, ctx.g_out(g)])
    meta = {"sample": base.name, "units": ctx.units, "constants": ctx.constants.name,
            "g_unit": ctx.g_unit}
    if a.param in ("l", "w", "h"):
        meta["leads"] = "end-face centres of the swept box"
    return Table(["param", "value", "value_units", "f_hz", ctx.spec_col, "eta", "g"], rows, meta,
                 status=status)


def cmd_validity(ctx: Context) -> Table:
    a = ctx.args
    desc = ctx.load(a.descriptor)
    f = np.asarray(a.f_range, dtype=float)
    bias = BiasCondition(desc.U0, desc.T, desc.direction)
    rep = validity_report(desc.material, bias, desc.leads, f, constants=ctx.constants)
    rows = [[e.name, e.value, e.threshold, e.margin, e.status] for e in rep.entries]
    meta = {
        "sample": desc.name,
        "constants": ctx.constants.name,
        "units": "CGS (statV, cm, s, Hz)",
        "f_range_hz": [float(f.min()), float(f.max())],
        "trusted_window_hz": "none" if rep.window is None else list(rep.window),
        "overall": rep.worst,
    }
    notes = [f"note: {n}" for n in rep.notes]
    return Table(["bound", "value", "threshold", "margin", "status"], rows, meta, notes)


def cmd_compare(ctx: Context) -> Table:
    a = ctx.args
    desc = ctx.load(a.descriptor)
    if not desc.references:
        raise InputError(f"descriptor {desc.name} has no reference spectrum")
    pred, g, gmeta, ok = _prediction(ctx, desc, a.gfactor, REAL_POSITIVE)
    fac = spectral_unit_factor(ctx.units)
    rows = []
    for f_ref, c_ref in desc.references:
        c_pred = float(pred.spectrum(f_ref, CGS))
        rows.append([f_ref, c_ref * fac, c_pred * fac, c_pred / c_ref])
    meta = {"sample": desc.name, "units": ctx.units, "constants": ctx.constants.name,
            "eta": pred.eta, "g": ctx.g_out(g), "g_unit": ctx.g_unit, **gmeta}
    cols = ["f_hz", "measured_" + ctx.spec_col, "predicted_" + ctx.spec_col, "ratio"]
    return Table(cols, rows, meta, status=EXIT_OK if ok else EXIT_CONVERGENCE)


def cmd_fourier(ctx: Context) -> Table:
    a = ctx.args
    if a.op == "correlation":
        F = math.inf if a.F.lower() in ("inf", "infinity") else float(a.F)
        rows = [[t, correlation_from_odd_psd(a.A, t, F), math.copysign(a.A / 2, t) if t else 0.0]
                for t in a.tau]
        return Table(["tau_s", "correlation", "asymptote"], rows, {"A": a.A, "F_hz": F})
    if a.op == "convergence":
        rep = total_power_convergence(a.gamma, a.tau, a.F, a.conv_tol)
        rows = [
            [F, p, b, lo, hi]
            for F, p, b, lo, hi in zip(rep.F, rep.partials, rep.tail_bounds, rep.even_low, rep.even_high)
        ]
        meta = {"gamma": rep.gamma, "tau_s": rep.tau, "limit": rep.limit, "verdict": rep.verdict,
                "tail_bounds_hold": rep.bounds_hold, "even_continuation": rep.even_verdict}
        return Table(["F_hz", "partial", "tail_bound", "even_low", "even_high"], rows, meta)
    # parity
    data = _read_spectrum_csv(a.input)
    dec = psd_parity_decompose(data)
    rows = [[f, e, o] for f, e, o in zip(dec.freq, dec.even, dec.odd)]
    norm = float(np.linalg.norm(data.values)) or 1.0
    meta = {"residual_relative": float(np.linalg.norm(dec.residual)) / norm}
    return Table(["f_hz", "even_real", "odd_imag"], rows, meta)


def _read_spectrum_csv(path) -> SpectrumSeries:
    try:
        lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    reader = csv.DictReader(lines)
    need = {"f_hz", "re", "im"}
    if reader.fieldnames is None or not need <= set(reader.fieldnames):
        raise InputError(f"{path}: expected columns f_hz,re,im")
    f, v = [], []
    for row in reader:
        try:
            f.append(float(row["f_hz"]))
            v.append(complex(float(row["re"]), float(row["im"])))
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None
    return SpectrumSeries(np.array(f), np.array(v))


def cmd_verify_identities(ctx: Context) -> Table:
    a = ctx.args
    rows = []
    for r in a.r:
        for eps in a.eps:
            c = fourier_identity_scalar(r, eps)
            rows.append(["scalar", r, eps, c.numeric, c.exact, c.relative_error])
    for vec in a.vector or []:
        c = fourier_identity_vector(vec, a.vector_eps)
        rows.append(["vector", float(np.linalg.norm(vec)), a.vector_eps, c.magnitude,
                     float(np.linalg.norm(c.exact)), c.relative_error])
    return Table(["identity", "r_cm", "eps_cm", "numeric", "exact", "relative_error"], rows,
                 {"vector_numeric": "central differences of the quadrature scalar"})


def cmd_bose(ctx: Context) -> Table:
    a = ctx.args
    rows = []
    for f in a.f:
        b = bose_approx_error(f, a.T, ctx.constants, angular=a.angular)
        rows.append([f, a.T, b.x, b.relative_error])
    col = "omega_rad_s" if a.angular else "f_hz"
    return Table([col, "T_K", "x", "relative_error"], rows, {"constants": ctx.constants.name})


COMMANDS = {
    "gfactor": cmd_gfactor,
    "predict": cmd_predict,
    "sweep": cmd_sweep,
    "validity": cmd_validity,
    "compare": cmd_compare,
    "fourier": cmd_fourier,
    "verify-identities": cmd_verify_identities,
    "bose": cmd_bose,
}


# -- parser -----------------------------------------------------------------------


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = p.add_argument_group("global options")
    g.add_argument("--units", choices=["si", "cgs"], default=d("si"),
                   help="unit system for reported values (default si)")
    g.add_argument("--constants", choices=sorted(CONSTANT_SETS), default=d("codata"),
                   help="physical constant set (default codata)")
    g.add_argument("--seed", type=int, default=d(0), help="Monte Carlo seed")
    g.add_argument("--tolerance", type=float, default=d(1e-3), help="relative quadrature tolerance")
    g.add_argument("--output", choices=["csv", "json"], default=d("csv"))
    g.add_argument("--out", default=d(None), help="write the table here instead of stdout")
    g.add_argument("--record", default=d(None), help="write a run record JSON here")
    g.add_argument("--plot-data", default=d(None), metavar="PREFIX",
                   help="also write PREFIX.csv and PREFIX.json (data and metadata for plotting)")


def _add_quadrature(p):
    p.add_argument("--quadrature", choices=METHODS, default=METHODS[0])
    p.add_argument("--budget", type=int, default=2_000_000, help="quadrature evaluation budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qflicker", description="Flicker-noise predictions for biased conducting samples."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _add_globals(p, suppress=True)
        return p

    p = add("gfactor", "geometric factor of a sample")
    p.add_argument("descriptor", help="descriptor JSON path or bundled name (voss1981_gold)")
    p.add_argument("--method", choices=["analytic", "numeric", "both"], default="both")
    p.add_argument("--cutoff", type=float, help="lower cutoff of the slab formula (default: width)")
    p.add_argument("--cutoff-units", default="um")
    _add_quadrature(p)

    def spectrum_opts(p):
        p.add_argument("descriptor", help="descriptor JSON path or bundled name (voss1981_gold)")
        p.add_argument("--f", type=float, nargs="+", help="frequencies in Hz (default 1)")
        p.add_argument("--f-log", nargs=3, metavar=("LO", "HI", "N"),
                       help="log-spaced grid of N frequencies from LO to HI Hz")
        p.add_argument("--gfactor", choices=["analytic", "numeric"], default="analytic")
        _add_quadrature(p)

    p = add("predict", "voltage noise spectrum with a validity summary")
    spectrum_opts(p)
    p.add_argument("--convention", choices=CONVENTIONS, default=REAL_POSITIVE)

    p = add("sweep", "spectrum over a grid of one parameter (long-format table)")
    spectrum_opts(p)
    p.add_argument("--param", choices=sorted(_SWEEP_DEFAULT_UNITS), required=True)
    p.add_argument("--values", type=float, nargs="+", required=True)
    p.add_argument("--param-units", help="units of --values (default V, K or um)")

    p = add("validity", "check the small-parameter conditions over a frequency range")
    p.add_argument("descriptor")
    p.add_argument("--f-range", type=float, nargs=2, default=[1.0, 1e6], metavar=("LO", "HI"))

    p = add("compare", "prediction against the descriptor's reference spectrum")
    p.add_argument("descriptor")
    p.add_argument("--gfactor", choices=["analytic", "numeric"], default="analytic")
    _add_quadrature(p)

    p = add("fourier", "odd-spectrum Fourier analysis")
    fsub = p.add_subparsers(dest="op", required=True)
    q = fsub.add_parser("correlation", help="correlation function of the band-limited odd spectrum")
    _add_globals(q, suppress=True)
    q.add_argument("--A", type=float, default=1.0, help="amplitude eta*U0^2")
    q.add_argument("--tau", type=float, nargs="+", required=True)
    q.add_argument("--F", default="inf", help="band limit in Hz or 'inf'")
    q = fsub.add_parser("convergence", help="partial integrals of the odd 1/f^gamma continuation")
    _add_globals(q, suppress=True)
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--tau", type=float, default=1.0)
    q.add_argument("--F", type=float, nargs="+", required=True, help="increasing band limits (Hz)")
    q.add_argument("--conv-tol", type=float, default=1e-3)
    q = fsub.add_parser("parity", help="even-real / odd-imaginary split of a sampled spectrum")
    _add_globals(q, suppress=True)
    q.add_argument("input", help="CSV with columns f_hz,re,im on a grid symmetric about 0")

    p = add("verify-identities", "numerical checks of the momentum-space Fourier identities")
    p.add_argument("--r", type=float, nargs="+", default=[1.0], help="distances (cm)")
    p.add_argument("--eps", type=float, nargs="+", default=[1e-2, 1e-3], help="regulators (cm)")
    p.add_argument("--vector", type=float, nargs=3, action="append", metavar=("X", "Y", "Z"))
    p.add_argument("--vector-eps", type=float, default=1e-3)

    p = add("bose", "accuracy of the small hbar*omega/kT Bose-factor approximation")
    p.add_argument("--f", type=float, nargs="+", required=True, help="frequency (Hz, or rad/s with --angular)")
    p.add_argument("--T", type=float, required=True, help="temperature (K)")
    p.add_argument("--angular", action="store_true", help="--f values are angular frequencies")

    p = add("replay", "re-run a recorded command and compare its outputs")
    p.add_argument("record_file")
    return parser


# -- driver -----------------------------------------------------------------------


def _check_units(args) -> None:
    if getattr(args, "cutoff_units", None):
        parse_unit(args.cutoff_units)
    if getattr(args, "param_units", None):
        parse_unit(args.param_units)


def execute(args, descriptor_override=None) -> tuple[Table, Context, list]:
    ctx = Context(args, descriptor_override)
    _check_units(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        table = COMMANDS[args.command](ctx)
    messages = [f"{w.category.__name__}: {w.message}" for w in caught]
    table.notes.extend(f"warning: {m}" for m in messages)
    return table, ctx, messages


def _write(table: Table, args) -> None:
    text = render_json(table) if args.output == "json" else render_csv(table)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.plot_data:
        prefix = Path(args.plot_data)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        prefix.with_suffix(".csv").write_text(buf.getvalue())
        side = {"command": args.command, "columns": table.columns, "meta": table.meta,
                "notes": table.notes}
        prefix.with_suffix(".json").write_text(json.dumps(_plain(side), indent=2) + "\n")


def _record(table, ctx, messages, argv, args) -> None:
    desc = ctx.descriptor
    rec = RunRecord(
        command=args.command,
        argv=list(argv),
        outputs=table.as_dict(),
        resolved_inputs=desc.resolved() if desc else {},
        descriptor=desc.source if desc else None,
        warnings=messages,
        seed=args.seed,
        constants=args.constants,
    )
    rec.save(args.record)


def _strip_record_flags(argv: list) -> list:
    out, skip = [], False
    for tok in argv:
        if skip:
            skip = False
            continue
        if tok in ("--record", "--out", "--plot-data"):
            skip = True
            continue
        if tok.startswith(("--record=", "--out=", "--plot-data=")):
            continue
        out.append(tok)
    return out


def replay(path, parser) -> int:
    rec = RunRecord.load(path)
    args = parser.parse_args(rec.argv)
    override = from_dict(rec.descriptor) if rec.descriptor else None
    table, _, _ = execute(args, override)
    fresh = json.loads(json.dumps(table.as_dict()))
    if fresh == rec.outputs:
        print(f"replay of {rec.command}: outputs identical")
        return EXIT_OK
    for key in ("columns", "rows", "meta", "notes"):
        if fresh.get(key) != rec.outputs.get(key):
            print(f"replay of {rec.command}: '{key}' differs", file=sys.stderr)
    return 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return replay(args.record_file, parser)
        table, ctx, messages = execute(args)
        for m in messages:
            print(f"qflicker: {m}", file=sys.stderr)
        _write(table, args)
        if args.record:
            _record(table, ctx, messages, _strip_record_flags(argv), args)
        return table.status
    except InputError as exc:
        print(f"qflicker: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(f"qflicker: not converged: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
