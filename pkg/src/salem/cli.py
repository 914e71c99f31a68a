"""Command line entry point and the end-to-end pipeline.

``salem run`` executes modulus selection, the single-scale measures, the
multi-scale iteration and the covering report, writes every artifact into a
run directory and exits nonzero iff an asserted check fails.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, fields
from dataclasses import field as dc_field
from pathlib import Path

import numpy as np

from .errors import BoundViolated, BudgetExceeded, ConfigInvalid, RunNotFound, SalemError

SUMMARY = "summary.json"


def _fmt(x):
    """Floats with 17 significant digits; everything else as JSON allows."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.17g}")
    if isinstance(x, (np.floating,)):
        return _fmt(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {str(k): _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_fmt(v) for v in x]
    if isinstance(x, complex):
        return [_fmt(x.real), _fmt(x.imag)]
    if isinstance(x, np.ndarray):
        return _fmt(x.tolist())
    return x


def write_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_fmt(data), indent=2, allow_nan=False, default=str) + "\n")
    return path


def write_rows(path: Path, header: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return path


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    field: str = "gaussian"
    tau: float = 1.0
    M: list[int] | None = None        # explicit schedule; None searches for it
    M_1: int = 4
    M_cap: int = 256
    steps: int = 2
    delta_star: float = 0.15
    smax: int = 1024                  # radius of the iterated tables
    growth: float | None = None
    p: float | None = None
    truncation_budget: float = 1e-6
    measure_M: list[int] = dc_field(default_factory=lambda: [8, 16, 32])
    measure_smax: int = 4096          # largest single-scale table allowed
    dft_M: list[int] = dc_field(default_factory=lambda: [8, 16])
    grid_res: int = 2048
    dft_smax: int = 64
    cover_M: list[int] = dc_field(default_factory=lambda: [4, 8, 16])
    levels: int = 3
    s_values: list[float] = dc_field(default_factory=lambda: [1.8, 2.0, 2.2])
    mask_res: int = 512
    csv_smax: int = 64
    seed: int = 0
    out: str = "runs/latest"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigInvalid(sorted(extra)[0], "unknown configuration key")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigInvalid("config", f"no configuration file at {path}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigInvalid("config", f"{path}: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self):
        from .bump import bump_profile
        from .fields import load_field

        if not self.tau >= 1:
            raise ConfigInvalid("tau", f"must be >= 1, got {self.tau}")
        ctx = load_field(self.field)
        if self.M is not None:
            if any(int(m) != m or m % 2 or m < 2 for m in self.M):
                raise ConfigInvalid("M", "entries must be even integers >= 2")
            if any(b <= a for a, b in zip(self.M, self.M[1:])):
                raise ConfigInvalid("M", "entries must be strictly increasing")
        for name in ("M_1", "M_cap"):
            v = getattr(self, name)
            if v % 2 or v < 2:
                raise ConfigInvalid(name, "must be an even integer >= 2")
        if self.steps < 1:
            raise ConfigInvalid("steps", "must be >= 1")
        if not self.delta_star > 0:
            raise ConfigInvalid("delta_star", "must be positive")
        for name in ("smax", "grid_res", "dft_smax", "levels", "mask_res", "csv_smax", "measure_smax"):
            if getattr(self, name) < 1:
                raise ConfigInvalid(name, "must be positive")
        for name in ("measure_M", "dft_M", "cover_M"):
            if any(m % 2 or m < 2 for m in getattr(self, name)):
                raise ConfigInvalid(name, "entries must be even integers >= 2")
        # single-scale tables must reach the breakpoint C M^(1+tau) >= M^(1+tau)
        C = bump_profile(ctx.n).decay_radius()
        for m in self.measure_M:
            need = int(math.ceil(C * m ** (1.0 + self.tau)))
            if need > self.measure_smax:
                raise ConfigInvalid("measure_smax", f"M={m} needs a table of radius {need}")
        if 2 * self.dft_smax + 1 > self.grid_res:
            raise ConfigInvalid("dft_smax", "box does not fit in the grid")
        if self.truncation_budget <= 0:
            raise ConfigInvalid("truncation_budget", "must be positive")


# ---------------------------------------------------------------------------
# Pipeline stages
# ---------------------------------------------------------------------------

def _check(name, ok, value=None, threshold=None, detail="", asserted=True):
    status = ("PASS" if ok else "FAIL") if asserted else "INFO"
    return {"check": name, "status": status, "value": value, "threshold": threshold, "detail": detail}


def stage_qselect(ctx, cfg: RunConfig, out: Path, Ms) -> dict:
    from .qselect import select_moduli

    report = {}
    for M in Ms:
        stages = select_moduli(ctx, M, cfg.tau)
        path = out / "qselect" / f"members_M{M}.csv"
        band = stages["NormBand"]
        write_rows(path, [f"q{k}" for k in range(ctx.n)] + ["norm"],
                   [list(map(int, c)) + [int(nv)] for c, nv in zip(band.coords, band.norms)])
        report[str(M)] = {"sizes": {k: len(v) for k, v in stages.items()}, "band_N": band.band_N,
                          "sum_abs_norm": int(band.abs_norms.sum()), "members_csv": str(path.relative_to(out))}
    write_json(out / "qselect.json", report)
    return report


def stage_measure(ctx, cfg: RunConfig, out: Path) -> tuple[dict, list]:
    from .bump import bump_profile
    from .measure import (analytic_table, build_scale_function, dft_crosscheck, grid_mass,
                          sample_grid, verify_single_scale_bounds)

    n = ctx.n
    C = bump_profile(n).decay_radius()
    report = {"C": C, "scales": {}, "dft": {}}
    checks = []
    consts = []
    for M in cfg.measure_M:
        sf = build_scale_function(ctx, M, cfg.tau)
        S = int(math.ceil(C * sf.scale))
        table = analytic_table(sf, S)
        rep = verify_single_scale_bounds(table, M, cfg.tau, C=C)
        rep["centers"] = sf.total_norm
        rep["hermitian_defect"] = table.hermitian_defect()
        report["scales"][str(M)] = rep
        consts.append(rep["band_constant"])
        table.crop(min(cfg.csv_smax, S)).to_csv(out / "measure" / f"Fhat_M{M}.csv", threshold=0.0)
        checks.append(_check(f"zero band M={M}", rep["zero_band_max"] == 0.0 and rep["zero_at_origin_exact"],
                             rep["zero_band_max"], 0.0, f"0 < |s|_inf <= {rep['zero_band_radius']}"))
    if len(consts) > 1:
        ratio = max(consts) / min(consts) if min(consts) > 0 else math.inf
        checks.append(_check("middle-band constant ratio", ratio <= 8.0, ratio, 8.0,
                             "sup_band |F_hat| M^n across M=" + ",".join(map(str, cfg.measure_M))))
    for M in cfg.dft_M:
        sf = build_scale_function(ctx, M, cfg.tau)
        samples = sample_grid(sf, cfg.grid_res)
        d = dft_crosscheck(samples, cfg.dft_smax)
        a = analytic_table(sf, cfg.dft_smax)
        err = np.abs(d.values - a.values)
        zr = sf.zero_band_radius()
        ninf = np.broadcast_to(a.norm_inf(), err.shape)
        zb = (ninf > 0) & (ninf <= zr)
        rep = {"mass": grid_mass(samples), "min_sample": float(samples.min()),
               "max_abs_diff": float(err.max()), "zero_band_max_dft": float(np.abs(d.values)[zb].max()),
               "grid": cfg.grid_res, "box": cfg.dft_smax}
        report["dft"][str(M)] = rep
        checks.append(_check(f"DFT cross-check M={M}", rep["max_abs_diff"] <= 1e-6, rep["max_abs_diff"], 1e-6,
                             f"grid {cfg.grid_res}^{n}, |s|_inf <= {cfg.dft_smax}"))
    write_json(out / "measure.json", report)
    return report, checks


def stage_iterate(ctx, cfg: RunConfig, out: Path, log=None) -> tuple[dict, list, list]:
    from .dimension import box_count_dimension
    from .iterate import Schedule, auto_schedule, decay_fit, first_violation, iterate_schedule, shell_maxima

    n = ctx.n
    checks = []
    mask_res = cfg.mask_res
    if cfg.M is not None:
        sched = Schedule(cfg.tau, cfg.delta_star, cfg.M, growth=cfg.growth, p=cfg.p)
        results = iterate_schedule(ctx, sched, cfg.smax, budget=cfg.truncation_budget, strict=False)
        attempts, complete = [], True
    else:
        ar = auto_schedule(ctx, cfg.tau, cfg.delta_star, cfg.smax, cfg.steps, M_1=cfg.M_1, M_cap=cfg.M_cap,
                           budget=cfg.truncation_budget, growth=cfg.growth, p=cfg.p, log=log)
        sched, results, attempts, complete = ar.schedule, ar.results, ar.attempts, ar.complete
    report = {"schedule": sched.to_dict(), "complete": complete, "steps": [], "attempts": attempts}
    for r in results:
        r.table.crop(min(cfg.csv_smax, r.table.S)).to_csv(out / "iterate" / f"mu_{r.j}.csv")
        report["steps"].append({"j": r.j, "M": r.M, **r.report})
    viol = first_violation(results)
    detail = "all envelopes hold" if viol is None else \
        f"step {viol[0]} {viol[1]} at s={viol[2]}"
    checks.append(_check("induction envelopes", viol is None and complete,
                         None if viol is None else viol[3], 0.0, detail))
    last = results[-1].table
    R_lo = float(sched.M[0]) ** (1.0 / (2 * n))
    R_hi = cfg.smax / 4.0
    target = -n / (1.0 + cfg.tau) + cfg.delta_star
    try:
        fit = decay_fit(last, R_lo, R_hi)
        slope = fit["slope"]
        report["decay"] = fit
        write_rows(out / "iterate" / "shells.csv", ["R", "max_abs"], fit["shells"])
        checks.append(_check(f"decay slope after {len(results)} steps", slope <= target, slope, target,
                             f"band [{R_lo:.3g}, {R_hi:.3g}], {fit['used']} resolved shells"))
    except SalemError as exc:
        report["decay"] = {"error": str(exc)}
        checks.append(_check("decay slope", False, None, target, str(exc)))
    # supports: intersect as far as the operation budget allows
    from .iterate import support_mask
    from .measure import build_scale_function

    mask, depth = None, 0
    for M in sched.M:
        try:
            if _center_count(ctx, M, cfg.tau) > _mask_budget():
                break
            m = support_mask(build_scale_function(ctx, M, cfg.tau), mask_res)
        except BudgetExceeded:
            break
        mask = m if mask is None else mask & m
        depth += 1
    if mask is not None and mask.any():
        bc = box_count_dimension(mask)
        report["box_count"] = {"steps_intersected": depth, **bc}
        checks.append(_check("box-count dimension", abs(bc["slope"] - 2 * n / (1 + cfg.tau)) <= 0.3,
                             bc["slope"], 2 * n / (1 + cfg.tau),
                             f"support of the first {depth} step(s) at {mask_res}^{n}; reported only",
                             asserted=False))
    write_json(out / "iterate.json", report)
    return report, checks, results


def _mask_budget() -> int:
    from .qselect import budget

    return budget() // 100


def _center_count(ctx, M, tau) -> int:
    from .qselect import select_moduli

    return int(select_moduli(ctx, M, tau)["NormBand"].abs_norms.sum())


def stage_dimension(ctx, cfg: RunConfig, out: Path) -> tuple[dict, list]:
    from .dimension import ball_cover, covering_sum

    n = ctx.n
    target = 2 * n / (1.0 + cfg.tau)
    rows, report = [], {"target": target, "sums": {}}
    totals = {s: [] for s in cfg.s_values}
    for M in cfg.cover_M:
        cover = ball_cover(ctx, M, cfg.tau, cfg.levels)
        report["sums"][str(M)] = {"balls": cover.ball_count, "max_radius": cover.max_radius, "by_s": {}}
        for s in cfg.s_values:
            cs = covering_sum(cover, s)
            totals[s].append(cs["total"])
            report["sums"][str(M)]["by_s"][str(s)] = cs
            for k, v in enumerate(cs["levels"]):
                rows.append([M, k, M * 2**k, s, v])
    write_rows(out / "dimension" / "covering.csv", ["M", "level", "shell_base", "s", "sum"], rows)
    checks = []
    for s, vals in totals.items():
        if s == target:
            continue
        if s > target:
            ok = all(b < a for a, b in zip(vals, vals[1:]))
            label = "decrease"
        else:
            ok = all(b > a for a, b in zip(vals, vals[1:]))
            label = "increase"
        checks.append(_check(f"covering sums s={s:g} {label}", ok, vals, None,
                             "bases " + ",".join(map(str, cfg.cover_M))))
    write_json(out / "dimension.json", report)
    return report, checks


def run_pipeline(config: RunConfig | dict, log=None) -> Path:
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    cfg.validate()
    from .fields import field_to_dict, load_field

    ctx = load_field(cfg.field)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "config.json", cfg.to_dict())
    write_json(out / "field.json", field_to_dict(ctx))
    t0 = time.time()
    checks = []
    Ms = sorted(set(cfg.measure_M + cfg.dft_M + (cfg.M or [cfg.M_1])))
    stage_qselect(ctx, cfg, out, Ms)
    _, c = stage_measure(ctx, cfg, out)
    checks += c
    _, c, _ = stage_iterate(ctx, cfg, out, log=log)
    checks += c
    _, c = stage_dimension(ctx, cfg, out)
    checks += c
    summary = {"ok": all(ch["status"] != "FAIL" for ch in checks), "checks": checks,
               "elapsed_s": round(time.time() - t0, 1)}
    write_json(out / SUMMARY, summary)
    return out


def emit_reports(run_dir) -> str:
    path = Path(run_dir) / SUMMARY
    if not path.exists():
        raise RunNotFound(f"no completed run in {run_dir}")
    summary = json.loads(path.read_text())
    rows = [("check", "status", "value", "threshold", "detail")]
    for ch in summary["checks"]:
        rows.append((ch["check"], ch["status"], _short(ch["value"]), _short(ch["threshold"]), ch["detail"]))
    widths = [max(len(str(r[k])) for r in rows) for k in range(5)]
    lines = ["  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    lines.append("")
    lines.append("overall: " + ("PASS" if summary["ok"] else "FAIL"))
    return "\n".join(lines)


def _short(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_field_info(args) -> int:
    from .fields import field_to_dict, load_field
    from .numfield import dual_transpose_law_holds
    from .qselect import embeddings

    ctx = load_field(args.field)
    emb = embeddings(ctx)
    info = field_to_dict(ctx)
    info.update({
        "trace_gram": [[str(x) for x in row] for row in ctx.trace_gram],
        "dual_basis": [[str(x) for x in col] for col in ctx.dual_basis],
        "clearing_constant": ctx.clearing_constant,
        "signature": [emb.r1, emb.r2],
        "transpose_law": dual_transpose_law_holds(ctx),
    })
    print(json.dumps(_fmt(info), indent=2))
    return 0


def cmd_expsum_check(args) -> int:
    from .expsum import check_rows, exp_sum_table
    from .fields import load_field
    from .qselect import box_points
    from .numfield import field_norm

    ctx = load_field(args.field)
    n = ctx.n
    qs = [ctx.element(c.tolist()) for c in box_points(-args.height, args.height, n)]
    qs = [q for q in qs if field_norm(q) != 0]
    svecs = box_points(-args.smax, args.smax, n)
    rows = []
    for q in qs:
        rows += check_rows(q, svecs, exp_sum_table(q, svecs))
    out = Path(args.out)
    write_rows(out, ["q", "s", "sum_re", "sum_im", "criterion", "match"],
               [[r["q"], r["s"], r["sum_re"], r["sum_im"], r["criterion"], r["match"]] for r in rows])
    bad = sum(not r["match"] for r in rows)
    print(f"{len(rows)} rows, {bad} mismatches -> {out}")
    return 1 if bad else 0


def cmd_qselect(args) -> int:
    from .fields import load_field

    ctx = load_field(args.field)
    cfg = RunConfig(field=args.field, tau=args.tau)
    out = Path(args.out)
    rep = stage_qselect(ctx, cfg, out, [args.M])
    print(json.dumps(_fmt(rep), indent=2))
    return 0


def cmd_build_measure(args) -> int:
    from .fields import load_field
    from .measure import analytic_table, build_scale_function, verify_single_scale_bounds, write_report

    ctx = load_field(args.field)
    sf = build_scale_function(ctx, args.M, args.tau)
    table = analytic_table(sf, args.smax)
    out = Path(args.out)
    table.to_csv(out / f"Fhat_M{args.M}.csv", threshold=0.0 if args.all else 1e-300)
    rep = verify_single_scale_bounds(table, args.M, args.tau)
    rep.update({"centers": sf.total_norm, "band_N": sf.band_N, "radius": sf.radius,
                "g_hat_zero": str(sf.g_hat_zero_exact or sf.g_hat_zero)})
    write_report(rep, out / f"measure_M{args.M}.json")
    print(json.dumps(_fmt(rep), indent=2))
    return 0 if rep["zero_band_max"] == 0.0 else 1


def cmd_iterate(args) -> int:
    from .fields import load_field

    ctx = load_field(args.field)
    cfg = RunConfig(field=args.field, tau=args.tau, steps=args.steps, smax=args.smax,
                    M=_ints(args.M) if args.M else None, M_1=args.M1, M_cap=args.M_cap,
                    delta_star=args.delta_star, out=args.out)
    cfg.validate()
    out = Path(args.out)
    rep, checks, _ = stage_iterate(ctx, cfg, out, log=lambda s: print(s, file=sys.stderr))
    for ch in checks:
        print(f"{ch['status']:4}  {ch['check']}: {_short(ch['value'])} ({ch['detail']})")
    return 1 if any(ch["status"] == "FAIL" for ch in checks) else 0


def cmd_dimension_report(args) -> int:
    from .fields import load_field

    ctx = load_field(args.field)
    M = _ints(args.M)
    cfg = RunConfig(field=args.field, tau=args.tau, cover_M=M, levels=args.levels,
                    s_values=_floats(args.s), out=args.out)
    rep, checks = stage_dimension(ctx, cfg, Path(args.out))
    for ch in checks:
        print(f"{ch['status']:4}  {ch['check']}: {_short(ch['value'])}")
    if len(M) == 1:
        print(json.dumps(_fmt(rep["sums"]), indent=2))
    return 1 if any(ch["status"] == "FAIL" for ch in checks) else 0


def cmd_run(args) -> int:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.out:
        cfg.out = args.out
    if args.field:
        cfg.field = args.field
    if args.M:
        cfg.M = _ints(args.M)
    cfg.validate()
    out = run_pipeline(cfg, log=lambda s: print(s, file=sys.stderr))
    text = emit_reports(out)
    (out / "summary.txt").write_text(text + "\n")
    print(text)
    summary = json.loads((out / SUMMARY).read_text())
    return 0 if summary["ok"] else 1


def cmd_report(args) -> int:
    print(emit_reports(args.run_dir))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="salem", description="Explicit Fourier-decaying measures from number fields.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("field-info", help="basis data of a field")
    p.add_argument("--field", default="gaussian")
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("expsum-check", help="brute-force residue sums against the integrality test")
    p.add_argument("--field", default="gaussian")
    p.add_argument("--height", type=int, default=2)
    p.add_argument("--smax", type=int, default=4)
    p.add_argument("--out", default="expsum_check.csv")
    p.set_defaults(func=cmd_expsum_check)

    p = sub.add_parser("qselect", help="modulus pool stages at one scale")
    p.add_argument("--field", default="gaussian")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--out", default="qselect_out")
    p.set_defaults(func=cmd_qselect)

    p = sub.add_parser("build-measure", help="single-scale coefficient table and bound report")
    p.add_argument("--field", default="gaussian")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--smax", type=int, default=512)
    p.add_argument("--all", action="store_true", help="write zero entries too")
    p.add_argument("--out", default="measure_out")
    p.set_defaults(func=cmd_build_measure)

    p = sub.add_parser("iterate", help="multi-scale iteration with envelope checks")
    p.add_argument("--field", default="gaussian")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=2)
    p.add_argument("--smax", type=int, default=512)
    p.add_argument("--M", default=None, help="comma separated schedule; searched when omitted")
    p.add_argument("--M1", type=int, default=4)
    p.add_argument("--M-cap", dest="M_cap", type=int, default=256)
    p.add_argument("--delta-star", dest="delta_star", type=float, default=0.15)
    p.add_argument("--out", default="iterate_out")
    p.set_defaults(func=cmd_iterate)

    p = sub.add_parser("dimension-report", help="covering sums over dyadic shells")
    p.add_argument("--field", default="gaussian")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--M", default="8", help="comma separated bases")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--s", default="1.8,2.0,2.2")
    p.add_argument("--out", default="dimension_out")
    p.set_defaults(func=cmd_dimension_report)

    p = sub.add_parser("run", help="full pipeline")
    p.add_argument("--config", default=None)
    p.add_argument("--field", default=None)
    p.add_argument("--M", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="summary table of a finished run")
    p.add_argument("run_dir")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"invalid configuration: {exc.field}: {exc.reason}", file=sys.stderr)
        return 2
    except BoundViolated as exc:
        print(f"bound violated at step {exc.step} ({exc.bound}) s={exc.s} margin={exc.margin:.3e}",
              file=sys.stderr)
        return 1
    except SalemError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
