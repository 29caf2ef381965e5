"""Command-line front end.

Subcommands:
  bler-sweep         average BLER over a parameter sweep, per tier, as CSV
  blocklength-sweep  per-user minimum blocklength vs the power fraction
  optimize           optimal power split and minimum common blocklength
  compare-oma        NOMA vs orthogonal-access blocklength over an SNR sweep
  validate           run the self-check suite (exit 0 iff all checks pass)

Sweep outputs are CSV (UTF-8, comma-separated, LF, header row, 12
significant digits) plus an accompanying matplotlib plot script; reruns of
the same scenario and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from .asymptotics import asymptotic_bler_h, asymptotic_bler_l, riemann_bler
from .bler import Stage, avg_bler_closed, avg_bler_quadrature
from .blocklength import (
    blocklength_h,
    blocklength_l,
    oma_blocklength,
    optimize_alpha,
)
from .errors import CeilingViolation, InfeasibleTargets, NomaSpcError, ScenarioError
from .montecarlo import SimPlan, run as mc_run
from .scenario import TIERS, Scenario, load_scenario, materialize_point
from .validate import run_validation

__all__ = ["main"]


def _fmt(x) -> str:
    if x is None:
        return ""
    return f"{x:.12g}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, (int, float)) else str(v or "")
                              for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _point_seed(base: int, index: int) -> int:
    # Stable per-point stream: distinct, deterministic, independent of
    # execution order.
    return ((base & (2**63 - 1)) * 1_000_003 + index) % 2**63


def _plan_override(scenario: Scenario, args) -> Scenario:
    plan = scenario.plan
    if args.trials is not None:
        plan = replace(plan, trials=args.trials, batch=min(plan.batch, args.trials))
    if args.seed is not None:
        plan = replace(plan, seed=args.seed)
    if args.dispersion is not None:
        from .bler import DispersionMode

        plan = replace(plan, dispersion=DispersionMode(args.dispersion))
    tiers = scenario.tiers
    if getattr(args, "tiers", None):
        tiers = tuple(t.strip().lower() for t in args.tiers.split(","))
        for t in tiers:
            if t not in TIERS:
                raise ScenarioError(f"--tiers: unknown tier {t!r} (expected {TIERS})")
    return replace(scenario, plan=plan, tiers=tiers)


# ---------------------------------------------------------------------------
# bler-sweep
# ---------------------------------------------------------------------------


def _bler_point(tier, cfg, method, diversity, split, pkt_h, pkt_l, plan):
    """(bler_h, bler_l, unc_h, unc_l, flag) for one tier at one point."""
    try:
        if tier == "closed":
            h = avg_bler_closed(Stage.H, cfg, method, diversity, split, pkt_h)
            l = avg_bler_closed(Stage.L, cfg, method, diversity, split, pkt_h, pkt_l)
            return h.value, l.value, 0.0, 0.0, ""
        if tier == "quadrature":
            h = avg_bler_quadrature(Stage.H, cfg, method, diversity, split, pkt_h)
            l = avg_bler_quadrature(Stage.L, cfg, method, diversity, split, pkt_h, pkt_l)
            return h.value, l.value, 0.0, 0.0, ""
        if tier == "riemann":
            h = riemann_bler(Stage.H, cfg, method, diversity, split, pkt_h)
            l = riemann_bler(Stage.L, cfg, method, diversity, split, pkt_h, pkt_l)
            return h.value, l.value, 0.0, 0.0, ""
        if tier == "asymptotic":
            h = asymptotic_bler_h(cfg, method, diversity, split, pkt_h)
            l = asymptotic_bler_l(cfg, method, diversity, split, pkt_h, pkt_l)
            return h, l, 0.0, 0.0, ""
        if tier == "mc":
            rep = mc_run(cfg, method, diversity, split, pkt_h, pkt_l, plan)
            return rep.bler_h, rep.bler_l, rep.ci_h, rep.ci_l, ""
    except CeilingViolation:
        return None, None, None, None, "ceiling_violation"
    raise ScenarioError(f"unknown tier {tier!r}")


def cmd_bler_sweep(scenario: Scenario, out: Path | None) -> int:
    axis = scenario.sweep.parameter
    header = [axis, "variant", "method", "diversity", "tier",
              "bler_h", "bler_l", "uncertainty_h", "uncertainty_l", "flag"]
    rows = []
    index = 0
    for variant in scenario.variant_labels():
        for value in scenario.sweep.grid:
            cfg, split, pkt_h, pkt_l = materialize_point(scenario, variant, value)
            for method in scenario.methods:
                for diversity in scenario.diversities:
                    for tier in scenario.tiers:
                        plan = replace(
                            scenario.plan,
                            seed=_point_seed(scenario.plan.seed, index),
                        )
                        bh, bl, uh, ul, flag = _bler_point(
                            tier, cfg, method, diversity, split, pkt_h, pkt_l, plan
                        )
                        rows.append([
                            value, variant, method.value, diversity.value, tier,
                            bh, bl, uh, ul, flag,
                        ])
                        index += 1
    if out is None:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) if isinstance(v, (int, float)) else str(v or "")
                           for v in row))
    else:
        _write_csv(out, header, rows)
        _emit_plot_script(out, "bler", scenario)
        print(f"wrote {len(rows)} rows to {out}")
    return 0


# ---------------------------------------------------------------------------
# blocklength-sweep
# ---------------------------------------------------------------------------


def cmd_blocklength_sweep(scenario: Scenario, out: Path | None) -> int:
    if scenario.sweep.parameter != "alpha_l":
        raise ScenarioError("blocklength-sweep requires sweep.parameter = alpha_l")
    header = ["alpha_l", "variant", "method", "diversity", "n_h", "n_l",
              "crossing", "flag"]
    rows = []
    summaries = []
    for variant in scenario.variant_labels():
        cfg = scenario.system_for(variant)
        for method in scenario.methods:
            for diversity in scenario.diversities:
                crossed = False
                block = []
                for alpha in scenario.sweep.grid:
                    n_h = blocklength_h(alpha, cfg, method, diversity,
                                        scenario.targets, scenario.pkt_h.n_bits)
                    try:
                        n_l = blocklength_l(alpha, cfg, method, diversity,
                                            scenario.targets, scenario.pkt_l.n_bits)
                        flag = ""
                    except InfeasibleTargets:
                        n_l, flag = None, "infeasible_targets"
                    mark = ""
                    if not crossed and n_l is not None and n_l <= n_h:
                        mark, crossed = "x", True
                    block.append([alpha, variant, method.value, diversity.value,
                                  n_h, n_l, mark, flag])
                rows.extend(block)
                try:
                    res = optimize_alpha(cfg, method, diversity, scenario.targets,
                                         scenario.pkt_h.n_bits, scenario.pkt_l.n_bits)
                    summaries.append(
                        f"{variant}/{method.value}/{diversity.value}: crossing at "
                        f"alpha_l={res.alpha_l_opt:.6f}, N={res.n_opt:.3f}"
                        + ("" if res.feasible else f" [{res.diagnosis}]")
                    )
                except InfeasibleTargets as exc:
                    summaries.append(
                        f"{variant}/{method.value}/{diversity.value}: "
                        f"infeasible targets ({exc})"
                    )
    if out is None:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) if isinstance(v, (int, float)) else str(v or "")
                           for v in row))
    else:
        _write_csv(out, header, rows)
        _emit_plot_script(out, "blocklength", scenario)
        print(f"wrote {len(rows)} rows to {out}")
    for line in summaries:
        print(line)
    return 0


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def cmd_optimize(scenario: Scenario, out: Path | None) -> int:
    results = []
    print(f"scenario: {scenario.name}")
    print("method  diversity  feasible  alpha_l_opt     N_opt          iters  residual")
    for method in scenario.methods:
        for diversity in scenario.diversities:
            entry = {"method": method.value, "diversity": diversity.value}
            try:
                res = optimize_alpha(
                    scenario.system, method, diversity, scenario.targets,
                    scenario.pkt_h.n_bits, scenario.pkt_l.n_bits,
                )
                entry.update(
                    feasible=res.feasible,
                    alpha_l_opt=res.alpha_l_opt,
                    n_opt=res.n_opt,
                    n_opt_ceil=res.n_opt_ceil,
                    iterations=res.iterations,
                    residual=res.residual,
                    diagnosis=res.diagnosis or None,
                )
                print(
                    f"{method.value:6s}  {diversity.value:9s}  {str(res.feasible):8s}"
                    f"  {res.alpha_l_opt:<14.10f} {res.n_opt:<14.6f} {res.iterations:5d}"
                    f"  {res.residual:.3e}"
                )
            except InfeasibleTargets as exc:
                entry.update(feasible=False, error="infeasible_targets",
                             diagnosis=str(exc))
                print(f"{method.value:6s}  {diversity.value:9s}  False     "
                      f"infeasible targets: {exc}")
            results.append(entry)
    if out is not None:
        payload = {"scenario": scenario.name, "results": results}
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
        print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------
# compare-oma
# ---------------------------------------------------------------------------


def cmd_compare_oma(scenario: Scenario, out: Path | None) -> int:
    if scenario.sweep.parameter != "gamma0_db":
        raise ScenarioError("compare-oma requires sweep.parameter = gamma0_db")
    header = ["gamma0_db", "variant", "method", "diversity",
              "alpha_l_opt", "n_opt", "n_oma", "delta_n", "flag"]
    rows = []
    for variant in scenario.variant_labels():
        for db in scenario.sweep.grid:
            cfg, _, _, _ = materialize_point(scenario, variant, db)
            for method in scenario.methods:
                for diversity in scenario.diversities:
                    try:
                        res = optimize_alpha(
                            cfg, method, diversity, scenario.targets,
                            scenario.pkt_h.n_bits, scenario.pkt_l.n_bits,
                        )
                        n_oma = oma_blocklength(
                            cfg, method, diversity, scenario.targets,
                            scenario.pkt_h.n_bits, scenario.pkt_l.n_bits,
                        )
                        delta = n_oma - res.n_opt
                        flag = "" if res.feasible else "boundary"
                        if delta <= 0:
                            flag = (flag + ";" if flag else "") + "delta_n_nonpositive"
                        rows.append([db, variant, method.value, diversity.value,
                                     res.alpha_l_opt, res.n_opt, n_oma, delta, flag])
                    except InfeasibleTargets:
                        rows.append([db, variant, method.value, diversity.value,
                                     None, None, None, None, "infeasible_targets"])
    if out is None:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) if isinstance(v, (int, float)) else str(v or "")
                           for v in row))
    else:
        _write_csv(out, header, rows)
        _emit_plot_script(out, "oma", scenario)
        print(f"wrote {len(rows)} rows to {out}")
    return 0


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(scenario: Scenario, out: Path | None) -> int:
    report, passed = run_validation(scenario)
    sys.stdout.write(report)
    if out is not None:
        out.write_text(report, encoding="utf-8", newline="\n")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# plot-script emission
# ---------------------------------------------------------------------------

_PLOT_TEMPLATES = {
    "bler": """\
#!/usr/bin/env python3
\"\"\"Plot average BLER curves from {csv_name} (auto-generated).\"\"\"
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: ([], []))
with open("{csv_name}", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["flag"]:
            continue
        for user in {users!r}:
            key = (row["variant"], row["method"], row["diversity"], row["tier"], user)
            val = row["bler_" + user]
            if val:
                curves[key][0].append(float(row["{axis}"]))
                curves[key][1].append(float(val))

fig, ax = plt.subplots(figsize=(6, 4.5))
for (variant, method, diversity, tier, user), (xs, ys) in sorted(curves.items()):
    label = f"{{method}}/{{diversity}} {{tier}} user={{user}}"
    if variant != "base":
        label = f"{{variant}} " + label
    style = {{"mc": "o", "asymptotic": "--"}}.get(tier, "-")
    if style == "o":
        ax.semilogy(xs, ys, style, mfc="none", label=label)
    else:
        ax.semilogy(xs, ys, style, label=label)
ax.set_xlabel("{axis}")
ax.set_ylabel("average BLER")
ax.set_ylim(1e-8, 2)
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig("{stem}.png", dpi=200)
print("wrote {stem}.png")
""",
    "blocklength": """\
#!/usr/bin/env python3
\"\"\"Plot per-user blocklengths vs power fraction from {csv_name} (auto-generated).\"\"\"
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: ([], []))
with open("{csv_name}", newline="") as fh:
    for row in csv.DictReader(fh):
        for col in ("n_h", "n_l"):
            if row[col]:
                key = (row["variant"], row["method"], row["diversity"], col)
                curves[key][0].append(float(row["alpha_l"]))
                curves[key][1].append(float(row[col]))

fig, ax = plt.subplots(figsize=(6, 4.5))
for (variant, method, diversity, col), (xs, ys) in sorted(curves.items()):
    label = f"{{method}}/{{diversity}} {{col}}"
    if variant != "base":
        label = f"{{variant}} " + label
    ax.plot(xs, ys, "-" if col == "n_h" else "--", label=label)
ax.set_xlabel("alpha_l")
ax.set_ylabel("minimum blocklength (channel uses)")
ax.grid(True, alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig("{stem}.png", dpi=200)
print("wrote {stem}.png")
""",
    "oma": """\
#!/usr/bin/env python3
\"\"\"Plot NOMA vs OMA blocklengths from {csv_name} (auto-generated).\"\"\"
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: ([], []))
with open("{csv_name}", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["flag"] == "infeasible_targets":
            continue
        for col in ("n_opt", "n_oma"):
            key = (row["variant"], row["method"], row["diversity"], col)
            curves[key][0].append(float(row["gamma0_db"]))
            curves[key][1].append(float(row[col]))

fig, ax = plt.subplots(figsize=(6, 4.5))
for (variant, method, diversity, col), (xs, ys) in sorted(curves.items()):
    label = f"{{method}}/{{diversity}} {{col}}"
    if variant != "base":
        label = f"{{variant}} " + label
    ax.plot(xs, ys, "-" if col == "n_opt" else "--", label=label)
ax.set_xlabel("gamma0_db")
ax.set_ylabel("blocklength (channel uses)")
ax.grid(True, alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig("{stem}.png", dpi=200)
print("wrote {stem}.png")
""",
}


def _emit_plot_script(csv_path: Path, kind: str, scenario: Scenario) -> None:
    users = ("h", "l") if scenario.plot_user == "both" else (scenario.plot_user,)
    script = _PLOT_TEMPLATES[kind].format(
        csv_name=csv_path.name,
        axis=scenario.sweep.parameter,
        stem=csv_path.stem,
        users=tuple(users),
    )
    csv_path.with_name(csv_path.stem + "_plot.py").write_text(
        script, encoding="utf-8", newline="\n"
    )


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nomaspc",
        description="Short-packet MIMO-NOMA BLER and minimum-blocklength analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (
        ("bler-sweep", cmd_bler_sweep),
        ("blocklength-sweep", cmd_blocklength_sweep),
        ("optimize", cmd_optimize),
        ("compare-oma", cmd_compare_oma),
        ("validate", cmd_validate),
    ):
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True,
                       help="scenario file path or shipped name (fig2..fig8)")
        p.add_argument("--out", type=Path, default=None,
                       help="output file (CSV/JSON/report); stdout if omitted")
        p.add_argument("--tiers", default=None,
                       help="comma-separated tier list overriding the scenario")
        p.add_argument("--trials", type=int, default=None,
                       help="Monte Carlo trials overriding the scenario")
        p.add_argument("--seed", type=int, default=None,
                       help="Monte Carlo seed overriding the scenario")
        p.add_argument("--dispersion", choices=("paper", "standard"), default=None,
                       help="instantaneous-BLER dispersion variant")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        scenario = _plan_override(scenario, args)
        return args.func(scenario, args.out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NomaSpcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
