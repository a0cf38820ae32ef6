"""Command-line entry point.

Subcommands:

  check-algebra   run the exact symbolic verification suites
  evolve CFG      propagate a scenario, emit observables CSV and dumps
  covariance CFG  Weyl-phase and boost-covariance experiments
  oracle CFG      spectral run versus the characteristics reference

Scenarios are strict INI files (unknown sections or keys are errors,
exit code 2).  Exit codes: 0 success, 1 verification failure, 2 usage or
config error, 3 numerical abort.  Outputs are byte-identical for a given
config and version, independent of --threads.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, ccr, suites
from . import characteristics as chars
from . import evolve as ev
from . import galilei as ga
from .grid import (
    Axis, GridSpec, Wavefunction, dump_state, gaussian_init, set_fft_workers,
)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ScenarioError(ValueError):
    """Configuration problem; maps to exit code 2."""


def _fmt(x) -> str:
    return "" if x is None else f"{x:.17g}"


# ---------------------------------------------------------------------------
# scenario parsing (strict, typed)
# ---------------------------------------------------------------------------

def _floats(s: str):
    return tuple(float(v) for v in s.split(",")) if s.strip() else ()


_SCHEMA = {
    "run": {"kind": str},
    "grid": {"axes": lambda s: tuple(v.strip() for v in s.split(","))},
    "dynamics": {
        "formalism": str, "masses": _floats, "potential": str,
        "kappa": float, "alpha": float, "dt": float, "t_final": float,
        "sample_every": int, "interaction": str,
    },
    "initial": {"centers": _floats, "widths": _floats, "phase": str,
                "phase_coeffs": _floats},
    "transform": {
        "kind": str, "g1": str, "g1_v": float, "g1_t": float, "g1_a": float,
        "g1_b": float, "g2": str, "g2_v": float, "g2_t": float, "g2_a": float,
        "g2_b": float, "sweep_a": _floats, "sweep_v": _floats, "v": float,
    },
    "oracle": {"flow_steps": int, "interp": str, "mask_threshold": float},
    "checks": {"closed_form": lambda s: s.lower() in ("1", "true", "yes")},
    "output": {"dir": str, "dump_state": lambda s: s.lower() in ("1", "true", "yes"),
               "dump_every": int},
}
_AXIS_KEYS = {"role": str, "min": float, "extent": float, "points": int}


@dataclass
class Scenario:
    path: Path
    kind: str
    sections: dict = field(default_factory=dict)

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def require(self, section: str, key: str):
        v = self.get(section, key)
        if v is None:
            raise ScenarioError(f"missing key {key!r} in section [{section}]")
        return v


def parse_scenario(path) -> Scenario:
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e}") from e
    except configparser.Error as e:
        raise ScenarioError(f"config parse error: {e}") from e

    sections: dict = {}
    for sec in cp.sections():
        if sec.startswith("axis."):
            name = sec.split(".", 1)[1]
            parsed = {}
            for key, raw in cp[sec].items():
                if key not in _AXIS_KEYS:
                    raise ScenarioError(f"unknown key {key!r} in section [{sec}]")
                parsed[key] = _AXIS_KEYS[key](raw)
            sections.setdefault("axis", {})[name] = parsed
            continue
        if sec not in _SCHEMA:
            raise ScenarioError(f"unknown section [{sec}]")
        parsed = {}
        for key, raw in cp[sec].items():
            if key not in _SCHEMA[sec]:
                raise ScenarioError(f"unknown key {key!r} in section [{sec}]")
            try:
                parsed[key] = _SCHEMA[sec][key](raw)
            except ValueError as e:
                raise ScenarioError(
                    f"bad value for {key!r} in [{sec}]: {raw!r} ({e})") from e
        sections[sec] = parsed
    if "run" not in sections or "kind" not in sections["run"]:
        raise ScenarioError("missing [run] kind")
    kind = sections["run"]["kind"]
    if kind not in ("evolve", "covariance", "oracle"):
        raise ScenarioError(f"unknown run kind {kind!r}")
    return Scenario(path, kind, sections)


def build_grid(sc: Scenario) -> GridSpec:
    names = sc.require("grid", "axes")
    axes = []
    for name in names:
        spec = sc.sections.get("axis", {}).get(name)
        if spec is None:
            raise ScenarioError(f"axis {name!r} listed but no [axis.{name}] section")
        role = spec.get("role", name[0])
        for key in ("min", "extent", "points"):
            if key not in spec:
                raise ScenarioError(f"[axis.{name}] missing {key!r}")
        try:
            axes.append(Axis(name, role, spec["min"], spec["extent"], spec["points"]))
        except ValueError as e:
            raise ScenarioError(f"[axis.{name}]: {e}") from e
    return GridSpec(tuple(axes))


def build_initial(sc: Scenario, grid: GridSpec) -> Wavefunction:
    centers = sc.require("initial", "centers")
    widths = sc.require("initial", "widths")
    phase = sc.get("initial", "phase", "none")
    coeffs = sc.get("initial", "phase_coeffs")
    try:
        return gaussian_init(grid, centers, widths, phase, coeffs)
    except ValueError as e:
        raise ScenarioError(f"[initial]: {e}") from e


def build_plan_from(sc: Scenario, grid: GridSpec) -> ev.PropagatorPlan:
    dyn = sc.sections.get("dynamics", {})
    for key in ("formalism", "masses", "potential", "dt"):
        if key not in dyn:
            raise ScenarioError(f"[dynamics] missing {key!r}")
    constants = {k: dyn[k] for k in ("kappa", "alpha") if k in dyn}
    try:
        pot = ev.make_potential(dyn["potential"], grid, constants)
        return ev.build_plan(grid, dyn["formalism"], dyn["masses"], pot,
                             dyn["dt"], dyn.get("interaction", "full"))
    except ValueError as e:
        raise ScenarioError(f"[dynamics]: {e}") from e


def write_manifest(sc: Scenario, out_dir: Path) -> None:
    """Echo of the resolved configuration, sufficient to reproduce the run."""
    lines = [f"# koopman {__version__}", f"# scenario {sc.path.name}"]
    for sec in sorted(sc.sections):
        if sec == "axis":
            for name in sc.sections["axis"]:
                lines.append(f"[axis.{name}]")
                for k, v in sorted(sc.sections["axis"][name].items()):
                    lines.append(f"{k} = {v}")
            continue
        lines.append(f"[{sec}]")
        for k, v in sorted(sc.sections[sec].items()):
            if isinstance(v, tuple):
                v = ", ".join(str(x) for x in v)
            lines.append(f"{k} = {v}")
    (out_dir / "manifest.cfg").write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_check_algebra(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    all_ok = True
    lines = []
    rows = []
    npass = ntotal = 0
    for title, rels in suites.suite_group(args.formalism):
        report = ccr.verify_algebra(rels)
        lines.append(f"== {title}")
        lines.extend(report.lines())
        rows.extend(report.csv_rows())
        all_ok = all_ok and report.all_passed
        npass += report.counts[0]
        ntotal += report.counts[1]
    lines.append(f"{'PASS' if all_ok else 'FAIL'} {npass}/{ntotal} relations total")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    (out_dir / "algebra_report.txt").write_text(text)
    with open(out_dir / "algebra_relations.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(("relation_id", "status", "residual"))
        wr.writerows(rows)
    return EXIT_OK if all_ok else EXIT_VERIFY


def _free_closed_form_check(sc, grid, plan, w0, record, states, out_dir):
    """Per-sample comparison against the exact free-particle solution."""
    rows = []
    for t, w in states:
        ref, valid = chars.reference_solution(
            w0, plan.masses, plan.potential, t, plan.formalism, flow_steps=8)
        m = chars.compare(w, ref, valid_mask=valid)
        rows.append((t, m.masked_linf, m.modulus_masked_linf, m.phase_masked_maxabs))
    with open(out_dir / "phase_check.csv", "w", newline="") as fh:
        fh.write("t,masked_linf,modulus_masked_linf,phase_masked_maxabs\n")
        for r in rows:
            fh.write(",".join(_fmt(v) for v in r) + "\n")


def cmd_evolve(args) -> int:
    sc = parse_scenario(args.scenario)
    if sc.kind != "evolve":
        raise ScenarioError(f"scenario kind {sc.kind!r}, expected 'evolve'")
    grid = build_grid(sc)
    plan = build_plan_from(sc, grid)
    w0 = build_initial(sc, grid)
    t_final = sc.require("dynamics", "t_final")
    sample_every = sc.get("dynamics", "sample_every", 1)
    out_dir = Path(args.out or sc.get("output", "dir", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    check_states = []
    do_check = sc.get("checks", "closed_form", False)
    if do_check and plan.potential.kind != "free":
        raise ScenarioError("[checks] closed_form applies to free scenarios")

    dump_every = sc.get("output", "dump_every", 0)
    on_sample = None
    if dump_every > 0:
        counter = {"i": 0}

        def on_sample(step_index, t, w):
            if counter["i"] % dump_every == 0:
                dump_state(w, out_dir / f"state_{step_index:06d}.kvhw")
            counter["i"] += 1

    record, w = ev.run(w0, plan, t_final, sample_every, on_sample=on_sample)
    record.to_csv(out_dir / "run.csv")
    if do_check:
        check_states.append((t_final, w))
        _free_closed_form_check(sc, grid, plan, w0, record, check_states, out_dir)
    if sc.get("output", "dump_state", False):
        dump_state(w, out_dir / "final.kvhw")
    write_manifest(sc, out_dir)
    sys.stdout.write(f"evolve: {len(record.rows)} samples -> {out_dir}\n")
    return EXIT_OK


def _element(sc, which: str, formalism: str, mass: float) -> ga.GroupElement:
    kind = sc.require("transform", which)
    get = lambda k, d=0.0: sc.get("transform", f"{which}_{k}", d)
    if kind == "translation":
        return ga.translation(get("a"), formalism, mass)
    if kind == "momentum_translation":
        return ga.momentum_translation(get("b"), formalism, mass)
    if kind == "boost":
        return ga.boost(get("v"), get("t"), formalism, mass)
    if kind == "free_time":
        return ga.free_time(get("t"), formalism, mass)
    raise ScenarioError(f"unknown transform element {kind!r}")


def cmd_covariance(args) -> int:
    sc = parse_scenario(args.scenario)
    if sc.kind != "covariance":
        raise ScenarioError(f"scenario kind {sc.kind!r}, expected 'covariance'")
    grid = build_grid(sc)
    w0 = build_initial(sc, grid)
    formalism = sc.require("dynamics", "formalism")
    masses = sc.require("dynamics", "masses")
    mass = masses[0]
    out_dir = Path(args.out or sc.get("output", "dir", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    tkind = sc.require("transform", "kind")
    tol = 1e-6
    worst = 0.0
    rows = []
    if tkind == "weyl":
        sweep_a = sc.get("transform", "sweep_a") or (None,)
        sweep_v = sc.get("transform", "sweep_v") or (None,)
        for a in sweep_a:
            for v in sweep_v:
                g1 = _element(sc, "g1", formalism, mass)
                g2 = _element(sc, "g2", formalism, mass)
                if v is not None and g1.kind == "boost":
                    g1 = ga.boost(v, g1.t, formalism, mass)
                if a is not None and g2.kind == "translation":
                    g2 = ga.translation(a, formalism, mass)
                phase, residual = ga.weyl_phase(g1, g2, w0)
                predicted = ga.predicted_weyl_phase(g1, g2)
                angle_err = abs(np.angle(phase * np.conj(predicted)))
                worst = max(worst, residual, angle_err)
                rows.append((formalism, g1.kind, g2.kind, g2.a, g1.v, g1.t,
                             phase.real, phase.imag, predicted.real,
                             predicted.imag, angle_err, residual))
        header = ("formalism,g1,g2,a,v,t,phase_re,phase_im,"
                  "predicted_re,predicted_im,angle_error,residual")
    elif tkind == "covariance":
        sweep_v = sc.get("transform", "sweep_v") or (sc.require("transform", "v"),)
        t_final = sc.require("dynamics", "t_final")
        for v in sweep_v:
            r = ga.covariance_check(formalism, v, t_final, w0, mass)
            worst = max(worst, r.residual)
            rows.append((formalism, "boost+evolve", "evolve+boost", "", v,
                         t_final, r.phase.real, r.phase.imag, "", "", "",
                         r.residual))
        header = ("formalism,g1,g2,a,v,t,phase_re,phase_im,"
                  "predicted_re,predicted_im,angle_error,residual")
    else:
        raise ScenarioError(f"unknown transform kind {tkind!r}")
    with open(out_dir / "covariance.csv", "w", newline="") as fh:
        fh.write(header + "\n")
        for r in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in r) + "\n")
    write_manifest(sc, out_dir)
    sys.stdout.write(f"covariance: {len(rows)} rows, worst deviation "
                     f"{worst:.3e} -> {out_dir}\n")
    return EXIT_OK if worst <= tol else EXIT_VERIFY


def cmd_oracle(args) -> int:
    sc = parse_scenario(args.scenario)
    if sc.kind != "oracle":
        raise ScenarioError(f"scenario kind {sc.kind!r}, expected 'oracle'")
    grid = build_grid(sc)
    plan = build_plan_from(sc, grid)
    w0 = build_initial(sc, grid)
    t_final = sc.require("dynamics", "t_final")
    out_dir = Path(args.out or sc.get("output", "dir", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    flow_steps = sc.get("oracle", "flow_steps")
    interp = sc.get("oracle", "interp", "cubic")
    mask = sc.get("oracle", "mask_threshold", 1e-6)

    record, w = ev.run(w0, plan, t_final, max(1, int(round(t_final / plan.dt))))
    if interp == "closed_form":
        ref_w0, interp_used = w0, "cubic"
    else:
        ref_w0 = Wavefunction(grid, w0.values.copy())  # force sample interpolation
        interp_used = interp
    ref, valid = chars.reference_solution(
        ref_w0, plan.masses, plan.potential, t_final, plan.formalism,
        interp=interp_used, flow_steps=flow_steps)
    metrics = chars.compare(w, ref, mask_threshold=mask, valid_mask=valid)
    with open(out_dir / "oracle.csv", "w", newline="") as fh:
        fh.write("t," + ",".join(chars.CompareMetrics.columns) + "\n")
        fh.write(",".join(_fmt(v) for v in (t_final,) + metrics.to_row()) + "\n")
    write_manifest(sc, out_dir)
    sys.stdout.write(
        f"oracle: l2={metrics.l2:.3e} masked_linf={metrics.masked_linf:.3e} "
        f"phase={metrics.phase_masked_maxabs:.3e} -> {out_dir}\n")
    return EXIT_OK


def main(argv=None) -> int:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--threads", type=int, default=1,
                        help="FFT worker threads (results are identical)")
    shared.add_argument("--out", default=None, help="output directory")
    parser = argparse.ArgumentParser(
        prog="koopman",
        description="Koopman wavefunction mechanics: symbolic verification "
                    "and phase-space spectral simulation",
        parents=[shared])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-algebra", help="run the symbolic suites",
                       parents=[shared])
    p.add_argument("--formalism", choices=("kvn", "kvh", "hybrid", "all"),
                   default="all")
    p.set_defaults(func=cmd_check_algebra)

    for name, func in (("evolve", cmd_evolve), ("covariance", cmd_covariance),
                       ("oracle", cmd_oracle)):
        p = sub.add_parser(name, parents=[shared])
        p.add_argument("scenario", help="scenario .cfg file")
        p.set_defaults(func=func)

    args = parser.parse_args(argv)
    if args.out is None and args.command == "check-algebra":
        args.out = "out"
    try:
        set_fft_workers(args.threads)
        return args.func(args)
    except ScenarioError as e:
        sys.stderr.write(f"config error: {e}\n")
        return EXIT_CONFIG
    except ev.NumericalAbort as e:
        sys.stderr.write(f"numerical abort: {e}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
