"""Command-line front end.

One job per invocation: parse flags, load the subshift spec document,
dispatch, and write a single artifact (SVG, JSON, or CSV).  Every
artifact embeds the canonical config and package version, outputs are
byte-identical for identical configs, stochastic commands require a
seed, and failures exit nonzero with a one-line error JSON on stderr
after removing any temporary file (artifacts are written via rename,
so a crash never leaves a partial file at the target path).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .geometry import ColourWindow, generate_patch, scale_range
from .hull import (
    BumpProfile,
    TestFunction,
    harmonicity_check,
    invariance_check,
    sample_batch,
    tau_pairing,
)
from .ktheory import (
    CylinderFunction,
    cech_cohomology,
    gap_label_to_json,
    gap_labels,
    group_to_json,
    k_groups,
)
from .render import svg_render
from .subshift import (
    ExplicitWindow,
    Periodic,
    SubshiftSpec,
    Substitution,
    language,
    measure_vector,
    parse_spec,
    spec_to_json,
)

COMMANDS = ("render", "patch", "kgroups", "cech", "gaplabels", "measures",
            "hullcheck", "cocycle")
_STOCHASTIC = ("hullcheck", "cocycle")


@dataclass(frozen=True)
class JobConfig:
    command: str
    spec: SubshiftSpec
    radius: float
    nmax: int | None
    samples: int
    seed: int | None
    out: str | None

    def document(self) -> dict:
        doc = {"command": self.command, "spec": spec_to_json(self.spec),
               "version": __version__}
        if self.command in ("render", "patch"):
            doc["radius"] = self.radius
        if self.nmax is not None:
            doc["nmax"] = self.nmax
        if self.command in _STOCHASTIC:
            doc["samples"] = self.samples
            doc["seed"] = self.seed
        return doc


_NMAX_DEFAULT = {"kgroups": 8, "cech": 8, "gaplabels": 6, "measures": 4}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hyptile",
        description="Pentagon tilings of the half-plane: figures, "
                    "K-theoretic group reports, measures, and seeded "
                    "Monte-Carlo checks.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", required=True, metavar="FILE.json",
                   help="subshift spec document")
    p.add_argument("--radius", type=float, default=3.0,
                   help="hyperbolic patch radius (render, patch)")
    p.add_argument("--nmax", type=int, default=None,
                   help="truncation level (kgroups, cech, gaplabels, measures)")
    p.add_argument("--samples", type=int, default=100_000,
                   help="Monte-Carlo sample count (hullcheck, cocycle)")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed, required for stochastic commands")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="artifact path (default: stdout)")
    return p


def load_config(args: argparse.Namespace) -> JobConfig:
    with open(args.spec, encoding="utf-8") as fh:
        spec = parse_spec(json.load(fh))
    if args.command in _STOCHASTIC and args.seed is None:
        raise ValueError(f"--seed is required for {args.command} "
                         "(stochastic output must be reproducible)")
    if args.radius < 0:
        raise ValueError("--radius must be >= 0")
    if args.samples < 2:
        raise ValueError("--samples must be at least 2")
    nmax = args.nmax
    if nmax is None:
        nmax = _NMAX_DEFAULT.get(args.command)
    elif nmax < (2 if args.command in ("kgroups", "cech") else 1):
        raise ValueError("--nmax too small")
    return JobConfig(args.command, spec, args.radius, nmax,
                     args.samples, args.seed, args.out)


# -- artifact helpers -----------------------------------------------------

def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _atomic_write(path: str, text: str):
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target),
                               prefix=".hyptile-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(cfg: JobConfig, text: str):
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(cfg.out, text)


# -- per-command runners --------------------------------------------------

def _colour_window(spec: SubshiftSpec, radius: float) -> ColourWindow:
    """Letters w[-hw..hw] wide enough to colour every scale in the patch."""
    ks = scale_range(radius)
    hw = max(abs(ks.start), abs(ks.stop - 1))
    if isinstance(spec, Periodic):
        p = len(spec.word)
        word = "".join(spec.word[j % p] for j in range(-hw, hw + 1))
        return ColourWindow(word, -hw)
    if isinstance(spec, Substitution):
        return ColourWindow(language(spec, 2 * hw + 1)[0], -hw)
    window = ColourWindow(spec.left + spec.right, -len(spec.left))
    window.get(-hw), window.get(hw)  # fail early if too narrow
    return window


def _run_render(cfg: JobConfig) -> str:
    colouring = _colour_window(cfg.spec, cfg.radius)
    ts = generate_patch(cfg.radius, colouring=colouring)
    return svg_render(ts, config=json.dumps(cfg.document(), sort_keys=True))


def _run_patch(cfg: JobConfig) -> str:
    colouring = _colour_window(cfg.spec, cfg.radius)
    ts = generate_patch(cfg.radius, colouring=colouring)
    tiles = [{"k": t.k, "n": t.n, "colour": t.colour} for t in ts.tiles]
    return _dump({"config": cfg.document(), "count": len(tiles),
                  "tiles": tiles})


def _flatten_k0(co_half, inv_z) -> dict:
    return {
        "rank": co_half.rank + inv_z.rank,
        "torsion": list(co_half.torsion) + list(inv_z.torsion),
        "stabilized": co_half.stabilized and inv_z.stabilized,
        "summands": [group_to_json(co_half), group_to_json(inv_z)],
    }


def _run_kgroups(cfg: JobConfig) -> str:
    kg = k_groups(cfg.spec, cfg.nmax)
    co_half, inv_z = kg["K0"]
    return _dump({"config": cfg.document(),
                  "K0": _flatten_k0(co_half, inv_z),
                  "K1": group_to_json(kg["K1"])})


def _run_cech(cfg: JobConfig) -> str:
    ch = cech_cohomology(cfg.spec, cfg.nmax)
    return _dump({"config": cfg.document(),
                  **{name: group_to_json(g) for name, g in ch.items()}})


def _run_gaplabels(cfg: JobConfig) -> str:
    return _dump({"config": cfg.document(),
                  "gap_labels": gap_label_to_json(gap_labels(cfg.spec,
                                                             cfg.nmax))})


def _run_measures(cfg: JobConfig) -> str:
    lines = ["# hyptile measures",
             "# config: " + json.dumps(cfg.document(), sort_keys=True),
             "word,length,measure,float"]
    for n in range(1, cfg.nmax + 1):
        mv = measure_vector(cfg.spec, n)
        for w in sorted(mv):
            v = mv[w]
            shown = str(v.value) if v.is_rational else "algebraic"
            lines.append(f"{w},{n},{shown},{format(v.as_float(), '.17g')}")
    return "\n".join(lines) + "\n"


def _default_functions(spec: SubshiftSpec) -> list[TestFunction]:
    first2 = language(spec, 2)[0]
    return [
        TestFunction.word_indicator(first2),
        TestFunction(word_part=CylinderFunction.of("Z", 0, {first2: 1}),
                     t_bump=BumpProfile("bump3", 0.5, 0.45),
                     s_bump=BumpProfile("bump3", 0.5, 0.45)),
    ]


def _random_group_elements(rng, count: int) -> list[tuple[float, float]]:
    a = np.exp2(rng.uniform(-1.5, 1.5, count))
    b = rng.uniform(-3.0, 3.0, count)
    return [(float(x), float(y)) for x, y in zip(a, b)]


def _run_hullcheck(cfg: JobConfig) -> str:
    rng = np.random.default_rng(cfg.seed)
    gs = _random_group_elements(rng, 8)
    batch = sample_batch(cfg.spec, cfg.samples, cfg.seed)
    first = language(cfg.spec, 1)[0]
    p_first = measure_vector(cfg.spec, 1)[first].as_float()
    freq_omega = float((batch.omega & 3 == 1).mean())
    freq_word = float((batch.words[:, batch.origin]
                       == ord(first) - ord("0")).mean())
    marginals = {
        "omega_mod4_is1": {
            "statistic": freq_omega, "expected": 0.25,
            "pass": abs(freq_omega - 0.25)
            <= 3 * math.sqrt(0.25 * 0.75 / cfg.samples)},
        "first_letter": {
            "statistic": freq_word, "expected": p_first,
            "pass": abs(freq_word - p_first)
            <= 3 * math.sqrt(p_first * (1 - p_first) / cfg.samples)},
    }
    reports = {}
    for i, f in enumerate(_default_functions(cfg.spec)):
        reports[f"invariance_{i}"] = invariance_check(
            cfg.spec, f, gs, cfg.samples, cfg.seed)
    reports["harmonicity"] = harmonicity_check(
        cfg.spec, TestFunction.bump(0.5, 0.45, 0.5, 0.45),
        cfg.samples, cfg.seed)
    biased = invariance_check(cfg.spec, _default_functions(cfg.spec)[0],
                              gs, cfg.samples, cfg.seed,
                              word_bias="first-word")
    control = {"detected": not biased["pass"], "report": biased}
    ok = (all(m["pass"] for m in marginals.values())
          and all(r["pass"] for r in reports.values())
          and control["detected"])
    return _dump({"config": cfg.document(), "pass": ok,
                  "marginals": marginals, "checks": reports,
                  "negative_control": control})


def _run_cocycle(cfg: JobConfig) -> str:
    rng = np.random.default_rng(cfg.seed)
    pairs = []
    for i in range(3):
        f = TestFunction.bump(*_bump_params(rng))
        g = TestFunction.bump(*_bump_params(rng))
        rep = tau_pairing(cfg.spec, f, g, cfg.samples, cfg.seed)
        pairs.append(rep)
    with_one = tau_pairing(cfg.spec,
                           TestFunction.bump(0.5, 0.45, 0.5, 0.45),
                           TestFunction.constant(),
                           cfg.samples, cfg.seed)
    ok = with_one["pass"] and all(r["pass"] for r in pairs)
    return _dump({"config": cfg.document(), "pass": ok,
                  "tau_with_one": with_one, "pairs": pairs})


def _bump_params(rng) -> tuple[float, float, float, float]:
    def one():
        c = float(rng.uniform(0.35, 0.65))
        w = float(rng.uniform(0.2, min(c, 1 - c) - 0.02))
        return c, w
    ct, wt = one()
    cs, ws = one()
    return ct, wt, cs, ws


_RUNNERS = {
    "render": _run_render,
    "patch": _run_patch,
    "kgroups": _run_kgroups,
    "cech": _run_cech,
    "gaplabels": _run_gaplabels,
    "measures": _run_measures,
    "hullcheck": _run_hullcheck,
    "cocycle": _run_cocycle,
}


def run(cfg: JobConfig) -> int:
    _emit(cfg, _RUNNERS[cfg.command](cfg))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(load_config(args))
    except Exception as exc:  # structured error, no partial artifacts
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
