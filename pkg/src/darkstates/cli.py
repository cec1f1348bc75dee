"""Command-line front end: ``darkstates {classify,gds,scan,filter}``.

Exit codes: 0 success, 1 failed verification, 2 no dark state exists for
the requested parameters, 3 capacity exceeded, 4 parse or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import gds as G
from .angular import ChainKind, parse_transition
from .errors import CapacityError, ConstraintViolation, DarkStateError, ZeroStateError
from .filtersim import FilterConfig, run_ensemble
from .fockspace import SCHEMA_VERSION, Statistics
from .model import ModelConfig, build_V, build_V_chain
from .oracle import analytic_count, chain_sector, dark_subspace, is_dark

EXIT_OK, EXIT_FAILED, EXIT_CONSTRAINT, EXIT_CAPACITY, EXIT_USAGE = 0, 1, 2, 3, 4
DARK_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# classify


def chain_table(F_g, F_e) -> list[dict]:
    rows = []
    for i, ch in enumerate(ModelConfig(F_g, F_e).chains):
        rows.append({
            "index": i,
            "kind": ch.kind.value,
            "L": ch.L,
            "sites": [f"{s.label}:{s}" for s in ch.sites],
            "couplings": [
                {
                    "excited": c.excited,
                    "ground": c.ground,
                    "polarization": "+" if c.s > 0 else "-",
                    "exact": c.G.surd(),
                    "value": float(c.G),
                }
                for c in ch.couplings
            ],
        })
    return rows


def cmd_classify(args) -> int:
    Fg, Fe = parse_transition(args.transition)
    rows = chain_table(Fg, Fe)
    if args.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "transition": [str(Fg), str(Fe)], "chains": rows}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
        return EXIT_OK
    lines = [f"transition {Fg} -> {Fe}: {len(rows)} chain(s)"]
    for r in rows:
        lines.append(f"[{r['index']}] {r['kind']:<16} L={r['L']}  sites {' '.join(r['sites'])}")
        for c in r["couplings"]:
            lines.append(
                f"      G^{c['excited']}_{c['ground']} ({c['polarization']}) = {c['exact']} = {c['value']:.12g}"
            )
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# ----------------------------------------------------------------------------
# gds


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _complex(text: str) -> complex:
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad complex number {text!r}") from None


def _pick_chain(cfg: ModelConfig, index: int):
    chains = cfg.chains
    if not 0 <= index < len(chains):
        raise UsageError(f"chain index {index} out of range (transition has {len(chains)} chains)")
    return chains[index]


def cmd_gds(args) -> int:
    Fg, Fe = parse_transition(args.transition)
    cfg = ModelConfig(Fg, Fe, Omega=args.Omega, statistics=args.statistics, momentum_classes=args.classes)
    chain = _pick_chain(cfg, args.chain_index)
    V = build_V(cfg)
    if args.type == "lambda":
        phi = G.FockPhi(*_int_list(args.phi)) if args.phi else None
        state = G.build_lambda_gds(cfg, chain, _int_list(args.n or "1"), phi)
    elif args.type == "n":
        state = G.build_n_gds(cfg, chain, _int_list(args.n or "1"), args.m, args.strong)
    elif args.type == "v":
        state = G.build_v_gds(cfg, chain, args.m, args.mprime)
    else:
        n = int(args.n) if args.n else None
        state = G.build_polariton(cfg, chain, args.m, _complex(args.Z), args.truncation, n, args.force_equal_g)
        if args.force_equal_g:
            V = build_V_chain(cfg, chain.with_equal_couplings())
    check = is_dark(state, cfg, DARK_TOL, V=V)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "transition": [str(Fg), str(Fe)],
        "chain": {"index": args.chain_index, "kind": chain.kind.value, "L": chain.L, "sites": chain.describe()},
        "statistics": cfg.statistics.value,
        "darkness": {"dark": check.dark, "residual": check.residual, "excited_occupancy": check.excited_occupancy},
        "state": state.to_json(),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    print(f"darkness residual {check.residual:.3e}, excited occupancy {check.excited_occupancy:.3e}", file=sys.stderr)
    if not check.dark:
        print(f"verification failed: residual above {DARK_TOL:g}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


# ----------------------------------------------------------------------------
# scan


def scan_transitions(max_2f: int):
    for tg in range(0, max_2f + 1):
        for te in (tg - 2, tg, tg + 2):
            if 0 <= te <= max_2f and (tg, te) != (0, 0):
                yield f"{tg}/2", f"{te}/2"


def run_scan(max_2f: int, caps: int, atoms: int = 1):
    """Rows comparing oracle dimensions with the analytic count for every chain sector."""
    if atoms != 1:
        raise UsageError("scan sectors are single-atom; use --atoms 1")
    rows = []
    for tg, te in scan_transitions(max_2f):
        cfg = ModelConfig(tg, te, statistics=Statistics.BOSE)
        for ch in cfg.chains:
            if ch.kind is ChainKind.ISOLATED_EXCITED:
                continue
            for mp in range(caps + 1):
                for mm in range(caps + 1):
                    rep = dark_subspace(cfg, chain_sector(ch, mp, mm, min_photons=1), ch)
                    row = rep.csv_row()
                    row["m_plus"], row["m_minus"] = mp, mm
                    row["analytic_count"] = analytic_count(ch, mp, mm)
                    row["oracle_dimension"] = rep.dimension
                    rows.append(row)
    return rows


SCAN_COLUMNS = ["transition", "chain", "m_plus", "m_minus", "sector", "analytic_count", "oracle_dimension", "max_residual"]


def cmd_scan(args) -> int:
    rows = run_scan(args.max_2f, args.caps, args.atoms)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SCAN_COLUMNS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _emit(buf.getvalue(), args.output)
    bad = [r for r in rows if r["analytic_count"] != r["oracle_dimension"] or float(r["max_residual"]) > DARK_TOL]
    print(f"{len(rows)} sectors, {len(bad)} disagreements", file=sys.stderr)
    return EXIT_FAILED if bad else EXIT_OK


# ----------------------------------------------------------------------------
# filter


def cmd_filter(args) -> int:
    cfg = FilterConfig.from_file(args.config)
    overrides = {
        k: v for k, v in (("trajectories", args.trajectories), ("seed", args.seed), ("t_max", args.t_max)) if v is not None
    }
    if overrides:
        cfg = FilterConfig(**{**cfg.to_json(), **overrides})
    ens = run_ensemble(cfg)
    _emit(ens.dumps() + "\n", args.output)
    if args.timeseries:
        out = Path(args.timeseries)
        out.mkdir(parents=True, exist_ok=True)
        for r in ens.records:
            (out / f"trajectory_{r.index:04d}.csv").write_text(r.timeseries_csv())
    print(
        f"{len(ens.records)} trajectories, converged {ens.convergence_fraction:.1%}, mean jumps {ens.mean_jumps:.2f}",
        file=sys.stderr,
    )
    return EXIT_OK


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="darkstates", description="Generalized dark states of atoms in quantized two-mode light.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", help="chain decomposition of a transition")
    c.add_argument("--transition", required=True, help='F_g:F_e, e.g. "2:1" or "3/2:3/2"')
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--output")
    c.set_defaults(func=cmd_classify)

    g = sub.add_parser("gds", help="construct and verify one dark state")
    g.add_argument("--transition", required=True)
    g.add_argument("--chain-index", type=int, default=0)
    g.add_argument("--type", choices=("lambda", "n", "v", "polariton"), required=True)
    g.add_argument("--n", help="atom number, or comma list per momentum class")
    g.add_argument("--m", type=int, default=0, help="photons in the constrained (weak) mode, or in a+ for V")
    g.add_argument("--mprime", type=int, default=0, help="photons in a- for V chains")
    g.add_argument("--strong", type=int, default=0, help="photons in the free mode of an N chain")
    g.add_argument("--phi", help='Fock photon numbers "m+,m-" for Lambda chains')
    g.add_argument("--Z", default="1", help="coherent amplitude for polaritons")
    g.add_argument("--truncation", type=int, default=12)
    g.add_argument("--force-equal-g", action="store_true")
    g.add_argument("--statistics", choices=("bose", "fermi"))
    g.add_argument("--classes", type=int, default=1, help="momentum classes")
    g.add_argument("--Omega", type=float, default=1.0)
    g.add_argument("--output")
    g.set_defaults(func=cmd_gds)

    s = sub.add_parser("scan", help="oracle versus analytic dark-space dimensions")
    s.add_argument("--max-2f", type=int, default=5)
    s.add_argument("--caps", type=int, default=3)
    s.add_argument("--atoms", type=int, default=1)
    s.add_argument("--output")
    s.set_defaults(func=cmd_scan)

    f = sub.add_parser("filter", help="quantum-jump ensemble of the filter scenario")
    f.add_argument("--config", required=True, help="flat key = value file")
    f.add_argument("--trajectories", type=int)
    f.add_argument("--seed", type=int)
    f.add_argument("--t-max", type=float)
    f.add_argument("--output", help="summary JSON path (default stdout)")
    f.add_argument("--timeseries", help="directory for per-trajectory CSV files")
    f.set_defaults(func=cmd_filter)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        return args.func(args)
    except (ConstraintViolation, ZeroStateError) as e:
        print(f"constraint violation: {e}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except CapacityError as e:
        print(f"capacity exceeded: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, ValueError, OSError, DarkStateError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
