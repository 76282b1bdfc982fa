"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 when ``--expect-violation`` is given and
the primary certificate is not violated.
"""
from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations

import numpy as np

from . import lab
from . import nonlocality as nl
from .coherence import coherence_report
from .incoherent_ops import ConversionSpec, convert
from .qstate import (
    DensityMatrix,
    InvalidStateError,
    MatrixFormatError,
    PureState,
    density_to_dict,
    matrix_from_dict,
)


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read input ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_state(path: str) -> DensityMatrix | PureState:
    """Density matrix, or a pure state when the JSON matrix has one column."""
    try:
        m, dims = matrix_from_dict(_read_json(path))
    except MatrixFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc
    try:
        if m.shape[1] == 1:
            return PureState(m[:, 0], dims)
        return DensityMatrix(m, dims)
    except InvalidStateError as exc:
        raise InputError(f"{path}: not a valid state ({exc.invariant}): {exc}") from exc


def load_density(path: str) -> DensityMatrix:
    s = load_state(path)
    return s.density() if isinstance(s, PureState) else s


def _config(args) -> nl.OracleConfig:
    return nl.OracleConfig(resolution=args.resolution)


def _two_party(rho: DensityMatrix) -> DensityMatrix:
    if len(rho.dims) == 1:
        return convert(rho, ConversionSpec(rho.dim, 2))
    if len(rho.dims) == 2 and rho.dims[0] == rho.dims[1]:
        return rho
    raise InputError(f"expected a source qudit or a d x d state, got dims {list(rho.dims)}")


def _three_qubit(rho: DensityMatrix) -> DensityMatrix:
    if rho.dims == (2,):
        return convert(rho, ConversionSpec(2, 3))
    if rho.dims == (2, 2, 2):
        return rho
    raise InputError(f"expected a source qubit or a three-qubit state, got dims {list(rho.dims)}")


def cmd_coherence(args):
    return coherence_report(load_density(args.input)).to_dict(), None


def cmd_convert(args):
    rho = load_density(args.input)
    if len(rho.dims) != 1:
        raise InputError(f"convert takes a single source qudit, got dims {list(rho.dims)}")
    d = rho.dim if args.d is None else args.d
    if d != rho.dim:
        raise InputError(f"--d {d} does not match the source dimension {rho.dim}")
    try:
        spec = ConversionSpec(d, args.n)
        return density_to_dict(convert(rho, spec)), None
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_chsh(args):
    src = load_density(args.input)
    rho = _two_party(src)
    d = rho.dims[0]
    reports = []
    if d == 2:
        M = nl.horodecki_M(rho)
        reports.append(nl.make_report("chsh_max", nl.chsh_max(rho), nl.CHSH_BOUND, M=M))
        reports.append(nl.chsh_grid_oracle(rho, seed=args.seed, config=_config(args)))
    else:
        pairs = [nl.ProjectorPair(a, b, c, e, d) for a, b in combinations(range(d), 2)
                 for c, e in combinations(range(d), 2)]
        best = max((nl.projected_chsh(rho, p) for p in pairs), key=lambda r: r.value)
        reports.append(best)
        if len(src.dims) == 1:
            reports.append(nl.theorem2_witness(src))
    return [r.to_dict() for r in reports], reports[0]


def cmd_svetlichny(args):
    rho = _three_qubit(load_density(args.input))
    rep = nl.svetlichny_bound(rho, seed=args.seed, config=_config(args))
    return [rep.to_dict()], rep


def cmd_tns(args):
    rho = _three_qubit(load_density(args.input))
    t = nl.t_certificate(rho)
    t_orc = nl.t_oracle(rho, seed=args.seed, config=_config(args))
    ns = nl.ns_oracle(rho, seed=args.seed, config=_config(args))
    return [r.to_dict() for r in (t, t_orc, ns)], t


def cmd_gme(args):
    state = load_state(args.input)
    if isinstance(state, PureState) and len(state.dims) >= 2:
        value = nl.c_gme_pure(state)
    else:
        rho = state.density() if isinstance(state, PureState) else state
        if len(rho.dims) == 1:
            try:
                value = nl.c_gme_converted(rho, args.n)
            except ValueError as exc:
                raise InputError(str(exc)) from exc
        elif nl.is_pure(rho):
            lam, vec = np.linalg.eigh(rho.matrix)
            value = nl.c_gme_pure(PureState.normalized(vec[:, -1], rho.dims))
        else:
            raise InputError("GME concurrence of mixed multipartite states is not computed")
    rep = nl.make_report("c_gme", value, 0.0)
    return [rep.to_dict()], rep


def cmd_verify(args):
    results = lab.CAMPAIGNS[args.theorem](args.trials, args.seed)
    return [r.to_dict() for r in results], None


def cmd_fig2(args):
    try:
        res, text = lab.fig2_grid(args.a_steps, args.b_steps, args.seed, args.out, _config(args))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.out is None:
        return text, None
    return res.to_dict(), None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohnonlocal",
                                     description="Coherence measures, conversions and nonlocality certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, state=True, oracle=False):
        p = sub.add_parser(name, help=help)
        if state:
            p.add_argument("--in", dest="input", required=True, help="matrix JSON file, '-' for stdin")
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        if oracle:
            p.add_argument("--resolution", type=int, default=16, help="angular grid steps for search starts")
            p.add_argument("--expect-violation", action="store_true",
                           help="exit 2 unless the primary certificate is violated")
        p.set_defaults(func=func)
        return p

    add("coherence", cmd_coherence, "l1 and relative-entropy coherence")
    p = add("convert", cmd_convert, "fan-out conversion of a source qudit")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=3)
    add("chsh", cmd_chsh, "CHSH certificate (Horodecki closed form, search, projected qudit pairs)", oracle=True)
    add("svetlichny", cmd_svetlichny, "Svetlichny bound and search", oracle=True)
    add("tns", cmd_tns, "T and NS three-way inequalities", oracle=True)
    p = add("gme", cmd_gme, "genuine multipartite concurrence", oracle=True)
    p.add_argument("--n", type=int, default=3)
    p = add("verify", cmd_verify, "run verification campaigns", state=False)
    p.add_argument("--theorem", choices=sorted(lab.CAMPAIGNS), default="all")
    p.add_argument("--trials", type=int, default=1000)
    p = add("fig2", cmd_fig2, "T / NS grid over rho_01 = a + ib as CSV", state=False)
    p.add_argument("--a-steps", type=int, default=101)
    p.add_argument("--b-steps", type=int, default=101)
    p.add_argument("--resolution", type=int, default=16)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        parser.error("--trials must be >= 1")
    try:
        payload, primary = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.command == "fig2":
        sys.stdout.write(text)
    elif args.out is not None:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "expect_violation", False) and primary is not None and not primary.violated:
        return 2
    return 0


def main():
    sys.exit(run())
