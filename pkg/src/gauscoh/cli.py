"""Command-line front end.

Exit status: 0 on success, 1 when an object is rejected on physical grounds
(or a divergent coherence under ``--strict``), 2 on I/O, parse or shape errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .channels import (
    apply_channel,
    choi_state,
    is_incoherent_channel,
    is_unitary_channel,
    random_channel,
    random_incoherent_channel,
    validate_channel,
)
from .coherence import DIVERGENT, OptimizerOptions, coherence_of_channel, cr_channel
from .errors import GaussCohError, InvalidObjectError
from .fock import compare_char, compare_cr
from .io import SCHEMA_VERSION, RecordError, dumps, load_record, to_record
from .states import cr_state, entropy, mean_photon_numbers, validate_state
from .superchannels import (
    apply_superchannel,
    decompose_superchannel,
    is_incoherent_superchannel,
    random_incoherent_superchannel,
    random_superchannel,
    validate_superchannel,
)
from .symplectic import DEFAULT_TOL

SEED_ENV = "GAUSCOH_SEED"


class Rejected(Exception):
    """Domain-level rejection; maps to exit status 1."""

    def __init__(self, payload: dict, text: str):
        super().__init__(text)
        self.payload, self.text = payload, text


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)


def _table(rows) -> str:
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k.ljust(width)}  {_fmt(v)}" for k, v in rows)


def _matrix_text(name: str, M) -> str:
    M = np.asarray(M)
    if M.ndim == 1:
        return f"{name} = [" + "  ".join(f"{x: .6g}" for x in M) + "]"
    lines = ["  ".join(f"{x: 10.6g}" for x in row) for row in M]
    return f"{name} =\n" + "\n".join("  " + ln for ln in lines)


def emit_report(payload: dict, fmt: str) -> str:
    """Render a command payload as aligned text or as versioned JSON."""
    if fmt == "json":
        return dumps(payload)
    kind = payload.get("kind")
    if kind in ("state", "channel", "superchannel") and "record" in payload:
        rec = payload["record"]
        fields = {"state": ("V", "d0"), "channel": ("T", "N", "d"),
                  "superchannel": ("A", "O", "Y", "dbar")}[kind]
        return f"{kind} on {rec['n']} mode(s)\n" + "\n".join(_matrix_text(f, rec[f]) for f in fields)
    if kind == "decomposition":
        return "\n\n".join(
            f"{part} channel\n" + "\n".join(_matrix_text(f, payload[part][f]) for f in ("T", "N", "d"))
            for part in ("pre", "post")
        )
    rows = []
    for k, v in payload.items():
        if k in ("version", "kind") or isinstance(v, dict):
            continue
        if k in ("value", "incumbent", "entropy", "analytic", "numeric") and isinstance(v, float):
            rows.append((k, f"{v:.12g} bits"))
        else:
            rows.append((k, v))
    out = _table(rows) if rows else ""
    for k, v in payload.items():
        if isinstance(v, dict):
            sub = [(kk, vv) for kk, vv in v.items() if not isinstance(vv, dict)]
            if sub:
                out += f"\n\n[{k}]\n" + _table(sub)
    return out


def _opts(args) -> OptimizerOptions:
    return OptimizerOptions(nu_max=args.nu_max, grid_points_per_decade=args.grid_points_per_decade)


def cmd_validate(args) -> dict:
    if args.state:
        s = load_record("state", args.state)
        rep = validate_state(s, args.tol)
        payload = {"version": SCHEMA_VERSION, "kind": "state-validation", "valid": rep.valid,
                   "reason": rep.reason,
                   "min_eigenvalue": None if rep.uncertainty is None else rep.uncertainty.min_eigenvalue,
                   "symplectic_eigenvalues": None if rep.symplectic_eigenvalues is None
                   else rep.symplectic_eigenvalues.tolist()}
    elif args.channel:
        c = load_record("channel", args.channel)
        rep = validate_channel(c, args.tol)
        payload = {"version": SCHEMA_VERSION, "kind": "channel-validation", "valid": rep.valid,
                   "reason": rep.reason,
                   "min_eigenvalue": None if rep.complete_positivity is None
                   else rep.complete_positivity.min_eigenvalue}
    else:
        sc = load_record("superchannel", args.superchannel)
        rep = validate_superchannel(sc, args.tol)
        payload = {"version": SCHEMA_VERSION, "kind": "superchannel-validation", "valid": rep.valid,
                   "reason": rep.reason, "orthogonal": rep.orthogonal,
                   "post_min_eigenvalue": None if rep.post_cp is None else rep.post_cp.min_eigenvalue,
                   "pre_min_eigenvalue": None if rep.pre_cp is None else rep.pre_cp.min_eigenvalue}
    payload["verdict"] = "valid" if rep.valid else "invalid"
    if not rep.valid:
        raise Rejected(payload, rep.reason)
    return payload


def _require_valid(obj, validator, what: str):
    rep = validator(obj)
    if not rep:
        raise Rejected({"version": SCHEMA_VERSION, "kind": "rejection", "verdict": "invalid",
                        "reason": f"{what}: {rep.reason}"}, f"{what}: {rep.reason}")


def cmd_classify(args) -> dict:
    if args.channel:
        c = load_record("channel", args.channel)
        _require_valid(c, validate_channel, "channel")
        rep = is_incoherent_channel(c, args.tol)
        return {"version": SCHEMA_VERSION, "kind": "channel-classification",
                "verdict": "incoherent" if rep else "coherent",
                "unitary": is_unitary_channel(c, args.tol), **rep.to_dict()}
    sc = load_record("superchannel", args.superchannel)
    _require_valid(sc, validate_superchannel, "superchannel")
    rep = is_incoherent_superchannel(sc, args.tol)
    return {"version": SCHEMA_VERSION, "kind": "superchannel-classification",
            "verdict": "incoherent" if rep else "coherent", **rep.to_dict()}


def cmd_apply(args) -> dict:
    c = load_record("channel", args.channel)
    s = load_record("state", args.state)
    _require_valid(c, validate_channel, "channel")
    _require_valid(s, validate_state, "state")
    return {"kind": "state", "record": to_record(apply_channel(c, s))}


def cmd_coherence(args) -> dict:
    if args.state:
        s = load_record("state", args.state)
        _require_valid(s, validate_state, "state")
        return {"version": SCHEMA_VERSION, "kind": "state-coherence", "value": cr_state(s),
                "status": "converged", "entropy": entropy(s),
                "mean_photon_numbers": mean_photon_numbers(s).tolist()}
    c = load_record("channel", args.channel)
    _require_valid(c, validate_channel, "channel")
    res = coherence_of_channel(c, _opts(args)) if args.closed_form else cr_channel(c, _opts(args))
    payload = {"version": SCHEMA_VERSION, "kind": "channel-coherence", **res.to_dict()}
    if args.strict and res.status == DIVERGENT:
        raise Rejected(payload, "channel coherence is divergent")
    return payload


def cmd_choi(args) -> dict:
    c = load_record("channel", args.channel)
    _require_valid(c, validate_channel, "channel")
    return {"kind": "state", "record": to_record(choi_state(c, args.r))}


def cmd_superchannel(args) -> dict:
    sc = load_record("superchannel", args.sc)
    _require_valid(sc, validate_superchannel, "superchannel")
    if args.action == "apply":
        c = load_record("channel", args.channel)
        _require_valid(c, validate_channel, "channel")
        return {"kind": "channel", "record": to_record(apply_superchannel(sc, c))}
    pre, post = decompose_superchannel(sc)
    return {"version": SCHEMA_VERSION, "kind": "decomposition", "pre": pre.to_dict(), "post": post.to_dict()}


def cmd_oracle(args) -> dict:
    s = load_record("state", args.state)
    _require_valid(s, validate_state, "state")
    if args.quantity == "cr":
        return {"version": SCHEMA_VERSION, "kind": "oracle-cr", **compare_cr(s, args.cutoff)}
    if args.lam is not None:
        return {"version": SCHEMA_VERSION, "kind": "oracle-char",
                **compare_char(s, complex(*args.lam), args.cutoff)}
    axis = np.linspace(-1.5 / np.sqrt(2), 1.5 / np.sqrt(2), 5)
    reports = [compare_char(s, complex(x, y), args.cutoff) for x in axis for y in axis]
    worst = max(reports, key=lambda r: r["abs_err"])
    return {"version": SCHEMA_VERSION, "kind": "oracle-char", "grid_points": len(reports),
            "abs_err": worst["abs_err"], "cutoff": args.cutoff,
            "trace_deficit": worst["trace_deficit"], "worst": worst}


def cmd_sample(args) -> dict:
    seed = int(os.environ.get(SEED_ENV, args.seed))
    kind, sampler = {
        "channel": ("channel", random_channel),
        "incoherent-channel": ("channel", random_incoherent_channel),
        "superchannel": ("superchannel", random_superchannel),
        "incoherent-superchannel": ("superchannel", random_incoherent_superchannel),
    }[args.what]
    return {"kind": kind, "record": to_record(sampler(args.modes, seed))}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = argparse.ArgumentParser(prog="gauscoh", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"gauscoh {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="check physicality constraints")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--state")
    g.add_argument("--channel")
    g.add_argument("--superchannel")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("classify", parents=[common], help="structural incoherence test")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--channel")
    g.add_argument("--superchannel")
    c.set_defaults(func=cmd_classify)

    a = sub.add_parser("apply", parents=[common], help="send a state through a channel")
    a.add_argument("--channel", required=True)
    a.add_argument("--state", required=True)
    a.set_defaults(func=cmd_apply)

    co = sub.add_parser("coherence", parents=[common], help="relative-entropy coherence in bits")
    g = co.add_mutually_exclusive_group(required=True)
    g.add_argument("--state")
    g.add_argument("--channel")
    co.add_argument("--nu-max", type=float, default=OptimizerOptions.nu_max)
    co.add_argument("--grid-points-per-decade", type=int,
                    default=OptimizerOptions.grid_points_per_decade)
    co.add_argument("--strict", action="store_true", help="exit 1 if the result is divergent")
    co.add_argument("--closed-form", action="store_true",
                    help="use closed forms for constant and displacement channels")
    co.set_defaults(func=cmd_coherence)

    ch = sub.add_parser("choi", parents=[common], help="Choi state of a channel")
    ch.add_argument("--channel", required=True)
    ch.add_argument("--r", type=float, required=True, help="squeezing parameter")
    ch.set_defaults(func=cmd_choi)

    s = sub.add_parser("superchannel", help="superchannel action or decomposition")
    ssub = s.add_subparsers(dest="action", required=True)
    sa = ssub.add_parser("apply", parents=[common])
    sa.add_argument("--sc", required=True)
    sa.add_argument("--channel", required=True)
    sd = ssub.add_parser("decompose", parents=[common])
    sd.add_argument("--sc", required=True)
    s.set_defaults(func=cmd_superchannel)

    o = sub.add_parser("oracle", parents=[common], help="compare closed forms with Fock numerics")
    o.add_argument("quantity", choices=("char", "cr"))
    o.add_argument("--state", required=True)
    o.add_argument("--cutoff", type=int, default=100)
    o.add_argument("--lambda", dest="lam", type=float, nargs=2, metavar=("RE", "IM"))
    o.set_defaults(func=cmd_oracle)

    sm = sub.add_parser("sample", parents=[common],
                        help=f"draw a random object (seed overridden by ${SEED_ENV})")
    sm.add_argument("what", choices=("channel", "incoherent-channel", "superchannel",
                                     "incoherent-superchannel"))
    sm.add_argument("--modes", type=int, default=1)
    sm.add_argument("--seed", type=int, default=0)
    sm.set_defaults(func=cmd_sample)
    return p


def _render(payload: dict, fmt: str) -> str:
    if "record" in payload and fmt == "json":
        return dumps(payload["record"])
    return emit_report(payload, fmt)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except Rejected as exc:
        print(_render(exc.payload, args.format))
        print(f"rejected: {exc.text}", file=sys.stderr)
        return 1
    except RecordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidObjectError, GaussCohError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 1
    print(_render(payload, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
