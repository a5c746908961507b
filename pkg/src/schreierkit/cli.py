"""Command-line front end. Every command prints one report, JSON unless a table is asked for.

Exit status: 0 on success, 1 on bad input or a domain error, 2 when a cap or
search budget runs out. Configuration comes from the JSON file named by
``SCHREIERKIT_CONFIG`` (if set); command-line flags override it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import averages, probe, schreier, treerank, tsirelson
from .errors import CapExceeded, SchreierKitError
from .ordinal import CANONICAL, FundamentalPolicy, Ordinal

CONFIG_ENV = "SCHREIERKIT_CONFIG"


@dataclass
class Config:
    universeCap: int = schreier.UNIVERSE_CAP
    supportCap: int = tsirelson.SUPPORT_CAP
    enumDepthCap: int = tsirelson.ENUM_DEPTH_CAP
    averageCap: int = averages.AVERAGE_CAP
    policy: str = "canonical"
    policyBase: Optional[list] = None
    searchBudget: dict = field(default_factory=lambda: {"samples": 64, "rounds": 2})
    outputFormat: str = "json"

    def __post_init__(self):
        for name in ("universeCap", "supportCap", "enumDepthCap", "averageCap"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise SchreierKitError(f"config field {name} must be a positive integer")
        if self.policy not in ("canonical", "paper-product"):
            raise SchreierKitError(f"unknown policy {self.policy!r}")
        if self.policy == "paper-product" and self.policyBase is None:
            raise SchreierKitError("the paper-product policy needs policyBase (an ordinal)")
        if self.outputFormat not in ("json", "table"):
            raise SchreierKitError(f"unknown outputFormat {self.outputFormat!r}")

    @classmethod
    def load(cls, path: Optional[str] = None) -> "Config":
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SchreierKitError(f"cannot read config {path}: {exc}") from None
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise SchreierKitError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def fundamental_policy(self) -> FundamentalPolicy:
        if self.policy == "canonical":
            return CANONICAL
        return FundamentalPolicy.paper_product(Ordinal.of(self.policyBase))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument decoding


def _ordinal(text: str) -> Ordinal:
    try:
        return Ordinal.from_json(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad ordinal {text!r}: {exc}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rational {text!r}") from None


def _finite_set(text: str):
    try:
        return schreier.parse_set(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad set {text!r}") from None


def _json_arg(text: str):
    """Inline JSON, or ``@path`` to read it from a file."""
    try:
        if text.startswith("@"):
            return json.loads(Path(text[1:]).read_text())
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise argparse.ArgumentTypeError(f"bad JSON {text!r}: {exc}") from None


def _subsequence(text: str) -> schreier.Subsequence:
    """A JSON list of increasing integers, or ``affine:a,b`` for ``n_i = a*i + b``."""
    if text.startswith("affine:"):
        try:
            a, b = (int(t) for t in text[len("affine:"):].split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad subsequence {text!r}") from None
        if a < 1 or a + b < 1:
            raise argparse.ArgumentTypeError("affine subsequence must be increasing and positive")
        return schreier.Subsequence(lambda i: a * i + b, name=text)
    data = _json_arg(text)
    if not isinstance(data, list):
        raise argparse.ArgumentTypeError("subsequence must be a JSON list")
    try:
        return schreier.Subsequence(data)
    except SchreierKitError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


def _schreier_member(args, cfg):
    spec = schreier.Schreier(args.xi, cfg.fundamental_policy())
    return {"xi": args.xi.to_json(), "set": list(args.set), "member": schreier.member(args.set, spec)}


def _schreier_enumerate(args, cfg):
    spec = schreier.Schreier(args.xi, cfg.fundamental_policy())
    sets = schreier.enumerate_family(spec, args.universe, cfg.universeCap)
    return {"xi": args.xi.to_json(), "universe": args.universe, "count": len(sets), "sets": [list(F) for F in sets]}


def _tree_rank(args, cfg):
    spec = schreier.Schreier(args.xi, cfg.fundamental_policy())
    T = treerank.family_tree(spec, args.universe, cfg.universeCap)
    return {"xi": args.xi.to_json(), "universe": args.universe, "nodes": len(T), "rank": treerank.rank(T)}


def _tree_embed(args, cfg):
    S, T = treerank.make_tree(args.source), treerank.make_tree(args.target)
    phi = treerank.monotone_embeds(S, T)
    out = {"rank_source": treerank.rank(S), "rank_target": treerank.rank(T), "embeds": phi is not None}
    if phi is not None:
        out["witness"] = [[list(s), list(phi[s])] for s in sorted(phi, key=lambda n: (len(n), n))]
    return out


def _norm_spec(args, cfg) -> tsirelson.NormSpec:
    return tsirelson.NormSpec(args.xi, args.theta, cfg.fundamental_policy())


def _norm(args, cfg):
    x = tsirelson.SparseVector.from_json(args.vector)
    result = tsirelson.norm(x, _norm_spec(args, cfg), cap=cfg.supportCap)
    return {"norm": str(result.value), "certificate": tsirelson.functional_to_json(result.certificate)}


def _avg(args, cfg):
    w = averages.repeated_average(
        args.alpha, args.beta, args.eps,
        M=args.subsequence or schreier.IDENTITY,
        policy=cfg.fundamental_policy(),
        cap=cfg.averageCap,
        measure=args.measure,
    )
    ambient = schreier.IDENTITY if args.measure == "values" else (args.subsequence or schreier.IDENTITY)
    check = averages.verify_smallness(w, args.beta, args.eps, cfg.fundamental_policy(), cfg.averageCap, M=ambient)
    out = w.to_json()
    out["max_small_mass"] = str(check.worst)
    out["heaviest_small_subset"] = list(check.witness)
    return out


def _claim1(args, cfg):
    spec = _norm_spec(args, cfg)
    result = averages.claim1_witness(args.xi, args.eta, spec, support_cap=cfg.supportCap, cap=cfg.averageCap)
    return result.to_json()


def _search(cfg, args) -> dict:
    return {
        "seed": args.seed,
        "samples": int(cfg.searchBudget.get("samples", 64)),
        "rounds": int(cfg.searchBudget.get("rounds", 2)),
    }


def _probe_operator(args) -> probe.Operator:
    op = probe.Operator.from_json(args.matrix)
    if args.norm == "tsirelson":
        op = probe.Operator(op.matrix, probe.TsirelsonNorm(), probe.TsirelsonNorm())
    return op


def _probe_singularity(args, cfg):
    op = _probe_operator(args)
    result = probe.sxi_singularity(op, args.xi, args.dim, cfg.fundamental_policy(), cfg.universeCap, **_search(cfg, args))
    return {"xi": args.xi.to_json(), "dim": args.dim, "norm": args.norm, **result.to_json()}


def _probe_product(args, cfg):
    factors = [probe.Operator.from_json(m) for m in args.matrices]
    return probe.product_experiment(
        factors, args.dim, xis=args.xi or [Ordinal.of(1)], policy=cfg.fundamental_policy(), **_search(cfg, args)
    )


def _probe_inclusion(args, cfg):
    samples = args.samples
    check = probe.inclusion_ratio_check(args.xi, args.set, samples, cfg.fundamental_policy())
    return {"holds": check.holds, "checked": check.checked, "witness": check.witness}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schreierkit", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help=f"config JSON (default: ${CONFIG_ENV})")
    parser.add_argument("--seed", type=int, default=0, help="seed for every stochastic search")
    parser.add_argument("--format", choices=["json", "table"], help="override outputFormat")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    sch = sub.add_parser("schreier", help="Schreier families").add_subparsers(dest="action", required=True)
    p = sch.add_parser("member", help="is a set in S_xi")
    p.add_argument("--xi", type=_ordinal, required=True)
    p.add_argument("--set", type=_finite_set, required=True)
    p.set_defaults(run=_schreier_member)
    p = sch.add_parser("enumerate", help="all members inside [1..universe]")
    p.add_argument("--xi", type=_ordinal, required=True)
    p.add_argument("--universe", type=int, required=True)
    p.set_defaults(run=_schreier_enumerate)

    tree = sub.add_parser("tree", help="tree ranks").add_subparsers(dest="action", required=True)
    p = tree.add_parser("rank", help="rank of the tree of S_xi inside [1..universe]")
    p.add_argument("--xi", type=_ordinal, required=True)
    p.add_argument("--universe", type=int, required=True)
    p.set_defaults(run=_tree_rank)
    p = tree.add_parser("embed", help="monotone map between two trees given as node lists")
    p.add_argument("--source", type=_json_arg, required=True)
    p.add_argument("--target", type=_json_arg, required=True)
    p.set_defaults(run=_tree_embed)

    p = sub.add_parser("norm", help="exact norm with a norming functional")
    p.add_argument("--xi", type=_ordinal, default=Ordinal.of(1))
    p.add_argument("--theta", type=_rational, default=Fraction(1, 2))
    p.add_argument("--vector", required=True, help='JSON object, e.g. {"2":"1","3":"1/2"}')
    p.set_defaults(run=_norm)

    p = sub.add_parser("avg", help="verified repeated average")
    p.add_argument("--alpha", type=_ordinal, required=True)
    p.add_argument("--beta", type=_ordinal, required=True)
    p.add_argument("--eps", type=_rational, required=True)
    p.add_argument("--subsequence", type=_subsequence)
    p.add_argument("--measure", choices=["subsequence", "values"], default="subsequence")
    p.set_defaults(run=_avg)

    p = sub.add_parser("claim1", help="convex combination of unit vectors with small norm")
    p.add_argument("--xi", type=_ordinal, default=Ordinal.of(1))
    p.add_argument("--eta", type=_rational, required=True)
    p.add_argument("--theta", type=_rational, default=Fraction(1, 2))
    p.set_defaults(run=_claim1)

    pr = sub.add_parser("probe", help="restricted gains of matrices").add_subparsers(dest="action", required=True)
    p = pr.add_parser("singularity", help="S_xi-singularity constant")
    p.add_argument("--xi", type=_ordinal, default=Ordinal.of(1))
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--matrix", type=_json_arg, required=True, help="JSON or @file.json")
    p.add_argument("--norm", choices=["euclidean", "tsirelson"], default="euclidean")
    p.set_defaults(run=_probe_singularity)
    p = pr.add_parser("product", help="approximation errors and singularity of a product")
    p.add_argument("--matrices", type=_json_arg, nargs="+", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--xi", type=_ordinal, action="append")
    p.set_defaults(run=_probe_product)
    p = pr.add_parser("inclusion", help="the xi and xi*omega norms agree on span{e_i : i in F}")
    p.add_argument("--xi", type=_ordinal, default=Ordinal.of(1))
    p.add_argument("--set", type=_finite_set, required=True)
    p.add_argument("--samples", type=_json_arg, required=True, help="JSON list of coefficient lists")
    p.set_defaults(run=_probe_inclusion)
    return parser


def _table(report, prefix: str = "") -> list[str]:
    if isinstance(report, dict):
        lines = []
        for key in sorted(report):
            lines.extend(_table(report[key], f"{prefix}{key}."))
        return lines
    return [f"{prefix.rstrip('.')}\t{json.dumps(report, sort_keys=True)}"]


def render(report, fmt: str) -> str:
    if fmt == "table":
        return "\n".join(_table(report))
    return json.dumps(report, sort_keys=True, indent=2)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = Config.load(args.config)
        report = args.run(args, cfg)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SchreierKitError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(render(report, args.format or cfg.outputFormat))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
