"""Command-line interface.

Exit codes: 0 success, 1 algebras not isomorphic (``iso``), 2 a verification
check failed, 3 a search or enumeration budget was exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import signal
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from dataclasses import field as dc_field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import jsonschema

from . import catalog
from .algebra import (
    EvolutionAlgebra,
    annihilator,
    fingerprint,
    is_nilpotent,
    nilpotency_index,
    power_chain,
)
from .classify import METHODS, SCHEMA_VERSION, ClassCatalog, full_catalog, match_algebras, verify_level
from .cocycle import CocycleMatrix, compute_spaces, decompose, extend, is_admissible
from .errors import BudgetExceededError, NilevoError, UnsupportedFieldError
from .field import Field
from .linalg import Subspace
from .oracle import check_budget, iso_check, oracle_classify
from .schemas import validate
from .search import DEFAULT_NODE_BUDGET

log = logging.getLogger("nilevo")

EXIT_OK = 0
EXIT_NOT_ISOMORPHIC = 1
EXIT_VERIFY_FAILED = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64

SUITES = ("table2", "table3", "table4", "dim4-closed", "dim4-real", "oracle")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Everything that determines a run; embedded in every report."""

    command: str
    field: Optional[str] = None
    min_dim: int = 1
    max_dim: Optional[int] = None
    node_budget: int = DEFAULT_NODE_BUDGET
    time_limit: Optional[float] = None
    out: Optional[str] = None
    threads: int = 1
    big: bool = False
    options: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        return cls(**data)

    def parsed_field(self) -> Field:
        if self.field is None:
            raise UsageError("--field is required")
        try:
            F = Field.parse(self.field)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        return F


def _finite_field(config: RunConfig) -> Field:
    F = config.parsed_field()
    if not F.is_finite:
        raise UsageError(f"{F} is not supported here: this command needs a finite field gf:<p>")
    return F


def _report(kind: str, config: RunConfig, ok: bool, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "config": config.to_json(),
        "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "ok": ok,
        "result": result,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _write(path: Optional[str], report: dict) -> None:
    if path:
        Path(path).write_text(dumps_report(report))
        log.info("wrote %s", path)


def read_json(path: str, schema: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        validate(data, schema)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"{path} is not a valid {schema} file: {exc.message}") from exc
    return data


def read_algebra(path: str) -> EvolutionAlgebra:
    try:
        return EvolutionAlgebra.from_json(read_json(path, "algebra"))
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def read_report(path: str, kind: Optional[str] = None) -> dict:
    data = read_json(path, "report")
    if data["schema_version"] != SCHEMA_VERSION:
        raise UsageError(f"{path} has schema version {data['schema_version']}, this build reads {SCHEMA_VERSION}")
    if kind and data["kind"] != kind:
        raise UsageError(f"{path} is a {data['kind']} report, expected {kind}")
    return data


@contextmanager
def time_limit(seconds: Optional[float]):
    """Raise BudgetExceededError when the wall-clock limit passes (POSIX only)."""
    if not seconds:
        yield
        return

    def _expire(signum, frame):
        raise BudgetExceededError(f"time limit of {seconds} s exceeded")

    old = signal.signal(signal.SIGALRM, _expire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# ---------------------------------------------------------------- commands

def cmd_classify(config: RunConfig) -> int:
    F = _finite_field(config)
    max_dim = config.max_dim or 3
    method = config.options.get("method", "frames")
    cat = full_catalog(F, max_dim, method=method, threads=config.threads,
                       budget=config.node_budget, verify=not config.options.get("no_verify", False))
    for n in sorted(cat.levels):
        print(f"dim {n}: {len(cat.levels[n])} classes")
        for e in cat.levels[n]:
            origin = {"base": "base case", "sum": f"{e.base} + E1.1"}.get(e.kind, f"extension of {e.base}, s={e.s}")
            print(f"  {e.label:7} {e.algebra.table():50}  [{origin}]")
    failed = [k for k, v in cat.flags.items() if not v]
    for k in failed:
        print(f"verification failed: {k}")
    _write(config.out, _report("classify", config, not failed, cat.to_json()))
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def cmd_oracle(config: RunConfig) -> int:
    F = _finite_field(config)
    dim = config.max_dim or 3
    opts = config.options
    check_budget(F, dim, config.big)
    ckpt = opts.get("checkpoint")
    if opts.get("resume") and not ckpt:
        ckpt = f"{config.out}.ckpt" if config.out else None
        if ckpt is None:
            raise UsageError("--resume needs --checkpoint or --out")
    res = oracle_classify(
        F, dim, big=config.big, naive=opts.get("naive", False), shuffle_seed=opts.get("shuffle_seed"),
        threads=config.threads, budget=config.node_budget,
        checkpoint=Path(ckpt) if ckpt else None, checkpoint_every=opts.get("checkpoint_every", 5000),
        resume=opts.get("resume", False),
        progress=lambda pos: log.info("checkpoint at candidate %d", pos),
    )
    print(f"{res.nilpotent_count} nilpotent structure matrices over {F} in dim {dim}: {res.count} classes")
    for E, size in zip(res.representatives, res.class_sizes):
        print(f"  {E.table():50}  ({size} matrices)")
    result = {
        "field": str(F),
        "dim": dim,
        "count": res.count,
        "nilpotent_count": res.nilpotent_count,
        "classes": [{"algebra": E.to_json(), "size": s} for E, s in zip(res.representatives, res.class_sizes)],
        "stats": res.stats,
    }
    _write(config.out, _report("oracle", config, True, result))
    return EXIT_OK


def cmd_iso(config: RunConfig) -> int:
    a, b = (read_algebra(p) for p in config.options["files"])
    if a.field != b.field:
        raise UsageError(f"algebras live over {a.field} and {b.field}")
    if a.dim != b.dim:
        print(f"not isomorphic: dimensions {a.dim} and {b.dim}")
        return EXIT_NOT_ISOMORPHIC
    cert = iso_check(a, b, budget=config.node_budget)
    if cert is None:
        print("not isomorphic")
        return EXIT_NOT_ISOMORPHIC
    print("isomorphic; basis change (column i is the image of e_i):")
    for row in cert.to_json(a.field):
        print("  " + " ".join(f"{x:>3}" for x in row))
    _write(config.out, _report("verify", config, True, {"certificate": cert.to_json(a.field)}))
    return EXIT_OK


def info_lines(E: EvolutionAlgebra) -> list[str]:
    F = E.field
    ann = annihilator(E)
    chain = [S.dim for S in power_chain(E)]
    lines = [
        f"field: {F}",
        f"dim: {E.dim}",
        f"products: {E.table()}",
        f"ann: <{', '.join(f'e{i + 1}' for i in ann.indices)}> (dim {len(ann.indices)})",
        f"power chain dims: {chain}",
        f"nilpotent: {is_nilpotent(E)}",
        f"nilpotency index: {nilpotency_index(E)}",
    ]
    spaces = compute_spaces(E)
    lines.append(f"dim B: {spaces.dim_b}, dim H: {spaces.dim_h}")
    lines.append(f"H coordinates: <{', '.join(f'd{i + 1}{i + 1}' for i in spaces.complement)}>")
    if F.is_finite:
        lines.append(f"fingerprint: {tuple(fingerprint(E))}")
    return lines


def cmd_info(config: RunConfig) -> int:
    E = read_algebra(config.options["files"][0])
    for line in info_lines(E):
        print(line)
    return EXIT_OK


def cmd_extend(config: RunConfig) -> int:
    path_e, path_c = config.options["files"]
    E = read_algebra(path_e)
    data = read_json(path_c, "cocycle")
    theta = CocycleMatrix.from_json(data, E.field)
    if theta.base_dim != E.dim:
        raise UsageError(f"cocycle is defined on dim {theta.base_dim}, algebra has dim {E.dim}")
    ok, reason = is_admissible(E, compute_spaces(E), theta)
    ext = extend(E, theta)
    print(ext.table())
    if not ok:
        print(f"note: cocycle is not admissible ({reason}); the extension has an annihilator component"
              if reason == "dependent" else f"note: cocycle is not admissible ({reason})")
    if config.out:
        Path(config.out).write_text(json.dumps(ext.to_json(), indent=2) + "\n")
    return EXIT_OK


def cmd_decompose(config: RunConfig) -> int:
    E = read_algebra(config.options["files"][0])
    try:
        d = decompose(E)
    except ValueError as exc:
        raise UsageError(f"cannot decompose: {exc}") from exc
    print(f"quotient E/ann(E): {d.quotient.table()}")
    print(f"cocycle columns: {[list(map(E.field.to_str, c)) for c in d.cocycle.cols]}")
    print("certificate (extension -> E):")
    for row in d.certificate.to_json(E.field):
        print("  " + " ".join(f"{x:>3}" for x in row))
    result = {"quotient": d.quotient.to_json(), "cocycle": d.cocycle.to_json(),
              "certificate": d.certificate.to_json(E.field)}
    _write(config.out, _report("verify", config, True, result))
    return EXIT_OK


def _suite_tables(F: Field, source: str, dim: int, cat: ClassCatalog) -> tuple[bool, dict]:
    rep = catalog.match(cat, source)
    for line in rep.lines():
        print("  " + line)
    meta_ok = True
    entries = {e.label: e for e in catalog.load(source)}
    for inst in catalog.instantiate(source, F):
        entry = entries[inst.label]
        spaces = compute_spaces(inst.algebra)
        ann_ok = annihilator(inst.algebra).indices == tuple(i - 1 for i in entry.meta["ann"])
        b_ok = spaces.b_space() == Subspace.span(F, dim, entry.expected_b_basis(F, inst.alpha))
        h_ok = spaces.dim_h == entry.meta["h_dim"]
        print(f"  {inst.name}: ann {'ok' if ann_ok else 'MISMATCH'}, B {'ok' if b_ok else 'MISMATCH'}, "
              f"dim H {spaces.dim_h} {'ok' if h_ok else 'MISMATCH'}")
        meta_ok &= ann_ok and b_ok and h_ok
    print(f"dim {dim}: {len(rep.names)} catalog algebras, {len(rep.class_labels)} computed classes, "
          f"bijection {rep.bijection}")
    return rep.bijection and meta_ok, rep.to_json()


def cmd_verify(config: RunConfig) -> int:
    opts = config.options
    if opts.get("report"):
        return _verify_report(opts["report"])
    suite = opts.get("suite")
    if suite is None:
        raise UsageError("verify needs --suite or --report")
    F = _finite_field(config)
    budget = config.node_budget
    method = opts.get("method", "frames")
    if suite == "table4":
        cat = full_catalog(F, 3, method=method, budget=budget, verify=False)
        expected, computed = catalog.expected_count_dim3(F), len(cat.entries(3))
        print(f"dim 3: expected {expected}, computed {computed}")
        ok, result = expected == computed, {"expected": expected, "computed": computed}
    elif suite in ("table2", "table3"):
        dim = int(suite[-1])
        cat = full_catalog(F, dim, method=method, budget=budget, verify=False)
        ok, result = _suite_tables(F, f"table-{dim}", dim, cat)
    elif suite in ("dim4-closed", "dim4-real"):
        cat = full_catalog(F, 4, method=method, threads=config.threads, budget=budget, verify=False)
        rep = catalog.match(cat, "theorem-" + suite)
        for line in rep.lines():
            print("  " + line)
        print(f"dim 4: {len(rep.names)} catalog algebras, {len(rep.class_labels)} computed classes, "
              f"each algebra in exactly one class: {rep.complete}")
        ok, result = rep.complete, rep.to_json()
    elif suite == "oracle":
        max_dim = config.max_dim or 3
        cat = full_catalog(F, max_dim, method=method, threads=config.threads, budget=budget, verify=False)
        ok, result = True, {}
        for n in range(config.min_dim, max_dim + 1):
            res = oracle_classify(F, n, big=config.big, threads=config.threads, budget=budget)
            m = match_algebras(res.representatives, cat.algebras(n), budget)
            print(f"dim {n}: oracle {res.count}, classify {len(cat.entries(n))}, bijection {m.bijection}")
            ok &= m.bijection
            result[str(n)] = {"oracle": res.count, "classify": len(cat.entries(n)), "bijection": m.bijection}
    else:
        raise UsageError(f"unknown suite {suite}")
    print("PASS" if ok else "FAIL")
    _write(config.out, _report("verify", config, ok, {"suite": suite, **result}))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _verify_report(path: str) -> int:
    data = read_report(path, "classify")
    cat = ClassCatalog.from_json(data["result"])
    failed = []
    for n in sorted(cat.levels):
        for name, ok in verify_level(cat.levels[n]).items():
            if not ok:
                failed.append(f"dim{n}.{name}")
        print(f"dim {n}: {len(cat.levels[n])} classes rechecked")
    stored = [k for k, v in cat.flags.items() if not v]
    for k in failed + stored:
        print(f"verification failed: {k}")
    print("PASS" if not (failed or stored) else "FAIL")
    return EXIT_VERIFY_FAILED if failed or stored else EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "oracle": cmd_oracle,
    "iso": cmd_iso,
    "info": cmd_info,
    "extend": cmd_extend,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nilevo", description="Nilpotent evolution algebras over small fields.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, dims=True):
        p.add_argument("--field", help="gf:<p> or q")
        if dims:
            p.add_argument("--min-dim", type=int, default=1)
            p.add_argument("--max-dim", type=int)
        p.add_argument("--out", help="write a JSON report here")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET,
                       help="cap on backtracking nodes per search")
        p.add_argument("--time-limit", type=float, help="wall-clock limit in seconds")
        p.add_argument("--big", action="store_true", help="allow oracle runs outside the default budget")

    p = sub.add_parser("classify", help="build the class lists dimension by dimension")
    common(p)
    p.add_argument("--method", choices=METHODS, default="frames")
    p.add_argument("--no-verify", action="store_true", help="skip the structural checks")

    p = sub.add_parser("oracle", help="brute-force classes of one dimension")
    common(p)
    p.add_argument("--dim", type=int, help="same as --max-dim")
    p.add_argument("--naive", action="store_true", help="walk all p^(n^2) matrices")
    p.add_argument("--shuffle-seed", type=int)
    p.add_argument("--checkpoint", help="sidecar file for progress")
    p.add_argument("--checkpoint-every", type=int, default=5000)
    p.add_argument("--resume", action="store_true")

    p = sub.add_parser("iso", help="decide isomorphism of two algebra files")
    p.add_argument("files", nargs=2)
    common(p, dims=False)

    p = sub.add_parser("info", help="invariants of an algebra file")
    p.add_argument("files", nargs=1)

    p = sub.add_parser("extend", help="annihilator extension of an algebra by a cocycle")
    p.add_argument("files", nargs=2, metavar=("ALGEBRA", "COCYCLE"))
    p.add_argument("--out")

    p = sub.add_parser("decompose", help="write an algebra as an extension of E/ann(E)")
    p.add_argument("files", nargs=1)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run a verification suite or recheck a classify report")
    common(p)
    p.add_argument("--suite", choices=SUITES)
    p.add_argument("--report", help="recheck a classify report")
    p.add_argument("--method", choices=METHODS, default="frames")
    return parser


_CONFIG_KEYS = {"command", "field", "min_dim", "max_dim", "node_budget", "time_limit", "out", "threads", "big"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None and k != "verbose"}
    if values.get("dim") is not None:
        values["max_dim"] = values.pop("dim")
    base = {k: v for k, v in values.items() if k in _CONFIG_KEYS}
    options = {k: v for k, v in values.items() if k not in _CONFIG_KEYS}
    return RunConfig(**base, options=options)


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    config = config_from_args(args)
    try:
        if config.threads < 1:
            raise UsageError("--threads must be positive")
        with time_limit(config.time_limit):
            return COMMANDS[config.command](config)
    except UsageError as exc:
        print(f"nilevo {config.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnsupportedFieldError as exc:
        print(f"nilevo {config.command}: unsupported field: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"nilevo {config.command}: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NilevoError as exc:
        print(f"nilevo {config.command}: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
